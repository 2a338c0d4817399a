#include <cmath>
#include <random>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "platekit/detadapt.hpp"
#include "platekit/errors.hpp"
#include "testutil.hpp"

using namespace platekit;

namespace {

DetectionFile sample_file() {
    DetectionFile f;
    ImageDetections a;
    a.image = "tiles/plate1_A1_TL.png";
    a.width = 672;
    a.height = 512;
    a.detections = {{2, {0.5, 0.5, 0.074405, 0.078125}, 0.913},
                    {0, {0.25, 0.75, 0.1, 0.2}, 0.25}};
    ImageDetections b;
    b.image = "tiles/plate1_A1_TR.png";
    b.width = 672;
    b.height = 512;
    f.images = {a, b};
    return f;
}

} // namespace

TEST_CASE("quantize_confidence rounds to the 6-decimal grid") {
    CHECK(quantize_confidence(0.9134567891) == doctest::Approx(0.913457).epsilon(1e-12));
    CHECK(quantize_confidence(0.0) == 0.0);
    CHECK(quantize_confidence(1.0) == 1.0);
    CHECK(quantize_confidence(0.1234564) == doctest::Approx(0.123456).epsilon(1e-12));
    // Idempotent.
    for (double c : {0.0, 0.1, 0.33, 0.999999, 1.0}) {
        CHECK(quantize_confidence(quantize_confidence(c)) == quantize_confidence(c));
    }
}

TEST_CASE("write_detections emits the documented schema") {
    const std::string text = write_detections(sample_file());
    const auto root = nlohmann::json::parse(text);
    REQUIRE(root.is_array());
    REQUIRE(root.size() == 2);
    CHECK(root[0]["image"] == "tiles/plate1_A1_TL.png");
    CHECK(root[0]["width"] == 672);
    CHECK(root[0]["height"] == 512);
    REQUIRE(root[0]["detections"].size() == 2);
    CHECK(root[0]["detections"][0]["class_id"] == 2);
    CHECK(root[0]["detections"][0]["confidence"] == doctest::Approx(0.913).epsilon(1e-12));
    CHECK(root[0]["detections"][0]["cx"] == doctest::Approx(0.5).epsilon(1e-12));
    // Image entries with no detections keep an explicit empty array.
    CHECK(root[1]["detections"].is_array());
    CHECK(root[1]["detections"].empty());
    CHECK(text.back() == '\n');
}

TEST_CASE("detections file round trip is byte-stable") {
    testutil::TempDir tmp;
    const ClassSet classes({"ER", "Mitochondria", "Cytosol", "Nucleus"});
    const std::string path = tmp.file("dets.json");

    save_detections(path, sample_file());
    const std::string first = testutil::slurp(path);
    const DetectionFile back = read_detections(path, classes);

    REQUIRE(back.images.size() == 2);
    CHECK(back.images[0].image == "tiles/plate1_A1_TL.png");
    REQUIRE(back.images[0].detections.size() == 2);
    CHECK(back.images[0].detections[0].class_id == 2);
    CHECK(back.images[0].detections[0].box.w == 0.074405);
    CHECK(back.images[1].detections.empty());

    // write(read(write(x))) == write(x)
    save_detections(path, back);
    CHECK(testutil::slurp(path) == first);
}

TEST_CASE("read preserves detection order") {
    DetectionFile f;
    ImageDetections img;
    img.image = "a.png";
    img.width = 10;
    img.height = 10;
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        img.detections.push_back({static_cast<int>(rng() % 2),
                                  testutil::random_norm_box(rng),
                                  quantize_confidence((rng() % 1000) / 1000.0)});
    }
    f.images.push_back(img);
    const ClassSet classes({"A", "B"});
    const DetectionFile back = read_detections_text(write_detections(f), classes, "mem");
    REQUIRE(back.images.size() == 1);
    REQUIRE(back.images[0].detections.size() == img.detections.size());
    for (size_t i = 0; i < img.detections.size(); ++i) {
        CHECK(back.images[0].detections[i].class_id == img.detections[i].class_id);
        CHECK(back.images[0].detections[i].confidence == img.detections[i].confidence);
        CHECK(back.images[0].detections[i].box.cx == img.detections[i].box.cx);
    }
}

TEST_CASE("read_detections_text rejects malformed input") {
    const ClassSet classes({"A", "B"});
    auto read = [&](const std::string& text) {
        return read_detections_text(text, classes, "t.json");
    };

    CHECK_THROWS_AS(read("{"), DataError);
    CHECK_THROWS_AS(read("{\"image\": \"a\"}"), DataError); // not an array

    const std::string entry_head = R"([{"image": "a.png", "width": 672, "height": 512,)";

    // Unknown class id.
    try {
        read(entry_head +
             R"( "detections": [{"class_id": 2, "confidence": 0.5,
                 "cx": 0.5, "cy": 0.5, "w": 0.1, "h": 0.1}]}])");
        FAIL("expected throw");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("t.json") != std::string::npos);
        CHECK(msg.find("a.png") != std::string::npos);
        CHECK(msg.find("class id 2") != std::string::npos);
    }

    // Confidence outside [0,1].
    CHECK_THROWS_AS(read(entry_head +
                         R"( "detections": [{"class_id": 0, "confidence": 1.2,
                             "cx": 0.5, "cy": 0.5, "w": 0.1, "h": 0.1}]}])"),
                    DataError);

    // Box outside the unit square.
    CHECK_THROWS_AS(read(entry_head +
                         R"( "detections": [{"class_id": 0, "confidence": 0.5,
                             "cx": 0.99, "cy": 0.5, "w": 0.1, "h": 0.1}]}])"),
                    DataError);

    // Missing field.
    CHECK_THROWS_AS(read(entry_head +
                         R"( "detections": [{"class_id": 0, "confidence": 0.5,
                             "cx": 0.5, "cy": 0.5, "w": 0.1}]}])"),
                    DataError);

    // Missing detections array.
    CHECK_THROWS_AS(read(R"([{"image": "a.png", "width": 672, "height": 512}])"), DataError);

    // Non-positive dimensions.
    CHECK_THROWS_AS(read(R"([{"image": "a.png", "width": 0, "height": 512,
                              "detections": []}])"),
                    DataError);

    // Duplicate image entry.
    try {
        read(R"([{"image": "a.png", "width": 672, "height": 512, "detections": []},
                 {"image": "a.png", "width": 672, "height": 512, "detections": []}])");
        FAIL("expected throw");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
}

TEST_CASE("read_detections: missing file names the path") {
    const ClassSet classes({"A"});
    try {
        read_detections("/nonexistent/dets.json", classes);
        FAIL("expected throw");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dets.json") != std::string::npos);
    }
}
