#include <cmath>
#include <random>

#include <doctest.h>

#include "platekit/errors.hpp"
#include "platekit/types.hpp"
#include "testutil.hpp"

using namespace platekit;

namespace {

ImageMeta meta_of(int w, int h) {
    ImageMeta m;
    m.width = w;
    m.height = h;
    return m;
}

} // namespace

TEST_CASE("to_norm full frame") {
    const NormBBox n = to_norm({0, 0, 1344, 1024}, meta_of(1344, 1024));
    CHECK(n.cx == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(n.cy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(n.w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.h == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("to_norm worked example on a quadrant-sized image") {
    // (311+386)/(2*672), (231+306)/(2*512), 75/672, 75/512
    const NormBBox n = to_norm({311, 231, 386, 306}, meta_of(672, 512));
    CHECK(std::abs(n.cx - 0.518601) < 1e-6);
    CHECK(std::abs(n.cy - 0.524414) < 1e-6);
    CHECK(std::abs(n.w - 0.111607) < 1e-6);
    CHECK(std::abs(n.h - 0.146484) < 1e-6);
}

TEST_CASE("to_norm top-left quadrant of a full image") {
    const NormBBox n = to_norm({0, 0, 672, 512}, meta_of(1344, 1024));
    CHECK(n.cx == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(n.cy == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(n.w == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(n.h == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("to_norm rejects out-of-bounds boxes naming the coordinate") {
    CHECK_THROWS_AS(to_norm({-5, 0, 10, 10}, meta_of(100, 100)), ValidationError);
    CHECK_THROWS_AS(to_norm({0, 0, 101, 10}, meta_of(100, 100)), ValidationError);
    try {
        to_norm({0, 0, 120, 10}, meta_of(100, 100));
        FAIL("expected throw");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("120") != std::string::npos);
    }
}

TEST_CASE("to_px identity and worked example") {
    const BBoxPx full = to_px({0.5, 0.5, 1.0, 1.0}, meta_of(100, 100));
    CHECK(full.x_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(full.y_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(full.x_max == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(full.y_max == doctest::Approx(100.0).epsilon(1e-12));

    const BBoxPx px = to_px({0.5, 0.5, 0.074405, 0.078125}, meta_of(672, 512));
    CHECK(std::abs(px.x_min - 311.0) < 1e-3);
    CHECK(std::abs(px.y_min - 236.0) < 1e-3);
    CHECK(std::abs(px.x_max - 361.0) < 1e-3);
    CHECK(std::abs(px.y_max - 276.0) < 1e-3);
}

TEST_CASE("to_px rejects degenerate boxes") {
    CHECK_THROWS_AS(to_px({0.5, 0.5, 0.0, 0.1}, meta_of(100, 100)), ValidationError);
    CHECK_THROWS_AS(to_px({0.5, 0.5, 0.1, -0.2}, meta_of(100, 100)), ValidationError);
}

TEST_CASE("px <-> norm round trip within 1e-6 of a dimension") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 1000; ++rep) {
        const int w = 64 + static_cast<int>(rng() % 2000);
        const int h = 64 + static_cast<int>(rng() % 2000);
        const ImageMeta meta = meta_of(w, h);
        const BBoxPx box = testutil::random_px_box(rng, w, h);
        const BBoxPx back = to_px(to_norm(box, meta), meta);
        CHECK(std::abs(back.x_min - box.x_min) < 1e-6 * w);
        CHECK(std::abs(back.x_max - box.x_max) < 1e-6 * w);
        CHECK(std::abs(back.y_min - box.y_min) < 1e-6 * h);
        CHECK(std::abs(back.y_max - box.y_max) < 1e-6 * h);
    }
}

TEST_CASE("iou examples") {
    CHECK(iou(BBoxPx{10, 10, 20, 20}, BBoxPx{10, 10, 20, 20}) == doctest::Approx(1.0));
    CHECK(iou(BBoxPx{0, 0, 2, 2}, BBoxPx{1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(iou(BBoxPx{0, 0, 1, 1}, BBoxPx{5, 5, 6, 6}) == 0.0);
}

TEST_CASE("iou properties: range, symmetry, self-identity, empty-intersection zero") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 500; ++rep) {
        const BBoxPx a = testutil::random_px_box(rng, 100, 100);
        const BBoxPx b = testutil::random_px_box(rng, 100, 100);
        const double ab = iou(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-12);
        CHECK(ab == doctest::Approx(iou(b, a)).epsilon(1e-12));
        CHECK(iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
        const bool disjoint = a.x_max <= b.x_min || b.x_max <= a.x_min ||
                              a.y_max <= b.y_min || b.y_max <= a.y_min;
        if (disjoint) CHECK(ab == 0.0);
        if (ab == 0.0) CHECK(disjoint);
    }
}

TEST_CASE("normalized iou matches pixel iou on the same image") {
    std::mt19937_64 rng(29);
    const ImageMeta meta = meta_of(640, 480);
    for (int rep = 0; rep < 200; ++rep) {
        const BBoxPx a = testutil::random_px_box(rng, 640, 480);
        const BBoxPx b = testutil::random_px_box(rng, 640, 480);
        CHECK(iou(to_norm(a, meta), to_norm(b, meta)) ==
              doctest::Approx(iou(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("validate_norm boundary rules") {
    CHECK_NOTHROW(validate_norm({0.5, 0.5, 1.0, 1.0}));
    CHECK_NOTHROW(validate_norm({0.5 + 0.5e-6, 0.5, 1.0, 1.0})); // within eps slack
    CHECK_THROWS_AS(validate_norm({0.5, 0.5, 0.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(validate_norm({0.5, 0.5, 1.1, 0.5}), ValidationError);
    CHECK_THROWS_AS(validate_norm({0.6, 0.5, 1.0, 1.0}), ValidationError);
}

TEST_CASE("ClassSet basics") {
    const ClassSet classes({"ER", "Mitochondria", "Cytosol", "Nucleus"});
    CHECK(classes.size() == 4);
    CHECK(classes.name(1) == "Mitochondria");
    CHECK(classes.find("Nucleus") == 3);
    CHECK(!classes.find("Vacuole").has_value());
    CHECK(classes.contains("ER"));
    CHECK_THROWS_AS(classes.name(4), ValidationError);

    CHECK_THROWS_AS(ClassSet(std::vector<std::string>{}), ValidationError);
    CHECK_THROWS_AS(ClassSet({"A", ""}), ValidationError);
    CHECK_THROWS_AS(ClassSet({"A", "B", "A"}), ValidationError);
}

TEST_CASE("quadrant names round-trip") {
    for (Quadrant q : {Quadrant::TL, Quadrant::TR, Quadrant::BL, Quadrant::BR})
        CHECK(quadrant_from_name(quadrant_name(q)) == q);
    CHECK(!quadrant_from_name("XX").has_value());
}
