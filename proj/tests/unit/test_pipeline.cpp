#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "platekit/config.hpp"
#include "platekit/errors.hpp"
#include "platekit/pipeline.hpp"
#include "testutil.hpp"

using namespace platekit;
namespace fs = std::filesystem;

namespace {

int64_t line_count(const std::string& text) {
    int64_t n = 0;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++n;
    }
    return n;
}

RunConfig tiny_synth_config(const std::string& out, const std::vector<std::string>& classes,
                            int plates) {
    RunConfig cfg;
    cfg.classes = classes;
    cfg.out = out;
    cfg.seed = 7;
    cfg.synth_plates = plates;
    cfg.synth_width = 448;
    cfg.synth_height = 320;
    cfg.synth_min_cells = 8;
    cfg.synth_max_cells = 12;
    cfg.synth_min_radius = 6.0;
    cfg.synth_max_radius = 12.0;
    return cfg;
}

} // namespace

TEST_CASE("full pipeline round trip on synthetic plates") {
    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    const std::string work = tmp.str() + "/work";
    std::ostringstream log;

    // Generate two classes, five wells each.
    run_synth(tiny_synth_config(synth_dir, {"ER", "M"}, 5), log);
    CHECK(fs::exists(synth_dir + "/manifest.csv"));
    CHECK(fs::exists(synth_dir + "/images/plate1_A1_bf.png"));
    CHECK(fs::exists(synth_dir + "/images/plate2_A5_gfp.png"));
    CHECK(fs::exists(synth_dir + "/masks/plate1_A1.png"));
    CHECK(line_count(testutil::slurp(synth_dir + "/manifest.csv")) == 11); // header + 10

    RunConfig cfg;
    cfg.manifest = synth_dir + "/manifest.csv";
    cfg.classes = {"ER", "M"};
    cfg.out = work;
    cfg.mask_dir = synth_dir + "/masks";
    cfg.quadrants = true;
    cfg.folds = 2;
    cfg.fold = 0;
    cfg.valid_frac = 0.25;
    cfg.seed = 7;
    cfg.jobs = 2;

    // Merge channels into composites.
    run_merge(cfg, log);
    for (int plate = 1; plate <= 2; ++plate) {
        for (int i = 1; i <= 5; ++i) {
            CHECK(fs::exists(work + "/composites/plate" + std::to_string(plate) + "_A" +
                             std::to_string(i) + ".png"));
        }
    }

    // Import masks to weak labels.
    run_import_masks(cfg, log);
    CHECK(fs::exists(work + "/composites/plate1_A1.txt"));
    const auto stats = nlohmann::json::parse(testutil::slurp(work + "/import_stats.json"));
    CHECK(stats["images"] == 10);
    CHECK(stats["missing_masks"].empty());
    const int64_t instances = stats["instances"].get<int64_t>();
    const int64_t kept = stats["kept"].get<int64_t>();
    CHECK(instances == kept + stats["dropped_min_area"].get<int64_t>() +
                           stats["dropped_max_area"].get<int64_t>());
    // Disjoint synthetic cells of this size all survive the default filters.
    CHECK(kept == instances);
    CHECK(kept >= 8 * 10);
    int64_t per_image_sum = 0;
    for (const auto& [stem, v] : stats["per_image"].items()) per_image_sum += v.get<int64_t>();
    CHECK(per_image_sum == kept);

    // Tile into quadrants.
    run_tile(cfg, log);
    CHECK(fs::exists(work + "/tiles/plate1_A1_TL.png"));
    CHECK(fs::exists(work + "/tiles/plate1_A1_TL.txt"));
    CHECK(fs::exists(work + "/tiles/plate2_A5_BR.png"));
    const auto tile_report = nlohmann::json::parse(testutil::slurp(work + "/tile_report.json"));
    CHECK(tile_report["clip"] == false);
    CHECK(tile_report["images"] == 10);
    CHECK(tile_report["input_annotations"].get<int64_t>() == kept);
    CHECK(tile_report["input_annotations"].get<int64_t>() ==
          tile_report["kept"].get<int64_t>() + tile_report["straddling"].get<int64_t>());
    int64_t tiles_input = 0, tiles_kept = 0, tiles_straddling = 0;
    for (const auto& [stem, v] : tile_report["per_image"].items()) {
        tiles_input += v["input"].get<int64_t>();
        tiles_kept += v["kept"].get<int64_t>();
        tiles_straddling += v["straddling"].get<int64_t>();
        CHECK(v["input"].get<int64_t>() ==
              v["kept"].get<int64_t>() + v["straddling"].get<int64_t>());
    }
    CHECK(tiles_input == tile_report["input_annotations"].get<int64_t>());
    CHECK(tiles_kept == tile_report["kept"].get<int64_t>());
    CHECK(tiles_straddling == tile_report["straddling"].get<int64_t>());

    // Build one fold's dataset bundle.
    run_build(cfg, log);
    const std::string fold_dir = work + "/dataset/fold0";
    for (const char* f : {"classes.names", "dataset.data", "train.txt", "valid.txt", "test.txt"}) {
        CHECK(fs::exists(fold_dir + "/" + f));
    }
    const std::string train = testutil::slurp(fold_dir + "/train.txt");
    const std::string valid = testutil::slurp(fold_dir + "/valid.txt");
    const std::string test = testutil::slurp(fold_dir + "/test.txt");
    CHECK(line_count(train) + line_count(valid) + line_count(test) == 40);
    CHECK(line_count(test) > 0);
    CHECK(line_count(valid) > 0);
    {
        std::stringstream in(test);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) CHECK(fs::exists(line));
        }
    }
    CHECK(testutil::slurp(fold_dir + "/classes.names") == "ER\nM\n");

    // Rebuilding is byte-identical.
    run_build(cfg, log);
    CHECK(testutil::slurp(fold_dir + "/train.txt") == train);
    CHECK(testutil::slurp(fold_dir + "/test.txt") == test);

    // Noise-free mock detections for the test list.
    RunConfig mock_cfg;
    mock_cfg.classes = {"ER", "M"};
    mock_cfg.mock = true;
    mock_cfg.list = fold_dir + "/test.txt";
    mock_cfg.out = tmp.str() + "/mockdet";
    mock_cfg.seed = 7;
    run_synth(mock_cfg, log);
    const std::string det_path = tmp.str() + "/mockdet/detections.json";
    CHECK(fs::exists(det_path));

    // Evaluate: a perfect detector scores perfectly.
    RunConfig eval_cfg;
    eval_cfg.classes = {"ER", "M"};
    eval_cfg.list = fold_dir + "/test.txt";
    eval_cfg.detections = det_path;
    eval_cfg.out = tmp.str() + "/evalout";
    eval_cfg.overlay_count = 2;
    run_eval(eval_cfg, log);

    const auto report =
        nlohmann::json::parse(testutil::slurp(tmp.str() + "/evalout/eval/report.json"));
    CHECK(report["counts"]["gt"].get<int64_t>() > 0);
    CHECK(report["counts"]["gt"] == report["counts"]["matched"]);
    CHECK(std::abs(report["map"].get<double>() - 1.0) < 1e-9);
    CHECK(report["metrics"]["accuracy"] == 1.0);
    CHECK(report["metrics"]["unmatched_gt"] == 0);
    CHECK(report["metrics"]["unmatched_det"] == 0);
    CHECK(report["votes"]["accuracy"] == 1.0);
    CHECK(report["votes"]["no_vote_count"] == 0);
    for (const char* f : {"metrics.txt", "confusion.txt", "summary.txt"}) {
        CHECK(fs::exists(tmp.str() + "/evalout/eval/" + f));
    }
    int overlays = 0;
    for (const auto& entry : fs::directory_iterator(tmp.str() + "/evalout/eval/overlays")) {
        (void)entry;
        ++overlays;
    }
    CHECK(overlays == 2);

    // Cross-validation with the zero-noise mock detector: all folds perfect,
    // and the whole run is reproducible byte for byte.
    RunConfig cv_cfg = cfg;
    cv_cfg.mock = true;
    run_crossval(cv_cfg, log);
    const std::string cv_dir = work + "/crossval";
    const std::string metrics_first = testutil::slurp(cv_dir + "/metrics.txt");
    const std::string summary_first = testutil::slurp(cv_dir + "/summary.json");
    CHECK(metrics_first.find("AVG\t1.000\t1.000\t1.000\t1.000\n") != std::string::npos);
    const auto summary = nlohmann::json::parse(summary_first);
    CHECK(summary["folds"] == 2);
    REQUIRE(summary["per_fold"].size() == 2);
    for (const auto& fj : summary["per_fold"]) {
        CHECK(fj["test_images"].get<int64_t>() > 0);
        CHECK(std::abs(fj["map"].get<double>() - 1.0) < 1e-9);
        CHECK(fj["metrics"]["accuracy"] == 1.0);
    }
    CHECK(summary["avg"]["accuracy"] == 1.0);
    CHECK(std::abs(summary["map_mean"].get<double>() - 1.0) < 1e-9);
    CHECK(fs::exists(cv_dir + "/fold0/detections.json"));
    CHECK(fs::exists(cv_dir + "/fold1/report.json"));

    run_crossval(cv_cfg, log);
    CHECK(testutil::slurp(cv_dir + "/metrics.txt") == metrics_first);
    CHECK(testutil::slurp(cv_dir + "/summary.json") == summary_first);
}

TEST_CASE("run_import_masks: missing masks fail after reporting the rest") {
    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    const std::string work = tmp.str() + "/work";
    std::ostringstream log;
    run_synth(tiny_synth_config(synth_dir, {"ER"}, 2), log);

    RunConfig cfg;
    cfg.manifest = synth_dir + "/manifest.csv";
    cfg.out = work;
    cfg.mask_dir = synth_dir + "/masks";
    run_merge(cfg, log);

    fs::remove(synth_dir + "/masks/plate1_A2.png");
    try {
        run_import_masks(cfg, log);
        FAIL("expected throw");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("mask file(s) missing") != std::string::npos);
    }
    // The survivor was still processed and the stats were still written.
    CHECK(fs::exists(work + "/composites/plate1_A1.txt"));
    CHECK(!fs::exists(work + "/composites/plate1_A2.txt"));
    const auto stats = nlohmann::json::parse(testutil::slurp(work + "/import_stats.json"));
    CHECK(stats["images"] == 1);
    REQUIRE(stats["missing_masks"].size() == 1);
    const std::string missing = stats["missing_masks"][0].get<std::string>();
    CHECK(missing.find("plate1_A2.png") != std::string::npos);
}

TEST_CASE("run_merge: unreadable channel names the record") {
    testutil::TempDir tmp;
    testutil::spit(tmp.file("manifest.csv"),
                   "plate,well,class,bf_path,gfp_path\n"
                   "3,B7,ER,missing_bf.png,missing_gfp.png\n");
    RunConfig cfg;
    cfg.manifest = tmp.file("manifest.csv");
    cfg.out = tmp.str() + "/out";
    std::ostringstream log;
    try {
        run_merge(cfg, log);
        FAIL("expected throw");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("plate3_B7") != std::string::npos);
        CHECK(msg.find("missing_bf.png") != std::string::npos);
    }
}

TEST_CASE("run_tile: composites must exist first") {
    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    std::ostringstream log;
    run_synth(tiny_synth_config(synth_dir, {"ER"}, 2), log);

    RunConfig cfg;
    cfg.manifest = synth_dir + "/manifest.csv";
    cfg.out = tmp.str() + "/work";
    try {
        run_tile(cfg, log);
        FAIL("expected throw");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("run merge first") != std::string::npos);
    }
}

TEST_CASE("run_build: configuration errors") {
    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    std::ostringstream log;
    run_synth(tiny_synth_config(synth_dir, {"ER"}, 4), log);

    RunConfig cfg;
    cfg.manifest = synth_dir + "/manifest.csv";
    cfg.out = tmp.str() + "/work";
    cfg.folds = 2;
    cfg.fold = 5;
    CHECK_THROWS_AS(run_build(cfg, log), ConfigError);

    cfg.fold = 0;
    cfg.classes = {"ER", "Ghost"};
    try {
        run_build(cfg, log);
        FAIL("expected throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("Ghost") != std::string::npos);
    }
}

TEST_CASE("run_eval and run_crossval: required keys") {
    std::ostringstream log;
    RunConfig cfg;
    CHECK_THROWS_AS(run_eval(cfg, log), ConfigError); // no classes
    cfg.classes = {"ER"};
    CHECK_THROWS_AS(run_eval(cfg, log), ConfigError); // no list
    cfg.list = "x.txt";
    CHECK_THROWS_AS(run_eval(cfg, log), ConfigError); // no detections

    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    run_synth(tiny_synth_config(synth_dir, {"ER"}, 2), log);
    RunConfig cv;
    cv.manifest = synth_dir + "/manifest.csv";
    cv.out = tmp.str() + "/work";
    CHECK_THROWS_AS(run_crossval(cv, log), ConfigError); // neither mock nor detections_dir
}

TEST_CASE("run_synth: validation") {
    std::ostringstream log;
    RunConfig cfg;
    cfg.out = "unused";
    CHECK_THROWS_AS(run_synth(cfg, log), ConfigError); // no classes

    cfg.classes.clear();
    for (int i = 0; i < 17; ++i) cfg.classes.push_back("C" + std::to_string(i));
    CHECK_THROWS_AS(run_synth(cfg, log), ConfigError); // too many classes

    cfg.classes = {"A"};
    cfg.mock = true;
    CHECK_THROWS_AS(run_synth(cfg, log), ConfigError); // mock without list

    cfg.mock = false;
    cfg.synth_plates = 0;
    CHECK_THROWS_AS(run_synth(cfg, log), ConfigError);
}

TEST_CASE("load_gt_bundle reads lists verbatim with sibling labels") {
    testutil::TempDir tmp;
    const std::string synth_dir = tmp.str() + "/synth";
    const std::string work = tmp.str() + "/work";
    std::ostringstream log;
    run_synth(tiny_synth_config(synth_dir, {"ER"}, 2), log);

    RunConfig cfg;
    cfg.manifest = synth_dir + "/manifest.csv";
    cfg.out = work;
    cfg.mask_dir = synth_dir + "/masks";
    run_merge(cfg, log);
    run_import_masks(cfg, log);

    const std::string a1 = work + "/composites/plate1_A1.png";
    const std::string a2 = work + "/composites/plate1_A2.png";
    testutil::spit(tmp.file("list.txt"), a1 + "\n\n" + a2 + " \n");

    const ClassSet classes({"ER"});
    const GtBundle gt = load_gt_bundle(tmp.file("list.txt"), classes);
    REQUIRE(gt.images.size() == 2);
    CHECK(gt.images[0].path == a1);
    CHECK(gt.images[1].path == a2); // trailing space stripped
    CHECK(gt.images[0].meta.width == 448);
    CHECK(gt.images[0].meta.height == 320);
    CHECK(gt.images[0].meta.plate_id == 1);
    CHECK(gt.images[0].meta.well == "A1");
    CHECK(!gt.images[0].annos.empty());

    // A list entry with no sibling label file means an image with no objects.
    const std::string bare = work + "/composites/bare.png";
    fs::copy_file(a1, bare);
    testutil::spit(tmp.file("list2.txt"), bare + "\n");
    const GtBundle gt2 = load_gt_bundle(tmp.file("list2.txt"), classes);
    REQUIRE(gt2.images.size() == 1);
    CHECK(gt2.images[0].annos.empty());
    CHECK(gt2.images[0].meta.plate_id == 0); // name carries no plate/well

    CHECK_THROWS_AS(load_gt_bundle(tmp.file("absent.txt"), classes), DataError);
}
