#include <string>

#include <doctest.h>
#include <json.hpp>

#include "platekit/evalkit.hpp"

using namespace platekit;

namespace {

MetricsBlock uniform_metrics(double v) {
    MetricsBlock m;
    m.defined = true;
    m.micro_precision = v;
    m.micro_recall = v;
    m.micro_f1 = v;
    m.accuracy = v;
    m.macro_precision = v;
    m.macro_recall = v;
    m.macro_f1 = v;
    m.matched_total = 100;
    return m;
}

EvalReport sample_report() {
    EvalReport r;
    r.gt_count = 6;
    r.det_count = 7;
    r.matched_count = 6;
    r.per_class_ap = {{"ER", 1.0}, {"M", 0.75}};
    r.map = 0.875;
    r.map_defined = true;

    Contingency c(2);
    c.add(0, 0, 4);
    c.add(1, 1, 1);
    c.add(1, 0, 1);
    r.metrics = metrics_from_contingency(c, 0, 1);
    r.confusion = confusion_from_contingency(c, ClassSet({"ER", "M"}));

    r.votes.push_back({1, "A1", 0, 0, true});
    r.votes.push_back({1, "B2", 1, std::nullopt, false});
    r.no_vote_count = 1;
    r.vote_accuracy = 1.0;
    r.vote_accuracy_defined = true;

    r.extra_images = {"tiles/plate9_Z9_TL.png"};
    r.footnotes = {"first note", "second note"};
    return r;
}

} // namespace

TEST_CASE("metrics_table renders fixed three-decimal rows") {
    std::vector<MetricsRow> rows;
    rows.push_back(metrics_row("1", uniform_metrics(0.985)));
    MetricsBlock undefined_block;
    rows.push_back(metrics_row("2", undefined_block));

    const std::string expect = "Fold\tPrecision\tRecall\tF1\tAccuracy\n"
                               "1\t0.985\t0.985\t0.985\t0.985\n"
                               "2\t-\t-\t-\t-\n"
                               "AVG\t0.985\t0.985\t0.985\t0.985\n";
    CHECK(metrics_table(rows, true) == expect);

    // Without the average row.
    const std::string no_avg = metrics_table(rows, false);
    CHECK(no_avg.find("AVG") == std::string::npos);
}

TEST_CASE("metrics_table averages only the defined rows") {
    std::vector<MetricsRow> rows;
    rows.push_back(metrics_row("1", uniform_metrics(0.9)));
    rows.push_back(metrics_row("2", uniform_metrics(1.0)));
    MetricsBlock undefined_block;
    rows.push_back(metrics_row("3", undefined_block));

    const std::string table = metrics_table(rows, true);
    CHECK(table.find("AVG\t0.950\t0.950\t0.950\t0.950\n") != std::string::npos);
}

TEST_CASE("metrics_table: five equal folds average to themselves") {
    std::vector<MetricsRow> rows;
    for (int i = 1; i <= 5; ++i) {
        rows.push_back(metrics_row(std::to_string(i), uniform_metrics(0.985)));
    }
    const std::string table = metrics_table(rows, true);
    CHECK(table.find("AVG\t0.985\t0.985\t0.985\t0.985\n") != std::string::npos);
}

TEST_CASE("metrics_table: all rows undefined leaves no average") {
    MetricsBlock undefined_block;
    const std::string table = metrics_table({metrics_row("1", undefined_block)}, true);
    CHECK(table == "Fold\tPrecision\tRecall\tF1\tAccuracy\n1\t-\t-\t-\t-\n");
}

TEST_CASE("confusion_table renders normalized rows, dashes when unsupported") {
    Contingency c(2);
    c.add(0, 0, 931);
    c.add(0, 1, 69);
    const ConfusionMatrix cm = confusion_from_contingency(c, ClassSet({"A", "B"}));
    const std::string expect = "True\\Predicted\tA\tB\n"
                               "A\t0.931\t0.069\n"
                               "B\t-\t-\n";
    CHECK(confusion_table(cm) == expect);
}

TEST_CASE("report_to_json carries the full report") {
    const EvalReport r = sample_report();
    const std::string text = report_to_json(r);
    CHECK(text == report_to_json(r)); // deterministic
    CHECK(text.back() == '\n');

    const auto j = nlohmann::json::parse(text);
    CHECK(j["counts"]["gt"] == 6);
    CHECK(j["counts"]["detections"] == 7);
    CHECK(j["counts"]["matched"] == 6);
    CHECK(j["map"] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(j["per_class_ap"]["ER"] == 1.0);
    CHECK(j["per_class_ap"]["M"] == 0.75);
    CHECK(j["classes_without_gt"].empty());

    CHECK(j["metrics"]["defined"] == true);
    CHECK(j["metrics"]["accuracy"] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(j["metrics"]["matched_total"] == 6);
    CHECK(j["metrics"]["unmatched_det"] == 1);

    CHECK(j["confusion"]["classes"] == nlohmann::json({"ER", "M"}));
    CHECK(j["confusion"]["counts"][0][0] == 4);
    CHECK(j["confusion"]["counts"][1][0] == 1);
    CHECK(j["confusion"]["row_supported"][0] == true);

    REQUIRE(j["votes"]["outcomes"].size() == 2);
    CHECK(j["votes"]["outcomes"][0]["well"] == "A1");
    CHECK(j["votes"]["outcomes"][0]["correct"] == true);
    CHECK(j["votes"]["outcomes"][1]["voted_class"].is_null());
    CHECK(j["votes"]["accuracy"] == 1.0);
    CHECK(j["votes"]["no_vote_count"] == 1);

    CHECK(j["extra_images"][0] == "tiles/plate9_Z9_TL.png");
    CHECK(j["missing_images"].empty());
    CHECK(j["footnotes"].size() == 2);
}

TEST_CASE("report_to_json uses nulls for undefined values") {
    EvalReport r;
    r.confusion = confusion_from_contingency(Contingency(1), ClassSet({"A"}));
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["map"].is_null());
    CHECK(j["metrics"]["defined"] == false);
    CHECK(j["metrics"]["accuracy"].is_null());
    CHECK(j["metrics"]["micro_f1"].is_null());
    CHECK(j["votes"]["accuracy"].is_null());
}

TEST_CASE("report_summary highlights the headline numbers") {
    const std::string text = report_summary(sample_report());
    CHECK(text.find("ground truth boxes:   6") != std::string::npos);
    CHECK(text.find("mAP@IoU:              0.875") != std::string::npos);
    CHECK(text.find("AP[ER] = 1.000") != std::string::npos);
    CHECK(text.find("AP[M] = 0.750") != std::string::npos);
    CHECK(text.find("plate votes:          1/1 correct (1.000), 1 without detections") !=
          std::string::npos);
    CHECK(text.find("note: first note") != std::string::npos);
    CHECK(text.find("note: second note") != std::string::npos);

    EvalReport undefined_report;
    undefined_report.confusion = confusion_from_contingency(Contingency(1), ClassSet({"A"}));
    const std::string u = report_summary(undefined_report);
    CHECK(u.find("mAP@IoU:              -") != std::string::npos);
    CHECK(u.find("classification metrics: undefined") != std::string::npos);
    CHECK(u.find("plate votes:          0/0 correct") != std::string::npos);
}
