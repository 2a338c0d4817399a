#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "platekit/evalkit.hpp"

namespace platekit {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

ordered_json metrics_to_json(const MetricsBlock& m) {
    ordered_json j;
    j["defined"] = m.defined;
    auto put = [&](const char* key, double v) {
        if (m.defined) {
            j[key] = v;
        } else {
            j[key] = nullptr;
        }
    };
    put("micro_precision", m.micro_precision);
    put("micro_recall", m.micro_recall);
    put("micro_f1", m.micro_f1);
    put("accuracy", m.accuracy);
    put("macro_precision", m.macro_precision);
    put("macro_recall", m.macro_recall);
    put("macro_f1", m.macro_f1);
    j["matched_total"] = m.matched_total;
    j["unmatched_gt"] = m.unmatched_gt;
    j["unmatched_det"] = m.unmatched_det;
    return j;
}

} // namespace

std::string report_to_json(const EvalReport& report) {
    ordered_json j;
    j["counts"] = {{"gt", report.gt_count},
                   {"detections", report.det_count},
                   {"matched", report.matched_count}};
    j["map"] = report.map_defined ? ordered_json(report.map) : ordered_json(nullptr);
    ordered_json ap = ordered_json::object();
    for (const auto& [name, value] : report.per_class_ap) ap[name] = value;
    j["per_class_ap"] = std::move(ap);
    j["classes_without_gt"] = report.classes_without_gt;
    j["metrics"] = metrics_to_json(report.metrics);

    ordered_json confusion;
    confusion["classes"] = report.confusion.classes;
    confusion["counts"] = report.confusion.counts;
    confusion["normalized"] = report.confusion.normalized;
    confusion["row_supported"] = report.confusion.row_supported;
    j["confusion"] = std::move(confusion);

    ordered_json votes = ordered_json::array();
    for (const PlateVote& v : report.votes) {
        ordered_json vj;
        vj["plate"] = v.plate_id;
        vj["well"] = v.well;
        vj["true_class"] = v.true_class ? ordered_json(*v.true_class) : ordered_json(nullptr);
        vj["voted_class"] = v.voted_class ? ordered_json(*v.voted_class) : ordered_json(nullptr);
        vj["correct"] = v.correct;
        votes.push_back(std::move(vj));
    }
    j["votes"] = {{"outcomes", std::move(votes)},
                  {"accuracy", report.vote_accuracy_defined ? ordered_json(report.vote_accuracy)
                                                            : ordered_json(nullptr)},
                  {"no_vote_count", report.no_vote_count}};

    j["extra_images"] = report.extra_images;
    j["missing_images"] = report.missing_images;
    j["footnotes"] = report.footnotes;
    return j.dump(2) + "\n";
}

MetricsRow metrics_row(const std::string& label, const MetricsBlock& m) {
    MetricsRow row;
    row.label = label;
    row.defined = m.defined;
    row.precision = m.micro_precision;
    row.recall = m.micro_recall;
    row.f1 = m.micro_f1;
    row.accuracy = m.accuracy;
    return row;
}

std::string metrics_table(const std::vector<MetricsRow>& rows, bool append_average) {
    std::ostringstream out;
    out << "Fold\tPrecision\tRecall\tF1\tAccuracy\n";
    double sums[4] = {0, 0, 0, 0};
    int defined = 0;
    for (const MetricsRow& r : rows) {
        out << r.label << '\t';
        if (r.defined) {
            out << fixed3(r.precision) << '\t' << fixed3(r.recall) << '\t' << fixed3(r.f1) << '\t'
                << fixed3(r.accuracy) << '\n';
            sums[0] += r.precision;
            sums[1] += r.recall;
            sums[2] += r.f1;
            sums[3] += r.accuracy;
            defined++;
        } else {
            out << "-\t-\t-\t-\n";
        }
    }
    if (append_average && defined > 0) {
        out << "AVG\t" << fixed3(sums[0] / defined) << '\t' << fixed3(sums[1] / defined) << '\t'
            << fixed3(sums[2] / defined) << '\t' << fixed3(sums[3] / defined) << '\n';
    }
    return out.str();
}

std::string confusion_table(const ConfusionMatrix& confusion) {
    std::ostringstream out;
    out << "True\\Predicted";
    for (const std::string& name : confusion.classes) out << '\t' << name;
    out << '\n';
    for (size_t t = 0; t < confusion.classes.size(); ++t) {
        out << confusion.classes[t];
        for (size_t p = 0; p < confusion.classes.size(); ++p) {
            if (confusion.row_supported[t]) {
                out << '\t' << fixed3(confusion.normalized[t][p]);
            } else {
                out << "\t-";
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string report_summary(const EvalReport& report) {
    std::ostringstream out;
    out << "ground truth boxes:   " << report.gt_count << '\n';
    out << "detections:           " << report.det_count << '\n';
    out << "matched pairs:        " << report.matched_count << '\n';
    out << "unmatched gt (FN):    " << report.metrics.unmatched_gt << '\n';
    out << "unmatched det (FP):   " << report.metrics.unmatched_det << '\n';
    out << "mAP@IoU:              "
        << (report.map_defined ? fixed3(report.map) : std::string("-")) << '\n';
    for (const auto& [name, value] : report.per_class_ap) {
        out << "  AP[" << name << "] = " << fixed3(value) << '\n';
    }
    if (report.metrics.defined) {
        out << "precision/recall/F1/accuracy (micro): " << fixed3(report.metrics.micro_precision)
            << " / " << fixed3(report.metrics.micro_recall) << " / "
            << fixed3(report.metrics.micro_f1) << " / " << fixed3(report.metrics.accuracy)
            << '\n';
        out << "macro precision/recall/F1:            " << fixed3(report.metrics.macro_precision)
            << " / " << fixed3(report.metrics.macro_recall) << " / "
            << fixed3(report.metrics.macro_f1) << '\n';
    } else {
        out << "classification metrics: undefined (no matched pairs)\n";
    }
    uint64_t correct = 0, scored = 0;
    for (const PlateVote& v : report.votes) {
        if (v.true_class && v.voted_class) {
            scored++;
            if (v.correct) correct++;
        }
    }
    out << "plate votes:          " << correct << "/" << scored << " correct";
    if (report.vote_accuracy_defined) out << " (" << fixed3(report.vote_accuracy) << ")";
    if (report.no_vote_count > 0) out << ", " << report.no_vote_count << " without detections";
    out << '\n';
    for (const std::string& note : report.footnotes) out << "note: " << note << '\n';
    return out.str();
}

} // namespace platekit
