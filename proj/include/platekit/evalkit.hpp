#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "platekit/detadapt.hpp"
#include "platekit/types.hpp"

namespace platekit {

struct MatchPair {
    int gt_index = -1;
    int det_index = -1;
    double iou = 0.0;
};

// One-to-one detection/ground-truth matching; every pair IoU >= threshold.
struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_det;
};

// Greedy matcher: detections in descending confidence (ties: lower index
// first); each takes the unmatched ground truth with the highest IoU >=
// threshold (ties: lower gt index). class_aware restricts candidates to the
// detection's class. Deterministic.
MatchResult match(const std::vector<Annotation>& gts, const std::vector<Detection>& dets,
                  double iou_thresh, bool class_aware);

// Area under the precision envelope over recall (all-point interpolation)
// for one class on one image. nullopt when the class has no ground truth.
std::optional<double> average_precision(const std::vector<Annotation>& gts,
                                        const std::vector<Detection>& dets, int class_id,
                                        double iou_thresh);

// (confidence, hit) pairs for one class, any number of images; order of
// equal-confidence entries is the insertion order.
struct ScoredHit {
    double confidence = 0.0;
    bool is_tp = false;
};
double ap_from_scored_hits(std::vector<ScoredHit> hits, int64_t gt_count);

// Matched-pair contingency: counts[true][pred].
class Contingency {
public:
    Contingency() = default;
    explicit Contingency(int n_classes);
    void add(int true_class, int pred_class, uint64_t n = 1);
    void merge(const Contingency& other);
    int classes() const { return n_; }
    uint64_t at(int t, int p) const { return counts_[static_cast<size_t>(t) * n_ + p]; }
    uint64_t row_sum(int t) const;
    uint64_t col_sum(int p) const;
    uint64_t trace() const;
    uint64_t total() const;

private:
    int n_ = 0;
    std::vector<uint64_t> counts_;
};

// Micro precision = micro recall = micro F1 = accuracy = trace/total over
// matched pairs; macro precision averages over predicted classes with
// support, macro recall/F1 over true classes with support. Unmatched counts
// are reported separately and never enter these rates.
struct MetricsBlock {
    bool defined = false; // false when there are no matched pairs
    double micro_precision = 0.0;
    double micro_recall = 0.0;
    double micro_f1 = 0.0;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    uint64_t matched_total = 0;
    uint64_t unmatched_gt = 0;
    uint64_t unmatched_det = 0;
};
MetricsBlock metrics_from_contingency(const Contingency& c, uint64_t unmatched_gt,
                                      uint64_t unmatched_det);
MetricsBlock classification_metrics(const MatchResult& m, const std::vector<Annotation>& gts,
                                    const std::vector<Detection>& dets, int n_classes);

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<uint64_t>> counts;     // row = true, col = predicted
    std::vector<std::vector<double>> normalized;   // zero rows where unsupported
    std::vector<bool> row_supported;
};
ConfusionMatrix confusion_from_contingency(const Contingency& c, const ClassSet& classes);
ConfusionMatrix confusion_matrix(const MatchResult& m, const std::vector<Annotation>& gts,
                                 const std::vector<Detection>& dets, const ClassSet& classes);

// Modal class among detections; ties broken by higher summed confidence,
// then lower class id. Empty input gives an explicit no-vote.
struct VoteOutcome {
    std::optional<int> class_id;
    std::vector<int64_t> counts;
    std::vector<double> confidence_sums;
};
VoteOutcome majority_vote(const std::vector<Detection>& dets, const ClassSet& classes);

// Vote over the multiset union of all four tile detection lists.
VoteOutcome plate_vote_from_tiles(const std::vector<std::vector<Detection>>& tile_dets,
                                  const ClassSet& classes);

// Ground truth for one evaluated image.
struct GtImage {
    std::string path;
    ImageMeta meta;
    std::vector<Annotation> annos;
};
struct GtBundle {
    std::vector<GtImage> images;
};

struct EvalConfig {
    double iou_thresh = 0.5;
    // Tolerate ground-truth images absent from the detection file (scored
    // as all false negatives) instead of failing.
    bool allow_missing = false;
    // Optional prefix stripped from both sides before path comparison.
    std::string path_root;
};

struct PlateVote {
    int plate_id = 0;
    std::string well;
    std::optional<int> true_class;
    std::optional<int> voted_class;
    bool correct = false;
};

struct EvalReport {
    uint64_t gt_count = 0;
    uint64_t det_count = 0;
    uint64_t matched_count = 0;

    std::vector<std::pair<std::string, double>> per_class_ap; // ClassSet order
    std::vector<std::string> classes_without_gt;
    double map = 0.0;
    bool map_defined = false;

    MetricsBlock metrics;
    ConfusionMatrix confusion;

    std::vector<PlateVote> votes;
    uint64_t no_vote_count = 0;
    double vote_accuracy = 0.0;
    bool vote_accuracy_defined = false;

    std::vector<std::string> extra_images;   // in detections but not in ground truth
    std::vector<std::string> missing_images; // tolerated all-FN images
    std::vector<std::string> footnotes;
};

// Full analysis pass: class-agnostic matching feeds the classification
// metrics and confusion matrix; class-aware matching feeds per-class AP;
// detections pooled per well feed the plate votes.
EvalReport evaluate_run(const GtBundle& gt, const DetectionFile& dets, const ClassSet& classes,
                        const EvalConfig& cfg);

// Report renderings: machine-readable JSON, metrics/confusion tables, and a
// human-readable summary.
std::string report_to_json(const EvalReport& report);

struct MetricsRow {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool defined = true;
};
MetricsRow metrics_row(const std::string& label, const MetricsBlock& m);
std::string metrics_table(const std::vector<MetricsRow>& rows, bool append_average);
std::string confusion_table(const ConfusionMatrix& confusion);
std::string report_summary(const EvalReport& report);

} // namespace platekit
