#include "platekit/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace platekit {

MatchResult match(const std::vector<Annotation>& gts, const std::vector<Detection>& dets,
                  double iou_thresh, bool class_aware) {
    if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) {
        throw ConfigError("match: iou threshold must be in (0,1], got " +
                          std::to_string(iou_thresh));
    }

    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dets[a].confidence > dets[b].confidence; // stable: lower index first on ties
    });

    MatchResult result;
    std::vector<bool> gt_taken(gts.size(), false);
    std::vector<bool> det_matched(dets.size(), false);

    for (int det_idx : order) {
        const Detection& det = dets[det_idx];
        int best_gt = -1;
        double best_iou = 0.0;
        for (int gt_idx = 0; gt_idx < static_cast<int>(gts.size()); ++gt_idx) {
            if (gt_taken[gt_idx]) continue;
            if (class_aware && gts[gt_idx].class_id != det.class_id) continue;
            const double v = iou(gts[gt_idx].box, det.box);
            if (v >= iou_thresh && v > best_iou) { // strict >: ties keep the lower gt index
                best_iou = v;
                best_gt = gt_idx;
            }
        }
        if (best_gt >= 0) {
            gt_taken[best_gt] = true;
            det_matched[det_idx] = true;
            result.pairs.push_back(MatchPair{best_gt, det_idx, best_iou});
        }
    }

    for (int i = 0; i < static_cast<int>(gts.size()); ++i) {
        if (!gt_taken[i]) result.unmatched_gt.push_back(i);
    }
    for (int i = 0; i < static_cast<int>(dets.size()); ++i) {
        if (!det_matched[i]) result.unmatched_det.push_back(i);
    }
    return result;
}

double ap_from_scored_hits(std::vector<ScoredHit> hits, int64_t gt_count) {
    if (gt_count <= 0) {
        throw ValidationError("ap_from_scored_hits: gt_count must be positive");
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const ScoredHit& a, const ScoredHit& b) {
                         return a.confidence > b.confidence;
                     });

    std::vector<double> recall, precision;
    recall.reserve(hits.size());
    precision.reserve(hits.size());
    int64_t tp = 0, fp = 0;
    for (const ScoredHit& h : hits) {
        h.is_tp ? ++tp : ++fp;
        recall.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    }

    // Precision envelope from the right, then area under it over recall:
    // the segment (recall[i-1], recall[i]] carries max precision at or after i.
    double ap = 0.0;
    double envelope = 0.0;
    for (size_t i = hits.size(); i-- > 0;) {
        envelope = std::max(envelope, precision[i]);
        const double left = i > 0 ? recall[i - 1] : 0.0;
        ap += (recall[i] - left) * envelope;
    }
    return ap;
}

std::optional<double> average_precision(const std::vector<Annotation>& gts,
                                        const std::vector<Detection>& dets, int class_id,
                                        double iou_thresh) {
    std::vector<Annotation> class_gts;
    for (const Annotation& g : gts) {
        if (g.class_id == class_id) class_gts.push_back(g);
    }
    std::vector<Detection> class_dets;
    for (const Detection& d : dets) {
        if (d.class_id == class_id) class_dets.push_back(d);
    }
    if (class_gts.empty()) return std::nullopt;

    const MatchResult m = match(class_gts, class_dets, iou_thresh, /*class_aware=*/false);
    std::vector<bool> is_tp(class_dets.size(), false);
    for (const MatchPair& p : m.pairs) is_tp[static_cast<size_t>(p.det_index)] = true;

    std::vector<ScoredHit> hits;
    hits.reserve(class_dets.size());
    for (size_t i = 0; i < class_dets.size(); ++i) {
        hits.push_back(ScoredHit{class_dets[i].confidence, is_tp[i]});
    }
    return ap_from_scored_hits(std::move(hits), static_cast<int64_t>(class_gts.size()));
}

Contingency::Contingency(int n_classes) : n_(n_classes) {
    if (n_classes <= 0) throw ValidationError("contingency needs at least one class");
    counts_.assign(static_cast<size_t>(n_) * n_, 0);
}

void Contingency::add(int true_class, int pred_class, uint64_t n) {
    if (true_class < 0 || true_class >= n_ || pred_class < 0 || pred_class >= n_) {
        throw ValidationError("contingency index outside class range");
    }
    counts_[static_cast<size_t>(true_class) * n_ + pred_class] += n;
}

void Contingency::merge(const Contingency& other) {
    if (other.n_ != n_) throw ValidationError("contingency size mismatch");
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

uint64_t Contingency::row_sum(int t) const {
    uint64_t s = 0;
    for (int p = 0; p < n_; ++p) s += at(t, p);
    return s;
}

uint64_t Contingency::col_sum(int p) const {
    uint64_t s = 0;
    for (int t = 0; t < n_; ++t) s += at(t, p);
    return s;
}

uint64_t Contingency::trace() const {
    uint64_t s = 0;
    for (int i = 0; i < n_; ++i) s += at(i, i);
    return s;
}

uint64_t Contingency::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), uint64_t{0});
}

MetricsBlock metrics_from_contingency(const Contingency& c, uint64_t unmatched_gt,
                                      uint64_t unmatched_det) {
    MetricsBlock m;
    m.unmatched_gt = unmatched_gt;
    m.unmatched_det = unmatched_det;
    m.matched_total = c.total();
    if (m.matched_total == 0) {
        m.defined = false;
        return m;
    }
    m.defined = true;

    const double micro = static_cast<double>(c.trace()) / static_cast<double>(m.matched_total);
    m.micro_precision = micro;
    m.micro_recall = micro;
    m.micro_f1 = micro;
    m.accuracy = micro;

    double prec_sum = 0.0, rec_sum = 0.0, f1_sum = 0.0;
    int prec_classes = 0, rec_classes = 0;
    for (int k = 0; k < c.classes(); ++k) {
        const uint64_t row = c.row_sum(k);
        const uint64_t col = c.col_sum(k);
        const double diag = static_cast<double>(c.at(k, k));
        const double prec_k = col > 0 ? diag / static_cast<double>(col) : 0.0;
        if (col > 0) {
            prec_sum += prec_k;
            prec_classes++;
        }
        if (row > 0) {
            const double rec_k = diag / static_cast<double>(row);
            rec_sum += rec_k;
            f1_sum += (prec_k + rec_k) > 0.0 ? 2.0 * prec_k * rec_k / (prec_k + rec_k) : 0.0;
            rec_classes++;
        }
    }
    m.macro_precision = prec_classes > 0 ? prec_sum / prec_classes : 0.0;
    m.macro_recall = rec_classes > 0 ? rec_sum / rec_classes : 0.0;
    m.macro_f1 = rec_classes > 0 ? f1_sum / rec_classes : 0.0;
    return m;
}

namespace {

Contingency contingency_from_match(const MatchResult& m, const std::vector<Annotation>& gts,
                                   const std::vector<Detection>& dets, int n_classes) {
    Contingency c(n_classes);
    for (const MatchPair& p : m.pairs) {
        c.add(gts[static_cast<size_t>(p.gt_index)].class_id,
              dets[static_cast<size_t>(p.det_index)].class_id);
    }
    return c;
}

} // namespace

MetricsBlock classification_metrics(const MatchResult& m, const std::vector<Annotation>& gts,
                                    const std::vector<Detection>& dets, int n_classes) {
    const Contingency c = contingency_from_match(m, gts, dets, n_classes);
    return metrics_from_contingency(c, m.unmatched_gt.size(), m.unmatched_det.size());
}

ConfusionMatrix confusion_from_contingency(const Contingency& c, const ClassSet& classes) {
    if (c.classes() != classes.size()) {
        throw ValidationError("confusion: contingency size does not match class set");
    }
    ConfusionMatrix cm;
    cm.classes = classes.names();
    cm.counts.assign(classes.size(), std::vector<uint64_t>(classes.size(), 0));
    cm.normalized.assign(classes.size(), std::vector<double>(classes.size(), 0.0));
    cm.row_supported.assign(classes.size(), false);
    for (int t = 0; t < classes.size(); ++t) {
        const uint64_t row = c.row_sum(t);
        for (int p = 0; p < classes.size(); ++p) cm.counts[t][p] = c.at(t, p);
        if (row > 0) {
            cm.row_supported[t] = true;
            for (int p = 0; p < classes.size(); ++p) {
                cm.normalized[t][p] = static_cast<double>(c.at(t, p)) / static_cast<double>(row);
            }
        }
    }
    return cm;
}

ConfusionMatrix confusion_matrix(const MatchResult& m, const std::vector<Annotation>& gts,
                                 const std::vector<Detection>& dets, const ClassSet& classes) {
    return confusion_from_contingency(contingency_from_match(m, gts, dets, classes.size()),
                                      classes);
}

VoteOutcome majority_vote(const std::vector<Detection>& dets, const ClassSet& classes) {
    VoteOutcome vote;
    vote.counts.assign(classes.size(), 0);
    vote.confidence_sums.assign(classes.size(), 0.0);
    for (const Detection& d : dets) {
        if (d.class_id < 0 || d.class_id >= classes.size()) {
            throw ValidationError("majority_vote: class id " + std::to_string(d.class_id) +
                                  " outside class set");
        }
        vote.counts[static_cast<size_t>(d.class_id)]++;
        vote.confidence_sums[static_cast<size_t>(d.class_id)] += d.confidence;
    }
    if (dets.empty()) return vote; // explicit no-vote

    int best = 0;
    for (int k = 1; k < classes.size(); ++k) {
        if (vote.counts[k] > vote.counts[best] ||
            (vote.counts[k] == vote.counts[best] &&
             vote.confidence_sums[k] > vote.confidence_sums[best])) {
            best = k; // equal count and sum keeps the lower class id
        }
    }
    vote.class_id = best;
    return vote;
}

VoteOutcome plate_vote_from_tiles(const std::vector<std::vector<Detection>>& tile_dets,
                                  const ClassSet& classes) {
    if (tile_dets.size() != 4) {
        throw ValidationError("plate_vote_from_tiles: expected exactly 4 tile detection lists, got " +
                              std::to_string(tile_dets.size()));
    }
    std::vector<Detection> all;
    for (const auto& tile : tile_dets) all.insert(all.end(), tile.begin(), tile.end());
    return majority_vote(all, classes);
}

namespace {

std::string normalize_path(const std::string& path, const std::string& root) {
    if (root.empty()) return path;
    std::string prefix = root;
    if (!prefix.empty() && prefix.back() != '/') prefix += '/';
    if (path.rfind(prefix, 0) == 0) return path.substr(prefix.size());
    return path;
}

} // namespace

EvalReport evaluate_run(const GtBundle& gt, const DetectionFile& dets, const ClassSet& classes,
                        const EvalConfig& cfg) {
    EvalReport report;

    // Index detection entries by normalized path.
    std::map<std::string, const ImageDetections*> det_index;
    for (const ImageDetections& entry : dets.images) {
        const std::string key = normalize_path(entry.image, cfg.path_root);
        if (!det_index.emplace(key, &entry).second) {
            throw DataError("detections contain duplicate image after normalization: " + key);
        }
        for (const Detection& d : entry.detections) {
            if (d.class_id < 0 || d.class_id >= classes.size()) {
                throw ValidationError("detections use class id " + std::to_string(d.class_id) +
                                      " outside the run's class set of " +
                                      std::to_string(classes.size()));
            }
        }
    }

    // Strict by default: every ground-truth image must have a detection entry.
    if (!cfg.allow_missing) {
        std::vector<std::string> missing;
        for (const GtImage& img : gt.images) {
            if (!det_index.count(normalize_path(img.path, cfg.path_root))) {
                missing.push_back(img.path);
            }
        }
        if (!missing.empty()) {
            std::string msg = "detections missing for " + std::to_string(missing.size()) +
                              " ground-truth image(s), first: " + missing.front();
            throw DataError(msg);
        }
    }

    Contingency contingency(classes.size());
    std::vector<std::vector<ScoredHit>> class_hits(static_cast<size_t>(classes.size()));
    std::vector<int64_t> class_gt_counts(static_cast<size_t>(classes.size()), 0);
    uint64_t unmatched_gt_total = 0, unmatched_det_total = 0;

    struct WellPool {
        int plate_id = 0;
        std::string well;
        std::vector<Detection> dets;
        std::vector<int64_t> gt_class_counts;
    };
    std::map<std::pair<int, std::string>, WellPool> wells;
    std::set<std::string> consumed;

    static const std::vector<Detection> kNoDetections;
    for (const GtImage& img : gt.images) {
        const std::string key = normalize_path(img.path, cfg.path_root);
        const auto det_it = det_index.find(key);
        const std::vector<Detection>* img_dets = &kNoDetections;
        if (det_it != det_index.end()) {
            consumed.insert(key);
            if (det_it->second->width != img.meta.width ||
                det_it->second->height != img.meta.height) {
                throw ValidationError("dimension mismatch for " + img.path + ": ground truth " +
                                      std::to_string(img.meta.width) + "x" +
                                      std::to_string(img.meta.height) + " vs detections " +
                                      std::to_string(det_it->second->width) + "x" +
                                      std::to_string(det_it->second->height));
            }
            img_dets = &det_it->second->detections;
        } else {
            report.missing_images.push_back(img.path);
        }

        report.gt_count += img.annos.size();
        report.det_count += img_dets->size();

        // Class-agnostic matching: classification metrics + confusion.
        const MatchResult agn = match(img.annos, *img_dets, cfg.iou_thresh, false);
        report.matched_count += agn.pairs.size();
        unmatched_gt_total += agn.unmatched_gt.size();
        unmatched_det_total += agn.unmatched_det.size();
        for (const MatchPair& p : agn.pairs) {
            contingency.add(img.annos[static_cast<size_t>(p.gt_index)].class_id,
                            (*img_dets)[static_cast<size_t>(p.det_index)].class_id);
        }

        // Class-aware matching per class: AP hit lists.
        for (int k = 0; k < classes.size(); ++k) {
            std::vector<Annotation> class_gts;
            std::vector<Detection> class_dets;
            for (const Annotation& a : img.annos) {
                if (a.class_id == k) class_gts.push_back(a);
            }
            for (const Detection& d : *img_dets) {
                if (d.class_id == k) class_dets.push_back(d);
            }
            class_gt_counts[static_cast<size_t>(k)] += static_cast<int64_t>(class_gts.size());
            if (class_dets.empty()) continue;
            const MatchResult cm = match(class_gts, class_dets, cfg.iou_thresh, false);
            std::vector<bool> is_tp(class_dets.size(), false);
            for (const MatchPair& p : cm.pairs) is_tp[static_cast<size_t>(p.det_index)] = true;
            for (size_t i = 0; i < class_dets.size(); ++i) {
                class_hits[static_cast<size_t>(k)].push_back(
                    ScoredHit{class_dets[i].confidence, is_tp[i]});
            }
        }

        // Pool detections per well for the plate vote; quadrants of one well
        // share a pool.
        const std::pair<int, std::string> well_key =
            img.meta.plate_id > 0 ? std::make_pair(img.meta.plate_id, img.meta.well)
                                  : std::make_pair(0, img.path);
        WellPool& pool = wells[well_key];
        pool.plate_id = img.meta.plate_id;
        pool.well = well_key.first > 0 ? img.meta.well : img.path;
        pool.dets.insert(pool.dets.end(), img_dets->begin(), img_dets->end());
        if (pool.gt_class_counts.empty()) {
            pool.gt_class_counts.assign(static_cast<size_t>(classes.size()), 0);
        }
        for (const Annotation& a : img.annos) {
            pool.gt_class_counts[static_cast<size_t>(a.class_id)]++;
        }
    }

    // Detection entries with no ground-truth image: pure false positives.
    for (const ImageDetections& entry : dets.images) {
        const std::string key = normalize_path(entry.image, cfg.path_root);
        if (consumed.count(key)) continue;
        report.extra_images.push_back(entry.image);
        report.det_count += entry.detections.size();
        unmatched_det_total += entry.detections.size();
        for (const Detection& d : entry.detections) {
            class_hits[static_cast<size_t>(d.class_id)].push_back(
                ScoredHit{d.confidence, false});
        }
    }

    // Per-class AP and mAP over classes with ground truth.
    double ap_sum = 0.0;
    int ap_classes = 0;
    for (int k = 0; k < classes.size(); ++k) {
        if (class_gt_counts[static_cast<size_t>(k)] == 0) {
            report.classes_without_gt.push_back(classes.name(k));
            continue;
        }
        const double ap = ap_from_scored_hits(class_hits[static_cast<size_t>(k)],
                                              class_gt_counts[static_cast<size_t>(k)]);
        report.per_class_ap.emplace_back(classes.name(k), ap);
        ap_sum += ap;
        ap_classes++;
    }
    if (ap_classes > 0) {
        report.map = ap_sum / ap_classes;
        report.map_defined = true;
    }

    report.metrics = metrics_from_contingency(contingency, unmatched_gt_total,
                                              unmatched_det_total);
    report.confusion = confusion_from_contingency(contingency, classes);

    // Plate votes.
    uint64_t vote_correct = 0, vote_scored = 0;
    for (const auto& [key, pool] : wells) {
        PlateVote pv;
        pv.plate_id = pool.plate_id;
        pv.well = pool.well;
        const VoteOutcome outcome = majority_vote(pool.dets, classes);
        pv.voted_class = outcome.class_id;
        if (!outcome.class_id) report.no_vote_count++;
        const auto max_it =
            std::max_element(pool.gt_class_counts.begin(), pool.gt_class_counts.end());
        if (max_it != pool.gt_class_counts.end() && *max_it > 0) {
            pv.true_class = static_cast<int>(max_it - pool.gt_class_counts.begin());
        }
        if (pv.true_class && pv.voted_class) {
            pv.correct = *pv.true_class == *pv.voted_class;
            vote_scored++;
            if (pv.correct) vote_correct++;
        }
        report.votes.push_back(std::move(pv));
    }
    if (vote_scored > 0) {
        report.vote_accuracy = static_cast<double>(vote_correct) / static_cast<double>(vote_scored);
        report.vote_accuracy_defined = true;
    }

    report.footnotes.push_back(
        "classification metrics and the confusion matrix cover matched pairs only; "
        "unmatched cells appear in the unmatched counts");
    if (!report.classes_without_gt.empty()) {
        std::string note = "classes without ground truth excluded from mAP:";
        for (const std::string& name : report.classes_without_gt) note += " " + name;
        report.footnotes.push_back(note);
    }
    if (!report.extra_images.empty()) {
        report.footnotes.push_back(std::to_string(report.extra_images.size()) +
                                   " detection image(s) absent from ground truth counted as "
                                   "pure false positives");
    }
    if (!report.missing_images.empty()) {
        report.footnotes.push_back(std::to_string(report.missing_images.size()) +
                                   " ground-truth image(s) missing from detections scored as "
                                   "all false negatives");
    }
    return report;
}

} // namespace platekit
