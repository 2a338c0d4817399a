#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "platekit/config.hpp"
#include "platekit/datasetgen.hpp"
#include "platekit/detadapt.hpp"
#include "platekit/errors.hpp"
#include "platekit/image_io.hpp"
#include "platekit/ingest.hpp"
#include "platekit/maskimport.hpp"
#include "platekit/naming.hpp"
#include "platekit/overlay.hpp"
#include "platekit/parallel.hpp"
#include "platekit/pipeline.hpp"
#include "platekit/rng.hpp"
#include "platekit/synth.hpp"
#include "platekit/tiler.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace platekit {

namespace {

std::string resolve(const fs::path& base_dir, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (base_dir / path).lexically_normal().string();
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

fs::path composites_dir(const RunConfig& cfg) {
    if (!cfg.composites_dir.empty()) return cfg.composites_dir;
    return fs::path(cfg.out) / "composites";
}

fs::path tiles_dir(const RunConfig& cfg) { return fs::path(cfg.out) / "tiles"; }

std::vector<PlateRecord> load_records(const RunConfig& cfg, const char* cmd) {
    if (cfg.manifest.empty())
        throw ConfigError(std::string(cmd) + ": 'manifest' is required");
    return load_manifest(cfg.manifest);
}

// The experiment's class set: explicit from config, otherwise the manifest's
// distinct labels in sorted order.
ClassSet experiment_classes(const RunConfig& cfg, const std::vector<PlateRecord>& records) {
    if (!cfg.classes.empty()) return ClassSet(cfg.classes);
    std::set<std::string> labels;
    for (const PlateRecord& rec : records) labels.insert(rec.class_label);
    if (labels.empty()) throw ConfigError("no classes: empty manifest and no 'classes' key");
    return ClassSet(std::vector<std::string>(labels.begin(), labels.end()));
}

void check_classes_in_manifest(const ClassSet& classes,
                               const std::vector<PlateRecord>& records) {
    std::set<std::string> present;
    for (const PlateRecord& rec : records) present.insert(rec.class_label);
    for (const std::string& name : classes.names())
        if (!present.count(name))
            throw ConfigError("class '" + name + "' does not appear in the manifest");
}

std::vector<PlateRecord> filter_records(const std::vector<PlateRecord>& records,
                                        const ClassSet& classes) {
    std::vector<PlateRecord> out;
    for (const PlateRecord& rec : records)
        if (classes.contains(rec.class_label)) out.push_back(rec);
    return out;
}

GrayImage to8(const GrayImage& img) {
    if (img.bit_depth == 8) return img;
    GrayImage out = GrayImage::filled(img.width, img.height, 0, 8);
    for (size_t i = 0; i < img.samples.size(); ++i)
        out.samples[i] =
            static_cast<uint16_t>(std::lround(img.samples[i] * 255.0 / 65535.0));
    return out;
}

[[noreturn]] void rethrow_with_record(const PlateRecord& rec, const Error& e) {
    const std::string msg = image_stem(rec.plate_id, rec.well) + ": " + e.what();
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
    throw DataError(msg);
}

// Path of every image of a well, in the layout build and crossval consume.
std::map<std::pair<int, std::string>, std::vector<std::string>>
collect_image_paths(const RunConfig& cfg, const std::vector<PlateRecord>& records) {
    const fs::path comp = composites_dir(cfg);
    const fs::path tile = tiles_dir(cfg);
    std::map<std::pair<int, std::string>, std::vector<std::string>> paths;
    std::vector<std::string> missing;
    for (const PlateRecord& rec : records) {
        std::vector<std::string>& entry = paths[{rec.plate_id, rec.well}];
        if (cfg.quadrants) {
            for (Quadrant q : {Quadrant::TL, Quadrant::TR, Quadrant::BL, Quadrant::BR})
                entry.push_back((tile / image_file_name(rec.plate_id, rec.well, q)).string());
        } else {
            entry.push_back((comp / image_file_name(rec.plate_id, rec.well)).string());
        }
        for (const std::string& p : entry)
            if (!fs::exists(p)) missing.push_back(p);
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " image file(s) missing, first: " +
                          missing.front();
        throw DataError(msg);
    }
    return paths;
}

NoiseConfig noise_from(const RunConfig& cfg, int n_classes, uint64_t seed) {
    NoiseConfig nc;
    nc.seed = seed;
    nc.n_classes = n_classes;
    nc.drop_prob = cfg.noise_drop_prob;
    nc.jitter_sigma_px = cfg.noise_jitter_sigma;
    nc.fp_rate = cfg.noise_fp_rate;
    nc.class_confusion = parse_confusion_rows(cfg.noise_confusion);
    nc.confidence_correct_mean = cfg.noise_conf_correct;
    nc.confidence_error_mean = cfg.noise_conf_error;
    nc.confidence_spread = cfg.noise_conf_spread;
    return nc;
}

DetectionFile mock_detections_for(const GtBundle& gt, const RunConfig& cfg,
                                  const ClassSet& classes) {
    DetectionFile df;
    df.images.reserve(gt.images.size());
    for (const GtImage& gi : gt.images) {
        const NoiseConfig nc =
            noise_from(cfg, classes.size(), derive_seed(cfg.seed, "mock:" + gi.path));
        ImageDetections id;
        id.image = gi.path;
        id.width = gi.meta.width;
        id.height = gi.meta.height;
        id.detections = mock_detect(gi.annos, nc, gi.meta);
        df.images.push_back(std::move(id));
    }
    return df;
}

std::string strip_root(const std::string& path, const std::string& root) {
    if (!root.empty() && path.rfind(root, 0) == 0) {
        std::string rest = path.substr(root.size());
        if (!rest.empty() && (rest.front() == '/' || rest.front() == '\\')) rest.erase(0, 1);
        return rest;
    }
    return path;
}

void write_eval_outputs(const EvalReport& report, const fs::path& dir,
                        const std::string& row_label) {
    write_text((dir / "report.json").string(), report_to_json(report));
    write_text((dir / "metrics.txt").string(),
               metrics_table({metrics_row(row_label, report.metrics)}, false));
    write_text((dir / "confusion.txt").string(), confusion_table(report.confusion));
    write_text((dir / "summary.txt").string(), report_summary(report));
}

std::string well_name(int index) {
    if (index < 96) {
        const char row = static_cast<char>('A' + index / 12);
        return std::string(1, row) + std::to_string(index % 12 + 1);
    }
    return "W" + std::to_string(index + 1);
}

} // namespace

GtBundle load_gt_bundle(const std::string& list_path, const ClassSet& classes) {
    const std::string text = read_text(list_path);
    GtBundle gt;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;

        GtImage img;
        img.path = line;
        const auto [w, h] = image_dims(line);
        img.meta.width = w;
        img.meta.height = h;
        if (auto parsed = parse_image_name(line)) {
            img.meta.plate_id = parsed->plate_id;
            img.meta.well = parsed->well;
            img.meta.tile = parsed->tile;
        }
        const fs::path label_path = fs::path(line).replace_extension(".txt");
        if (fs::exists(label_path))
            img.annos = load_label_file(label_path.string(), classes.size());
        gt.images.push_back(std::move(img));
    }
    return gt;
}

void run_merge(const RunConfig& cfg, std::ostream& log) {
    const auto records_all = load_records(cfg, "merge");
    const fs::path manifest_dir = fs::path(cfg.manifest).parent_path();
    const ClassSet classes = experiment_classes(cfg, records_all);
    const auto records = filter_records(records_all, classes);
    if (cfg.stretch && (cfg.stretch_low < 0 || cfg.stretch_high > 100 ||
                        cfg.stretch_low >= cfg.stretch_high))
        throw ConfigError("merge: need 0 <= stretch_low < stretch_high <= 100");

    const fs::path out_dir = composites_dir(cfg);
    fs::create_directories(out_dir);

    std::mutex mtx;
    std::map<int, int> per_plate;
    parallel_for(records.size(), cfg.jobs, [&](size_t i) {
        const PlateRecord& rec = records[i];
        try {
            GrayImage bf = load_gray(resolve(manifest_dir, rec.bf_path));
            GrayImage gfp = load_gray(resolve(manifest_dir, rec.gfp_path));
            const GrayImage bf8 =
                cfg.stretch ? percentile_stretch(bf, cfg.stretch_low, cfg.stretch_high)
                            : to8(bf);
            const GrayImage gfp8 =
                cfg.stretch ? percentile_stretch(gfp, cfg.stretch_low, cfg.stretch_high)
                            : to8(gfp);
            const RgbImage composite = merge_channels(bf8, gfp8);
            save_rgb(composite, (out_dir / image_file_name(rec.plate_id, rec.well)).string());
        } catch (const Error& e) {
            rethrow_with_record(rec, e);
        }
        std::lock_guard<std::mutex> lock(mtx);
        per_plate[rec.plate_id]++;
    });

    for (const auto& [plate, count] : per_plate)
        log << "plate " << plate << ": " << count << " composites\n";
    log << "merged " << records.size() << " composites into " << out_dir.string() << "\n";
}

void run_import_masks(const RunConfig& cfg, std::ostream& log) {
    const auto records_all = load_records(cfg, "import-masks");
    if (cfg.mask_dir.empty()) throw ConfigError("import-masks: 'mask_dir' is required");
    const ClassSet classes = experiment_classes(cfg, records_all);
    const auto records = filter_records(records_all, classes);

    const fs::path label_dir = composites_dir(cfg);
    fs::create_directories(label_dir);

    std::mutex mtx;
    std::vector<std::string> missing;
    std::map<std::string, int64_t> per_image;
    int64_t instances = 0, kept_total = 0, dropped_small = 0, dropped_large = 0;

    parallel_for(records.size(), cfg.jobs, [&](size_t i) {
        const PlateRecord& rec = records[i];
        const std::string stem = image_stem(rec.plate_id, rec.well);
        const fs::path mask_path = fs::path(cfg.mask_dir) / (stem + ".png");
        if (!fs::exists(mask_path)) {
            std::lock_guard<std::mutex> lock(mtx);
            missing.push_back(mask_path.string());
            return;
        }
        try {
            const InstanceMask mask = load_mask(mask_path.string());
            ImageMeta meta;
            meta.width = mask.width;
            meta.height = mask.height;
            meta.plate_id = rec.plate_id;
            meta.well = rec.well;

            const auto boxes = instances_to_boxes(mask);
            FilterStats st;
            auto kept = filter_boxes(boxes, cfg.min_area_px, cfg.max_area_frac, meta, &st);
            for (CellBox& b : kept) b.box = expand_box(b.box, cfg.margin_frac, meta);
            const int class_id = *classes.find(rec.class_label);
            const auto annos = boxes_to_annotations(kept, class_id, meta);
            save_label_file((label_dir / (stem + ".txt")).string(), annos);

            std::lock_guard<std::mutex> lock(mtx);
            per_image[stem] = static_cast<int64_t>(annos.size());
            instances += static_cast<int64_t>(boxes.size());
            kept_total += st.kept;
            dropped_small += st.dropped_min_area;
            dropped_large += st.dropped_max_area;
        } catch (const Error& e) {
            rethrow_with_record(rec, e);
        }
    });

    std::sort(missing.begin(), missing.end());
    ordered_json stats;
    stats["images"] = per_image.size();
    stats["instances"] = instances;
    stats["kept"] = kept_total;
    stats["dropped_min_area"] = dropped_small;
    stats["dropped_max_area"] = dropped_large;
    stats["missing_masks"] = missing;
    stats["per_image"] = per_image;
    write_text((fs::path(cfg.out) / "import_stats.json").string(), stats.dump(2) + "\n");

    log << "cropped " << kept_total << " cells from " << instances << " instances across "
        << per_image.size() << " images (dropped " << dropped_small << " small, "
        << dropped_large << " large)\n";
    if (!missing.empty())
        throw DataError(std::to_string(missing.size()) +
                        " mask file(s) missing, first: " + missing.front());
}

void run_tile(const RunConfig& cfg, std::ostream& log) {
    const auto records_all = load_records(cfg, "tile");
    const ClassSet classes = experiment_classes(cfg, records_all);
    const auto records = filter_records(records_all, classes);

    const fs::path comp_dir = composites_dir(cfg);
    const fs::path out_dir = tiles_dir(cfg);
    fs::create_directories(out_dir);

    std::mutex mtx;
    std::map<std::string, std::array<int64_t, 3>> per_image; // input, kept, straddling
    int64_t input_total = 0, kept_total = 0, straddle_total = 0;

    parallel_for(records.size(), cfg.jobs, [&](size_t i) {
        const PlateRecord& rec = records[i];
        try {
            const std::string stem = image_stem(rec.plate_id, rec.well);
            const fs::path comp_path = comp_dir / (stem + ".png");
            if (!fs::exists(comp_path))
                throw DataError("composite not found (run merge first): " + comp_path.string());
            const RgbImage rgb = load_rgb(comp_path.string());

            ImageMeta meta;
            meta.width = rgb.width;
            meta.height = rgb.height;
            meta.plate_id = rec.plate_id;
            meta.well = rec.well;

            std::vector<Annotation> annos;
            const fs::path label_path = comp_dir / (stem + ".txt");
            if (fs::exists(label_path))
                annos = load_label_file(label_path.string(), classes.size());

            int64_t image_kept = 0;
            int64_t image_straddle = 0;
            for (const Annotation& a : annos)
                if (straddles_cut(a, meta)) image_straddle++;

            for (const TileSpec& spec : quadrants(meta)) {
                const RgbImage sub = crop(rgb, spec);
                const std::string tile_stem = image_stem(rec.plate_id, rec.well, spec.tag);
                save_rgb(sub, (out_dir / (tile_stem + ".png")).string());
                const RemapResult rr = remap_annotations(annos, meta, spec, cfg.clip_straddlers);
                save_label_file((out_dir / (tile_stem + ".txt")).string(), rr.kept);
                image_kept += static_cast<int64_t>(rr.kept.size());
            }

            std::lock_guard<std::mutex> lock(mtx);
            per_image[stem] = {static_cast<int64_t>(annos.size()), image_kept, image_straddle};
            input_total += static_cast<int64_t>(annos.size());
            kept_total += image_kept;
            straddle_total += image_straddle;
        } catch (const Error& e) {
            rethrow_with_record(rec, e);
        }
    });

    ordered_json report;
    report["clip"] = cfg.clip_straddlers;
    report["images"] = per_image.size();
    report["input_annotations"] = input_total;
    report["kept"] = kept_total;
    report["straddling"] = straddle_total;
    ordered_json per;
    for (const auto& [stem, v] : per_image)
        per[stem] = {{"input", v[0]}, {"kept", v[1]}, {"straddling", v[2]}};
    report["per_image"] = std::move(per);
    write_text((fs::path(cfg.out) / "tile_report.json").string(), report.dump(2) + "\n");

    log << "tiled " << per_image.size() << " images into " << per_image.size() * 4
        << " quadrants: " << kept_total << " of " << input_total << " boxes kept, "
        << straddle_total << " straddling a cut\n";
}

void run_build(const RunConfig& cfg, std::ostream& log) {
    const auto records_all = load_records(cfg, "build");
    const ClassSet classes = experiment_classes(cfg, records_all);
    check_classes_in_manifest(classes, records_all);
    const auto records = filter_records(records_all, classes);

    const FoldAssignment folds = make_folds(records, cfg.folds, cfg.seed);
    if (cfg.fold < 0 || cfg.fold >= cfg.folds)
        throw ConfigError("build: fold must be in [0, " + std::to_string(cfg.folds) + ")");

    const auto image_paths = collect_image_paths(cfg, records);
    const fs::path out_dir = fs::path(cfg.out) / "dataset" / ("fold" + std::to_string(cfg.fold));
    const BundleResult res = write_dataset_bundle(records, classes, folds, cfg.fold,
                                                  cfg.valid_frac, cfg.seed, image_paths,
                                                  out_dir.string());

    log << "dataset bundle in " << out_dir.string() << ": " << res.splits.train.size()
        << " train, " << res.splits.valid.size() << " valid, " << res.splits.test.size()
        << " test images\n";
}

void run_eval(const RunConfig& cfg, std::ostream& log) {
    if (cfg.classes.empty()) throw ConfigError("eval: 'classes' is required");
    if (cfg.list.empty()) throw ConfigError("eval: 'list' is required");
    if (cfg.detections.empty()) throw ConfigError("eval: 'detections' is required");

    const ClassSet classes(cfg.classes);
    const GtBundle gt = load_gt_bundle(cfg.list, classes);
    const DetectionFile dets = read_detections(cfg.detections, classes);

    EvalConfig ec;
    ec.iou_thresh = cfg.iou_thresh;
    ec.allow_missing = cfg.allow_missing;
    ec.path_root = cfg.path_root;
    const EvalReport report = evaluate_run(gt, dets, classes, ec);

    const fs::path out_dir = fs::path(cfg.out) / "eval";
    write_eval_outputs(report, out_dir, "1");

    if (cfg.overlay_count > 0 && !gt.images.empty()) {
        std::map<std::string, const ImageDetections*> by_path;
        for (const ImageDetections& id : dets.images)
            by_path[strip_root(id.image, cfg.path_root)] = &id;

        std::vector<const GtImage*> sorted;
        for (const GtImage& gi : gt.images) sorted.push_back(&gi);
        std::sort(sorted.begin(), sorted.end(),
                  [](const GtImage* a, const GtImage* b) { return a->path < b->path; });
        const size_t n = std::min<size_t>(sorted.size(), cfg.overlay_count);
        fs::create_directories(out_dir / "overlays");
        for (size_t i = 0; i < n; ++i) {
            const GtImage& gi = *sorted[i];
            const RgbImage base = load_rgb(gi.path);
            std::vector<Detection> image_dets;
            auto it = by_path.find(strip_root(gi.path, cfg.path_root));
            if (it != by_path.end()) image_dets = it->second->detections;
            const RgbImage rendered = render_overlay(base, image_dets, classes, gi.meta);
            save_rgb(rendered, (out_dir / "overlays" / fs::path(gi.path).filename()).string());
        }
        log << "rendered " << n << " overlays\n";
    }

    log << report_summary(report);
}

void run_crossval(const RunConfig& cfg, std::ostream& log) {
    const auto records_all = load_records(cfg, "crossval");
    const ClassSet classes = experiment_classes(cfg, records_all);
    check_classes_in_manifest(classes, records_all);
    const auto records = filter_records(records_all, classes);

    if (!cfg.mock && cfg.detections_dir.empty())
        throw ConfigError("crossval: set mock = on or provide 'detections_dir'");

    const FoldAssignment folds = make_folds(records, cfg.folds, cfg.seed);
    const auto image_paths = collect_image_paths(cfg, records);

    EvalConfig ec;
    ec.iou_thresh = cfg.iou_thresh;
    ec.allow_missing = cfg.allow_missing;
    ec.path_root = cfg.path_root;

    std::vector<MetricsRow> rows;
    ordered_json per_fold = ordered_json::array();
    double map_sum = 0.0;
    int map_defined = 0;

    for (int f = 0; f < cfg.folds; ++f) {
        const fs::path fold_dir = fs::path(cfg.out) / "crossval" / ("fold" + std::to_string(f));
        const BundleResult res =
            write_dataset_bundle(records, classes, folds, f, cfg.valid_frac, cfg.seed,
                                 image_paths, fold_dir.string());
        const GtBundle gt = load_gt_bundle(res.paths.test_list, classes);

        DetectionFile dets;
        if (cfg.mock) {
            dets = mock_detections_for(gt, cfg, classes);
            save_detections((fold_dir / "detections.json").string(), dets);
        } else {
            const fs::path det_path =
                fs::path(cfg.detections_dir) / ("fold" + std::to_string(f) + ".json");
            dets = read_detections(det_path.string(), classes);
        }

        const EvalReport report = evaluate_run(gt, dets, classes, ec);
        write_eval_outputs(report, fold_dir, std::to_string(f + 1));
        rows.push_back(metrics_row(std::to_string(f + 1), report.metrics));

        ordered_json fj;
        fj["fold"] = f;
        fj["test_images"] = res.splits.test.size();
        fj["map"] = report.map_defined ? ordered_json(report.map) : ordered_json(nullptr);
        fj["metrics"] = {{"defined", report.metrics.defined},
                         {"precision", report.metrics.micro_precision},
                         {"recall", report.metrics.micro_recall},
                         {"f1", report.metrics.micro_f1},
                         {"accuracy", report.metrics.accuracy}};
        per_fold.push_back(std::move(fj));
        if (report.map_defined) {
            map_sum += report.map;
            map_defined++;
        }
    }

    const std::string table = metrics_table(rows, true);
    write_text((fs::path(cfg.out) / "crossval" / "metrics.txt").string(), table);

    ordered_json summary;
    summary["folds"] = cfg.folds;
    summary["per_fold"] = std::move(per_fold);
    double sums[4] = {0, 0, 0, 0};
    int defined = 0;
    for (const MetricsRow& r : rows) {
        if (!r.defined) continue;
        sums[0] += r.precision;
        sums[1] += r.recall;
        sums[2] += r.f1;
        sums[3] += r.accuracy;
        defined++;
    }
    if (defined > 0) {
        summary["avg"] = {{"precision", sums[0] / defined},
                          {"recall", sums[1] / defined},
                          {"f1", sums[2] / defined},
                          {"accuracy", sums[3] / defined}};
    } else {
        summary["avg"] = nullptr;
    }
    summary["map_mean"] = map_defined > 0 ? ordered_json(map_sum / map_defined)
                                          : ordered_json(nullptr);
    write_text((fs::path(cfg.out) / "crossval" / "summary.json").string(),
               summary.dump(2) + "\n");

    log << table;
}

void run_synth(const RunConfig& cfg, std::ostream& log) {
    if (cfg.classes.empty()) throw ConfigError("synth: 'classes' is required");
    const ClassSet classes(cfg.classes);

    if (cfg.mock) {
        // Detections for an existing list: the mock detector read against the
        // list's own labels, written as one detection file.
        if (cfg.list.empty())
            throw ConfigError("synth: mock = on needs 'list' pointing at the images to detect");
        const GtBundle gt = load_gt_bundle(cfg.list, classes);
        const DetectionFile dets = mock_detections_for(gt, cfg, classes);
        const fs::path out_path = fs::path(cfg.out) / "detections.json";
        save_detections(out_path.string(), dets);
        log << "mock detections for " << gt.images.size() << " images in " << out_path.string()
            << "\n";
        return;
    }

    if (classes.size() > 16)
        throw ConfigError("synth: at most 16 classes (plate ids range 1..16)");
    if (cfg.synth_plates < 1) throw ConfigError("synth: synth_plates must be >= 1");

    const fs::path out_root = cfg.out;
    fs::create_directories(out_root / "images");
    fs::create_directories(out_root / "masks");

    struct Job {
        PlateRecord rec;
        int class_id = 0;
        int index = 0;
    };
    std::vector<Job> jobs;
    for (int c = 0; c < classes.size(); ++c) {
        for (int i = 0; i < cfg.synth_plates; ++i) {
            Job job;
            job.class_id = c;
            job.index = i;
            job.rec.plate_id = c + 1;
            job.rec.well = well_name(i);
            job.rec.class_label = classes.name(c);
            const std::string stem = image_stem(job.rec.plate_id, job.rec.well);
            job.rec.bf_path = "images/" + stem + "_bf.png";
            job.rec.gfp_path = "images/" + stem + "_gfp.png";
            jobs.push_back(std::move(job));
        }
    }

    std::mutex mtx;
    int64_t cells_total = 0;
    parallel_for(jobs.size(), cfg.jobs, [&](size_t j) {
        const Job& job = jobs[j];
        SynthConfig scfg;
        scfg.seed = derive_seed(cfg.seed, "synth:" + job.rec.class_label,
                                static_cast<uint64_t>(job.index));
        scfg.width = cfg.synth_width;
        scfg.height = cfg.synth_height;
        scfg.min_cells = cfg.synth_min_cells;
        scfg.max_cells = cfg.synth_max_cells;
        scfg.min_radius_px = cfg.synth_min_radius;
        scfg.max_radius_px = cfg.synth_max_radius;
        scfg.max_overlap = cfg.synth_max_overlap;
        scfg.pixel_noise = cfg.synth_pixel_noise;
        scfg.class_id = job.class_id;
        scfg.pattern = pattern_for_class(job.class_id);

        const SynthPlate plate = gen_plate(scfg);
        const std::string stem = image_stem(job.rec.plate_id, job.rec.well);
        save_gray(plate.bf, (out_root / job.rec.bf_path).string());
        save_gray(plate.gfp, (out_root / job.rec.gfp_path).string());
        save_mask(plate.mask, (out_root / "masks" / (stem + ".png")).string());

        std::lock_guard<std::mutex> lock(mtx);
        cells_total += static_cast<int64_t>(plate.annos.size());
    });

    std::string manifest = "plate,well,class,bf_path,gfp_path\n";
    for (const Job& job : jobs) {
        manifest += std::to_string(job.rec.plate_id) + "," + job.rec.well + "," +
                    job.rec.class_label + "," + job.rec.bf_path + "," + job.rec.gfp_path + "\n";
    }
    write_text((out_root / "manifest.csv").string(), manifest);

    log << "generated " << jobs.size() << " synthetic wells (" << classes.size()
        << " classes), " << cells_total << " cells; manifest at "
        << (out_root / "manifest.csv").string() << "\n";
}

} // namespace platekit
