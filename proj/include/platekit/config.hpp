#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace platekit {

// One flat config drives every subcommand; each reads the keys it needs.
// Flags override whatever the file set.
struct RunConfig {
    std::string manifest;
    std::vector<std::string> classes;
    std::string out = "out";
    std::string mask_dir;
    std::string composites_dir; // defaults to <out>/composites when empty

    bool quadrants = false;
    bool clip_straddlers = false;

    int folds = 5;
    int fold = 0;
    double valid_frac = 0.1;
    uint64_t seed = 42;
    int jobs = 1;

    bool stretch = true;
    double stretch_low = 1.0;
    double stretch_high = 99.0;

    double margin_frac = 0.02;
    int64_t min_area_px = 9;
    double max_area_frac = 0.25;

    double iou_thresh = 0.5;
    std::string path_root;
    bool allow_missing = false;
    int overlay_count = 8;

    std::string list;           // eval: image list with sibling label files
    std::string detections;     // eval: detection JSON
    std::string detections_dir; // crossval: per-fold detection JSONs
    bool mock = false;          // crossval/synth: run the mock detector

    int synth_plates = 4; // per class
    int synth_width = 1344;
    int synth_height = 1024;
    int synth_min_cells = 40;
    int synth_max_cells = 60;
    double synth_min_radius = 8.0;
    double synth_max_radius = 18.0;
    double synth_max_overlap = 0.0;
    double synth_pixel_noise = 300.0;

    double noise_drop_prob = 0.0;
    double noise_jitter_sigma = 0.0;
    double noise_fp_rate = 0.0;
    std::string noise_confusion; // rows ';'-separated, entries ','-separated
    double noise_conf_correct = 1.0;
    double noise_conf_error = 0.5;
    double noise_conf_spread = 0.0;
};

// Parse `key = value` lines ('#' comments, blank lines allowed) on top of the
// defaults in cfg. Unknown keys and unparsable values raise ConfigError with
// origin and line number.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

// Parsed form of RunConfig::noise_confusion; empty input gives empty rows.
std::vector<std::vector<double>> parse_confusion_rows(const std::string& text);

} // namespace platekit
