#pragma once

#include <cstdint>
#include <vector>

#include "platekit/image.hpp"
#include "platekit/types.hpp"

namespace platekit {

// Fluorescence pattern rendered into the GFP channel. The geometry is what
// matters downstream; the patterns just make the classes distinguishable.
enum class GfpPattern {
    Rim,       // bright ring near the cell boundary
    Punctate,  // a few bright dots inside the cell
    Filled,    // whole cell body
    InnerDisc, // small concentric disc
};

GfpPattern pattern_for_class(int class_id);

struct SynthConfig {
    uint64_t seed = 0;
    int width = 1344;
    int height = 1024;

    int min_cells = 40;
    int max_cells = 60;
    double min_radius_px = 8.0;
    double max_radius_px = 18.0;
    // Maximum pairwise IoU allowed between the bounding boxes of two cells.
    double max_overlap = 0.0;

    int class_id = 0;
    GfpPattern pattern = GfpPattern::Rim;

    // 16-bit intensity model, shared by both channels.
    double bf_background = 3000.0;
    double gfp_background = 800.0;
    double bf_amplitude = 18000.0;
    double gfp_amplitude = 22000.0;
    double pixel_noise = 300.0; // uniform [0, pixel_noise] added per pixel

    void validate() const; // throws ConfigError
};

struct EllipseCell {
    double cx = 0.0;
    double cy = 0.0;
    double rx = 0.0;
    double ry = 0.0;
};

struct SynthPlate {
    GrayImage bf;
    GrayImage gfp;
    InstanceMask mask;
    std::vector<Annotation> annos;   // pixel-exact boxes, one per mask label
    std::vector<EllipseCell> cells;  // placement parameters, cells[i] has label i+1
};

// Deterministic per seed. Throws ValidationError when the overlap policy
// cannot be satisfied after bounded retries.
SynthPlate gen_plate(const SynthConfig& cfg);

struct NoiseConfig {
    uint64_t seed = 0;
    int n_classes = 1;

    double drop_prob = 0.0;
    double jitter_sigma_px = 0.0;
    double fp_rate = 0.0; // Poisson mean of false positives per image

    // Row-stochastic, n_classes x n_classes; empty means identity.
    std::vector<std::vector<double>> class_confusion;

    double confidence_correct_mean = 1.0;
    double confidence_error_mean = 0.5;
    double confidence_spread = 0.0;

    double fp_min_size_px = 16.0;
    double fp_max_size_px = 64.0;

    void validate() const; // throws ConfigError
};

// Parametric detector stand-in: drops, jitters, and relabels ground truth,
// then appends false positives. With all noise at zero the output equals the
// input annotations at confidence 1.0.
std::vector<Detection> mock_detect(const std::vector<Annotation>& annos, const NoiseConfig& noise,
                                   const ImageMeta& meta);

} // namespace platekit
