#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "platekit/detadapt.hpp"
#include "platekit/errors.hpp"
#include "platekit/maskimport.hpp"
#include "platekit/rng.hpp"
#include "platekit/synth.hpp"

namespace platekit {

namespace {

constexpr int kPlacementRetries = 1000;

bool inside_ellipse(double px, double py, const EllipseCell& c) {
    const double dx = (px - c.cx) / c.rx;
    const double dy = (py - c.cy) / c.ry;
    return dx * dx + dy * dy <= 1.0;
}

double ellipse_r(double px, double py, const EllipseCell& c) {
    const double dx = (px - c.cx) / c.rx;
    const double dy = (py - c.cy) / c.ry;
    return std::sqrt(dx * dx + dy * dy);
}

BBoxPx cell_box(const EllipseCell& c) {
    return {c.cx - c.rx, c.cy - c.ry, c.cx + c.rx, c.cy + c.ry};
}

struct Punctum {
    double x = 0.0; // ellipse-normalized coordinates
    double y = 0.0;
};

uint16_t to_u16(double v) {
    return static_cast<uint16_t>(std::clamp(std::lround(v), 0L, 65535L));
}

} // namespace

GfpPattern pattern_for_class(int class_id) {
    switch (((class_id % 4) + 4) % 4) {
    case 0: return GfpPattern::Rim;
    case 1: return GfpPattern::Punctate;
    case 2: return GfpPattern::Filled;
    default: return GfpPattern::InnerDisc;
    }
}

void SynthConfig::validate() const {
    if (width <= 0 || height <= 0) throw ConfigError("synth: image dims must be positive");
    if (min_cells < 0 || max_cells < min_cells)
        throw ConfigError("synth: need 0 <= min_cells <= max_cells");
    if (!(min_radius_px > 0.0) || max_radius_px < min_radius_px)
        throw ConfigError("synth: need 0 < min_radius_px <= max_radius_px");
    if (2.0 * max_radius_px >= std::min(width, height))
        throw ConfigError("synth: max_radius_px too large for image dims");
    if (!(max_overlap >= 0.0) || max_overlap >= 1.0)
        throw ConfigError("synth: max_overlap must be in [0, 1)");
    if (class_id < 0) throw ConfigError("synth: class_id must be >= 0");
    if (pixel_noise < 0.0) throw ConfigError("synth: pixel_noise must be >= 0");
}

SynthPlate gen_plate(const SynthConfig& cfg) {
    cfg.validate();

    auto rng = make_rng(derive_seed(cfg.seed, "synth:place"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SynthPlate plate;
    plate.mask = InstanceMask::zeros(cfg.width, cfg.height);

    int n = cfg.min_cells;
    if (cfg.max_cells > cfg.min_cells) {
        std::uniform_int_distribution<int> count(cfg.min_cells, cfg.max_cells);
        n = count(rng);
    }

    std::uniform_real_distribution<double> radius(cfg.min_radius_px, cfg.max_radius_px);
    for (int i = 0; i < n; ++i) {
        const uint32_t label = static_cast<uint32_t>(i) + 1;
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
            EllipseCell c;
            c.rx = radius(rng);
            c.ry = radius(rng);
            c.cx = c.rx + unit(rng) * (cfg.width - 2.0 * c.rx);
            c.cy = c.ry + unit(rng) * (cfg.height - 2.0 * c.ry);

            const BBoxPx box = cell_box(c);
            bool ok = true;
            for (const EllipseCell& other : plate.cells) {
                if (iou(box, cell_box(other)) > cfg.max_overlap) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;

            // Claim pixels by center; earlier cells keep contested pixels.
            const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min)));
            const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min)));
            const int x1 = std::min(cfg.width, static_cast<int>(std::ceil(box.x_max)));
            const int y1 = std::min(cfg.height, static_cast<int>(std::ceil(box.y_max)));
            uint64_t claimed = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    if (plate.mask.at(x, y) == 0 && inside_ellipse(x + 0.5, y + 0.5, c)) {
                        plate.mask.at(x, y) = label;
                        claimed++;
                    }
                }
            }
            if (claimed == 0) continue; // fully occluded, try elsewhere
            plate.cells.push_back(c);
            placed = true;
        }
        if (!placed) {
            throw ValidationError("synth: could not place cell " + std::to_string(label) +
                                  " after " + std::to_string(kPlacementRetries) +
                                  " attempts; lower the density (fewer cells, smaller radii, or "
                                  "a higher max_overlap)");
        }
    }

    // Annotation boxes come from the rasterized pixels, so recovering them
    // from the mask later reproduces these exactly.
    ImageMeta meta;
    meta.width = cfg.width;
    meta.height = cfg.height;
    plate.annos = boxes_to_annotations(instances_to_boxes(plate.mask), cfg.class_id, meta);

    // Render intensity into double buffers, then quantize to 16 bit.
    const size_t npix = static_cast<size_t>(cfg.width) * cfg.height;
    std::vector<double> bf(npix, cfg.bf_background);
    std::vector<double> gfp(npix, cfg.gfp_background);

    auto render_rng = make_rng(derive_seed(cfg.seed, "synth:render"));
    std::uniform_int_distribution<int> puncta_count(3, 6);
    std::uniform_real_distribution<double> puncta_r(0.0, 0.7);
    std::uniform_real_distribution<double> puncta_theta(0.0, 2.0 * 3.14159265358979323846);

    for (const EllipseCell& c : plate.cells) {
        std::vector<Punctum> puncta;
        if (cfg.pattern == GfpPattern::Punctate) {
            const int k = puncta_count(render_rng);
            for (int j = 0; j < k; ++j) {
                const double r = puncta_r(render_rng);
                const double t = puncta_theta(render_rng);
                puncta.push_back({r * std::cos(t), r * std::sin(t)});
            }
        }

        const BBoxPx box = cell_box(c);
        const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min)));
        const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min)));
        const int x1 = std::min(cfg.width, static_cast<int>(std::ceil(box.x_max)));
        const int y1 = std::min(cfg.height, static_cast<int>(std::ceil(box.y_max)));
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const double px = x + 0.5;
                const double py = y + 0.5;
                const double r = ellipse_r(px, py, c);
                if (r > 1.0) continue;
                const size_t idx = static_cast<size_t>(y) * cfg.width + x;

                bf[idx] += cfg.bf_amplitude * std::exp(-(r * r) / 0.72);

                double g = 0.0;
                switch (cfg.pattern) {
                case GfpPattern::Rim: {
                    const double d = (r - 0.85) / 0.1;
                    g = std::exp(-d * d);
                    break;
                }
                case GfpPattern::Punctate: {
                    const double ex = (px - c.cx) / c.rx;
                    const double ey = (py - c.cy) / c.ry;
                    for (const Punctum& p : puncta) {
                        const double dx = ex - p.x;
                        const double dy = ey - p.y;
                        g += std::exp(-(dx * dx + dy * dy) / 0.0288);
                    }
                    g = std::min(g, 1.0);
                    break;
                }
                case GfpPattern::Filled:
                    g = 1.0 - r * r * r * r;
                    break;
                case GfpPattern::InnerDisc: {
                    const double d = r / 0.4;
                    g = std::exp(-d * d * d * d);
                    break;
                }
                }
                gfp[idx] += cfg.gfp_amplitude * g;
            }
        }
    }

    plate.bf = GrayImage::filled(cfg.width, cfg.height, 0, 16);
    plate.gfp = GrayImage::filled(cfg.width, cfg.height, 0, 16);
    if (cfg.pixel_noise > 0.0) {
        auto noise_rng = make_rng(derive_seed(cfg.seed, "synth:pixels"));
        std::uniform_real_distribution<double> span(0.0, cfg.pixel_noise);
        for (size_t i = 0; i < npix; ++i) {
            plate.bf.samples[i] = to_u16(bf[i] + span(noise_rng));
            plate.gfp.samples[i] = to_u16(gfp[i] + span(noise_rng));
        }
    } else {
        for (size_t i = 0; i < npix; ++i) {
            plate.bf.samples[i] = to_u16(bf[i]);
            plate.gfp.samples[i] = to_u16(gfp[i]);
        }
    }
    return plate;
}

void NoiseConfig::validate() const {
    if (n_classes < 1) throw ConfigError("noise: n_classes must be >= 1");
    if (drop_prob < 0.0 || drop_prob > 1.0)
        throw ConfigError("noise: drop_prob must be in [0, 1]");
    if (jitter_sigma_px < 0.0) throw ConfigError("noise: jitter_sigma_px must be >= 0");
    if (fp_rate < 0.0) throw ConfigError("noise: fp_rate must be >= 0");
    if (confidence_spread < 0.0) throw ConfigError("noise: confidence_spread must be >= 0");
    if (confidence_correct_mean < 0.0 || confidence_correct_mean > 1.0 ||
        confidence_error_mean < 0.0 || confidence_error_mean > 1.0)
        throw ConfigError("noise: confidence means must be in [0, 1]");
    if (!(fp_min_size_px > 0.0) || fp_max_size_px < fp_min_size_px)
        throw ConfigError("noise: need 0 < fp_min_size_px <= fp_max_size_px");
    if (!class_confusion.empty()) {
        if (class_confusion.size() != static_cast<size_t>(n_classes))
            throw ConfigError("noise: class_confusion must have n_classes rows");
        for (size_t t = 0; t < class_confusion.size(); ++t) {
            const auto& row = class_confusion[t];
            if (row.size() != static_cast<size_t>(n_classes))
                throw ConfigError("noise: class_confusion row " + std::to_string(t) +
                                  " must have n_classes entries");
            double sum = 0.0;
            for (double p : row) {
                if (p < 0.0 || p > 1.0)
                    throw ConfigError("noise: class_confusion entries must be in [0, 1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw ConfigError("noise: class_confusion row " + std::to_string(t) +
                                  " sums to " + std::to_string(sum) + ", expected 1");
        }
    }
}

namespace {

int sample_row(const std::vector<double>& row, double u) {
    double cum = 0.0;
    for (size_t i = 0; i < row.size(); ++i) {
        cum += row[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(row.size()) - 1;
}

NormBBox clamp_px_box(double cx, double cy, double w, double h, const ImageMeta& meta) {
    w = std::clamp(w, 1.0, static_cast<double>(meta.width));
    h = std::clamp(h, 1.0, static_cast<double>(meta.height));
    double x0 = cx - w / 2.0;
    double x1 = cx + w / 2.0;
    double y0 = cy - h / 2.0;
    double y1 = cy + h / 2.0;
    if (x0 < 0.0) {
        x1 -= x0;
        x0 = 0.0;
    }
    if (x1 > meta.width) {
        x0 -= x1 - meta.width;
        x1 = meta.width;
    }
    if (y0 < 0.0) {
        y1 -= y0;
        y0 = 0.0;
    }
    if (y1 > meta.height) {
        y0 -= y1 - meta.height;
        y1 = meta.height;
    }
    return to_norm({x0, y0, x1, y1}, meta);
}

} // namespace

std::vector<Detection> mock_detect(const std::vector<Annotation>& annos, const NoiseConfig& noise,
                                   const ImageMeta& meta) {
    noise.validate();
    auto rng = make_rng(noise.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Detection> dets;
    dets.reserve(annos.size());
    for (size_t i = 0; i < annos.size(); ++i) {
        const Annotation& gt = annos[i];
        if (gt.class_id >= noise.n_classes) {
            throw DataError("mock_detect: annotation " + std::to_string(i) + " has class " +
                            std::to_string(gt.class_id) + " but n_classes is " +
                            std::to_string(noise.n_classes));
        }
        if (unit(rng) < noise.drop_prob) continue;

        Detection det;
        det.box = gt.box;
        if (noise.jitter_sigma_px > 0.0) {
            std::normal_distribution<double> jitter(0.0, noise.jitter_sigma_px);
            const BBoxPx px = to_px(gt.box, meta);
            const double cx = (px.x_min + px.x_max) / 2.0 + jitter(rng);
            const double cy = (px.y_min + px.y_max) / 2.0 + jitter(rng);
            const double w = px.width() + jitter(rng);
            const double h = px.height() + jitter(rng);
            det.box = clamp_px_box(cx, cy, w, h, meta);
        }

        det.class_id = gt.class_id;
        if (!noise.class_confusion.empty())
            det.class_id = sample_row(noise.class_confusion[gt.class_id], unit(rng));

        const double mean = det.class_id == gt.class_id ? noise.confidence_correct_mean
                                                        : noise.confidence_error_mean;
        double conf = mean;
        if (noise.confidence_spread > 0.0) {
            std::normal_distribution<double> spread(mean, noise.confidence_spread);
            conf = std::clamp(spread(rng), 0.0, 1.0);
        }
        det.confidence = quantize_confidence(conf);
        dets.push_back(det);
    }

    if (noise.fp_rate > 0.0) {
        std::poisson_distribution<int> fp_count(noise.fp_rate);
        const int n_fp = fp_count(rng);
        const double max_w = std::min(noise.fp_max_size_px, static_cast<double>(meta.width));
        const double max_h = std::min(noise.fp_max_size_px, static_cast<double>(meta.height));
        const double min_w = std::min(noise.fp_min_size_px, max_w);
        const double min_h = std::min(noise.fp_min_size_px, max_h);
        for (int i = 0; i < n_fp; ++i) {
            const double w = min_w + unit(rng) * (max_w - min_w);
            const double h = min_h + unit(rng) * (max_h - min_h);
            const double cx = w / 2.0 + unit(rng) * (meta.width - w);
            const double cy = h / 2.0 + unit(rng) * (meta.height - h);

            Detection det;
            det.box = clamp_px_box(cx, cy, w, h, meta);
            det.class_id = noise.n_classes == 1
                               ? 0
                               : std::uniform_int_distribution<int>(0, noise.n_classes - 1)(rng);
            double conf = noise.confidence_error_mean;
            if (noise.confidence_spread > 0.0) {
                std::normal_distribution<double> spread(noise.confidence_error_mean,
                                                        noise.confidence_spread);
                conf = std::clamp(spread(rng), 0.0, 1.0);
            }
            det.confidence = quantize_confidence(conf);
            dets.push_back(det);
        }
    }
    return dets;
}

} // namespace platekit
