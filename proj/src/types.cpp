#include "platekit/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace platekit {

const char* quadrant_name(Quadrant q) {
    switch (q) {
        case Quadrant::TL: return "TL";
        case Quadrant::TR: return "TR";
        case Quadrant::BL: return "BL";
        case Quadrant::BR: return "BR";
    }
    return "??";
}

std::optional<Quadrant> quadrant_from_name(std::string_view name) {
    if (name == "TL") return Quadrant::TL;
    if (name == "TR") return Quadrant::TR;
    if (name == "BL") return Quadrant::BL;
    if (name == "BR") return Quadrant::BR;
    return std::nullopt;
}

ClassSet::ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) {
        throw ValidationError("class set must not be empty");
    }
    for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
        if (names_[i].empty()) {
            throw ValidationError("class name at index " + std::to_string(i) + " is empty");
        }
        auto [it, inserted] = index_.emplace(names_[i], i);
        if (!inserted) {
            throw ValidationError("duplicate class name: " + names_[i]);
        }
    }
}

const std::string& ClassSet::name(int id) const {
    if (id < 0 || id >= size()) {
        throw ValidationError("class id " + std::to_string(id) + " out of range [0," +
                              std::to_string(size()) + ")");
    }
    return names_[static_cast<size_t>(id)];
}

std::optional<int> ClassSet::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void validate_box(const BBoxPx& box) {
    if (!(box.x_min < box.x_max)) {
        throw ValidationError("degenerate box: x_min " + std::to_string(box.x_min) +
                              " >= x_max " + std::to_string(box.x_max));
    }
    if (!(box.y_min < box.y_max)) {
        throw ValidationError("degenerate box: y_min " + std::to_string(box.y_min) +
                              " >= y_max " + std::to_string(box.y_max));
    }
}

void validate_norm(const NormBBox& box) {
    if (!(box.w > 0.0) || box.w > 1.0 + kNormEps) {
        throw ValidationError("normalized box width " + std::to_string(box.w) +
                              " outside (0,1]");
    }
    if (!(box.h > 0.0) || box.h > 1.0 + kNormEps) {
        throw ValidationError("normalized box height " + std::to_string(box.h) +
                              " outside (0,1]");
    }
    if (box.cx - box.w / 2.0 < -kNormEps || box.cx + box.w / 2.0 > 1.0 + kNormEps) {
        throw ValidationError("normalized box x-extent [" +
                              std::to_string(box.cx - box.w / 2.0) + "," +
                              std::to_string(box.cx + box.w / 2.0) + "] outside [0,1]");
    }
    if (box.cy - box.h / 2.0 < -kNormEps || box.cy + box.h / 2.0 > 1.0 + kNormEps) {
        throw ValidationError("normalized box y-extent [" +
                              std::to_string(box.cy - box.h / 2.0) + "," +
                              std::to_string(box.cy + box.h / 2.0) + "] outside [0,1]");
    }
}

namespace {

void require_dims(const ImageMeta& meta) {
    if (meta.width <= 0 || meta.height <= 0) {
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(meta.width) + "x" + std::to_string(meta.height));
    }
}

// Reject coordinates outside [0,limit] beyond slack, clamp the rest.
double checked_clamp(double v, double limit, const char* name) {
    const double slack = kNormEps * limit;
    if (v < -slack || v > limit + slack) {
        std::ostringstream msg;
        msg << "coordinate " << name << "=" << v << " outside image extent [0," << limit << "]";
        throw ValidationError(msg.str());
    }
    return std::clamp(v, 0.0, limit);
}

} // namespace

NormBBox to_norm(const BBoxPx& box, const ImageMeta& meta) {
    require_dims(meta);
    validate_box(box);
    const double w = static_cast<double>(meta.width);
    const double h = static_cast<double>(meta.height);
    const double x0 = checked_clamp(box.x_min, w, "x_min");
    const double x1 = checked_clamp(box.x_max, w, "x_max");
    const double y0 = checked_clamp(box.y_min, h, "y_min");
    const double y1 = checked_clamp(box.y_max, h, "y_max");
    NormBBox out;
    out.cx = (x0 + x1) / (2.0 * w);
    out.cy = (y0 + y1) / (2.0 * h);
    out.w = (x1 - x0) / w;
    out.h = (y1 - y0) / h;
    return out;
}

BBoxPx to_px(const NormBBox& box, const ImageMeta& meta) {
    require_dims(meta);
    validate_norm(box);
    const double w = static_cast<double>(meta.width);
    const double h = static_cast<double>(meta.height);
    BBoxPx out;
    out.x_min = std::clamp((box.cx - box.w / 2.0) * w, 0.0, w);
    out.x_max = std::clamp((box.cx + box.w / 2.0) * w, 0.0, w);
    out.y_min = std::clamp((box.cy - box.h / 2.0) * h, 0.0, h);
    out.y_max = std::clamp((box.cy + box.h / 2.0) * h, 0.0, h);
    return out;
}

double iou(const BBoxPx& a, const BBoxPx& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double iou(const NormBBox& a, const NormBBox& b) {
    const BBoxPx pa{a.cx - a.w / 2, a.cy - a.h / 2, a.cx + a.w / 2, a.cy + a.h / 2};
    const BBoxPx pb{b.cx - b.w / 2, b.cy - b.h / 2, b.cx + b.w / 2, b.cy + b.h / 2};
    return iou(pa, pb);
}

} // namespace platekit
