#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "platekit/errors.hpp"

namespace platekit {

// Boundary slack for normalized boxes; absorbs 6-decimal file quantization.
inline constexpr double kNormEps = 1e-6;

// One quadrant of a full image, in reading order.
enum class Quadrant { TL = 0, TR = 1, BL = 2, BR = 3 };

const char* quadrant_name(Quadrant q);
std::optional<Quadrant> quadrant_from_name(std::string_view name);

// Axis-aligned box in continuous pixel coordinates, origin top-left,
// y growing downward. A WxH image spans the half-open region [0,W)x[0,H).
struct BBoxPx {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
};

// Box as fractions of image width/height: center + extent.
struct NormBBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

struct ImageMeta {
    int width = 0;
    int height = 0;
    int plate_id = 0;           // 0 when unknown
    std::string well;
    std::optional<Quadrant> tile;
};

struct Annotation {
    int class_id = 0;
    NormBBox box;
};

struct Detection {
    int class_id = 0;
    NormBBox box;
    double confidence = 0.0;
};

// One well of one plate: the unit of cross-validation splitting.
struct PlateRecord {
    int plate_id = 0;
    std::string well;
    std::string class_label;
    std::string bf_path;
    std::string gfp_path;
};

// Ordered class names; the zero-based position is the class id everywhere
// (label files, detection files, confusion matrices).
class ClassSet {
public:
    ClassSet() = default;
    explicit ClassSet(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int id) const;
    const std::vector<std::string>& names() const { return names_; }
    std::optional<int> find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name).has_value(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

// Throw ValidationError unless the box satisfies its invariants.
void validate_box(const BBoxPx& box);
void validate_norm(const NormBBox& box);

// Pixel <-> normalized conversions. to_norm rejects boxes outside the image
// (beyond kNormEps slack); to_px clamps its output to the image bounds.
NormBBox to_norm(const BBoxPx& box, const ImageMeta& meta);
BBoxPx to_px(const NormBBox& box, const ImageMeta& meta);

// Intersection over union; 0 for disjoint boxes. The normalized overload is
// valid for boxes on the same image (uniform scaling cancels in the ratio).
double iou(const BBoxPx& a, const BBoxPx& b);
double iou(const NormBBox& a, const NormBBox& b);

} // namespace platekit
