#pragma once

#include <cstdint>
#include <vector>

#include "platekit/image.hpp"
#include "platekit/types.hpp"

namespace platekit {

// Tight pixel bounding box of one mask instance, before any expansion.
struct CellBox {
    uint32_t instance_id = 0;
    BBoxPx box;
    int64_t area_px = 0;
};

struct FilterStats {
    int64_t kept = 0;
    int64_t dropped_min_area = 0;
    int64_t dropped_max_area = 0;
};

// One CellBox per distinct nonzero label, sorted by instance id. The box is
// [min_x, min_y, max_x+1, max_y+1] over the label's pixels (half-open);
// area_px is the pixel count. Instances are defined by label value, not
// connectivity: disconnected fragments sharing a label form one box.
std::vector<CellBox> instances_to_boxes(const InstanceMask& mask);

// Grow width and height by margin_frac (half on each side), then clamp to the
// image. The center is preserved unless clamping moved an edge.
BBoxPx expand_box(const BBoxPx& box, double margin_frac, const ImageMeta& bounds);

// Keep boxes with area_px >= min_area_px and geometric box area
// <= max_area_frac * image area; count drops per reason.
std::vector<CellBox> filter_boxes(const std::vector<CellBox>& boxes, int64_t min_area_px,
                                  double max_area_frac, const ImageMeta& meta,
                                  FilterStats* stats = nullptr);

// Weak labels: every box becomes an Annotation carrying the plate-level class.
std::vector<Annotation> boxes_to_annotations(const std::vector<CellBox>& boxes, int class_id,
                                             const ImageMeta& meta);

} // namespace platekit
