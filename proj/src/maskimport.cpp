#include "platekit/maskimport.hpp"

#include <algorithm>
#include <map>

namespace platekit {

std::vector<CellBox> instances_to_boxes(const InstanceMask& mask) {
    struct Extent {
        int min_x, min_y, max_x, max_y;
        int64_t area;
    };
    std::map<uint32_t, Extent> extents; // ordered by instance id

    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const uint32_t label = mask.at(x, y);
            if (label == 0) continue;
            auto it = extents.find(label);
            if (it == extents.end()) {
                extents.emplace(label, Extent{x, y, x, y, 1});
            } else {
                Extent& e = it->second;
                e.min_x = std::min(e.min_x, x);
                e.min_y = std::min(e.min_y, y);
                e.max_x = std::max(e.max_x, x);
                e.max_y = std::max(e.max_y, y);
                e.area += 1;
            }
        }
    }

    std::vector<CellBox> boxes;
    boxes.reserve(extents.size());
    for (const auto& [label, e] : extents) {
        CellBox cb;
        cb.instance_id = label;
        cb.box = BBoxPx{static_cast<double>(e.min_x), static_cast<double>(e.min_y),
                        static_cast<double>(e.max_x + 1), static_cast<double>(e.max_y + 1)};
        cb.area_px = e.area;
        boxes.push_back(cb);
    }
    return boxes;
}

BBoxPx expand_box(const BBoxPx& box, double margin_frac, const ImageMeta& bounds) {
    if (margin_frac < 0.0) {
        throw ConfigError("expand_box: margin_frac must be >= 0, got " +
                          std::to_string(margin_frac));
    }
    validate_box(box);
    const double dx = box.width() * margin_frac / 2.0;
    const double dy = box.height() * margin_frac / 2.0;
    BBoxPx out{box.x_min - dx, box.y_min - dy, box.x_max + dx, box.y_max + dy};
    out.x_min = std::max(out.x_min, 0.0);
    out.y_min = std::max(out.y_min, 0.0);
    out.x_max = std::min(out.x_max, static_cast<double>(bounds.width));
    out.y_max = std::min(out.y_max, static_cast<double>(bounds.height));
    return out;
}

std::vector<CellBox> filter_boxes(const std::vector<CellBox>& boxes, int64_t min_area_px,
                                  double max_area_frac, const ImageMeta& meta,
                                  FilterStats* stats) {
    if (min_area_px < 0 || max_area_frac < 0.0) {
        throw ConfigError("filter_boxes: thresholds must be >= 0");
    }
    const double image_area = static_cast<double>(meta.width) * meta.height;
    FilterStats local;
    std::vector<CellBox> kept;
    kept.reserve(boxes.size());
    for (const CellBox& cb : boxes) {
        if (cb.area_px < min_area_px) {
            local.dropped_min_area++;
            continue;
        }
        if (cb.box.area() > max_area_frac * image_area) {
            local.dropped_max_area++;
            continue;
        }
        local.kept++;
        kept.push_back(cb);
    }
    if (stats) *stats = local;
    return kept;
}

std::vector<Annotation> boxes_to_annotations(const std::vector<CellBox>& boxes, int class_id,
                                             const ImageMeta& meta) {
    if (class_id < 0) {
        throw ValidationError("boxes_to_annotations: negative class id");
    }
    std::vector<Annotation> annos;
    annos.reserve(boxes.size());
    for (const CellBox& cb : boxes) {
        annos.push_back(Annotation{class_id, to_norm(cb.box, meta)});
    }
    return annos;
}

} // namespace platekit
