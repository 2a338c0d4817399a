#pragma once

#include <array>
#include <string>
#include <vector>

#include "platekit/image.hpp"
#include "platekit/types.hpp"

namespace platekit {

// Stable per-class overlay color (RGB), cycling after eight classes.
std::array<uint8_t, 3> class_color(int class_id);

// Draw detection boxes with class color and confidence text onto a copy of
// the composite. An empty detection list returns the base image unchanged.
RgbImage render_overlay(const RgbImage& base, const std::vector<Detection>& dets,
                        const ClassSet& classes, const ImageMeta& meta);

} // namespace platekit
