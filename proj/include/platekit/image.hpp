#pragma once

#include <cstdint>
#include <vector>

#include "platekit/errors.hpp"

namespace platekit {

// Single-channel intensity image, row-major. Samples are stored as uint16
// regardless of bit depth; bit_depth records the nominal range (8 or 16).
struct GrayImage {
    int width = 0;
    int height = 0;
    int bit_depth = 16;
    std::vector<uint16_t> samples;

    static GrayImage filled(int w, int h, uint16_t value, int bit_depth = 16);
    uint16_t at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
    uint16_t& at(int x, int y) { return samples[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    uint16_t max_value() const { return bit_depth == 8 ? 255 : 65535; }
};

// 8-bit RGB image, row-major interleaved.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> samples; // 3 * width * height

    static RgbImage filled(int w, int h, uint8_t r, uint8_t g, uint8_t b);
    size_t offset(int x, int y) const { return (static_cast<size_t>(y) * width + x) * 3; }
};

// Integer-labeled segmentation image: 0 = background, k > 0 = instance k.
// Label values need not be contiguous.
struct InstanceMask {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> labels;

    static InstanceMask zeros(int w, int h);
    uint32_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    uint32_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
};

} // namespace platekit
