#include "platekit/image.hpp"

#include <string>

namespace platekit {

namespace {
void require_positive(int w, int h) {
    if (w <= 0 || h <= 0) {
        throw ValidationError("image dimensions must be positive, got " + std::to_string(w) +
                              "x" + std::to_string(h));
    }
}
} // namespace

GrayImage GrayImage::filled(int w, int h, uint16_t value, int bit_depth) {
    require_positive(w, h);
    GrayImage img;
    img.width = w;
    img.height = h;
    img.bit_depth = bit_depth;
    img.samples.assign(static_cast<size_t>(w) * h, value);
    return img;
}

RgbImage RgbImage::filled(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    require_positive(w, h);
    RgbImage img;
    img.width = w;
    img.height = h;
    img.samples.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < img.samples.size(); i += 3) {
        img.samples[i] = r;
        img.samples[i + 1] = g;
        img.samples[i + 2] = b;
    }
    return img;
}

InstanceMask InstanceMask::zeros(int w, int h) {
    require_positive(w, h);
    InstanceMask m;
    m.width = w;
    m.height = h;
    m.labels.assign(static_cast<size_t>(w) * h, 0u);
    return m;
}

} // namespace platekit
