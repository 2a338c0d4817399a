#pragma once

#include <string>
#include <utility>

#include "platekit/image.hpp"

namespace platekit {

// PNG/TIFF readers and writers. All functions throw DataError with the path
// on unreadable, unwritable, or wrongly shaped files.

// Single-channel 8- or 16-bit file; bit_depth follows the file.
GrayImage load_gray(const std::string& path);
void save_gray(const GrayImage& img, const std::string& path);

// Instance masks travel as 16-bit single-channel PNGs, 0 = background.
InstanceMask load_mask(const std::string& path);
void save_mask(const InstanceMask& mask, const std::string& path); // labels must fit 16 bits

RgbImage load_rgb(const std::string& path);
void save_rgb(const RgbImage& img, const std::string& path);

// Image dimensions without decoding pixel data (PNG header fast path).
std::pair<int, int> image_dims(const std::string& path);

} // namespace platekit
