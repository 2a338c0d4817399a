#pragma once

#include <string>
#include <vector>

#include "platekit/image.hpp"
#include "platekit/types.hpp"

namespace platekit {

// Manifest: UTF-8 CSV with header exactly `plate,well,class,bf_path,gfp_path`.
// One PlateRecord per row, input order preserved. Rejects a missing or wrong
// header, rows with the wrong field count, non-integer or out-of-range plate
// ids, empty fields, and duplicate (plate, well) pairs; errors carry the
// 1-based line number.
std::vector<PlateRecord> load_manifest(const std::string& path);
std::vector<PlateRecord> parse_manifest(const std::string& text, const std::string& origin);

// Linear contrast stretch to 8 bits: the p_low percentile maps to 0, the
// p_high percentile to 255, everything outside clamps. A constant image (or
// a degenerate percentile window) maps to all zeros. Percentiles use linear
// interpolation between order statistics.
GrayImage percentile_stretch(const GrayImage& img, double p_low, double p_high);

// Per pixel: R = bf, B = bf, G = max(bf, gfp). Brightfield renders gray,
// fluorescence signal renders green. Both inputs must be 8-bit and equal size.
RgbImage merge_channels(const GrayImage& bf, const GrayImage& gfp);

} // namespace platekit
