#pragma once

#include <vector>

#include "platekit/image.hpp"
#include "platekit/types.hpp"

namespace platekit {

// One quadrant of a full image. The four TileSpecs of an image partition it
// exactly under the half-open pixel convention: no shared column or row.
struct TileSpec {
    Quadrant tag = Quadrant::TL;
    int offset_x = 0;
    int offset_y = 0;
    int width = 0;
    int height = 0;
};

// TL, TR, BL, BR at half-size offsets. Odd dimensions are rejected rather
// than producing silent off-by-one tiles.
std::vector<TileSpec> quadrants(const ImageMeta& meta);

struct RemapResult {
    std::vector<Annotation> kept;
    // Annotations whose pixel box overlaps this tile but is not fully inside
    // it, i.e. boxes cut by a quadrant border.
    int straddling = 0;
};

// Keep an annotation iff its pixel box is fully contained in the tile
// (touching tile edges counts as inside); translate and renormalize kept
// boxes to tile coordinates. Containment and overlap use plain comparisons
// with no tolerance, so each box is kept by exactly one tile or straddles.
// When clip is true, straddling boxes are clipped to the tile instead of
// dropped (boxes reduced to a degenerate sliver are still dropped).
RemapResult remap_annotations(const std::vector<Annotation>& annos, const ImageMeta& meta,
                              const TileSpec& tile, bool clip = false);

// True iff the annotation's pixel box lies inside no single quadrant, i.e.
// it intersects an internal cut line. Such a box is dropped from every tile.
bool straddles_cut(const Annotation& anno, const ImageMeta& meta);

// Pixel-exact copy of the tile region.
GrayImage crop(const GrayImage& img, const TileSpec& tile);
RgbImage crop(const RgbImage& img, const TileSpec& tile);
InstanceMask crop(const InstanceMask& mask, const TileSpec& tile);

} // namespace platekit
