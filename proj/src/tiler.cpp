#include "platekit/tiler.hpp"

#include <cstring>
#include <string>

namespace platekit {

namespace {

void check_tile_bounds(int img_w, int img_h, const TileSpec& tile) {
    if (tile.width <= 0 || tile.height <= 0 || tile.offset_x < 0 || tile.offset_y < 0 ||
        tile.offset_x + tile.width > img_w || tile.offset_y + tile.height > img_h) {
        throw ValidationError("tile " + std::string(quadrant_name(tile.tag)) + " at (" +
                              std::to_string(tile.offset_x) + "," + std::to_string(tile.offset_y) +
                              ") size " + std::to_string(tile.width) + "x" +
                              std::to_string(tile.height) + " outside image " +
                              std::to_string(img_w) + "x" + std::to_string(img_h));
    }
}

bool contained(const BBoxPx& b, const TileSpec& t) {
    return b.x_min >= t.offset_x && b.x_max <= t.offset_x + t.width && b.y_min >= t.offset_y &&
           b.y_max <= t.offset_y + t.height;
}

bool overlaps(const BBoxPx& b, const TileSpec& t) {
    return b.x_min < t.offset_x + t.width && b.x_max > t.offset_x &&
           b.y_min < t.offset_y + t.height && b.y_max > t.offset_y;
}

} // namespace

std::vector<TileSpec> quadrants(const ImageMeta& meta) {
    if (meta.width <= 0 || meta.height <= 0) {
        throw ValidationError("quadrants: image dimensions must be positive");
    }
    if (meta.width % 2 != 0 || meta.height % 2 != 0) {
        throw ValidationError("quadrants: dimensions must be even, got " +
                              std::to_string(meta.width) + "x" + std::to_string(meta.height));
    }
    const int hw = meta.width / 2;
    const int hh = meta.height / 2;
    return {
        TileSpec{Quadrant::TL, 0, 0, hw, hh},
        TileSpec{Quadrant::TR, hw, 0, hw, hh},
        TileSpec{Quadrant::BL, 0, hh, hw, hh},
        TileSpec{Quadrant::BR, hw, hh, hw, hh},
    };
}

RemapResult remap_annotations(const std::vector<Annotation>& annos, const ImageMeta& meta,
                              const TileSpec& tile, bool clip) {
    RemapResult result;
    const ImageMeta tile_meta{tile.width, tile.height, meta.plate_id, meta.well, tile.tag};
    for (const Annotation& anno : annos) {
        const BBoxPx px = to_px(anno.box, meta);
        if (contained(px, tile)) {
            const BBoxPx local{px.x_min - tile.offset_x, px.y_min - tile.offset_y,
                               px.x_max - tile.offset_x, px.y_max - tile.offset_y};
            result.kept.push_back(Annotation{anno.class_id, to_norm(local, tile_meta)});
        } else if (overlaps(px, tile)) {
            result.straddling++;
            if (clip) {
                const BBoxPx clipped{std::max(px.x_min, double(tile.offset_x)) - tile.offset_x,
                                     std::max(px.y_min, double(tile.offset_y)) - tile.offset_y,
                                     std::min(px.x_max, double(tile.offset_x + tile.width)) -
                                         tile.offset_x,
                                     std::min(px.y_max, double(tile.offset_y + tile.height)) -
                                         tile.offset_y};
                if (clipped.x_min < clipped.x_max && clipped.y_min < clipped.y_max) {
                    result.kept.push_back(Annotation{anno.class_id, to_norm(clipped, tile_meta)});
                }
            }
        }
        // boxes fully outside this tile are neither kept nor counted here
    }
    return result;
}

bool straddles_cut(const Annotation& anno, const ImageMeta& meta) {
    const BBoxPx px = to_px(anno.box, meta);
    for (const TileSpec& tile : quadrants(meta)) {
        if (contained(px, tile)) return false;
    }
    return true;
}

namespace {

template <typename Image, typename Sample>
Image crop_impl(const Image& img, const TileSpec& tile, const std::vector<Sample>& src,
                std::vector<Sample>& dst, int channels) {
    check_tile_bounds(img.width, img.height, tile);
    dst.resize(static_cast<size_t>(tile.width) * tile.height * channels);
    const size_t row_bytes = static_cast<size_t>(tile.width) * channels * sizeof(Sample);
    for (int y = 0; y < tile.height; ++y) {
        const size_t src_off =
            (static_cast<size_t>(tile.offset_y + y) * img.width + tile.offset_x) * channels;
        const size_t dst_off = static_cast<size_t>(y) * tile.width * channels;
        std::memcpy(dst.data() + dst_off, src.data() + src_off, row_bytes);
    }
    Image out;
    out.width = tile.width;
    out.height = tile.height;
    return out;
}

} // namespace

GrayImage crop(const GrayImage& img, const TileSpec& tile) {
    std::vector<uint16_t> dst;
    GrayImage out = crop_impl(img, tile, img.samples, dst, 1);
    out.bit_depth = img.bit_depth;
    out.samples = std::move(dst);
    return out;
}

RgbImage crop(const RgbImage& img, const TileSpec& tile) {
    std::vector<uint8_t> dst;
    RgbImage out = crop_impl(img, tile, img.samples, dst, 3);
    out.samples = std::move(dst);
    return out;
}

InstanceMask crop(const InstanceMask& mask, const TileSpec& tile) {
    std::vector<uint32_t> dst;
    InstanceMask out = crop_impl(mask, tile, mask.labels, dst, 1);
    out.labels = std::move(dst);
    return out;
}

} // namespace platekit
