#include "platekit/naming.hpp"

#include <charconv>
#include <filesystem>

namespace platekit {

std::string image_stem(int plate_id, const std::string& well, std::optional<Quadrant> tile) {
    std::string stem = "plate" + std::to_string(plate_id) + "_" + well;
    if (tile) {
        stem += "_";
        stem += quadrant_name(*tile);
    }
    return stem;
}

std::string image_file_name(int plate_id, const std::string& well, std::optional<Quadrant> tile) {
    return image_stem(plate_id, well, tile) + ".png";
}

std::optional<ParsedImageName> parse_image_name(std::string_view path) {
    const std::string stem = std::filesystem::path(std::string(path)).stem().string();
    if (stem.rfind("plate", 0) != 0) return std::nullopt;

    const size_t us1 = stem.find('_', 5);
    if (us1 == std::string::npos || us1 == 5) return std::nullopt;

    int plate = 0;
    const char* first = stem.data() + 5;
    const char* last = stem.data() + us1;
    auto [ptr, ec] = std::from_chars(first, last, plate);
    if (ec != std::errc() || ptr != last || plate <= 0) return std::nullopt;

    ParsedImageName out;
    out.plate_id = plate;

    const size_t us2 = stem.find('_', us1 + 1);
    if (us2 == std::string::npos) {
        out.well = stem.substr(us1 + 1);
    } else {
        auto tile = quadrant_from_name(std::string_view(stem).substr(us2 + 1));
        if (!tile) return std::nullopt; // wells never contain '_'
        out.well = stem.substr(us1 + 1, us2 - us1 - 1);
        out.tile = tile;
    }
    if (out.well.empty()) return std::nullopt;
    return out;
}

} // namespace platekit
