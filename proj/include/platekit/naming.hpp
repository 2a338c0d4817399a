#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "platekit/types.hpp"

namespace platekit {

// Deterministic output naming: plate{P}_{WELL}[_{TL|TR|BL|BR}].png.
// Wells never contain '_' so the scheme parses unambiguously.
std::string image_stem(int plate_id, const std::string& well,
                       std::optional<Quadrant> tile = std::nullopt);
std::string image_file_name(int plate_id, const std::string& well,
                            std::optional<Quadrant> tile = std::nullopt);

struct ParsedImageName {
    int plate_id = 0;
    std::string well;
    std::optional<Quadrant> tile;
};

// Parse a path or file name produced by image_file_name. Returns nullopt for
// names outside the scheme (foreign data is still usable, just not groupable
// by well).
std::optional<ParsedImageName> parse_image_name(std::string_view path);

} // namespace platekit
