#include "platekit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace platekit {

namespace {

constexpr const char* kHeader = "plate,well,class,bf_path,gfp_path";

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

[[noreturn]] void row_error(const std::string& origin, int line_no, const std::string& what) {
    throw DataError(origin + ":" + std::to_string(line_no) + ": " + what);
}

// Order statistic with linear interpolation, from a 16-bit histogram.
double percentile_from_hist(const std::vector<uint64_t>& hist, uint64_t n, double p) {
    const double idx = (static_cast<double>(n) - 1.0) * p / 100.0;
    const uint64_t lo_rank = static_cast<uint64_t>(std::floor(idx));
    const double frac = idx - static_cast<double>(lo_rank);

    auto value_at_rank = [&](uint64_t rank) -> double {
        uint64_t cum = 0;
        for (size_t v = 0; v < hist.size(); ++v) {
            cum += hist[v];
            if (cum > rank) return static_cast<double>(v);
        }
        return static_cast<double>(hist.size() - 1);
    };

    const double lo = value_at_rank(lo_rank);
    if (frac == 0.0) return lo;
    const double hi = value_at_rank(lo_rank + 1);
    return lo + frac * (hi - lo);
}

} // namespace

std::vector<PlateRecord> parse_manifest(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(origin + ": empty manifest, expected header `" + std::string(kHeader) + "`");
    }
    if (strip_cr(line) != kHeader) {
        throw DataError(origin + ":1: bad header `" + strip_cr(line) + "`, expected `" +
                        std::string(kHeader) + "`");
    }

    std::vector<PlateRecord> records;
    std::set<std::pair<int, std::string>> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5) {
            row_error(origin, line_no,
                      "expected 5 fields, got " + std::to_string(fields.size()));
        }
        PlateRecord rec;
        try {
            size_t pos = 0;
            rec.plate_id = std::stoi(fields[0], &pos);
            if (pos != fields[0].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            row_error(origin, line_no, "plate id `" + fields[0] + "` is not an integer");
        }
        if (rec.plate_id < 1 || rec.plate_id > 16) {
            row_error(origin, line_no,
                      "plate id " + fields[0] + " outside [1,16]");
        }
        rec.well = fields[1];
        rec.class_label = fields[2];
        rec.bf_path = fields[3];
        rec.gfp_path = fields[4];
        if (rec.well.empty()) row_error(origin, line_no, "empty well");
        if (rec.well.find('_') != std::string::npos) {
            row_error(origin, line_no, "well `" + rec.well + "` must not contain '_'");
        }
        if (rec.class_label.empty()) row_error(origin, line_no, "empty class label");
        if (rec.bf_path.empty()) row_error(origin, line_no, "empty bf_path");
        if (rec.gfp_path.empty()) row_error(origin, line_no, "empty gfp_path");
        if (!seen.emplace(rec.plate_id, rec.well).second) {
            row_error(origin, line_no,
                      "duplicate (plate, well) = (" + fields[0] + ", " + rec.well + ")");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PlateRecord> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open manifest: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), path);
}

GrayImage percentile_stretch(const GrayImage& img, double p_low, double p_high) {
    if (img.samples.empty() || img.width <= 0 || img.height <= 0) {
        throw ValidationError("percentile_stretch: empty image");
    }
    if (!(p_low >= 0.0 && p_low < p_high && p_high <= 100.0)) {
        throw ConfigError("percentile_stretch: need 0 <= p_low < p_high <= 100, got " +
                          std::to_string(p_low) + ", " + std::to_string(p_high));
    }

    std::vector<uint64_t> hist(65536, 0);
    for (uint16_t v : img.samples) hist[v]++;
    const uint64_t n = img.samples.size();
    const double lo = percentile_from_hist(hist, n, p_low);
    const double hi = percentile_from_hist(hist, n, p_high);

    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.bit_depth = 8;
    out.samples.resize(n);

    if (hi <= lo) {
        std::fill(out.samples.begin(), out.samples.end(), uint16_t{0});
        return out;
    }
    const double scale = 255.0 / (hi - lo);
    for (size_t i = 0; i < n; ++i) {
        const double mapped = (static_cast<double>(img.samples[i]) - lo) * scale;
        out.samples[i] = static_cast<uint16_t>(std::clamp(std::lround(mapped), 0l, 255l));
    }
    return out;
}

RgbImage merge_channels(const GrayImage& bf, const GrayImage& gfp) {
    if (bf.width != gfp.width || bf.height != gfp.height) {
        throw ValidationError("merge_channels: dimension mismatch, bf " +
                              std::to_string(bf.width) + "x" + std::to_string(bf.height) +
                              " vs gfp " + std::to_string(gfp.width) + "x" +
                              std::to_string(gfp.height));
    }
    if (bf.bit_depth != 8 || gfp.bit_depth != 8) {
        throw ValidationError("merge_channels: both channels must be 8-bit");
    }
    RgbImage out;
    out.width = bf.width;
    out.height = bf.height;
    out.samples.resize(bf.pixel_count() * 3);
    for (size_t i = 0; i < bf.pixel_count(); ++i) {
        const uint8_t b = static_cast<uint8_t>(bf.samples[i]);
        const uint8_t g = static_cast<uint8_t>(gfp.samples[i]);
        out.samples[3 * i] = b;
        out.samples[3 * i + 1] = std::max(b, g);
        out.samples[3 * i + 2] = b;
    }
    return out;
}

} // namespace platekit
