#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "platekit/config.hpp"
#include "platekit/errors.hpp"

namespace platekit {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& where, const std::string& key,
                            const std::string& value, const char* want) {
    throw ConfigError(where + ": key '" + key + "' needs " + want + ", got '" + value + "'");
}

struct Setter {
    std::function<void(RunConfig&, const std::string&, const std::string&)> apply;
};

template <typename T>
T parse_number(const std::string& where, const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    std::from_chars_result r;
    if constexpr (std::is_floating_point_v<T>)
        r = std::from_chars(first, last, out);
    else
        r = std::from_chars(first, last, out, 10);
    if (r.ec != std::errc() || r.ptr != last)
        bad_value(where, key, value, std::is_floating_point_v<T> ? "a number" : "an integer");
    return out;
}

bool parse_bool(const std::string& where, const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "yes" || value == "1") return true;
    if (value == "off" || value == "false" || value == "no" || value == "0") return false;
    bad_value(where, key, value, "on/off");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto str = [&](const char* key, std::string RunConfig::* field) {
            t[key] = {[field](RunConfig& c, const std::string&, const std::string& v) {
                c.*field = v;
            }};
        };
        auto num = [&]<typename T>(const char* key, T RunConfig::* field) {
            t[key] = {[key, field](RunConfig& c, const std::string& where, const std::string& v) {
                c.*field = parse_number<T>(where, key, v);
            }};
        };
        auto flag = [&](const char* key, bool RunConfig::* field) {
            t[key] = {[key, field](RunConfig& c, const std::string& where, const std::string& v) {
                c.*field = parse_bool(where, key, v);
            }};
        };

        str("manifest", &RunConfig::manifest);
        str("out", &RunConfig::out);
        str("mask_dir", &RunConfig::mask_dir);
        str("composites_dir", &RunConfig::composites_dir);
        str("path_root", &RunConfig::path_root);
        str("list", &RunConfig::list);
        str("detections", &RunConfig::detections);
        str("detections_dir", &RunConfig::detections_dir);
        str("noise_confusion", &RunConfig::noise_confusion);
        t["classes"] = {[](RunConfig& c, const std::string& where, const std::string& v) {
            c.classes = split(v, ',');
            for (const std::string& name : c.classes)
                if (name.empty()) throw ConfigError(where + ": empty class name in 'classes'");
        }};

        flag("quadrants", &RunConfig::quadrants);
        flag("clip", &RunConfig::clip_straddlers);
        flag("stretch", &RunConfig::stretch);
        flag("allow_missing", &RunConfig::allow_missing);
        flag("mock", &RunConfig::mock);

        num("folds", &RunConfig::folds);
        num("fold", &RunConfig::fold);
        num("valid_frac", &RunConfig::valid_frac);
        num("seed", &RunConfig::seed);
        num("jobs", &RunConfig::jobs);
        num("stretch_low", &RunConfig::stretch_low);
        num("stretch_high", &RunConfig::stretch_high);
        num("margin_frac", &RunConfig::margin_frac);
        num("min_area_px", &RunConfig::min_area_px);
        num("max_area_frac", &RunConfig::max_area_frac);
        num("iou_thresh", &RunConfig::iou_thresh);
        num("overlay_count", &RunConfig::overlay_count);
        num("synth_plates", &RunConfig::synth_plates);
        num("synth_width", &RunConfig::synth_width);
        num("synth_height", &RunConfig::synth_height);
        num("synth_min_cells", &RunConfig::synth_min_cells);
        num("synth_max_cells", &RunConfig::synth_max_cells);
        num("synth_min_radius", &RunConfig::synth_min_radius);
        num("synth_max_radius", &RunConfig::synth_max_radius);
        num("synth_max_overlap", &RunConfig::synth_max_overlap);
        num("synth_pixel_noise", &RunConfig::synth_pixel_noise);
        num("noise_drop_prob", &RunConfig::noise_drop_prob);
        num("noise_jitter_sigma", &RunConfig::noise_jitter_sigma);
        num("noise_fp_rate", &RunConfig::noise_fp_rate);
        num("noise_conf_correct", &RunConfig::noise_conf_correct);
        num("noise_conf_error", &RunConfig::noise_conf_error);
        num("noise_conf_spread", &RunConfig::noise_conf_spread);
        return t;
    }();
    return table;
}

} // namespace

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        const std::string where = origin + ":" + std::to_string(line_no);
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");

        const auto& table = setters();
        auto it = table.find(key);
        if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
        it->second.apply(cfg, where, value);
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg;
    apply_config_text(cfg, buf.str(), path);
    return cfg;
}

std::vector<std::vector<double>> parse_confusion_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    if (trim(text).empty()) return rows;
    for (const std::string& row_text : split(text, ';')) {
        std::vector<double> row;
        for (const std::string& cell : split(row_text, ','))
            row.push_back(parse_number<double>("noise_confusion", "noise_confusion", cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace platekit
