#include "platekit/detadapt.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace platekit {

using ordered_json = nlohmann::ordered_json;

double quantize_confidence(double c) {
    return std::round(c * 1e6) / 1e6;
}

std::string write_detections(const DetectionFile& file) {
    ordered_json root = ordered_json::array();
    for (const ImageDetections& entry : file.images) {
        ordered_json dets = ordered_json::array();
        for (const Detection& d : entry.detections) {
            dets.push_back({{"class_id", d.class_id},
                            {"confidence", quantize_confidence(d.confidence)},
                            {"cx", d.box.cx},
                            {"cy", d.box.cy},
                            {"w", d.box.w},
                            {"h", d.box.h}});
        }
        root.push_back({{"image", entry.image},
                        {"width", entry.width},
                        {"height", entry.height},
                        {"detections", std::move(dets)}});
    }
    return root.dump(2) + "\n";
}

DetectionFile read_detections_text(const std::string& text, const ClassSet& classes,
                                   const std::string& origin) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(origin + ": invalid JSON: " + e.what());
    }
    if (!root.is_array()) {
        throw DataError(origin + ": top-level value must be an array of image entries");
    }

    DetectionFile file;
    std::set<std::string> seen;
    for (const auto& item : root) {
        ImageDetections entry;
        try {
            entry.image = item.at("image").get<std::string>();
            entry.width = item.at("width").get<int>();
            entry.height = item.at("height").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(origin + ": malformed image entry: " + e.what());
        }
        if (entry.width <= 0 || entry.height <= 0) {
            throw DataError(origin + ": " + entry.image + ": non-positive dimensions");
        }
        if (!seen.insert(entry.image).second) {
            throw DataError(origin + ": duplicate image entry: " + entry.image);
        }
        const auto dets_it = item.find("detections");
        if (dets_it == item.end() || !dets_it->is_array()) {
            throw DataError(origin + ": " + entry.image + ": missing detections array");
        }
        int index = 0;
        for (const auto& dj : *dets_it) {
            Detection d;
            try {
                d.class_id = dj.at("class_id").get<int>();
                d.confidence = dj.at("confidence").get<double>();
                d.box.cx = dj.at("cx").get<double>();
                d.box.cy = dj.at("cy").get<double>();
                d.box.w = dj.at("w").get<double>();
                d.box.h = dj.at("h").get<double>();
            } catch (const nlohmann::json::exception& e) {
                throw DataError(origin + ": " + entry.image + ": detection " +
                                std::to_string(index) + ": " + e.what());
            }
            if (d.class_id < 0 || d.class_id >= classes.size()) {
                throw DataError(origin + ": " + entry.image + ": detection " +
                                std::to_string(index) + ": unknown class id " +
                                std::to_string(d.class_id));
            }
            if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
                throw DataError(origin + ": " + entry.image + ": detection " +
                                std::to_string(index) + ": confidence " +
                                std::to_string(d.confidence) + " outside [0,1]");
            }
            try {
                validate_norm(d.box);
            } catch (const ValidationError& e) {
                throw DataError(origin + ": " + entry.image + ": detection " +
                                std::to_string(index) + ": " + e.what());
            }
            entry.detections.push_back(d);
            ++index;
        }
        file.images.push_back(std::move(entry));
    }
    return file;
}

void save_detections(const std::string& path, const DetectionFile& file) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << write_detections(file);
    if (!out) throw DataError("write failed: " + path);
}

DetectionFile read_detections(const std::string& path, const ClassSet& classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open detections file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_detections_text(buf.str(), classes, path);
}

} // namespace platekit
