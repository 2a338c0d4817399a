#pragma once

#include <string>
#include <vector>

#include "platekit/types.hpp"

namespace platekit {

// Detector output for one image. Paths are matched against ground truth by
// exact string equality (after optional root-prefix stripping, see evalkit).
struct ImageDetections {
    std::string image;
    int width = 0;
    int height = 0;
    std::vector<Detection> detections;
};

struct DetectionFile {
    std::vector<ImageDetections> images;
};

// Round a confidence to the 6-decimal grid the file format carries.
double quantize_confidence(double c);

// JSON schema: a top-level array of
//   {"image": str, "width": int, "height": int,
//    "detections": [{"class_id": int, "confidence": num,
//                    "cx": num, "cy": num, "w": num, "h": num}]}
// Confidences are carried at 6-decimal precision; box fields round-trip
// exactly. Serialization is byte-deterministic.
std::string write_detections(const DetectionFile& file);
DetectionFile read_detections_text(const std::string& text, const ClassSet& classes,
                                   const std::string& origin);

void save_detections(const std::string& path, const DetectionFile& file);
DetectionFile read_detections(const std::string& path, const ClassSet& classes);

} // namespace platekit
