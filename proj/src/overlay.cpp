#include <cmath>
#include <cstdio>
#include <cstring>

#include <opencv2/imgproc.hpp>

#include "platekit/overlay.hpp"

namespace platekit {

std::array<uint8_t, 3> class_color(int class_id) {
    static const std::array<std::array<uint8_t, 3>, 8> palette = {{
        {230, 64, 52},   // red
        {60, 180, 75},   // green
        {67, 99, 216},   // blue
        {255, 190, 0},   // yellow
        {145, 30, 180},  // purple
        {66, 212, 244},  // cyan
        {245, 130, 49},  // orange
        {240, 80, 174},  // magenta
    }};
    return palette[static_cast<size_t>(((class_id % 8) + 8) % 8)];
}

RgbImage render_overlay(const RgbImage& base, const std::vector<Detection>& dets,
                        const ClassSet& classes, const ImageMeta& meta) {
    cv::Mat canvas(base.height, base.width, CV_8UC3);
    for (int y = 0; y < base.height; ++y)
        std::memcpy(canvas.ptr<uint8_t>(y), base.samples.data() + base.offset(0, y),
                    static_cast<size_t>(base.width) * 3);

    for (const Detection& det : dets) {
        const BBoxPx box = to_px(det.box, meta);
        const auto rgb = class_color(det.class_id);
        const cv::Scalar color(rgb[0], rgb[1], rgb[2]);
        const cv::Point tl(static_cast<int>(std::lround(box.x_min)),
                           static_cast<int>(std::lround(box.y_min)));
        const cv::Point br(static_cast<int>(std::lround(box.x_max)) - 1,
                           static_cast<int>(std::lround(box.y_max)) - 1);
        cv::rectangle(canvas, tl, br, color, 1);

        char text[64];
        std::snprintf(text, sizeof(text), "%s %.2f", classes.name(det.class_id).c_str(),
                      det.confidence);
        const cv::Point anchor(tl.x, std::max(tl.y - 3, 9));
        cv::putText(canvas, text, anchor, cv::FONT_HERSHEY_PLAIN, 0.8, color, 1, cv::LINE_8);
    }

    RgbImage out;
    out.width = base.width;
    out.height = base.height;
    out.samples.resize(base.samples.size());
    for (int y = 0; y < out.height; ++y)
        std::memcpy(out.samples.data() + out.offset(0, y), canvas.ptr<uint8_t>(y),
                    static_cast<size_t>(out.width) * 3);
    return out;
}

} // namespace platekit
