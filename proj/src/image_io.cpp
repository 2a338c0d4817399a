#include <cstdint>
#include <cstdio>
#include <cstring>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "platekit/errors.hpp"
#include "platekit/image_io.hpp"

namespace platekit {

namespace {

cv::Mat read_unchanged(const std::string& path) {
    cv::Mat mat = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw DataError("failed to read image: " + path);
    return mat;
}

void write_or_throw(const std::string& path, const cv::Mat& mat) {
    bool ok = false;
    try {
        ok = cv::imwrite(path, mat);
    } catch (const cv::Exception& e) {
        throw DataError("failed to write image: " + path + " (" + e.err + ")");
    }
    if (!ok) throw DataError("failed to write image: " + path);
}

} // namespace

GrayImage load_gray(const std::string& path) {
    cv::Mat mat = read_unchanged(path);
    if (mat.channels() != 1)
        throw DataError("expected single-channel image, got " + std::to_string(mat.channels()) +
                        " channels: " + path);

    GrayImage img;
    img.width = mat.cols;
    img.height = mat.rows;
    img.samples.resize(img.pixel_count());
    if (mat.depth() == CV_8U) {
        img.bit_depth = 8;
        for (int y = 0; y < mat.rows; ++y) {
            const uint8_t* row = mat.ptr<uint8_t>(y);
            for (int x = 0; x < mat.cols; ++x) img.at(x, y) = row[x];
        }
    } else if (mat.depth() == CV_16U) {
        img.bit_depth = 16;
        for (int y = 0; y < mat.rows; ++y) {
            const uint16_t* row = mat.ptr<uint16_t>(y);
            for (int x = 0; x < mat.cols; ++x) img.at(x, y) = row[x];
        }
    } else {
        throw DataError("unsupported sample depth (want 8 or 16 bit): " + path);
    }
    return img;
}

void save_gray(const GrayImage& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0) throw DataError("empty image: " + path);
    cv::Mat mat;
    if (img.bit_depth == 8) {
        mat.create(img.height, img.width, CV_8UC1);
        for (int y = 0; y < img.height; ++y) {
            uint8_t* row = mat.ptr<uint8_t>(y);
            for (int x = 0; x < img.width; ++x) row[x] = static_cast<uint8_t>(img.at(x, y));
        }
    } else {
        mat.create(img.height, img.width, CV_16UC1);
        for (int y = 0; y < img.height; ++y) {
            uint16_t* row = mat.ptr<uint16_t>(y);
            for (int x = 0; x < img.width; ++x) row[x] = img.at(x, y);
        }
    }
    write_or_throw(path, mat);
}

InstanceMask load_mask(const std::string& path) {
    GrayImage img = load_gray(path);
    InstanceMask mask = InstanceMask::zeros(img.width, img.height);
    for (size_t i = 0; i < img.samples.size(); ++i) mask.labels[i] = img.samples[i];
    return mask;
}

void save_mask(const InstanceMask& mask, const std::string& path) {
    GrayImage img = GrayImage::filled(mask.width, mask.height, 0, 16);
    for (size_t i = 0; i < mask.labels.size(); ++i) {
        if (mask.labels[i] > 65535)
            throw DataError("mask label " + std::to_string(mask.labels[i]) +
                            " does not fit 16-bit file: " + path);
        img.samples[i] = static_cast<uint16_t>(mask.labels[i]);
    }
    save_gray(img, path);
}

RgbImage load_rgb(const std::string& path) {
    cv::Mat mat = read_unchanged(path);
    if (mat.channels() != 3 || mat.depth() != CV_8U)
        throw DataError("expected 8-bit 3-channel image: " + path);
    cv::Mat rgb;
    cv::cvtColor(mat, rgb, cv::COLOR_BGR2RGB);

    RgbImage img;
    img.width = rgb.cols;
    img.height = rgb.rows;
    img.samples.resize(static_cast<size_t>(rgb.cols) * rgb.rows * 3);
    for (int y = 0; y < rgb.rows; ++y)
        std::memcpy(img.samples.data() + img.offset(0, y), rgb.ptr<uint8_t>(y),
                    static_cast<size_t>(rgb.cols) * 3);
    return img;
}

void save_rgb(const RgbImage& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0) throw DataError("empty image: " + path);
    cv::Mat rgb(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y)
        std::memcpy(rgb.ptr<uint8_t>(y), img.samples.data() + img.offset(0, y),
                    static_cast<size_t>(img.width) * 3);
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    write_or_throw(path, bgr);
}

std::pair<int, int> image_dims(const std::string& path) {
    // PNG: signature, then the IHDR chunk holds width and height big-endian.
    static const uint8_t kPngSig[8] = {0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A};
    if (FILE* f = std::fopen(path.c_str(), "rb")) {
        uint8_t head[24];
        const size_t got = std::fread(head, 1, sizeof(head), f);
        std::fclose(f);
        if (got == sizeof(head) && std::memcmp(head, kPngSig, 8) == 0 &&
            std::memcmp(head + 12, "IHDR", 4) == 0) {
            auto be32 = [&](int off) {
                return (static_cast<uint32_t>(head[off]) << 24) |
                       (static_cast<uint32_t>(head[off + 1]) << 16) |
                       (static_cast<uint32_t>(head[off + 2]) << 8) | head[off + 3];
            };
            const uint32_t w = be32(16);
            const uint32_t h = be32(20);
            if (w > 0 && h > 0 && w <= 1u << 24 && h <= 1u << 24)
                return {static_cast<int>(w), static_cast<int>(h)};
        }
    }
    cv::Mat mat = read_unchanged(path);
    return {mat.cols, mat.rows};
}

} // namespace platekit
