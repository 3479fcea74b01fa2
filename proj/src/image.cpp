#include "hazardqa/image.hpp"

#include <algorithm>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

Image from_bgr(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    Image image(rgb.cols, rgb.rows);
    for (int y = 0; y < rgb.rows; ++y) {
        const auto* row = rgb.ptr<std::uint8_t>(y);
        std::copy(row, row + static_cast<std::ptrdiff_t>(rgb.cols) * 3,
                  image.pixels.begin() + static_cast<std::ptrdiff_t>(image.offset(0, y)));
    }
    return image;
}

}  // namespace

Image::Image(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UndecodableImage("cannot open image " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const UndecodableImage&) {
        throw UndecodableImage("cannot decode image " + path.string());
    }
}

Image decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw UndecodableImage("empty image buffer");
    }
    cv::Mat buffer(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    cv::Mat decoded;
    try {
        decoded = cv::imdecode(buffer, cv::IMREAD_COLOR);
    } catch (const cv::Exception&) {
        decoded.release();
    }
    if (decoded.empty() || decoded.cols <= 0 || decoded.rows <= 0) {
        throw UndecodableImage("image buffer is not a decodable PNG or JPEG");
    }
    return from_bgr(decoded);
}

std::string encode_png(const Image& image) {
    if (image.empty()) {
        throw InvalidArgument("cannot encode an empty image");
    }
    cv::Mat rgb(image.height, image.width, CV_8UC3, const_cast<std::uint8_t*>(image.pixels.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    std::vector<std::uint8_t> out;
    const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6};
    if (!cv::imencode(".png", bgr, out, params)) {
        throw IoFailure("PNG encoding failed");
    }
    return {out.begin(), out.end()};
}

void save_png(const Image& image, const std::filesystem::path& path) {
    const std::string bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoFailure("cannot write " + path.string());
    }
}

}  // namespace hazardqa
