#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hazardqa {

/// Interleaved 8-bit RGB raster, row-major, no padding.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0);

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)) * 3;
    }
    std::uint8_t at(int x, int y, int channel) const { return pixels[offset(x, y) + channel]; }
    std::uint8_t& at(int x, int y, int channel) { return pixels[offset(x, y) + channel]; }

    bool empty() const { return width <= 0 || height <= 0; }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Decodes a PNG or JPEG file. Throws UndecodableImage.
Image load_image(const std::filesystem::path& path);

/// Decodes an in-memory PNG or JPEG buffer. Throws UndecodableImage.
Image decode_image(std::span<const std::uint8_t> bytes);

/// Lossless PNG encoding; identical rasters produce identical bytes.
std::string encode_png(const Image& image);

void save_png(const Image& image, const std::filesystem::path& path);

}  // namespace hazardqa
