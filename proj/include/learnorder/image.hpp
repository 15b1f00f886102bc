#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace learnorder {

// 8-bit interleaved RGB raster, row-major.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb; // width * height * 3

    RgbImage() = default;
    RgbImage(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}

    std::uint8_t* pixel(std::size_t x, std::size_t y) { return &rgb[(y * width + x) * 3]; }
    const std::uint8_t* pixel(std::size_t x, std::size_t y) const {
        return &rgb[(y * width + x) * 3];
    }
};

// Real-valued intensities in [0,255], row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
    // Throws Error(InvalidArgument) on size mismatch, zero extent or
    // non-finite pixels.
    GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    double operator()(std::size_t x, std::size_t y) const noexcept {
        return pixels_[y * width_ + x];
    }
    double& operator()(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }

    const std::vector<double>& pixels() const noexcept { return pixels_; }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> pixels_;
};

// luma = 0.299 R + 0.587 G + 0.114 B, kept as a real.
GrayImage to_grayscale(const RgbImage& image);

// Area-averaging resample to the target size (used to downsample large
// images before the quadratic-cost metrics).
GrayImage resample(const GrayImage& image, std::size_t width, std::size_t height);

// Decodes PNG (8/16-bit, gray/RGB, with or without alpha, palette) or
// baseline/progressive JPEG, detected by magic bytes. Alpha is composited
// over black.
// Throws ImageDecodeError (missing/corrupt file) or UnsupportedFormat.
RgbImage load_image(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const RgbImage& image);

} // namespace learnorder
