#include "learnorder/image.hpp"

#include "learnorder/error.hpp"

#include <fmt/format.h>
#include <jpeglib.h>
#include <png.h>

#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

namespace learnorder {

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : GrayImage(width, height, std::vector<double>(width * height, fill)) {}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "image extent must be positive");
    }
    if (pixels_.size() != width_ * height_) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{} pixels for a {}x{} image", pixels_.size(), width_, height_));
    }
    for (double v : pixels_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite pixel value");
    }
}

GrayImage to_grayscale(const RgbImage& image) {
    if (image.width == 0 || image.height == 0 ||
        image.rgb.size() != image.width * image.height * 3) {
        throw Error(ErrorCode::UnsupportedFormat, "RGB raster has inconsistent extent");
    }
    std::vector<double> luma(image.width * image.height);
    for (std::size_t i = 0; i < luma.size(); ++i) {
        const auto* p = &image.rgb[i * 3];
        luma[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return GrayImage(image.width, image.height, std::move(luma));
}

GrayImage resample(const GrayImage& image, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw Error(ErrorCode::InvalidArgument, "resample target is empty");
    if (width == image.width() && height == image.height()) return image;
    const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
    const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
    // Coverage weights of source cells [i, i+1) intersecting target cell [a, b).
    auto overlap = [](double a, double b, std::size_t i) {
        const double lo = std::max(a, static_cast<double>(i));
        const double hi = std::min(b, static_cast<double>(i + 1));
        return std::max(0.0, hi - lo);
    };
    std::vector<double> out(width * height);
    for (std::size_t ty = 0; ty < height; ++ty) {
        const double y0 = ty * sy, y1 = (ty + 1) * sy;
        const auto ya = static_cast<std::size_t>(std::floor(y0));
        const auto yb = std::min(image.height(), static_cast<std::size_t>(std::ceil(y1)));
        for (std::size_t tx = 0; tx < width; ++tx) {
            const double x0 = tx * sx, x1 = (tx + 1) * sx;
            const auto xa = static_cast<std::size_t>(std::floor(x0));
            const auto xb = std::min(image.width(), static_cast<std::size_t>(std::ceil(x1)));
            double acc = 0.0, weight = 0.0;
            for (std::size_t y = ya; y < yb; ++y) {
                const double wy = overlap(y0, y1, y);
                for (std::size_t x = xa; x < xb; ++x) {
                    const double w = wy * overlap(x0, x1, x);
                    acc += w * image(x, y);
                    weight += w;
                }
            }
            out[ty * width + tx] = weight > 0 ? acc / weight : 0.0;
        }
    }
    return GrayImage(width, height, std::move(out));
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void decode_failure(const std::filesystem::path& path, const std::string& why) {
    throw Error(ErrorCode::ImageDecodeError, fmt::format("{}: {}", path.string(), why));
}

RgbImage load_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str())) {
        decode_failure(path, img.message);
    }
    img.format = PNG_FORMAT_RGB;
    RgbImage out(img.width, img.height);
    if (out.rgb.empty()) {
        png_image_free(&img);
        decode_failure(path, "empty image");
    }
    // Composites alpha over black; intensities are otherwise untouched.
    if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
        std::string why = img.message;
        png_image_free(&img);
        decode_failure(path, why);
    }
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RgbImage load_jpeg(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) decode_failure(path, "cannot open file");

    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    // Only trivially destructible locals live across setjmp.
    RgbImage* result = new RgbImage();
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        delete result;
        decode_failure(path, err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    if (cinfo.output_components != 3) {
        jpeg_destroy_decompress(&cinfo);
        delete result;
        throw Error(ErrorCode::UnsupportedFormat,
                    fmt::format("{}: unsupported JPEG colour layout", path.string()));
    }
    *result = RgbImage(cinfo.output_width, cinfo.output_height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = result->rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) *
                                                cinfo.output_width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    RgbImage out = std::move(*result);
    delete result;
    return out;
}

} // namespace

RgbImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) decode_failure(path, "cannot open file");
    std::array<unsigned char, 8> magic{};
    in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    in.close();
    static constexpr std::array<unsigned char, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got == 8 && magic == png_sig) return load_png(path);
    if (got >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) return load_jpeg(path);
    if (got == 0) decode_failure(path, "empty file");
    throw Error(ErrorCode::UnsupportedFormat,
                fmt::format("{}: not a PNG or JPEG file", path.string()));
}

void save_png(const std::filesystem::path& path, const RgbImage& image) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.rgb.data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, fmt::format("cannot write PNG '{}': {}", path.string(), img.message));
    }
}

} // namespace learnorder
