#include "sphereview/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sphereview::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& msg, const std::string& path) {
    throw std::runtime_error(msg + ": " + path);
}

} // namespace

Grid read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open image", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("libpng init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("libpng init failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("not a readable PNG", path);
    }

    png_init_io(png, fp.get());
    png_read_png(png, info,
                 PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_EXPAND |
                     PNG_TRANSFORM_PACKING,
                 nullptr);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unsupported PNG color type after expansion", path);
    }

    Grid out({static_cast<int>(w), static_cast<int>(h)}, channels);
    png_bytepp rows = png_get_rows(png, info);
    for (png_uint_32 r = 0; r < h; ++r) {
        const png_byte* row = rows[r];
        for (png_uint_32 c = 0; c < w; ++c)
            for (int ch = 0; ch < channels; ++ch)
                out.at(ch, static_cast<int>(r), static_cast<int>(c)) = row[c * channels + ch];
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::string& path, const Grid& img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw std::invalid_argument("write_png: only 1- or 3-channel images are supported");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot create image", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("libpng init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail("libpng init failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("PNG write failed", path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8,
                 img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<size_t>(img.width()) * img.channels());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c)
            for (int ch = 0; ch < img.channels(); ++ch) {
                float v = std::nearbyint(img.at(ch, r, c));
                row[static_cast<size_t>(c) * img.channels() + ch] =
                    static_cast<png_byte>(v < 0.0f ? 0.0f : (v > 255.0f ? 255.0f : v));
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

Mask read_mask_png(const std::string& path) {
    Grid img = read_png(path);
    Mask mask(img.dims());
    const float* p = img.plane(0);
    for (size_t i = 0; i < mask.data().size(); ++i) mask.data()[i] = p[i] != 0.0f;
    return mask;
}

void write_mask_png(const std::string& path, const Mask& mask) {
    Grid img(mask.dims(), 1);
    for (size_t i = 0; i < mask.data().size(); ++i)
        img.data()[i] = mask.data()[i] ? 255.0f : 0.0f;
    write_png(path, img);
}

Grid read_prediction_png(const std::string& path) {
    Grid img = read_png(path);
    if (img.channels() != 1)
        throw std::runtime_error("prediction must be grayscale: " + path);
    for (float& v : img.data()) v /= 255.0f;
    return img;
}

namespace {

constexpr char kFgridMagic[4] = {'F', 'G', 'R', 'D'};

uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_u32le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

static_assert(sizeof(float) == 4, "fgrid i/o assumes 32-bit float");

} // namespace

Grid read_fgrid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open feature grid", path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFgridMagic, 4) != 0)
        fail("not a feature-grid file (bad magic)", path);
    uint32_t w = read_u32le(in), h = read_u32le(in), c = read_u32le(in);
    if (!in) fail("feature-grid header truncated", path);
    if (w == 0 || h == 0 || c == 0 || static_cast<uint64_t>(w) * h * c > (1u << 30))
        fail("feature-grid dimensions out of range", path);
    Grid out({static_cast<int>(w), static_cast<int>(h)}, static_cast<int>(c));
    in.read(reinterpret_cast<char*>(out.data().data()),
            static_cast<std::streamsize>(out.data().size() * sizeof(float)));
    if (!in) fail("feature-grid data truncated", path);
    return out;
}

void write_fgrid(const std::string& path, const Grid& fg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot create feature grid", path);
    out.write(kFgridMagic, 4);
    write_u32le(out, static_cast<uint32_t>(fg.width()));
    write_u32le(out, static_cast<uint32_t>(fg.height()));
    write_u32le(out, static_cast<uint32_t>(fg.channels()));
    out.write(reinterpret_cast<const char*>(fg.data().data()),
              static_cast<std::streamsize>(fg.data().size() * sizeof(float)));
    if (!out) fail("failed writing feature grid", path);
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace sphereview::io
