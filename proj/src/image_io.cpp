#include "arsr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace arsr {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint8_t to_byte(float v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0f), 0L, 255L));
}

float to_float(std::uint8_t v) { return static_cast<float>(v) / 255.0f; }

// BT.709: Kr = 0.2126, Kb = 0.0722. BT.601: Kr = 0.299, Kb = 0.114.
void matrix_coeffs(ColorMatrix m, float& kr, float& kb) {
    if (m == ColorMatrix::kBt709) {
        kr = 0.2126f;
        kb = 0.0722f;
    } else {
        kr = 0.299f;
        kb = 0.114f;
    }
}

} // namespace

Image read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    png_byte sig[8] = {};
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw FormatError(path.string() + " is not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }
    Image img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG data in " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit gray or RGB.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_packing(png);
    const png_byte color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = static_cast<int>(png_get_channels(png, info));
    if (img.channels != 1 && img.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + " decoded to unsupported channel count " +
                          std::to_string(img.channels));
    }
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y) {
        rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * img.width * img.channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.width < 1 || img.height < 1 || (img.channels != 1 && img.channels != 3) ||
        img.pixels.size() !=
            static_cast<std::size_t>(img.width) * img.height * img.channels) {
        throw ContractError("write_png given an inconsistent image");
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() +
                                                 static_cast<std::size_t>(y) * img.width *
                                                     img.channels));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void rgb_to_ycbcr(float r, float g, float b, ColorMatrix m, float& y, float& cb, float& cr) {
    float kr = 0.0f, kb = 0.0f;
    matrix_coeffs(m, kr, kb);
    y = kr * r + (1.0f - kr - kb) * g + kb * b;
    cb = (b - y) / (2.0f * (1.0f - kb)) + 0.5f;
    cr = (r - y) / (2.0f * (1.0f - kr)) + 0.5f;
}

void ycbcr_to_rgb(float y, float cb, float cr, ColorMatrix m, float& r, float& g, float& b) {
    float kr = 0.0f, kb = 0.0f;
    matrix_coeffs(m, kr, kb);
    r = y + 2.0f * (1.0f - kr) * (cr - 0.5f);
    b = y + 2.0f * (1.0f - kb) * (cb - 0.5f);
    g = (y - kr * r - kb * b) / (1.0f - kr - kb);
}

Frame image_to_frame(const Image& img, ColorMatrix m) {
    if (img.width < 1 || img.height < 1) {
        throw ContractError("image_to_frame given an empty image");
    }
    Frame f = make_frame({img.width, img.height});
    if (img.channels == 1) {
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            f.y.data[i] = to_float(img.pixels[i]);
        }
        return f;
    }
    if (img.channels != 3) {
        throw ContractError("image_to_frame supports 1 or 3 channels, got " +
                            std::to_string(img.channels));
    }

    // Full-resolution conversion, then a 2x2 box filter for chroma.
    Tensor cb_full(1, 1, img.height, img.width);
    Tensor cr_full(1, 1, img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t p = (static_cast<std::size_t>(y) * img.width + x) * 3;
            float yy = 0.0f, cb = 0.0f, cr = 0.0f;
            rgb_to_ycbcr(to_float(img.pixels[p]), to_float(img.pixels[p + 1]),
                         to_float(img.pixels[p + 2]), m, yy, cb, cr);
            f.y.at(0, 0, y, x) = yy;
            cb_full.at(0, 0, y, x) = cb;
            cr_full.at(0, 0, y, x) = cr;
        }
    }
    for (int cy = 0; cy < f.cb.height; ++cy) {
        for (int cx = 0; cx < f.cb.width; ++cx) {
            float cb_acc = 0.0f, cr_acc = 0.0f;
            int count = 0;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const int y = cy * 2 + dy;
                    const int x = cx * 2 + dx;
                    if (y >= img.height || x >= img.width) continue;
                    cb_acc += cb_full.at(0, 0, y, x);
                    cr_acc += cr_full.at(0, 0, y, x);
                    ++count;
                }
            }
            f.cb.at(0, 0, cy, cx) = cb_acc / count;
            f.cr.at(0, 0, cy, cx) = cr_acc / count;
        }
    }
    return f;
}

Image frame_to_image(const Frame& f, ColorMatrix m, int channels) {
    validate_frame(f);
    if (channels != 1 && channels != 3) {
        throw ContractError("frame_to_image supports 1 or 3 channels");
    }
    Image img;
    img.width = f.y.width;
    img.height = f.y.height;
    img.channels = channels;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * channels);
    if (channels == 1) {
        for (std::size_t i = 0; i < f.y.data.size(); ++i) {
            img.pixels[i] = to_byte(f.y.data[i]);
        }
        return img;
    }
    const Size full{img.width, img.height};
    const Tensor cb = interp_bilinear(f.cb, full);
    const Tensor cr = interp_bilinear(f.cr, full);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float r = 0.0f, g = 0.0f, b = 0.0f;
            ycbcr_to_rgb(f.y.at(0, 0, y, x), cb.at(0, 0, y, x), cr.at(0, 0, y, x), m, r, g, b);
            const std::size_t p = (static_cast<std::size_t>(y) * img.width + x) * 3;
            img.pixels[p] = to_byte(r);
            img.pixels[p + 1] = to_byte(g);
            img.pixels[p + 2] = to_byte(b);
        }
    }
    return img;
}

} // namespace arsr
