#ifndef ARSR_IMAGE_IO_HPP
#define ARSR_IMAGE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "arsr/pipeline.hpp"

namespace arsr {

enum class ColorMatrix { kBt709, kBt601 };

// 8-bit interleaved raster, 1 (gray) or 3 (RGB) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;
};

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

// Full-range conversions on [0,1] floats. Cb/Cr are centered on 0.5.
void rgb_to_ycbcr(float r, float g, float b, ColorMatrix m, float& y, float& cb, float& cr);
void ycbcr_to_rgb(float y, float cb, float cr, ColorMatrix m, float& r, float& g, float& b);

// RGB images go through the color matrix and a 2x2 box filter down to 4:2:0
// chroma; grayscale images get neutral chroma.
Frame image_to_frame(const Image& img, ColorMatrix m = ColorMatrix::kBt709);

// channels 1 renders luma only; channels 3 upsamples chroma bilinearly back
// to full resolution first.
Image frame_to_image(const Frame& f, ColorMatrix m = ColorMatrix::kBt709, int channels = 3);

} // namespace arsr

#endif
