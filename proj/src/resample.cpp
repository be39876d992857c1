#include "arsr/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace arsr {

namespace {

void check_plane(const Tensor& plane, Size out_res, const char* op) {
    if (plane.batch != 1 || plane.channels != 1) {
        throw ContractError(std::string(op) + " expects a single-channel plane, got " +
                            plane.shape_str());
    }
    if (out_res.width < 1 || out_res.height < 1) {
        throw ContractError(std::string(op) + " target size must be positive, got " +
                            std::to_string(out_res.width) + "x" + std::to_string(out_res.height));
    }
}

// Per-output-coordinate taps: clamped source indices plus weights.
struct Taps {
    std::vector<int> index;     // out_size * taps_per_pixel
    std::vector<double> weight;
    int per_pixel = 0;
};

double cubic_weight(double t) {
    // Keys cubic convolution kernel with a = -0.5 (Catmull-Rom).
    constexpr double a = -0.5;
    const double at = std::abs(t);
    if (at <= 1.0) return (a + 2.0) * at * at * at - (a + 3.0) * at * at + 1.0;
    if (at < 2.0) return a * (at * at * at - 5.0 * at * at + 8.0 * at - 4.0);
    return 0.0;
}

enum class Filter { kNearest, kBilinear, kBicubic, kLanczos };

Taps build_taps(int in_size, int out_size, Filter filter, int lanczos_a) {
    Taps taps;
    switch (filter) {
        case Filter::kNearest: taps.per_pixel = 1; break;
        case Filter::kBilinear: taps.per_pixel = 2; break;
        case Filter::kBicubic: taps.per_pixel = 4; break;
        case Filter::kLanczos: taps.per_pixel = 2 * lanczos_a; break;
    }
    taps.index.resize(static_cast<std::size_t>(out_size) * taps.per_pixel);
    taps.weight.resize(taps.index.size());

    const double ratio = static_cast<double>(in_size) / out_size;
    auto clamp_index = [in_size](int i) { return std::clamp(i, 0, in_size - 1); };

    for (int dst = 0; dst < out_size; ++dst) {
        const double src = (dst + 0.5) * ratio - 0.5;
        const std::size_t base = static_cast<std::size_t>(dst) * taps.per_pixel;
        switch (filter) {
            case Filter::kNearest: {
                taps.index[base] = clamp_index(static_cast<int>(std::floor(src + 0.5)));
                taps.weight[base] = 1.0;
                break;
            }
            case Filter::kBilinear: {
                const int i0 = static_cast<int>(std::floor(src));
                const double frac = src - i0;
                taps.index[base] = clamp_index(i0);
                taps.index[base + 1] = clamp_index(i0 + 1);
                taps.weight[base] = 1.0 - frac;
                taps.weight[base + 1] = frac;
                break;
            }
            case Filter::kBicubic: {
                const int i0 = static_cast<int>(std::floor(src));
                for (int k = 0; k < 4; ++k) {
                    const int i = i0 - 1 + k;
                    taps.index[base + k] = clamp_index(i);
                    taps.weight[base + k] = cubic_weight(src - i);
                }
                break;
            }
            case Filter::kLanczos: {
                const int i0 = static_cast<int>(std::floor(src));
                double sum = 0.0;
                for (int k = 0; k < taps.per_pixel; ++k) {
                    const int i = i0 - lanczos_a + 1 + k;
                    taps.index[base + k] = clamp_index(i);
                    const double w = lanczos_kernel(src - i, lanczos_a);
                    taps.weight[base + k] = w;
                    sum += w;
                }
                for (int k = 0; k < taps.per_pixel; ++k) taps.weight[base + k] /= sum;
                break;
            }
        }
    }
    return taps;
}

Tensor resample_separable(const Tensor& plane, Size out_res, Filter filter, int lanczos_a) {
    const Taps hx = build_taps(plane.width, out_res.width, filter, lanczos_a);
    const Taps vy = build_taps(plane.height, out_res.height, filter, lanczos_a);

    // Horizontal pass at source height, then vertical.
    Tensor mid(1, 1, plane.height, out_res.width);
    for (int y = 0; y < plane.height; ++y) {
        const float* srow = plane.plane(0, 0) + static_cast<std::size_t>(y) * plane.width;
        float* drow = mid.plane(0, 0) + static_cast<std::size_t>(y) * out_res.width;
        for (int x = 0; x < out_res.width; ++x) {
            const std::size_t base = static_cast<std::size_t>(x) * hx.per_pixel;
            double acc = 0.0;
            for (int k = 0; k < hx.per_pixel; ++k) {
                acc += hx.weight[base + k] * srow[hx.index[base + k]];
            }
            drow[x] = static_cast<float>(acc);
        }
    }

    Tensor out(1, 1, out_res.height, out_res.width);
    for (int y = 0; y < out_res.height; ++y) {
        const std::size_t base = static_cast<std::size_t>(y) * vy.per_pixel;
        float* drow = out.plane(0, 0) + static_cast<std::size_t>(y) * out_res.width;
        for (int x = 0; x < out_res.width; ++x) {
            double acc = 0.0;
            for (int k = 0; k < vy.per_pixel; ++k) {
                const float* srow =
                    mid.plane(0, 0) + static_cast<std::size_t>(vy.index[base + k]) * out_res.width;
                acc += vy.weight[base + k] * srow[x];
            }
            drow[x] = static_cast<float>(acc);
        }
    }
    return out;
}

} // namespace

double lanczos_kernel(double x, int a) {
    if (x == 0.0) return 1.0;
    if (std::abs(x) >= a) return 0.0;
    const double px = std::numbers::pi * x;
    return (std::sin(px) / px) * (std::sin(px / a) / (px / a));
}

Tensor interp_nearest(const Tensor& plane, Size out_res) {
    check_plane(plane, out_res, "interp_nearest");
    return resample_separable(plane, out_res, Filter::kNearest, 0);
}

Tensor interp_bilinear(const Tensor& plane, Size out_res) {
    check_plane(plane, out_res, "interp_bilinear");
    return resample_separable(plane, out_res, Filter::kBilinear, 0);
}

Tensor interp_bicubic(const Tensor& plane, Size out_res) {
    check_plane(plane, out_res, "interp_bicubic");
    return resample_separable(plane, out_res, Filter::kBicubic, 0);
}

Tensor interpolate(const Tensor& plane, Size out_res, ChromaMethod method) {
    switch (method) {
        case ChromaMethod::kNearest: return interp_nearest(plane, out_res);
        case ChromaMethod::kBilinear: return interp_bilinear(plane, out_res);
        case ChromaMethod::kBicubic: return interp_bicubic(plane, out_res);
    }
    throw ContractError("unknown interpolation method");
}

Tensor lanczos_resample(const Tensor& plane, Size out_res, int a) {
    check_plane(plane, out_res, "lanczos_resample");
    if (a < 1) throw ContractError("lanczos window must be >= 1");
    return resample_separable(plane, out_res, Filter::kLanczos, a);
}

} // namespace arsr
