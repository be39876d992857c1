#ifndef ARSR_TENSOR_HPP
#define ARSR_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arsr/errors.hpp"

namespace arsr {

// Dense NCHW float32 tensor. Data is flat in batch-major order:
// index(b, c, y, x) = ((b * channels + c) * height + y) * width + x.
struct Tensor {
    int batch = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int b, int c, int h, int w, float fill = 0.0f);

    std::size_t size() const { return data.size(); }

    float& at(int b, int c, int y, int x) {
        return data[flat_index(b, c, y, x)];
    }
    float at(int b, int c, int y, int x) const {
        return data[flat_index(b, c, y, x)];
    }

    // Start of one (batch, channel) plane in the flat array.
    float* plane(int b, int c) { return data.data() + flat_index(b, c, 0, 0); }
    const float* plane(int b, int c) const { return data.data() + flat_index(b, c, 0, 0); }

    bool same_shape(const Tensor& other) const {
        return batch == other.batch && channels == other.channels &&
               height == other.height && width == other.width;
    }

    std::string shape_str() const;

private:
    std::size_t flat_index(int b, int c, int y, int x) const {
        return ((static_cast<std::size_t>(b) * channels + c) * height + y) *
                   static_cast<std::size_t>(width) +
               x;
    }
};

// Convolution parameters for one conv layer. Kernels are flat in
// [out_channel][in_channel_per_group][ky][kx] order; the layer's total
// input channel count is in_per_group * groups. Output channel c belongs
// to group c / (out_channels / groups).
struct ConvWeights {
    int out_channels = 0;  // m
    int in_per_group = 0;  // n / g
    int kernel = 0;        // f, odd
    int groups = 1;        // g
    std::vector<float> kernels;  // m * in_per_group * f * f
    std::vector<float> bias;     // m

    ConvWeights() = default;
    ConvWeights(int out, int in_pg, int k, int g);

    int in_channels() const { return in_per_group * groups; }
    std::int64_t param_count() const {
        return static_cast<std::int64_t>(kernels.size()) + static_cast<std::int64_t>(bias.size());
    }
    float& kernel_at(int oc, int ic, int ky, int kx) {
        return kernels[((static_cast<std::size_t>(oc) * in_per_group + ic) * kernel + ky) * kernel + kx];
    }
    float kernel_at(int oc, int ic, int ky, int kx) const {
        return kernels[((static_cast<std::size_t>(oc) * in_per_group + ic) * kernel + ky) * kernel + kx];
    }
    std::string shape_str() const;
    void validate() const;  // throws ShapeError on inconsistent fields
};

// Cross-correlation with stride 1 and zero same-padding of (f-1)/2.
// Output shape is (batch, out_channels, height, width).
Tensor conv2d(const Tensor& input, const ConvWeights& w);

// Elementwise max(0, x).
Tensor relu(const Tensor& input);

// Elementwise sum; shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);

// Rearranges (b, c*r^2, h, w) into (b, c, h*r, w*r). Output pixel (y, x)
// of output channel c reads input channel c*r^2 + (y%r)*r + (x%r) at
// (y/r, x/r).
Tensor depth_to_space(const Tensor& input, int r);

} // namespace arsr

#endif
