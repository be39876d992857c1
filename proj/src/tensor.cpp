#include "arsr/tensor.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

namespace arsr {

namespace {

// Runs fn(i) for i in [0, count) across worker threads. Each index writes
// disjoint output, so results are bit-identical to the serial order.
void parallel_for(int count, const std::function<void(int)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::min<unsigned>(hw ? hw : 1, count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

Tensor::Tensor(int b, int c, int h, int w, float fill)
    : batch(b), channels(c), height(h), width(w) {
    if (b < 1 || c < 1 || h < 1 || w < 1) {
        std::ostringstream msg;
        msg << "tensor dims must all be >= 1, got " << b << "x" << c << "x" << h << "x" << w;
        throw ShapeError(msg.str());
    }
    data.assign(static_cast<std::size_t>(b) * c * h * w, fill);
}

std::string Tensor::shape_str() const {
    std::ostringstream s;
    s << batch << "x" << channels << "x" << height << "x" << width;
    return s.str();
}

ConvWeights::ConvWeights(int out, int in_pg, int k, int g)
    : out_channels(out), in_per_group(in_pg), kernel(k), groups(g) {
    validate();
    kernels.assign(static_cast<std::size_t>(out) * in_pg * k * k, 0.0f);
    bias.assign(static_cast<std::size_t>(out), 0.0f);
}

std::string ConvWeights::shape_str() const {
    std::ostringstream s;
    s << in_channels() << "->" << out_channels << " k" << kernel << "x" << kernel
      << " g" << groups;
    return s.str();
}

void ConvWeights::validate() const {
    std::ostringstream msg;
    if (out_channels < 1 || in_per_group < 1 || kernel < 1 || groups < 1) {
        msg << "conv weights fields must be >= 1 (" << shape_str() << ")";
        throw ShapeError(msg.str());
    }
    if (kernel % 2 == 0) {
        msg << "kernel size must be odd for same-padding, got " << kernel;
        throw ShapeError(msg.str());
    }
    if (out_channels % groups != 0) {
        msg << "groups must divide out_channels (" << shape_str() << ")";
        throw ShapeError(msg.str());
    }
    if (!kernels.empty() &&
        kernels.size() != static_cast<std::size_t>(out_channels) * in_per_group * kernel * kernel) {
        msg << "kernel array size " << kernels.size() << " does not match shape " << shape_str();
        throw ShapeError(msg.str());
    }
    if (!bias.empty() && bias.size() != static_cast<std::size_t>(out_channels)) {
        msg << "bias array size " << bias.size() << " does not match shape " << shape_str();
        throw ShapeError(msg.str());
    }
}

Tensor conv2d(const Tensor& input, const ConvWeights& w) {
    w.validate();
    if (input.channels != w.in_channels()) {
        throw ShapeError("conv2d channel/group mismatch: input " + input.shape_str() +
                         " vs weights " + w.shape_str());
    }
    if (w.kernels.size() != static_cast<std::size_t>(w.out_channels) * w.in_per_group * w.kernel * w.kernel ||
        w.bias.size() != static_cast<std::size_t>(w.out_channels)) {
        throw ShapeError("conv2d weights have unallocated arrays: " + w.shape_str());
    }

    const int f = w.kernel;
    const int pad = (f - 1) / 2;
    const int height = input.height;
    const int width = input.width;
    const int out_per_group = w.out_channels / w.groups;

    Tensor out(input.batch, w.out_channels, height, width);
    auto run_channel = [&](int job) {
        const int b = job / w.out_channels;
        const int oc = job % w.out_channels;
        const int g = oc / out_per_group;
        float* dst = out.plane(b, oc);
        std::fill(dst, dst + static_cast<std::size_t>(height) * width, w.bias[oc]);
        for (int ic = 0; ic < w.in_per_group; ++ic) {
            const float* src = input.plane(b, g * w.in_per_group + ic);
            const float* kern =
                w.kernels.data() + (static_cast<std::size_t>(oc) * w.in_per_group + ic) * f * f;
            for (int ky = 0; ky < f; ++ky) {
                for (int kx = 0; kx < f; ++kx) {
                    const float wv = kern[ky * f + kx];
                    const int dx = kx - pad;
                    const int x0 = std::max(0, -dx);
                    const int x1 = width - std::max(0, dx);
                    for (int oy = 0; oy < height; ++oy) {
                        const int iy = oy + ky - pad;
                        if (iy < 0 || iy >= height) continue;
                        const float* srow = src + static_cast<std::size_t>(iy) * width;
                        float* drow = dst + static_cast<std::size_t>(oy) * width;
                        for (int ox = x0; ox < x1; ++ox) {
                            drow[ox] += wv * srow[ox + dx];
                        }
                    }
                }
            }
        }
    };

    const int jobs = input.batch * w.out_channels;
    // Per-channel work in multiply-adds; threads only pay off on real frames.
    const std::int64_t channel_macs = static_cast<std::int64_t>(w.in_per_group) * f * f *
                                      height * width;
    if (jobs > 1 && channel_macs >= (1 << 20)) {
        parallel_for(jobs, run_channel);
    } else {
        for (int job = 0; job < jobs; ++job) run_channel(job);
    }
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (float& v : out.data) v = std::max(0.0f, v);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("add shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

Tensor depth_to_space(const Tensor& input, int r) {
    if (r < 1) {
        throw ShapeError("depth_to_space factor must be >= 1, got " + std::to_string(r));
    }
    const int r2 = r * r;
    if (input.channels % r2 != 0) {
        throw ShapeError("depth_to_space needs channels divisible by r^2: input " +
                         input.shape_str() + ", r=" + std::to_string(r));
    }
    if (r == 1) return input;

    Tensor out(input.batch, input.channels / r2, input.height * r, input.width * r);
    for (int b = 0; b < input.batch; ++b) {
        for (int c = 0; c < out.channels; ++c) {
            for (int y = 0; y < out.height; ++y) {
                float* drow = out.plane(b, c) + static_cast<std::size_t>(y) * out.width;
                for (int x = 0; x < out.width; ++x) {
                    const int ic = c * r2 + (y % r) * r + (x % r);
                    drow[x] = input.at(b, ic, y / r, x / r);
                }
            }
        }
    }
    return out;
}

} // namespace arsr
