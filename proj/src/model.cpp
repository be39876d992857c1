#include "arsr/model.hpp"

#include <cmath>
#include <sstream>

#include "arsr/rng.hpp"

namespace arsr {

namespace {

// Physical conv shapes of a weight set: one per logical layer when
// collapsed, the (fxf -> p, 1x1 -> m) pair when expanded.
std::vector<LayerShape> physical_shapes(const ModelConfig& cfg, WeightForm form) {
    const auto logical = layer_shapes(cfg);
    if (form == WeightForm::kCollapsed) return logical;
    std::vector<LayerShape> out;
    out.reserve(logical.size() * 2);
    for (const auto& l : logical) {
        out.push_back({l.in_channels, cfg.expansion, l.kernel, l.groups});
        out.push_back({cfg.expansion, l.out_channels, 1, l.groups});
    }
    return out;
}

ConvWeights make_conv(const LayerShape& s) {
    return ConvWeights(s.out_channels, s.in_channels / s.groups, s.kernel, s.groups);
}

Tensor apply_logical_layer(const WeightSet& w, int layer, const Tensor& x, Tensor* hidden) {
    if (w.form == WeightForm::kCollapsed) {
        return conv2d(x, w.layers[layer]);
    }
    Tensor h = conv2d(x, w.layers[2 * layer]);
    Tensor out = conv2d(h, w.layers[2 * layer + 1]);
    if (hidden) *hidden = std::move(h);
    return out;
}

// z has r^2 channels; adds the single-channel plane y to every one of them.
Tensor add_broadcast_plane(const Tensor& z, const Tensor& y) {
    Tensor out = z;
    const std::size_t plane = static_cast<std::size_t>(z.height) * z.width;
    for (int b = 0; b < z.batch; ++b) {
        const float* src = y.plane(b, 0);
        for (int c = 0; c < z.channels; ++c) {
            float* dst = out.plane(b, c);
            for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
        }
    }
    return out;
}

Tensor forward_impl(const ModelConfig& cfg, const WeightSet& w, const Tensor& y_plane,
                    ForwardTrace* trace) {
    cfg.validate();
    check_weights(cfg, w);
    if (y_plane.channels != 1) {
        throw ContractError("forward expects a single-channel luma plane, got " +
                            y_plane.shape_str());
    }
    const int layers = cfg.logical_layers();
    if (trace) {
        trace->inputs.assign(layers, Tensor{});
        trace->hidden.assign(layers, Tensor{});
        trace->preact.assign(layers, Tensor{});
    }

    auto run_layer = [&](int i, const Tensor& x) {
        if (trace) {
            trace->inputs[i] = x;
            Tensor pre = apply_logical_layer(w, i, x, &trace->hidden[i]);
            trace->preact[i] = pre;
            return pre;
        }
        return apply_logical_layer(w, i, x, nullptr);
    };

    Tensor x = y_plane;
    for (int i = 0; i < cfg.n_feat; ++i) {
        x = relu(run_layer(i, x));
    }
    Tensor feat = x;
    for (int j = 0; j < cfg.n_map; ++j) {
        x = relu(run_layer(cfg.n_feat + j, x));
    }
    Tensor mapped = add(feat, x);  // inner residual across the mapping stack
    Tensor z = run_layer(layers - 1, mapped);  // final conv, no activation
    Tensor pre_shuffle = add_broadcast_plane(z, y_plane);  // global residual
    Tensor out = depth_to_space(pre_shuffle, cfg.scale);
    if (trace) {
        trace->pre_shuffle = std::move(pre_shuffle);
        trace->output = out;
    }
    return out;
}

} // namespace

void ModelConfig::validate() const {
    std::ostringstream msg;
    if (n_feat < 1 || n_feat > 3) {
        msg << "feature depth must be 1, 2 or 3, got " << n_feat;
        throw ContractError(msg.str());
    }
    if (n_map < 1) {
        msg << "need at least one mapping layer, got M=" << n_map;
        throw ContractError(msg.str());
    }
    if (static_cast<int>(feat_kernels.size()) != n_feat) {
        msg << "feat_kernels has " << feat_kernels.size() << " entries for N=" << n_feat;
        throw ContractError(msg.str());
    }
    for (int k : feat_kernels) {
        if (k < 1 || k % 2 == 0) throw ContractError("feature kernel sizes must be odd");
    }
    if (map_kernel < 1 || map_kernel % 2 == 0 || final_kernel < 1 || final_kernel % 2 == 0) {
        throw ContractError("map/final kernel sizes must be odd");
    }
    if (groups != 1 && groups != 2 && groups != 4 && groups != 8) {
        msg << "groups must be 1, 2, 4 or 8, got " << groups;
        throw ContractError(msg.str());
    }
    if (base_channels < 1 || base_channels % groups != 0) {
        msg << "groups=" << groups << " must divide base_channels=" << base_channels;
        throw ContractError(msg.str());
    }
    if (expansion < 1 || expansion % groups != 0) {
        msg << "groups=" << groups << " must divide expansion=" << expansion;
        throw ContractError(msg.str());
    }
    if (scale < 2 || scale > 4) {
        msg << "scale must be 2, 3 or 4, got " << scale;
        throw ContractError(msg.str());
    }
}

std::vector<int> default_feat_kernels(int n_feat) {
    switch (n_feat) {
        case 1: return {5};
        case 2: return {7, 5};
        case 3: return {7, 5, 3};
        default: throw ContractError("feature depth must be 1, 2 or 3");
    }
}

std::vector<LayerShape> layer_shapes(const ModelConfig& cfg) {
    cfg.validate();
    std::vector<LayerShape> shapes;
    shapes.reserve(cfg.logical_layers());
    for (int i = 0; i < cfg.n_feat; ++i) {
        shapes.push_back({i == 0 ? 1 : cfg.base_channels, cfg.base_channels,
                          cfg.feat_kernels[i], 1});
    }
    for (int j = 0; j < cfg.n_map; ++j) {
        shapes.push_back({cfg.base_channels, cfg.base_channels, cfg.map_kernel, cfg.groups});
    }
    shapes.push_back({cfg.base_channels, cfg.scale * cfg.scale, cfg.final_kernel, 1});
    return shapes;
}

WeightSet expand(const ModelConfig& cfg, std::uint64_t seed) {
    WeightSet w;
    w.form = WeightForm::kExpanded;
    SplitMix64 rng(seed);
    for (const auto& s : physical_shapes(cfg, WeightForm::kExpanded)) {
        ConvWeights c = make_conv(s);
        const float range =
            std::sqrt(1.0f / (static_cast<float>(c.in_per_group) * c.kernel * c.kernel));
        for (float& v : c.kernels) v = rng.uniform(range);
        w.layers.push_back(std::move(c));
    }
    return w;
}

WeightSet zero_weights(const ModelConfig& cfg, WeightForm form) {
    WeightSet w;
    w.form = form;
    for (const auto& s : physical_shapes(cfg, form)) {
        w.layers.push_back(make_conv(s));
    }
    return w;
}

WeightSet collapse(const ModelConfig& cfg, const WeightSet& expanded) {
    if (expanded.form != WeightForm::kExpanded) {
        throw ContractError("collapse expects expanded-form weights");
    }
    check_weights(cfg, expanded);

    WeightSet out;
    out.form = WeightForm::kCollapsed;
    const auto logical = layer_shapes(cfg);
    for (std::size_t i = 0; i < logical.size(); ++i) {
        const ConvWeights& a = expanded.layers[2 * i];      // n -> p, f x f
        const ConvWeights& b = expanded.layers[2 * i + 1];  // p -> m, 1 x 1
        ConvWeights k = make_conv(logical[i]);
        const int f = k.kernel;
        const int p_per_group = a.out_channels / a.groups;
        const int m_per_group = k.out_channels / k.groups;
        for (int mo = 0; mo < k.out_channels; ++mo) {
            const int g = mo / m_per_group;
            for (int ni = 0; ni < k.in_per_group; ++ni) {
                for (int ky = 0; ky < f; ++ky) {
                    for (int kx = 0; kx < f; ++kx) {
                        double acc = 0.0;
                        for (int pl = 0; pl < p_per_group; ++pl) {
                            acc += static_cast<double>(b.kernel_at(mo, pl, 0, 0)) *
                                   a.kernel_at(g * p_per_group + pl, ni, ky, kx);
                        }
                        k.kernel_at(mo, ni, ky, kx) = static_cast<float>(acc);
                    }
                }
            }
            double bias = b.bias[mo];
            for (int pl = 0; pl < p_per_group; ++pl) {
                bias += static_cast<double>(b.kernel_at(mo, pl, 0, 0)) *
                        a.bias[g * p_per_group + pl];
            }
            k.bias[mo] = static_cast<float>(bias);
        }
        out.layers.push_back(std::move(k));
    }
    return out;
}

Tensor forward(const ModelConfig& cfg, const WeightSet& w, const Tensor& y_plane) {
    return forward_impl(cfg, w, y_plane, nullptr);
}

Tensor forward(const ModelConfig& cfg, const WeightSet& w, const Tensor& y_plane,
               ForwardTrace& trace) {
    return forward_impl(cfg, w, y_plane, &trace);
}

std::int64_t param_count(const ModelConfig& cfg, WeightForm form) {
    std::int64_t total = 0;
    for (const auto& s : physical_shapes(cfg, form)) {
        const std::int64_t kernels = static_cast<std::int64_t>(s.out_channels) *
                                     (s.in_channels / s.groups) * s.kernel * s.kernel;
        total += kernels + s.out_channels;
    }
    return total;
}

void check_weights(const ModelConfig& cfg, const WeightSet& w) {
    const auto expected = physical_shapes(cfg, w.form);
    if (w.layers.size() != expected.size()) {
        std::ostringstream msg;
        msg << "weight set has " << w.layers.size() << " convs, config implies "
            << expected.size();
        throw ShapeError(msg.str());
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& s = expected[i];
        const auto& c = w.layers[i];
        if (c.out_channels != s.out_channels || c.in_channels() != s.in_channels ||
            c.kernel != s.kernel || c.groups != s.groups) {
            ConvWeights want = make_conv(s);
            throw ShapeError("weight conv " + std::to_string(i) + " is " + c.shape_str() +
                             ", config implies " + want.shape_str());
        }
        c.validate();
        if (c.kernels.size() != static_cast<std::size_t>(c.out_channels) * c.in_per_group *
                                    c.kernel * c.kernel ||
            c.bias.size() != static_cast<std::size_t>(c.out_channels)) {
            throw ShapeError("weight conv " + std::to_string(i) + " arrays not allocated to " +
                             c.shape_str());
        }
    }
}

} // namespace arsr
