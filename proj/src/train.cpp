#include "arsr/train.hpp"

#include <algorithm>
#include <cmath>

namespace arsr {

namespace {

// dinput/dkernels/dbias of one conv given d loss / d output. dinput is
// freshly allocated; dw arrays are accumulated into.
Tensor conv2d_backward(const Tensor& input, const ConvWeights& w, const Tensor& dout,
                       ConvWeights& dw) {
    const int f = w.kernel;
    const int pad = (f - 1) / 2;
    const int height = input.height;
    const int width = input.width;
    const int out_per_group = w.out_channels / w.groups;

    Tensor dinput(input.batch, input.channels, height, width);
    for (int b = 0; b < input.batch; ++b) {
        for (int oc = 0; oc < w.out_channels; ++oc) {
            const int g = oc / out_per_group;
            const float* dchan = dout.plane(b, oc);

            double bias_acc = 0.0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(height) * width; ++i) {
                bias_acc += dchan[i];
            }
            dw.bias[oc] += static_cast<float>(bias_acc);

            for (int ic = 0; ic < w.in_per_group; ++ic) {
                const float* src = input.plane(b, g * w.in_per_group + ic);
                float* dsrc = dinput.plane(b, g * w.in_per_group + ic);
                for (int ky = 0; ky < f; ++ky) {
                    for (int kx = 0; kx < f; ++kx) {
                        const float wv = w.kernel_at(oc, ic, ky, kx);
                        const int dx = kx - pad;
                        const int x0 = std::max(0, -dx);
                        const int x1 = width - std::max(0, dx);
                        double wacc = 0.0;
                        for (int oy = 0; oy < height; ++oy) {
                            const int iy = oy + ky - pad;
                            if (iy < 0 || iy >= height) continue;
                            const float* drow = dchan + static_cast<std::size_t>(oy) * width;
                            const float* srow = src + static_cast<std::size_t>(iy) * width;
                            float* dsrow = dsrc + static_cast<std::size_t>(iy) * width;
                            for (int ox = x0; ox < x1; ++ox) {
                                const float d = drow[ox];
                                wacc += static_cast<double>(d) * srow[ox + dx];
                                dsrow[ox + dx] += d * wv;
                            }
                        }
                        dw.kernel_at(oc, ic, ky, kx) += static_cast<float>(wacc);
                    }
                }
            }
        }
    }
    return dinput;
}

// d relu: passes gradient where the pre-activation is strictly positive.
Tensor relu_backward(const Tensor& preact, const Tensor& dact) {
    Tensor out = dact;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (preact.data[i] <= 0.0f) out.data[i] = 0.0f;
    }
    return out;
}

// Inverse of depth_to_space: gathers each output pixel back to its source
// channel/position.
Tensor space_to_depth(const Tensor& dout, int r) {
    const int r2 = r * r;
    Tensor din(dout.batch, dout.channels * r2, dout.height / r, dout.width / r);
    for (int b = 0; b < dout.batch; ++b) {
        for (int c = 0; c < dout.channels; ++c) {
            for (int y = 0; y < dout.height; ++y) {
                for (int x = 0; x < dout.width; ++x) {
                    const int ic = c * r2 + (y % r) * r + (x % r);
                    din.at(b, ic, y / r, x / r) = dout.at(b, c, y, x);
                }
            }
        }
    }
    return din;
}

// Transpose of the global-residual broadcast: sums the r^2 channel
// gradients into one plane.
Tensor channel_sum(const Tensor& d) {
    Tensor out(d.batch, 1, d.height, d.width);
    const std::size_t plane = static_cast<std::size_t>(d.height) * d.width;
    for (int b = 0; b < d.batch; ++b) {
        float* dst = out.plane(b, 0);
        for (int c = 0; c < d.channels; ++c) {
            const float* src = d.plane(b, c);
            for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
        }
    }
    return out;
}

// Backward through one expanded pair; returns d input, accumulates dA/dB.
Tensor pair_backward(const ConvWeights& a, const ConvWeights& b, const Tensor& x,
                     const Tensor& hidden, const Tensor& dpre, ConvWeights& da,
                     ConvWeights& db) {
    Tensor dhidden = conv2d_backward(hidden, b, dpre, db);
    return conv2d_backward(x, a, dhidden, da);
}

} // namespace

LossResult loss(const Tensor& pred, const Tensor& target, const LossSpec& spec) {
    if (!pred.same_shape(target)) {
        throw ShapeError("loss shape mismatch: " + pred.shape_str() + " vs " +
                         target.shape_str());
    }
    if (spec.kind == LossKind::kHuber && spec.delta <= 0.0f) {
        throw ContractError("Huber delta must be positive");
    }
    const double n = static_cast<double>(pred.size());
    const float inv_n = static_cast<float>(1.0 / n);
    LossResult out;
    out.grad = Tensor(pred.batch, pred.channels, pred.height, pred.width);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const float e = pred.data[i] - target.data[i];
        switch (spec.kind) {
            case LossKind::kMse:
                acc += static_cast<double>(e) * e;
                out.grad.data[i] = 2.0f * e * inv_n;
                break;
            case LossKind::kMae:
                acc += std::abs(static_cast<double>(e));
                out.grad.data[i] = (e > 0.0f ? 1.0f : e < 0.0f ? -1.0f : 0.0f) * inv_n;
                break;
            case LossKind::kHuber: {
                const float d = spec.delta;
                if (std::abs(e) <= d) {
                    acc += 0.5 * static_cast<double>(e) * e;
                    out.grad.data[i] = e * inv_n;
                } else {
                    acc += static_cast<double>(d) * (std::abs(e) - 0.5 * d);
                    out.grad.data[i] = (e > 0.0f ? d : -d) * inv_n;
                }
                break;
            }
        }
    }
    out.value = acc / n;
    return out;
}

WeightGrads backward(const ModelConfig& cfg, const WeightSet& expanded, const Tensor& input,
                     const Tensor& upstream_grad) {
    ForwardTrace trace;
    forward(cfg, expanded, input, trace);
    return backward_from_trace(cfg, expanded, trace, upstream_grad);
}

WeightGrads backward_from_trace(const ModelConfig& cfg, const WeightSet& expanded,
                                const ForwardTrace& trace, const Tensor& upstream_grad) {
    if (expanded.form != WeightForm::kExpanded) {
        throw ContractError("backward expects expanded-form weights");
    }
    check_weights(cfg, expanded);
    if (!upstream_grad.same_shape(trace.output)) {
        throw ShapeError("upstream gradient shape " + upstream_grad.shape_str() +
                         " does not match output " + trace.output.shape_str());
    }

    WeightGrads grads;
    grads.layers.reserve(expanded.layers.size());
    for (const auto& l : expanded.layers) {
        grads.layers.emplace_back(l.out_channels, l.in_per_group, l.kernel, l.groups);
    }

    const int layers = cfg.logical_layers();
    auto layer_backward = [&](int i, const Tensor& dpre) {
        return pair_backward(expanded.layers[2 * i], expanded.layers[2 * i + 1],
                             trace.inputs[i], trace.hidden[i], dpre, grads.layers[2 * i],
                             grads.layers[2 * i + 1]);
    };

    // out = depth_to_space(z + broadcast(y), r)
    Tensor dpre_shuffle = space_to_depth(upstream_grad, cfg.scale);
    Tensor dinput_residual = channel_sum(dpre_shuffle);

    // final conv over the inner-residual sum t2 = feat + mapped
    Tensor dt2 = layer_backward(layers - 1, dpre_shuffle);

    // mapping stack (each layer: conv pair + ReLU)
    Tensor dx = dt2;
    for (int j = cfg.n_map - 1; j >= 0; --j) {
        const int i = cfg.n_feat + j;
        Tensor dpre = relu_backward(trace.preact[i], dx);
        dx = layer_backward(i, dpre);
    }
    // inner residual fans out: feat receives both branch gradients
    Tensor dfeat = add(dx, dt2);

    // feature stack
    dx = dfeat;
    for (int i = cfg.n_feat - 1; i >= 0; --i) {
        Tensor dpre = relu_backward(trace.preact[i], dx);
        dx = layer_backward(i, dpre);
    }

    grads.input_grad = add(dx, dinput_residual);
    return grads;
}

FitResult fit(const ModelConfig& cfg, const TrainConfig& tcfg, const LossSpec& spec,
              const std::vector<std::pair<Tensor, Tensor>>& pairs, const WeightSet* init) {
    cfg.validate();
    if (pairs.empty()) {
        throw DataError("fit needs at least one patch pair");
    }
    if (tcfg.batch < 1 || tcfg.epochs < 1) {
        throw ContractError("fit needs batch >= 1 and epochs >= 1");
    }
    if (tcfg.momentum < 0.0f || tcfg.momentum >= 1.0f) {
        throw ContractError("momentum must be in [0,1)");
    }
    const int r = cfg.scale;
    const auto& first = pairs.front().first;
    int max_kernel = std::max(cfg.map_kernel, cfg.final_kernel);
    for (int k : cfg.feat_kernels) max_kernel = std::max(max_kernel, k);
    if (first.height < max_kernel || first.width < max_kernel) {
        throw ContractError("patch " + first.shape_str() + " is smaller than the largest kernel (" +
                            std::to_string(max_kernel) + ")");
    }
    for (const auto& [lr_patch, hr_patch] : pairs) {
        if (lr_patch.channels != 1 || hr_patch.channels != 1 || lr_patch.batch != 1 ||
            hr_patch.batch != 1) {
            throw DataError("fit patches must be single-channel, single-batch planes");
        }
        if (hr_patch.height != lr_patch.height * r || hr_patch.width != lr_patch.width * r) {
            throw DataError("hr patch " + hr_patch.shape_str() + " is not " +
                            std::to_string(r) + "x the lr patch " + lr_patch.shape_str());
        }
        if (lr_patch.height != first.height || lr_patch.width != first.width) {
            throw DataError("fit patches must share one size; got " + lr_patch.shape_str() +
                            " and " + first.shape_str());
        }
    }

    WeightSet w = init ? *init : expand(cfg, tcfg.seed);
    if (w.form != WeightForm::kExpanded) {
        throw ContractError("fit needs expanded-form initial weights");
    }
    check_weights(cfg, w);

    std::vector<ConvWeights> velocity;
    velocity.reserve(w.layers.size());
    for (const auto& l : w.layers) {
        velocity.emplace_back(l.out_channels, l.in_per_group, l.kernel, l.groups);
    }

    const int n_pairs = static_cast<int>(pairs.size());
    FitResult result;
    result.history.reserve(tcfg.epochs);
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        int seen = 0;
        for (int start = 0; start < n_pairs; start += tcfg.batch) {
            const int count = std::min(tcfg.batch, n_pairs - start);
            Tensor lr_batch(count, 1, first.height, first.width);
            Tensor hr_batch(count, 1, first.height * r, first.width * r);
            for (int k = 0; k < count; ++k) {
                const auto& [lp, hp] = pairs[start + k];
                std::copy(lp.data.begin(), lp.data.end(),
                          lr_batch.data.begin() + static_cast<std::size_t>(k) * lp.size());
                std::copy(hp.data.begin(), hp.data.end(),
                          hr_batch.data.begin() + static_cast<std::size_t>(k) * hp.size());
            }

            ForwardTrace trace;
            Tensor pred = forward(cfg, w, lr_batch, trace);
            LossResult l = loss(pred, hr_batch, spec);
            WeightGrads g = backward_from_trace(cfg, w, trace, l.grad);

            for (std::size_t li = 0; li < w.layers.size(); ++li) {
                ConvWeights& layer = w.layers[li];
                ConvWeights& vel = velocity[li];
                const ConvWeights& grad = g.layers[li];
                for (std::size_t i = 0; i < layer.kernels.size(); ++i) {
                    vel.kernels[i] = tcfg.momentum * vel.kernels[i] + grad.kernels[i];
                    layer.kernels[i] -= tcfg.lr * vel.kernels[i];
                }
                for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                    vel.bias[i] = tcfg.momentum * vel.bias[i] + grad.bias[i];
                    layer.bias[i] -= tcfg.lr * vel.bias[i];
                }
            }
            epoch_loss += l.value * count;
            seen += count;
        }
        result.history.push_back(epoch_loss / seen);
    }
    result.weights = std::move(w);
    return result;
}

} // namespace arsr
