#include "arsr/quant.hpp"

#include <algorithm>
#include <cmath>

namespace arsr {

namespace {

void validate_bits(int bits) {
    if (bits < 2 || bits > 16) {
        throw ContractError("quantization bit width must be in [2,16], got " +
                            std::to_string(bits));
    }
}

// Max |v| over one logical layer's activation signal: post-ReLU for layers
// followed by an activation, raw conv output for the final layer.
float activation_peak(const Tensor& preact, bool has_relu) {
    float peak = 0.0f;
    for (float v : preact.data) {
        const float mag = has_relu ? std::max(0.0f, v) : std::abs(v);
        peak = std::max(peak, mag);
    }
    return peak;
}

} // namespace

QuantParams calibrate(std::span<const float> values, int bits, bool pow2) {
    validate_bits(bits);
    if (values.empty()) {
        throw ContractError("calibrate needs a non-empty value set");
    }
    float peak = 0.0f;
    for (float v : values) {
        if (!std::isfinite(v)) {
            throw DataError("calibrate found a non-finite value");
        }
        peak = std::max(peak, std::abs(v));
    }
    QuantParams q;
    q.bits = bits;
    q.pow2 = pow2;
    if (peak == 0.0f) {
        q.scale = 1.0f;
        return q;
    }
    float scale = peak / static_cast<float>(quant_max(bits));
    if (pow2) {
        // Round up to the next power of two; an exact power stays put.
        int exp = 0;
        const float mant = std::frexp(scale, &exp);  // scale = mant * 2^exp, mant in [0.5, 1)
        scale = (mant == 0.5f) ? scale : std::ldexp(1.0f, exp);
    }
    q.scale = scale;
    return q;
}

float fake_quant(float x, const QuantParams& q) {
    const float qmax = static_cast<float>(quant_max(q.bits));
    const float level = std::round(x / q.scale);  // half away from zero
    return std::clamp(level, -qmax, qmax) * q.scale;
}

Tensor fake_quant(const Tensor& t, const QuantParams& q) {
    Tensor out = t;
    fake_quant_in_place(out.data, q);
    return out;
}

void fake_quant_in_place(std::span<float> values, const QuantParams& q) {
    for (float& v : values) v = fake_quant(v, q);
}

QuantizedModel quantize_model(const ModelConfig& cfg, const WeightSet& collapsed, int bits,
                              bool pow2, const std::vector<Tensor>& calib_inputs) {
    validate_bits(bits);
    if (collapsed.form != WeightForm::kCollapsed) {
        throw ContractError("quantize_model expects collapsed-form weights");
    }
    if (calib_inputs.empty()) {
        throw ContractError("quantize_model needs at least one calibration input");
    }
    check_weights(cfg, collapsed);

    QuantizedModel qm;
    qm.cfg = cfg;
    qm.bits = bits;
    qm.pow2 = pow2;
    qm.weights = collapsed;

    // Per-layer weight grids over kernels and bias together.
    for (ConvWeights& layer : qm.weights.layers) {
        std::vector<float> all(layer.kernels);
        all.insert(all.end(), layer.bias.begin(), layer.bias.end());
        QuantParams wq = calibrate(all, bits, pow2);
        fake_quant_in_place(layer.kernels, wq);
        fake_quant_in_place(layer.bias, wq);
        qm.weight_q.push_back(wq);
    }

    // Activation grids from full-precision forward passes over the
    // calibration set.
    const int layers = cfg.logical_layers();
    std::vector<float> peaks(layers, 0.0f);
    for (const Tensor& y : calib_inputs) {
        ForwardTrace trace;
        forward(cfg, collapsed, y, trace);
        for (int i = 0; i < layers; ++i) {
            const bool has_relu = i < layers - 1;
            peaks[i] = std::max(peaks[i], activation_peak(trace.preact[i], has_relu));
        }
    }
    for (int i = 0; i < layers; ++i) {
        qm.act_q.push_back(calibrate(std::span<const float>(&peaks[i], 1), bits, pow2));
    }
    return qm;
}

Tensor quantized_forward(const QuantizedModel& qm, const Tensor& y_plane) {
    const ModelConfig& cfg = qm.cfg;
    cfg.validate();
    check_weights(cfg, qm.weights);
    if (y_plane.channels != 1) {
        throw ContractError("quantized_forward expects a single-channel luma plane, got " +
                            y_plane.shape_str());
    }
    const int layers = cfg.logical_layers();
    if (static_cast<int>(qm.act_q.size()) != layers) {
        throw ContractError("quantized model is missing activation parameters");
    }

    Tensor x = y_plane;
    for (int i = 0; i < cfg.n_feat; ++i) {
        x = fake_quant(relu(conv2d(x, qm.weights.layers[i])), qm.act_q[i]);
    }
    Tensor feat = x;
    for (int j = 0; j < cfg.n_map; ++j) {
        const int i = cfg.n_feat + j;
        x = fake_quant(relu(conv2d(x, qm.weights.layers[i])), qm.act_q[i]);
    }
    Tensor mapped = add(feat, x);
    Tensor z = fake_quant(conv2d(mapped, qm.weights.layers[layers - 1]), qm.act_q[layers - 1]);

    Tensor pre_shuffle = z;
    const std::size_t plane = static_cast<std::size_t>(z.height) * z.width;
    for (int b = 0; b < z.batch; ++b) {
        const float* src = y_plane.plane(b, 0);
        for (int c = 0; c < z.channels; ++c) {
            float* dst = pre_shuffle.plane(b, c);
            for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
        }
    }
    return depth_to_space(pre_shuffle, cfg.scale);
}

} // namespace arsr
