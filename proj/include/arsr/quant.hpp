#ifndef ARSR_QUANT_HPP
#define ARSR_QUANT_HPP

#include <span>
#include <vector>

#include "arsr/model.hpp"
#include "arsr/tensor.hpp"

namespace arsr {

// Per-tensor symmetric quantization grid: integers in
// [-(2^(bits-1)-1), +(2^(bits-1)-1)] spaced by scale. With pow2 the scale
// is constrained to an exact power of two.
struct QuantParams {
    int bits = 12;
    float scale = 1.0f;
    bool pow2 = false;
};

inline int quant_max(int bits) { return (1 << (bits - 1)) - 1; }

// Scale selection from max-abs: s = max|v| / (2^(bits-1)-1). With pow2 the
// scale is rounded up to the next power of two so no extra clipping is
// introduced. All-zero input calibrates to s = 1.
QuantParams calibrate(std::span<const float> values, int bits, bool pow2);

// clamp(round(x/s), -qmax, +qmax) * s with round-half-away-from-zero.
float fake_quant(float x, const QuantParams& q);
Tensor fake_quant(const Tensor& t, const QuantParams& q);
void fake_quant_in_place(std::span<float> values, const QuantParams& q);

// Collapsed network with weights snapped to their per-layer grids plus the
// activation grids observed on the calibration inputs (one per conv layer
// output, measured after the layer's ReLU where it has one).
struct QuantizedModel {
    ModelConfig cfg;
    WeightSet weights;  // collapsed, fake-quantized in place
    std::vector<QuantParams> weight_q;  // one per conv layer
    std::vector<QuantParams> act_q;     // one per conv layer output
    int bits = 12;
    bool pow2 = false;
};

QuantizedModel quantize_model(const ModelConfig& cfg, const WeightSet& collapsed, int bits,
                              bool pow2, const std::vector<Tensor>& calib_inputs);

// Forward pass with fake-quantization applied at every conv layer output.
// Residual adds run unquantized (accumulator precision).
Tensor quantized_forward(const QuantizedModel& qm, const Tensor& y_plane);

} // namespace arsr

#endif
