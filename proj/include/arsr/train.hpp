#ifndef ARSR_TRAIN_HPP
#define ARSR_TRAIN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "arsr/model.hpp"
#include "arsr/tensor.hpp"

namespace arsr {

enum class LossKind { kMae, kMse, kHuber };

struct LossSpec {
    LossKind kind = LossKind::kMse;
    float delta = 1.0f;  // Huber only
};

struct LossResult {
    double value = 0.0;
    Tensor grad;  // d value / d pred
};

// Mean-reduced loss over all elements. MSE: mean(e^2), MAE: mean|e|,
// Huber: mean of e^2/2 inside delta, delta*(|e| - delta/2) outside.
// The MAE subgradient at e == 0 is 0.
LossResult loss(const Tensor& pred, const Tensor& target, const LossSpec& spec);

// Gradients for every kernel and bias of the expanded form, in the same
// layout as WeightSet.layers, plus the gradient w.r.t. the input plane.
struct WeightGrads {
    std::vector<ConvWeights> layers;
    Tensor input_grad;
};

// Reverse pass through the network dataflow given d loss / d output.
WeightGrads backward(const ModelConfig& cfg, const WeightSet& expanded, const Tensor& input,
                     const Tensor& upstream_grad);

// Same, reusing intermediates from a traced forward on the same input.
WeightGrads backward_from_trace(const ModelConfig& cfg, const WeightSet& expanded,
                                const ForwardTrace& trace, const Tensor& upstream_grad);

struct TrainConfig {
    float lr = 0.05f;
    float momentum = 0.9f;
    int epochs = 200;
    int batch = 4;
    int patch = 16;  // LR patch side used by the patch loaders
    std::uint64_t seed = 1;
};

struct FitResult {
    WeightSet weights;
    std::vector<double> history;  // per-epoch mean loss
};

// SGD with momentum over fixed (lr_patch, hr_patch) pairs in a fixed order;
// bit-reproducible for a given seed. Starts from expand(cfg, seed) unless
// an initial expanded weight set is supplied.
FitResult fit(const ModelConfig& cfg, const TrainConfig& tcfg, const LossSpec& spec,
              const std::vector<std::pair<Tensor, Tensor>>& pairs,
              const WeightSet* init = nullptr);

} // namespace arsr

#endif
