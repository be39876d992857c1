#ifndef ARSR_MODEL_HPP
#define ARSR_MODEL_HPP

#include <cstdint>
#include <vector>

#include "arsr/tensor.hpp"

namespace arsr {

enum class WeightForm { kExpanded, kCollapsed };

// Topology of the network: N feature-extraction convs (7/5/3 kernels),
// M grouped non-linear mapping convs, one final conv producing scale^2
// channels, and a depth-to-space stage. base_channels is the width of all
// hidden layers; expansion is the internal width p of the training-time
// two-conv form of every layer.
struct ModelConfig {
    int n_feat = 3;
    int n_map = 11;
    int base_channels = 16;
    int expansion = 256;
    std::vector<int> feat_kernels = {7, 5, 3};
    int map_kernel = 3;
    int groups = 1;  // mapping layers only; must be 1, 2, 4 or 8
    int scale = 4;   // 2, 3 or 4
    int final_kernel = 3;

    int logical_layers() const { return n_feat + n_map + 1; }
    void validate() const;  // throws ContractError
};

// Conventional feature-extraction kernel sizes for a given depth:
// 1 -> {5}, 2 -> {7,5}, 3 -> {7,5,3}.
std::vector<int> default_feat_kernels(int n_feat);

// Shape of one logical conv layer (the collapsed, inference-time view).
struct LayerShape {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int groups = 1;
};

std::vector<LayerShape> layer_shapes(const ModelConfig& cfg);

// Network parameters. Collapsed form holds one ConvWeights per logical
// layer; Expanded form holds two per logical layer: the f x f conv to the
// expansion width followed by the 1x1 conv back down (grouped layers keep
// their groups on both halves so the pair folds back into a grouped conv).
struct WeightSet {
    WeightForm form = WeightForm::kCollapsed;
    std::vector<ConvWeights> layers;
};

// Deterministic seeded initialization of the expanded topology: kernels
// uniform in +/- sqrt(1 / fan_in), biases zero.
WeightSet expand(const ModelConfig& cfg, std::uint64_t seed);

// All-zero weights in either form.
WeightSet zero_weights(const ModelConfig& cfg, WeightForm form);

// Folds every expanded pair (A: n->p fxf, B: p->m 1x1) into one n->m fxf
// conv: K[mo][ni] = sum_p B[mo][p] * A[p][ni], c[mo] = b[mo] + sum_p
// B[mo][p] * a[p]. Exact in real arithmetic since no nonlinearity sits
// between the pair.
WeightSet collapse(const ModelConfig& cfg, const WeightSet& expanded);

// Intermediates of one forward pass, kept for backpropagation.
struct ForwardTrace {
    std::vector<Tensor> inputs;  // input of each logical layer
    std::vector<Tensor> hidden;  // expanded-pair mid activation (empty tensors when collapsed)
    std::vector<Tensor> preact;  // conv output before activation
    Tensor pre_shuffle;          // final conv output + broadcast input plane
    Tensor output;
};

// Single-plane super-resolution pass. Dataflow: feature convs (+ReLU),
// mapping convs (+ReLU) wrapped by the inner residual, final conv to r^2
// channels, broadcast-add of the input plane onto every channel (global
// residual), then depth-to-space. Output is (batch, 1, h*r, w*r), unclamped.
Tensor forward(const ModelConfig& cfg, const WeightSet& w, const Tensor& y_plane);
Tensor forward(const ModelConfig& cfg, const WeightSet& w, const Tensor& y_plane,
               ForwardTrace& trace);

// Exact parameter total (kernels + biases) of the given form.
std::int64_t param_count(const ModelConfig& cfg, WeightForm form);

// Throws ShapeError when w's layers do not match the shapes implied by cfg.
void check_weights(const ModelConfig& cfg, const WeightSet& w);

} // namespace arsr

#endif
