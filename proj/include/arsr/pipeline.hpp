#ifndef ARSR_PIPELINE_HPP
#define ARSR_PIPELINE_HPP

#include <functional>
#include <optional>

#include "arsr/model.hpp"
#include "arsr/quant.hpp"
#include "arsr/resample.hpp"
#include "arsr/tensor.hpp"

namespace arsr {

// One 4:2:0 frame: full-resolution luma plus half-resolution (ceil) chroma,
// all stored as floats in [0,1].
struct Frame {
    Tensor y;
    Tensor cb;
    Tensor cr;

    Size resolution() const { return {y.width, y.height}; }
};

inline int chroma_dim(int luma_dim) { return (luma_dim + 1) / 2; }

// Neutral-chroma frame at the given luma resolution.
Frame make_frame(Size luma_res, float y_fill = 0.0f, float cb_fill = 0.5f, float cr_fill = 0.5f);

void validate_frame(const Frame& f);  // throws ContractError

// Decomposition of a resolution change into a neural integer stage and an
// optional Lanczos stage. net_factor 1 bypasses the network entirely.
struct FramePlan {
    int net_factor = 1;
    std::optional<Size> resample_target;
};

// Picks the largest supported integer factor k in {4,3,2,1} with
// input*k <= output in both dimensions; a Lanczos stage covers whatever
// distance remains. Downscales are rejected.
FramePlan plan(Size input_res, Size output_res);

// Luma path used by the frame upscaler when the plan engages the network.
using LumaNet = std::function<Tensor(const Tensor&)>;

// Runs the plan on one frame: luma through the network and/or Lanczos,
// chroma straight to its final resolution with the chosen interpolator,
// everything clamped to [0,1] at the end.
Frame upscale_frame(const Frame& frame, const FramePlan& plan, const ModelConfig& cfg,
                    const WeightSet& w, ChromaMethod chroma = ChromaMethod::kBilinear);
Frame upscale_frame(const Frame& frame, const FramePlan& plan, const QuantizedModel& qm,
                    ChromaMethod chroma = ChromaMethod::kBilinear);
// Bypass-only plans (net_factor == 1).
Frame upscale_frame(const Frame& frame, const FramePlan& plan,
                    ChromaMethod chroma = ChromaMethod::kBilinear);
// Generic core; net may be empty for bypass plans.
Frame upscale_frame_with(const Frame& frame, const FramePlan& plan, const LumaNet& net,
                         ChromaMethod chroma);

} // namespace arsr

#endif
