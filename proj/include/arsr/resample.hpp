#ifndef ARSR_RESAMPLE_HPP
#define ARSR_RESAMPLE_HPP

#include "arsr/tensor.hpp"

namespace arsr {

struct Size {
    int width = 0;
    int height = 0;
    bool operator==(const Size&) const = default;
};

enum class ChromaMethod { kNearest, kBilinear, kBicubic };

// All resamplers map output to source coordinates with half-pixel centers,
// src = (dst + 0.5) * in/out - 0.5, and clamp sample indices to the edge.
// Planes are single-channel (batch 1, channels 1).
Tensor interp_nearest(const Tensor& plane, Size out_res);
Tensor interp_bilinear(const Tensor& plane, Size out_res);
// Catmull-Rom style cubic kernel (a = -0.5).
Tensor interp_bicubic(const Tensor& plane, Size out_res);
Tensor interpolate(const Tensor& plane, Size out_res, ChromaMethod method);

// Separable Lanczos with window a (default 3): L(x) = sinc(x) sinc(x/a) for
// |x| < a, 0 beyond. Tap weights are renormalized per output pixel so
// constants survive the edge clamping exactly.
Tensor lanczos_resample(const Tensor& plane, Size out_res, int a = 3);

// The 1-D kernel, exposed so tests can probe L(0) = 1 and integer zeros.
double lanczos_kernel(double x, int a = 3);

} // namespace arsr

#endif
