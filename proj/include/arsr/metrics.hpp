#ifndef ARSR_METRICS_HPP
#define ARSR_METRICS_HPP

#include "arsr/pipeline.hpp"
#include "arsr/tensor.hpp"

namespace arsr {

// 10 * log10(1 / MSE) on [0,1] data; +infinity for identical inputs.
double psnr(const Tensor& a, const Tensor& b);

// Frame PSNR with the MSE pooled over all three planes.
double psnr(const Frame& a, const Frame& b);

// Mean local SSIM over all 8x8 windows (stride 1, uniform weights),
// C1 = 0.01^2, C2 = 0.03^2. Planes must be at least 8x8.
double ssim(const Tensor& a, const Tensor& b);

} // namespace arsr

#endif
