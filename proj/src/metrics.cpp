#include "arsr/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace arsr {

namespace {

double sum_squared_error(const Tensor& a, const Tensor& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double e = static_cast<double>(a.data[i]) - b.data[i];
        acc += e * e;
    }
    return acc;
}

double mse_to_psnr(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

// Inclusive prefix sums with a zero row/column border, computed in double.
struct Integral {
    int width = 0;
    std::vector<double> table;  // (h+1) x (w+1)

    Integral(const Tensor& t, const Tensor* other) : width(t.width + 1) {
        const int h = t.height;
        const int w = t.width;
        table.assign(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
        for (int y = 0; y < h; ++y) {
            double row = 0.0;
            for (int x = 0; x < w; ++x) {
                const double v = other ? static_cast<double>(t.data[y * w + x]) *
                                             other->data[y * w + x]
                                       : t.data[y * w + x];
                row += v;
                table[static_cast<std::size_t>(y + 1) * width + (x + 1)] =
                    table[static_cast<std::size_t>(y) * width + (x + 1)] + row;
            }
        }
    }

    double window(int y, int x, int n) const {
        return table[static_cast<std::size_t>(y + n) * width + (x + n)] -
               table[static_cast<std::size_t>(y) * width + (x + n)] -
               table[static_cast<std::size_t>(y + n) * width + x] +
               table[static_cast<std::size_t>(y) * width + x];
    }
};

} // namespace

double psnr(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("psnr shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    return mse_to_psnr(sum_squared_error(a, b) / static_cast<double>(a.size()));
}

double psnr(const Frame& a, const Frame& b) {
    if (!a.y.same_shape(b.y) || !a.cb.same_shape(b.cb) || !a.cr.same_shape(b.cr)) {
        throw ShapeError("psnr frame shape mismatch: luma " + a.y.shape_str() + " vs " +
                         b.y.shape_str());
    }
    const double sse =
        sum_squared_error(a.y, b.y) + sum_squared_error(a.cb, b.cb) + sum_squared_error(a.cr, b.cr);
    const double count =
        static_cast<double>(a.y.size()) + a.cb.size() + a.cr.size();
    return mse_to_psnr(sse / count);
}

double ssim(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("ssim shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    if (a.batch != 1 || a.channels != 1) {
        throw ContractError("ssim expects single-channel planes, got " + a.shape_str());
    }
    constexpr int kWindow = 8;
    if (a.height < kWindow || a.width < kWindow) {
        throw ContractError("ssim needs planes of at least 8x8, got " + a.shape_str());
    }
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    constexpr double n = kWindow * kWindow;

    const Integral sx(a, nullptr);
    const Integral sy(b, nullptr);
    const Integral sxx(a, &a);
    const Integral syy(b, &b);
    const Integral sxy(a, &b);

    double total = 0.0;
    std::size_t windows = 0;
    for (int y = 0; y + kWindow <= a.height; ++y) {
        for (int x = 0; x + kWindow <= a.width; ++x) {
            const double mx = sx.window(y, x, kWindow) / n;
            const double my = sy.window(y, x, kWindow) / n;
            const double vx = sxx.window(y, x, kWindow) / n - mx * mx;
            const double vy = syy.window(y, x, kWindow) / n - my * my;
            const double cov = sxy.window(y, x, kWindow) / n - mx * my;
            const double s = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                             ((mx * mx + my * my + c1) * (vx + vy + c2));
            total += s;
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

} // namespace arsr
