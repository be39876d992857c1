#include <doctest.h>

#include <cmath>
#include <limits>

#include "arsr/metrics.hpp"
#include "arsr/quant.hpp"
#include "test_util.hpp"

using namespace arsr;
using testutil::random_tensor;

namespace {

// Enumeration oracle: the smallest power of two >= x.
float next_pow2_at_least(float x) {
    float p = std::ldexp(1.0f, -40);
    while (p < x) p *= 2.0f;
    return p;
}

ModelConfig small_config(int scale = 2) {
    ModelConfig cfg;
    cfg.n_feat = 2;
    cfg.feat_kernels = {7, 5};
    cfg.n_map = 3;
    cfg.base_channels = 8;
    cfg.expansion = 16;
    cfg.scale = scale;
    return cfg;
}

} // namespace

TEST_CASE("calibrate: scale is max-abs over the integer ceiling") {
    std::vector<float> vals = {0.25f, -1.0f, 0.5f};
    QuantParams q = calibrate(vals, 12, false);
    CHECK(q.scale == doctest::Approx(1.0 / 2047.0).epsilon(1e-9));
    CHECK(quant_max(12) == 2047);
}

TEST_CASE("calibrate: pow2 rounds the scale up, never down") {
    std::vector<float> vals = {1.0f, -0.5f};
    QuantParams q = calibrate(vals, 12, true);
    const float expected = next_pow2_at_least(1.0f / 2047.0f);
    CHECK(q.scale == expected);
    CHECK(q.scale >= 1.0f / 2047.0f);

    // An exact power of two stays put.
    std::vector<float> exact = {2047.0f};  // raw scale exactly 1.0
    CHECK(calibrate(exact, 12, true).scale == 1.0f);
}

TEST_CASE("calibrate: all zeros degenerate to scale 1") {
    std::vector<float> vals(16, 0.0f);
    QuantParams q = calibrate(vals, 12, false);
    CHECK(q.scale == 1.0f);
    CHECK(fake_quant(0.37f, q) == 0.0f);  // rounds to level 0
}

TEST_CASE("calibrate: rejects non-finite values and empty input") {
    std::vector<float> nan_vals = {0.1f, std::numeric_limits<float>::quiet_NaN()};
    CHECK_THROWS_AS(calibrate(nan_vals, 12, false), DataError);
    std::vector<float> inf_vals = {std::numeric_limits<float>::infinity()};
    CHECK_THROWS_AS(calibrate(inf_vals, 12, false), DataError);
    CHECK_THROWS_AS(calibrate(std::vector<float>{}, 12, false), ContractError);
    std::vector<float> ok = {1.0f};
    CHECK_THROWS_AS(calibrate(ok, 1, false), ContractError);
    CHECK_THROWS_AS(calibrate(ok, 17, false), ContractError);
}

TEST_CASE("fake_quant: grid points are fixed points") {
    QuantParams q{12, 0.001f, false};
    for (int k : {-2047, -100, 0, 63, 2047}) {
        const float x = static_cast<float>(k) * q.scale;
        CHECK(fake_quant(x, q) == x);
    }
}

TEST_CASE("fake_quant: saturates at the integer ceiling") {
    std::vector<float> vals = {1.0f, -1.0f};
    QuantParams q = calibrate(vals, 12, false);
    CHECK(fake_quant(10.0f, q) == doctest::Approx(2047.0f * q.scale));
    CHECK(fake_quant(-10.0f, q) == doctest::Approx(-2047.0f * q.scale));
}

TEST_CASE("fake_quant: unclipped error is bounded by half a step") {
    Tensor t = random_tensor(1, 1, 32, 32, 77, -1.0f, 1.0f);
    QuantParams q = calibrate(t.data, 12, false);
    Tensor out = fake_quant(t, q);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        CHECK(std::abs(out.data[i] - t.data[i]) <= q.scale / 2.0f + 1e-9f);
    }
}

TEST_CASE("fake_quant: idempotent and odd") {
    Tensor t = random_tensor(1, 1, 16, 16, 78, -2.0f, 2.0f);
    QuantParams q = calibrate(t.data, 10, false);
    Tensor once = fake_quant(t, q);
    Tensor twice = fake_quant(once, q);
    CHECK(once.data == twice.data);

    for (float x : {0.013f, -0.5f, 1.7f, 0.0f}) {
        CHECK(fake_quant(-x, q) == -fake_quant(x, q));
    }
}

TEST_CASE("pow2 scales divide to exactly one") {
    Tensor t = random_tensor(1, 1, 8, 8, 79, -3.0f, 3.0f);
    QuantParams q = calibrate(t.data, 12, true);
    const double log2s = std::log2(static_cast<double>(q.scale));
    CHECK(log2s == std::round(log2s));  // exact power of two
    CHECK(q.scale * std::exp2(-log2s) == 1.0);
}

TEST_CASE("quantization error shrinks as bits grow") {
    Tensor t = random_tensor(1, 1, 64, 64, 80, -1.0f, 1.0f);
    double prev = std::numeric_limits<double>::infinity();
    for (int bits = 4; bits <= 16; bits += 2) {
        QuantParams q = calibrate(t.data, bits, false);
        Tensor out = fake_quant(t, q);
        double mse = 0.0;
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            const double e = static_cast<double>(out.data[i]) - t.data[i];
            mse += e * e;
        }
        mse /= static_cast<double>(t.size());
        CHECK(mse <= prev);
        prev = mse;
    }
}

TEST_CASE("quantize_model: high-precision grids track the FP forward") {
    ModelConfig cfg = small_config();
    WeightSet w = collapse(cfg, expand(cfg, 11));
    std::vector<Tensor> calib;
    for (int i = 0; i < 3; ++i) calib.push_back(random_tensor(1, 1, 24, 24, 200 + i));

    Tensor probe = random_tensor(1, 1, 24, 24, 300);
    Tensor fp = forward(cfg, w, probe);

    QuantizedModel q16 = quantize_model(cfg, w, 16, false, calib);
    CHECK(psnr(quantized_forward(q16, probe), fp) >= 60.0);

    QuantizedModel q12 = quantize_model(cfg, w, 12, false, calib);
    CHECK(psnr(quantized_forward(q12, probe), fp) >= 40.0);
}

TEST_CASE("quantize_model: pow2 grids never beat unconstrained grids") {
    ModelConfig cfg = small_config();
    WeightSet w = collapse(cfg, expand(cfg, 21));
    std::vector<Tensor> calib;
    for (int i = 0; i < 3; ++i) calib.push_back(random_tensor(1, 1, 24, 24, 400 + i));

    // Paired rounding-error comparison on the calibration inputs themselves
    // (an out-of-set probe would mix clipping effects into the measurement).
    auto mse_of = [&](bool pow2) {
        QuantizedModel qm = quantize_model(cfg, w, 12, pow2, calib);
        double mse = 0.0;
        std::size_t count = 0;
        for (const Tensor& probe : calib) {
            Tensor fp = forward(cfg, w, probe);
            Tensor out = quantized_forward(qm, probe);
            for (std::size_t i = 0; i < out.data.size(); ++i) {
                const double e = static_cast<double>(out.data[i]) - fp.data[i];
                mse += e * e;
            }
            count += out.size();
        }
        return mse / static_cast<double>(count);
    };
    CHECK(mse_of(true) >= mse_of(false));

    QuantizedModel qp = quantize_model(cfg, w, 12, true, calib);
    for (const QuantParams& q : qp.weight_q) {
        const double l = std::log2(static_cast<double>(q.scale));
        CHECK(l == std::round(l));
    }
}

TEST_CASE("quantize_model: contract checks") {
    ModelConfig cfg = small_config();
    WeightSet e = expand(cfg, 31);
    WeightSet c = collapse(cfg, e);
    std::vector<Tensor> calib = {random_tensor(1, 1, 16, 16, 600)};
    CHECK_THROWS_AS(quantize_model(cfg, c, 12, false, {}), ContractError);
    CHECK_THROWS_AS(quantize_model(cfg, e, 12, false, calib), ContractError);
}
