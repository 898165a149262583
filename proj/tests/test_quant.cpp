#include <cmath>
#include <random>

#include "doctest.h"
#include "hypersnn/quant.hpp"

using namespace hypersnn;
using namespace hypersnn::quant;

TEST_CASE("quantize_input frozen examples") {
    InputQuantSpec spec;
    spec.n = 8;
    spec.m = {1.0};

    SUBCASE("zero maps to zero") {
        const auto r = quantize_input({0.0}, spec);
        CHECK(r.x_int == IntVec{0});
    }
    SUBCASE("x = m saturates at 127") {
        const auto r = quantize_input({1.0}, spec);
        CHECK(r.x_int == IntVec{127});
    }
    SUBCASE("x = -m/2 floors to -64, theta0 = 127") {
        // floor((127/128) * (-0.5) * 128) = floor(-63.5) = -64
        const auto r = quantize_input({-0.5}, spec);
        CHECK(r.x_int == IntVec{-64});
        CHECK(r.theta0 == doctest::Approx(127.0).epsilon(1e-12));
    }
    SUBCASE("scalar m rescales theta0") {
        spec.m = {2.0};
        const auto r = quantize_input({0.0}, spec);
        CHECK(r.theta0 == doctest::Approx(63.5).epsilon(1e-12));
    }
    SUBCASE("out-of-range inputs clip to +-m") {
        const auto hi = quantize_input({5.0}, spec);
        const auto lo = quantize_input({-5.0}, spec);
        CHECK(hi.x_int == quantize_input({1.0}, spec).x_int);
        CHECK(lo.x_int == quantize_input({-1.0}, spec).x_int);
    }
    SUBCASE("non-finite input rejected") {
        CHECK_THROWS(quantize_input({std::nan("")}, spec));
        CHECK_THROWS(quantize_input({INFINITY}, spec));
    }
    SUBCASE("bad normalizer rejected") {
        spec.m = {0.0};
        CHECK_THROWS(quantize_input({0.0}, spec));
        spec.m = {-1.0};
        CHECK_THROWS(quantize_input({0.0}, spec));
    }
}

TEST_CASE("quantize_input vector normalizer") {
    InputQuantSpec spec;
    spec.n = 8;
    spec.m = {1.0, 4.0};
    const auto r = quantize_input({0.5, 2.0}, spec);
    // Both dimensions sit at half their range, so they agree after
    // per-dimension normalization.
    CHECK(r.x_int[0] == r.x_int[1]);
    CHECK(r.x_int[0] == 63);  // floor((127/128) * 0.5 * 128)
    // Vector m reports theta0 in the normalized (m = 1) domain.
    CHECK(r.theta0 == doctest::Approx(127.0).epsilon(1e-12));
}

TEST_CASE("quantize_layer frozen examples") {
    SUBCASE("identity-scale layer") {
        Matrix w(1, 1);
        w(0, 0) = 1.0;
        const auto l = quantize_layer(w, {0.0}, 8, 1.0);
        CHECK(l.spec.f == doctest::Approx(1.0));
        CHECK(l.w_int(0, 0) == 127);
        CHECK(l.b_int == IntVec{0});
        CHECK(l.theta == doctest::Approx(127.0).epsilon(1e-12));
    }
    SUBCASE("two-entry q=2 layer") {
        Matrix w(1, 2);
        w(0, 0) = 0.5;
        w(0, 1) = -0.5;
        const auto l = quantize_layer(w, {0.0}, 2, 1.0);
        CHECK(l.spec.f == doctest::Approx(0.5));
        CHECK(l.w_int(0, 0) == 1);
        CHECK(l.w_int(0, 1) == -1);
        // theta = theta_in * (1 - 1/2) * 2 / f = 1 * 0.5 * 2 / 0.5 = 2.
        CHECK(l.theta == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("f takes the bias into account") {
        Matrix w(1, 1);
        w(0, 0) = 0.25;
        const auto l = quantize_layer(w, {-2.0}, 8, 1.0);
        CHECK(l.spec.f == doctest::Approx(2.0));
    }
    SUBCASE("all-zero layer is degenerate") {
        Matrix w(1, 2);
        CHECK_THROWS_WITH_AS(quantize_layer(w, {0.0}, 8, 1.0),
                             doctest::Contains("degenerate layer"), std::invalid_argument);
    }
}

TEST_CASE("max_quant_error frozen values") {
    CHECK(max_quant_error({8, 1.0}) == doctest::Approx(1.0 / 64.0));
    CHECK(max_quant_error({2, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("round-trip bound property") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<int> qbits(2, 12);
    for (int iter = 0; iter < 2000; ++iter) {
        const int q = qbits(rng);
        Matrix w(3, 4);
        for (auto& v : w.data) v = u(rng);
        Vec b = {u(rng), u(rng), u(rng)};
        QuantizedLinear l;
        try {
            l = quantize_layer(w, b, q, 1.0);
        } catch (const std::invalid_argument&) {
            continue;
        }
        const double bound = max_quant_error(l.spec);
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            const double back = dequantize(l.w_int.data[i], l.spec);
            CHECK(std::fabs(back - w.data[i]) <= bound + 1e-12);
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double back = dequantize(l.b_int[i], l.spec);
            CHECK(std::fabs(back - b[i]) <= bound + 1e-12);
        }
    }
}

TEST_CASE("quantize_input monotonicity property") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    InputQuantSpec spec;
    spec.n = 6;
    spec.m = {1.0};
    for (int iter = 0; iter < 2000; ++iter) {
        Vec x(4), y(4);
        for (std::size_t i = 0; i < 4; ++i) {
            x[i] = u(rng);
            y[i] = x[i] + std::fabs(u(rng));
        }
        InputQuantSpec wide = spec;
        wide.m = {2.5};  // keep y in range
        const auto rx = quantize_input(x, wide);
        const auto ry = quantize_input(y, wide);
        for (std::size_t i = 0; i < 4; ++i) CHECK(rx.x_int[i] <= ry.x_int[i]);
    }
}

TEST_CASE("sufficient margin preserves the classifier sign") {
    // A linear score whose margin exceeds (||x||_1 + 1) * max_quant_error
    // keeps its sign in the quantized domain.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    for (int iter = 0; iter < 20000 && tested < 2000; ++iter) {
        Matrix w(1, 3);
        for (auto& v : w.data) v = u(rng);
        Vec b = {u(rng)};
        Vec x = {u(rng), u(rng), u(rng)};
        QuantizedLinear l;
        try {
            l = quantize_layer(w, b, 8, 1.0);
        } catch (const std::invalid_argument&) {
            continue;
        }
        const double score = w(0, 0) * x[0] + w(0, 1) * x[1] + w(0, 2) * x[2] + b[0];
        const double l1 = std::fabs(x[0]) + std::fabs(x[1]) + std::fabs(x[2]);
        if (std::fabs(score) <= (l1 + 1.0) * max_quant_error(l.spec)) continue;
        ++tested;
        // Score in the dequantized-weight domain with exact inputs.
        double qscore = dequantize(l.b_int[0], l.spec);
        for (std::size_t i = 0; i < 3; ++i) qscore += dequantize(l.w_int(0, i), l.spec) * x[i];
        CHECK(std::signbit(qscore) == std::signbit(score));
    }
    CHECK(tested == 2000);
}

TEST_CASE("threshold composition across Step 1 and Step 2") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    std::uniform_int_distribution<int> nbits(2, 10), qbits(2, 10);
    for (int iter = 0; iter < 500; ++iter) {
        const int n = nbits(rng), q = qbits(rng);
        const double m = u(rng);
        InputQuantSpec in_spec;
        in_spec.n = n;
        in_spec.m = {m};
        const auto qi = quantize_input({0.0}, in_spec);

        Matrix w(1, 1);
        w(0, 0) = u(rng);
        const auto l = quantize_layer(w, {0.0}, q, qi.theta0);
        const double levels_n = std::pow(2.0, n - 1);
        const double levels_q = std::pow(2.0, q - 1);
        const double expected = (1.0 - 1.0 / levels_n) * levels_n / m *
                                (1.0 - 1.0 / levels_q) * levels_q / l.spec.f;
        CHECK(l.theta == doctest::Approx(expected).epsilon(1e-10));
    }
}
