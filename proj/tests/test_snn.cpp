#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hypersnn/network.hpp"
#include "hypersnn/snn.hpp"

using namespace hypersnn;
using namespace hypersnn::snn;

namespace {

// Hand-built 1x1 layer; quantize_layer is tested elsewhere, here we want
// full control over the integer weight and the threshold.
quant::QuantizedLinear unit_layer(std::int64_t w, std::int64_t b, double theta) {
    quant::QuantizedLinear l;
    l.w_int = IntMatrix(1, 1);
    l.w_int(0, 0) = w;
    l.b_int = {b};
    l.theta = theta;
    return l;
}

std::vector<std::uint8_t> row(const SpikeTrain& s, std::size_t neuron) {
    std::vector<std::uint8_t> bits(s.T);
    for (int t = 0; t < s.T; ++t) bits[t] = s.at(t, neuron);
    return bits;
}

}  // namespace

TEST_CASE("spike_gen frozen examples") {
    SUBCASE("zero drive stays silent") {
        const auto s = spike_gen({0}, unit_layer(1, 0, 5.0), 4);
        CHECK(s.spike_count() == 0);
    }
    SUBCASE("drive equal to theta fires every step") {
        const auto s = spike_gen({1}, unit_layer(5, 0, 5.0), 3);
        CHECK(row(s, 0) == std::vector<std::uint8_t>{1, 1, 1});
    }
    SUBCASE("drive at half theta alternates") {
        const auto s = spike_gen({1}, unit_layer(5, 0, 10.0), 4);
        CHECK(row(s, 0) == std::vector<std::uint8_t>{0, 1, 0, 1});
    }
    SUBCASE("negative drive stays silent") {
        const auto s = spike_gen({-3}, unit_layer(2, 0, 5.0), 8);
        CHECK(s.spike_count() == 0);
    }
}

TEST_CASE("spike_gen uses the wide bias register when present") {
    auto l = unit_layer(1, 1, 10.0);
    // At the raw bias the drive is 1 and four steps never reach theta.
    CHECK(spike_gen({0}, l, 4).spike_count() == 0);
    // The drive-domain register carries the rescaled bias instead.
    l.b_drive = {10};
    CHECK(spike_gen({0}, l, 4).spike_count() == 4);
}

TEST_CASE("spike_gen matches the cumulative-floor oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> wi(-40, 40), xi(-100, 100);
    std::uniform_real_distribution<double> th(0.5, 400.0);
    std::uniform_int_distribution<int> ti(1, 64);
    for (int iter = 0; iter < 10'000; ++iter) {
        const std::int64_t w = wi(rng), x = xi(rng), b = wi(rng);
        const double theta = th(rng);
        const int T = ti(rng);
        const auto s = spike_gen({x}, unit_layer(w, b, theta), T);

        // Independent oracle: cumulative spike count c(t) increments iff the
        // cumulative drive t*v has outrun the already-paid thresholds by at
        // least one more theta. No membrane variable is simulated.
        const long double v = static_cast<long double>(w * x + b);
        std::int64_t c = 0;
        for (int t = 1; t <= T; ++t) {
            const bool fire = static_cast<long double>(t) * v -
                                  static_cast<long double>(c) * theta >=
                              theta;
            c += fire ? 1 : 0;
            CHECK(static_cast<bool>(s.at(t - 1, 0)) == fire);
        }
        CHECK(s.spike_count() == c);
    }
}

TEST_CASE("inter_layer_act frozen examples") {
    SUBCASE("silent input with zero bias stays silent") {
        SpikeTrain s_prev(4, 1);
        const auto s = inter_layer_act(s_prev, unit_layer(7, 0, 3.0), 4);
        CHECK(s.spike_count() == 0);
    }
    SUBCASE("averaged drive equal to theta fires every step") {
        SpikeTrain s_prev(2, 1);
        s_prev.at(0, 0) = 1;
        s_prev.at(1, 0) = 1;
        const auto s = inter_layer_act(s_prev, unit_layer(5, 0, 5.0), 2);
        CHECK(row(s, 0) == std::vector<std::uint8_t>{1, 1});
    }
    SUBCASE("averaged drive at three quarters of theta") {
        SpikeTrain s_prev(4, 1);
        for (int t = 0; t < 4; ++t) s_prev.at(t, 0) = 1;
        const auto s = inter_layer_act(s_prev, unit_layer(3, 0, 4.0), 4);
        // Cumulative floor(0.75 t) increments at t = 2, 3, 4.
        CHECK(row(s, 0) == std::vector<std::uint8_t>{0, 1, 1, 1});
    }
}

TEST_CASE("inter_layer_act is invariant to timestep permutation") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<std::int64_t> wi(-9, 9);
    for (int iter = 0; iter < 200; ++iter) {
        const int T = 8;
        const std::size_t in = 5, out = 3;
        SpikeTrain a(T, in);
        for (auto& v : a.bits) v = static_cast<std::uint8_t>(bit(rng));

        SpikeTrain b = a;
        std::vector<int> perm(T);
        for (int t = 0; t < T; ++t) perm[t] = t;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int t = 0; t < T; ++t)
            for (std::size_t j = 0; j < in; ++j) b.at(t, j) = a.at(perm[t], j);

        quant::QuantizedLinear l;
        l.w_int = IntMatrix(out, in);
        for (auto& v : l.w_int.data) v = wi(rng);
        l.b_int = IntVec(out, 1);
        l.theta = 4.0;

        const auto ra = inter_layer_act(a, l, T);
        const auto rb = inter_layer_act(b, l, T);
        // Step 1 averages over time, so the order of incoming timesteps
        // cannot change the constant drive or the output counts.
        CHECK(ra.column_counts() == rb.column_counts());
        for (auto v : ra.bits) CHECK((v == 0 || v == 1));
    }
}

TEST_CASE("integer drive overflow is detected") {
    quant::QuantizedLinear l;
    l.w_int = IntMatrix(1, 8);
    for (auto& v : l.w_int.data) v = std::int64_t{1} << 62;
    l.b_int = {0};
    l.theta = 1.0;
    const IntVec x(8, std::int64_t{1} << 62);
    CHECK_THROWS_AS(spike_gen(x, l, 1), std::overflow_error);
}

TEST_CASE("CQ activation shrinks variance below the ReLU ratio") {
    // With X standard normal, Var(relu(X))/Var(X) is exactly 1/2 - 1/(2 pi).
    // The clamped quantizer must do strictly better for every tested T.
    std::mt19937_64 rng(31415);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int N = 1'000'000;
    for (int T : {1, 2, 4}) {
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < N; ++i) {
            const double y = network::cq_activation(gauss(rng), T);
            sum += y;
            sumsq += y * y;
        }
        const double mean = sum / N;
        const double var = sumsq / N - mean * mean;
        CHECK(var < 0.5 - 0.01);
    }
}

TEST_CASE("forward_snn determinism and telemetry bound") {
    quant::InputQuantSpec in_spec;
    in_spec.n = 8;
    in_spec.m = {1.0, 1.0};

    std::vector<quant::QuantizedLinear> layers(2);
    layers[0].w_int = IntMatrix(3, 2);
    const std::int64_t w0[] = {90, -40, 25, 60, -15, 110};
    for (std::size_t i = 0; i < 6; ++i) layers[0].w_int.data[i] = w0[i];
    layers[0].b_int = {0, 0, 0};
    layers[0].theta = 127.0;
    layers[1].w_int = IntMatrix(2, 3);
    const std::int64_t w1[] = {30, -20, 10, -5, 25, 40};
    for (std::size_t i = 0; i < 6; ++i) layers[1].w_int.data[i] = w1[i];
    layers[1].b_int = {1, -1};
    layers[1].theta = 64.0;

    const Vec x = {0.4, -0.7};
    const int T = 4;
    const auto a = forward_snn(x, in_spec, layers, T, OutputMode::dense);
    const auto b = forward_snn(x, in_spec, layers, T, OutputMode::dense);
    CHECK(a.dense_scores == b.dense_scores);
    CHECK(a.telemetry.total_spikes == b.telemetry.total_spikes);
    CHECK(a.telemetry.total_spikes <= T * 3);
    for (double r : a.telemetry.layer_rates) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }

    const auto h = forward_snn(x, in_spec, layers, T, OutputMode::hdc);
    CHECK(h.output_spikes.width == 3);
    for (auto v : h.output_spikes.bits) CHECK((v == 0 || v == 1));

    CHECK_THROWS(forward_snn({0.1}, in_spec, layers, T, OutputMode::dense));
}
