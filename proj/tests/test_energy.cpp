#include <random>

#include "doctest.h"
#include "hypersnn/energy.hpp"

using namespace hypersnn;
using namespace hypersnn::energy;

namespace {

const CostTable kCosts;

// The three policy architectures the published tables account for.
const NetShape kNet1{{4, 10, 2}};    // cartpole
const NetShape kNet2{{6, 64, 3}};    // acrobot
const NetShape kNet3{{2, 24, 24, 3}};  // mountaincar

double layer_pj(const EnergyLedger& l, std::size_t i) { return l.layers[i].energy_pj(kCosts); }

SnnCountSpec snn_spec(const NetShape& shape, Precision p, std::size_t retained,
                      XorConvention conv = XorConvention::shared) {
    SnnCountSpec s;
    s.shape = shape;
    s.T = 1;
    s.weight_precision = p;
    s.output_mode = snn::OutputMode::hdc;
    s.retained_width = retained;
    s.xor_convention = conv;
    return s;
}

}  // namespace

TEST_CASE("fp32 MLP table cells") {
    const auto net1 = count_mlp(kNet1);
    CHECK(layer_pj(net1, 0) == doctest::Approx(157.0).epsilon(1e-12));
    CHECK(layer_pj(net1, 1) == doctest::Approx(75.8).epsilon(1e-12));
    CHECK(net1.total_pj(kCosts) == doctest::Approx(232.8).epsilon(1e-12));

    const auto net2 = count_mlp(kNet2);
    CHECK(layer_pj(net2, 0) == doctest::Approx(1478.4).epsilon(1e-12));
    CHECK(layer_pj(net2, 1) == doctest::Approx(713.1).epsilon(1e-12));

    const auto net3 = count_mlp(kNet3);
    CHECK(layer_pj(net3, 0) == doctest::Approx(199.2).epsilon(1e-12));
    CHECK(layer_pj(net3, 1) == doctest::Approx(2152.8).epsilon(1e-12));
    CHECK(layer_pj(net3, 2) == doctest::Approx(269.1).epsilon(1e-12));
}

TEST_CASE("converted-network table cells") {
    SUBCASE("net1 embedding at both precisions") {
        const auto e8 = count_snn(snn_spec(kNet1, Precision::int8, 1), EnergyMode::conservative);
        CHECK(layer_pj(e8, 0) == doctest::Approx(23.1).epsilon(1e-12));
        // One retained position, one shared comparison.
        CHECK(layer_pj(e8, 1) == doctest::Approx(0.00243).epsilon(1e-12));

        const auto e32 = count_snn(snn_spec(kNet1, Precision::int32, 1), EnergyMode::conservative);
        CHECK(layer_pj(e32, 0) == doctest::Approx(139.8).epsilon(1e-12));
    }
    SUBCASE("net3 full 8-bit stack") {
        const auto l = count_snn(snn_spec(kNet3, Precision::int8, 19), EnergyMode::conservative);
        CHECK(layer_pj(l, 0) == doctest::Approx(17.72).epsilon(1e-12));
        CHECK(layer_pj(l, 1) == doctest::Approx(18.0).epsilon(1e-12));
        CHECK(layer_pj(l, 2) == doctest::Approx(0.04617).epsilon(1e-12));
        CHECK(l.total_pj(kCosts) == doctest::Approx(35.76617).epsilon(1e-12));
    }
    SUBCASE("net3 int32 stack") {
        const auto l = count_snn(snn_spec(kNet3, Precision::int32, 19), EnergyMode::conservative);
        CHECK(layer_pj(l, 0) == doctest::Approx(158.6).epsilon(1e-12));
        CHECK(layer_pj(l, 1) == doctest::Approx(60.0).epsilon(1e-12));
    }
    SUBCASE("untruncated net3 classifier matches the worked example") {
        const auto l = count_snn(snn_spec(kNet3, Precision::int8, 24), EnergyMode::conservative);
        CHECK(layer_pj(l, 2) == doctest::Approx(0.05832).epsilon(1e-12));
    }
    SUBCASE("per-class xor convention bills every class") {
        const auto l = count_snn(snn_spec(kNet1, Precision::int8, 1, XorConvention::per_class),
                                 EnergyMode::conservative);
        CHECK(layer_pj(l, 1) == doctest::Approx(2 * 0.00243).epsilon(1e-12));
    }
    SUBCASE("dense readout is counted as spike-driven adds") {
        SnnCountSpec s = snn_spec(kNet3, Precision::int8, 0);
        s.output_mode = snn::OutputMode::dense;
        const auto l = count_snn(s, EnergyMode::conservative);
        // 24 x 3 spike adds + 3 x (2T - 1) bias/membrane adds at T = 1.
        CHECK(l.layers[2].adds == doctest::Approx(75.0));
        CHECK(l.layers[2].name == "dense_out");
    }
}

TEST_CASE("measured mode never exceeds conservative mode") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> ti(1, 64);
    for (int iter = 0; iter < 500; ++iter) {
        SnnCountSpec s = snn_spec(kNet3, Precision::int8, 19);
        s.T = ti(rng);
        const std::vector<double> rates = {u(rng), u(rng), u(rng)};
        const double cons = count_snn(s, EnergyMode::conservative).total_pj(kCosts);
        const double meas = count_snn(s, EnergyMode::measured, rates).total_pj(kCosts);
        CHECK(meas <= cons + 1e-12);
    }
    CHECK_THROWS(count_snn(snn_spec(kNet3, Precision::int8, 19), EnergyMode::measured, {}));
}

TEST_CASE("precision dominance on identical counts") {
    const double e8 =
        count_snn(snn_spec(kNet3, Precision::int8, 19), EnergyMode::conservative).total_pj(kCosts);
    const double e32 =
        count_snn(snn_spec(kNet3, Precision::int32, 19), EnergyMode::conservative).total_pj(kCosts);
    CHECK(e8 < e32);
    CHECK(e32 < count_mlp(kNet3).total_pj(kCosts));
}

TEST_CASE("ledger plumbing") {
    SUBCASE("total is the exact sum of layers") {
        const auto l = count_mlp(kNet3);
        double sum = 0.0;
        for (std::size_t i = 0; i < l.layers.size(); ++i) sum += layer_pj(l, i);
        CHECK(l.total_pj(kCosts) == doctest::Approx(sum).epsilon(1e-15));
    }
    SUBCASE("merge concatenates and keeps totals additive") {
        auto a = count_mlp(kNet1);
        const auto b = count_mlp(kNet3);
        const double want = a.total_pj(kCosts) + b.total_pj(kCosts);
        CHECK(a.merge(b).total_pj(kCosts) == doctest::Approx(want).epsilon(1e-15));
        CHECK_THROWS(
            [] {
                auto c = count_snn(snn_spec(kNet3, Precision::int8, 1), EnergyMode::conservative);
                EnergyLedger m;
                m.mode = EnergyMode::measured;
                c.merge(m);
            }());
    }
    SUBCASE("csv report") {
        CHECK(report_csv({}, kCosts) ==
              "variant,layer,adds,mults,scaling_fp32_mults,bools,energy_pj,total_pj,reward\n");
        const auto csv = report_csv({{"net1", count_mlp(kNet1)}}, kCosts, {{232.8}});
        CHECK(csv.find("net1,fc0,10,40,0,0,157,232.8,232.8") != std::string::npos);
    }
    SUBCASE("degenerate shapes rejected") {
        CHECK_THROWS(count_mlp(NetShape{{4}}));
        CHECK_THROWS(count_snn(snn_spec(NetShape{{4, 2}}, Precision::int8, 1),
                               EnergyMode::conservative));
    }
}
