#include "hypersnn/energy.hpp"

#include <sstream>

namespace hypersnn::energy {

namespace {

double add_cost(const CostTable& c, Precision p) {
    switch (p) {
        case Precision::fp32: return c.fp32_add;
        case Precision::int32: return c.int32_add;
        case Precision::int8: return c.int8_add;
    }
    throw std::logic_error("bad Precision");
}

double mul_cost(const CostTable& c, Precision p) {
    switch (p) {
        case Precision::fp32: return c.fp32_mul;
        case Precision::int32: return c.int32_mul;
        case Precision::int8: return c.int8_mul;
    }
    throw std::logic_error("bad Precision");
}

}  // namespace

std::string to_string(Precision p) {
    switch (p) {
        case Precision::fp32: return "fp32";
        case Precision::int32: return "int32";
        case Precision::int8: return "int8";
    }
    throw std::logic_error("bad Precision");
}

double LayerLedger::energy_pj(const CostTable& costs) const {
    return adds * add_cost(costs, add_precision) + mults * mul_cost(costs, mult_precision) +
           scaling_fp32_mults * costs.fp32_mul + bools * costs.xor_op;
}

double EnergyLedger::total_pj(const CostTable& costs) const {
    double total = 0.0;
    for (const auto& l : layers) total += l.energy_pj(costs);
    return total;
}

EnergyLedger& EnergyLedger::merge(const EnergyLedger& other) {
    require(mode == other.mode, "cannot merge ledgers of different modes");
    layers.insert(layers.end(), other.layers.begin(), other.layers.end());
    return *this;
}

EnergyLedger count_mlp(const NetShape& shape) {
    require(shape.sizes.size() >= 2, "network needs at least one layer");
    EnergyLedger ledger;
    for (std::size_t l = 0; l + 1 < shape.sizes.size(); ++l) {
        const double in = static_cast<double>(shape.sizes[l]);
        const double out = static_cast<double>(shape.sizes[l + 1]);
        LayerLedger layer;
        layer.name = "fc" + std::to_string(l);
        layer.mults = in * out;
        layer.mult_precision = Precision::fp32;
        layer.adds = out;  // one bias addition per output neuron
        layer.add_precision = Precision::fp32;
        ledger.layers.push_back(layer);
    }
    return ledger;
}

EnergyLedger count_snn(const SnnCountSpec& spec, EnergyMode mode,
                       const std::vector<double>& measured_rates) {
    require(spec.shape.sizes.size() >= 3, "converted network needs at least two layers");
    require(spec.T >= 1, "T must be >= 1");
    require(spec.weight_precision != Precision::fp32, "SNN weights are integer");
    const std::size_t num_linear = spec.shape.linear_layers();
    if (mode == EnergyMode::measured)
        require(measured_rates.size() >= num_linear - 1,
                "measured mode needs per-layer spike rates");

    auto rate_in = [&](std::size_t l) {
        // Incoming spike rate of linear layer l (output train of layer l-1).
        if (mode == EnergyMode::conservative) return 1.0;
        return measured_rates[l - 1];
    };

    const double T = static_cast<double>(spec.T);
    EnergyLedger ledger;
    ledger.mode = mode;

    for (std::size_t l = 0; l < num_linear; ++l) {
        const double in = static_cast<double>(spec.shape.sizes[l]);
        const double out = static_cast<double>(spec.shape.sizes[l + 1]);
        LayerLedger layer;

        if (l == 0) {
            // Embedding layer: FP32 input scaling, one integer product per
            // weight, and the per-timestep bias/membrane additions. Spike
            // train generation itself costs nothing extra at T = 1.
            layer.name = "embedding";
            layer.scaling_fp32_mults = in;
            layer.mults = in * out;
            layer.mult_precision = spec.weight_precision;
            layer.adds = out * T;
            layer.add_precision = spec.weight_precision;
        } else if (l + 1 < num_linear || spec.output_mode == snn::OutputMode::dense) {
            // Spike-driven additions plus T bias adds and T-1 membrane
            // accumulations per neuron.
            layer.name = l + 1 < num_linear ? "intermediate" + std::to_string(l) : "dense_out";
            layer.adds = in * out * rate_in(l) * T + out * (2.0 * T - 1.0);
            layer.add_precision = spec.weight_precision;
        } else {
            layer.name = "hdc_out";
            const double classes = out;
            const double retained = static_cast<double>(spec.retained_width);
            layer.bools = spec.xor_convention == XorConvention::per_class
                              ? classes * retained
                              : retained;
        }
        ledger.layers.push_back(layer);
    }
    return ledger;
}

std::string report_csv(const std::vector<std::pair<std::string, EnergyLedger>>& ledgers,
                       const CostTable& costs,
                       const std::vector<std::optional<double>>& rewards) {
    std::ostringstream out;
    out << "variant,layer,adds,mults,scaling_fp32_mults,bools,energy_pj,total_pj,reward\n";
    for (std::size_t i = 0; i < ledgers.size(); ++i) {
        const auto& [name, ledger] = ledgers[i];
        const double total = ledger.total_pj(costs);
        for (const auto& layer : ledger.layers) {
            out << name << ',' << layer.name << ',' << layer.adds << ',' << layer.mults << ','
                << layer.scaling_fp32_mults << ',' << layer.bools << ','
                << layer.energy_pj(costs) << ',' << total << ',';
            if (i < rewards.size() && rewards[i]) out << *rewards[i];
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace hypersnn::energy
