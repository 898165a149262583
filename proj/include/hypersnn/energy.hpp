#pragma once

#include <optional>

#include "hypersnn/core.hpp"
#include "hypersnn/snn.hpp"

namespace hypersnn::energy {

/// Per-operation costs in pJ.
struct CostTable {
    double fp32_mul = 3.7;
    double int32_mul = 3.1;
    double int8_mul = 0.2;
    double fp32_add = 0.9;
    double int32_add = 0.1;
    double int8_add = 0.03;
    double xor_op = 0.00243;
};

enum class Precision { fp32, int32, int8 };
enum class EnergyMode { conservative, measured };

/// How the classifier's xor work is billed: one xor per class per retained
/// position, or one shared comparison per retained position (the tables'
/// Bool column uses the shared count).
enum class XorConvention { per_class, shared };

std::string to_string(Precision p);

/// Counts are doubles so measured-mode spike rates can scale them; in
/// conservative mode every count is an exact integer.
struct LayerLedger {
    std::string name;
    double adds = 0.0;
    Precision add_precision = Precision::fp32;
    double mults = 0.0;
    Precision mult_precision = Precision::fp32;
    double scaling_fp32_mults = 0.0;  // the "+2"/"+4" input-scaling terms
    double bools = 0.0;

    double energy_pj(const CostTable& costs) const;
};

struct EnergyLedger {
    std::vector<LayerLedger> layers;
    EnergyMode mode = EnergyMode::conservative;

    double total_pj(const CostTable& costs) const;
    EnergyLedger& merge(const EnergyLedger& other);
};

/// Network shape as a chain of layer sizes, e.g. {2, 24, 24, 3}.
struct NetShape {
    std::vector<std::size_t> sizes;

    std::size_t linear_layers() const { return sizes.size() - 1; }
};

/// Baseline FP32 MLP: in*out multiplications and one addition per output
/// neuron, per layer.
EnergyLedger count_mlp(const NetShape& shape);

struct SnnCountSpec {
    NetShape shape;
    int T = 1;
    Precision weight_precision = Precision::int8;
    snn::OutputMode output_mode = snn::OutputMode::dense;
    std::size_t retained_width = 0;  // hdc mode: positions kept after truncation
    XorConvention xor_convention = XorConvention::per_class;
};

/// Converted-network accounting. Conservative mode assumes spike rate 1;
/// measured mode scales the intermediate additions by the telemetry's
/// per-layer mean rates.
EnergyLedger count_snn(const SnnCountSpec& spec, EnergyMode mode,
                       const std::vector<double>& measured_rates = {});

/// Per-layer Adds/Mults/Bool/Energy rows as CSV, one block per ledger.
std::string report_csv(const std::vector<std::pair<std::string, EnergyLedger>>& ledgers,
                       const CostTable& costs,
                       const std::vector<std::optional<double>>& rewards = {});

}  // namespace hypersnn::energy
