#pragma once

#include "hypersnn/energy.hpp"
#include "hypersnn/network.hpp"
#include "hypersnn/noise.hpp"
#include "hypersnn/weight_file.hpp"

namespace hypersnn::harness {

enum class Variant { mlp_fp32, snn_int32, snn_int8, snn_int32_hdc, snn_int8_hdc };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);
bool variant_uses_hdc(Variant v);
int variant_bits(Variant v);  // 32 or 8 (0 for mlp_fp32)

struct SweepPoint {
    noise::NoiseKind kind = noise::NoiseKind::gaussian;
    int k = 0;
};

struct ExperimentConfig {
    envs::EnvKind env = envs::EnvKind::cartpole;
    Variant variant = Variant::mlp_fp32;
    std::vector<SweepPoint> grid = {SweepPoint{}};  // default: noise-free point
    int episodes = 100;
    std::uint64_t seed = 1;
    double noise_scale = 0.01;
    Vec per_dim_scale;  // empty = all ones
    energy::EnergyMode energy_mode = energy::EnergyMode::conservative;

    std::string canonical_string() const;
    std::string hash() const;
};

struct ResultRow {
    std::string env;
    std::string variant;
    int n = 0, q = 0, T = 1;
    std::string noise_kind;
    int k = 0;
    double mean_reward = 0.0;
    double reward_std = 0.0;
    double energy_pj_per_inference = 0.0;
    std::string energy_mode;
    std::string config_hash;
    std::string weight_checksum;
    std::string code_version;
};

std::string results_to_csv(const std::vector<ResultRow>& rows);

/// One evaluation target: the float baseline or a converted network.
struct EvalTarget {
    Variant variant = Variant::mlp_fp32;
    network::PolicySpec spec;
    std::optional<network::MlpWeights> float_weights;
    std::optional<network::SnnNetwork> snn;
    std::string weight_checksum;

    int act(const Vec& obs, snn::SpikeTelemetry* telemetry) const;
    static EvalTarget from_weight_file(const WeightFile& wf, Variant variant);
};

/// Evaluates the target over episodes x noise grid. Episodes within a grid
/// point run concurrently (HYPERSNN_WORKERS, default hardware concurrency);
/// results are reduced in episode order, so output is deterministic.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, const EvalTarget& target);

/// Per-inference energy ledger for a target, using measured mean spike
/// rates when the mode asks for them.
energy::EnergyLedger target_energy(const EvalTarget& target, energy::EnergyMode mode,
                                   const std::vector<double>& measured_rates = {});

int worker_count();

}  // namespace hypersnn::harness
