#pragma once

#include <functional>
#include <optional>

#include "hypersnn/core.hpp"
#include "hypersnn/envs.hpp"
#include "hypersnn/hdc.hpp"
#include "hypersnn/quant.hpp"
#include "hypersnn/snn.hpp"

namespace hypersnn::network {

enum class Activation { relu, cq };

/// Architecture plus quantization parameters of one policy.
struct PolicySpec {
    std::vector<std::size_t> sizes;  // e.g. Net1 = {4, 10, 2}
    int T = 1;                       // CQ levels during training, timesteps at inference
    int n = 8;                       // input bit width
    int q = 8;                       // weight/bias bit width
    snn::OutputMode output_mode = snn::OutputMode::dense;
    Activation activation = Activation::cq;
    // The embedding bias converts into a wide drive-domain register
    // (QuantizedLinear::b_drive); disable to train that layer bias-free.
    bool embedding_bias = true;

    void validate() const;
    std::size_t num_layers() const { return sizes.size() - 1; }
};

/// Net1/Net2/Net3 presets for the three control tasks.
PolicySpec preset_for(envs::EnvKind kind);

struct DqnConfig;
/// Tuned training hyperparameters per task (success bar, shaping, budget).
DqnConfig default_dqn_for(envs::EnvKind kind);

struct MlpWeights {
    std::vector<Matrix> w;  // out x in per layer
    std::vector<Vec> b;

    bool operator==(const MlpWeights&) const = default;
};

MlpWeights init_weights(const PolicySpec& spec, std::uint64_t seed);

/// clamp(x, 0, 1) snapped to the T+1 levels {0, 1/T, ..., 1}.
double cq_activation(double x, int T);
/// Straight-through surrogate: 1 inside [0,1], 0 outside.
double cq_gradient(double x);

Vec forward_mlp(const Vec& x, const MlpWeights& weights, const PolicySpec& spec);

int argmax(const Vec& v);

struct DqnConfig {
    std::size_t replay_capacity = 50'000;
    std::size_t batch_size = 64;
    double gamma = 0.99;
    double learning_rate = 1e-3;
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::size_t eps_decay_steps = 5'000;
    std::size_t target_sync_interval = 500;
    std::size_t warmup_transitions = 1'000;
    int max_episodes = 600;
    int eval_interval = 25;    // episodes between greedy evaluations
    int eval_episodes = 20;
    double success_reward = 0.0;  // stop once the greedy mean reaches this
    std::uint64_t seed = 1;
    // Training-only shaped reward (MountainCar): adds bonus * |velocity|.
    double velocity_bonus = 0.0;

    void validate() const;
};

struct TrainResult {
    MlpWeights weights;       // best checkpoint by greedy evaluation
    double best_eval = 0.0;
    int episodes_run = 0;
    std::vector<double> eval_history;
    bool reached_bar = false;
};

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& msg, TrainResult best)
        : std::runtime_error(msg), best_result(std::move(best)) {}
    TrainResult best_result;
};

/// DQN with uniform replay, epsilon-greedy acting, Huber TD loss and a
/// periodically synced target network. Throws TrainingError (carrying the
/// best checkpoint) if the success bar is not reached within budget.
TrainResult train_dqn(const PolicySpec& spec, const DqnConfig& config, envs::Environment& env);

namespace detail {

struct ForwardCache {
    std::vector<Vec> activations;  // a_0 = input, ..., a_L = output
    std::vector<Vec> preacts;      // z_1 ... z_L
};

Vec forward_cached(const Vec& x, const MlpWeights& w, const PolicySpec& spec,
                   ForwardCache* cache);

struct Grads {
    std::vector<Matrix> w;
    std::vector<Vec> b;

    explicit Grads(const MlpWeights& like);
    void zero();
};

/// Backprop of a scalar loss whose gradient w.r.t. the output vector is
/// `dout`; hidden activations use the straight-through / ReLU derivative.
void backprop(const MlpWeights& w, const PolicySpec& spec, const ForwardCache& cache, Vec dout,
              Grads& grads);

}  // namespace detail

/// Fully converted fixed-point network.
struct SnnNetwork {
    quant::InputQuantSpec input_spec;
    std::vector<quant::QuantizedLinear> layers;
    int T = 1;
    snn::OutputMode mode = snn::OutputMode::dense;
    std::optional<hdc::HdcCodebook> codebook;
    PolicySpec source_spec;

    int act(const Vec& obs) const;
    int act(const Vec& obs, snn::SpikeTelemetry& telemetry) const;
};

/// Applies the input/weight quantization chain with threshold propagation.
/// In hdc mode it additionally rolls out the dense policy to gather
/// codebook samples, bundles them by majority rule and truncates.
SnnNetwork convert(const MlpWeights& weights, const PolicySpec& spec, envs::Environment& env,
                   int codebook_episodes = 100, std::uint64_t codebook_seed = 7);

/// Guard overload: a converted network cannot be converted again.
SnnNetwork convert(const SnnNetwork&, const PolicySpec&, envs::Environment&, int = 0,
                   std::uint64_t = 0);

}  // namespace hypersnn::network

namespace hypersnn::hdc {

/// Rolls out the dense-output converted policy and groups penultimate-layer
/// spike vectors by chosen action. Reservoir-capped per class. By default a
/// class with no samples is an error; with require_all_classes = false the
/// caller handles missing actions itself (convert packs the observed ones).
ClassSamples collect_codebook_samples(const network::SnnNetwork& net, envs::Environment& env,
                                      int episodes, std::uint64_t seed,
                                      std::size_t per_class_cap = 4096,
                                      bool require_all_classes = true);

}  // namespace hypersnn::hdc
