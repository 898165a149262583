#include "hypersnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hypersnn::network {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9E3779B97F4A7C15ull + b + 0x2545F4914F6CDD1Dull;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    return x;
}

}  // namespace

namespace detail {

Vec forward_cached(const Vec& x, const MlpWeights& w, const PolicySpec& spec,
                   ForwardCache* cache) {
    Vec a = x;
    if (cache) {
        cache->activations.clear();
        cache->preacts.clear();
        cache->activations.push_back(a);
    }
    for (std::size_t l = 0; l < w.w.size(); ++l) {
        const Matrix& W = w.w[l];
        require(a.size() == W.cols, "forward_mlp: shape mismatch");
        Vec z(W.rows, 0.0);
        for (std::size_t i = 0; i < W.rows; ++i) {
            double acc = w.b[l][i];
            for (std::size_t j = 0; j < W.cols; ++j) acc += W(i, j) * a[j];
            z[i] = acc;
        }
        if (cache) cache->preacts.push_back(z);
        if (l + 1 < w.w.size()) {
            for (auto& v : z)
                v = spec.activation == Activation::cq ? cq_activation(v, spec.T)
                                                      : std::max(0.0, v);
        }
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

Grads::Grads(const MlpWeights& like) {
    for (const auto& m : like.w) w.emplace_back(m.rows, m.cols);
    for (const auto& v : like.b) b.emplace_back(v.size(), 0.0);
}

void Grads::zero() {
    for (auto& m : w) std::fill(m.data.begin(), m.data.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

void backprop(const MlpWeights& w, const PolicySpec& spec, const ForwardCache& cache,
              Vec dout, Grads& grads) {
    for (std::size_t li = w.w.size(); li-- > 0;) {
        const Matrix& W = w.w[li];
        const Vec& a_in = cache.activations[li];
        for (std::size_t i = 0; i < W.rows; ++i) {
            grads.b[li][i] += dout[i];
            for (std::size_t j = 0; j < W.cols; ++j) grads.w[li](i, j) += dout[i] * a_in[j];
        }
        if (li == 0) break;
        Vec dprev(W.cols, 0.0);
        for (std::size_t j = 0; j < W.cols; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < W.rows; ++i) acc += W(i, j) * dout[i];
            const double z = cache.preacts[li - 1][j];
            const double dz = spec.activation == Activation::cq
                                  ? cq_gradient(z)
                                  : (z > 0.0 ? 1.0 : 0.0);
            dprev[j] = acc * dz;
        }
        dout = std::move(dprev);
    }
}

}  // namespace detail

namespace {

using detail::ForwardCache;
using detail::Grads;
using detail::backprop;
using detail::forward_cached;

class Adam {
public:
    Adam(const MlpWeights& like, double lr) : lr_(lr), m_(like), v_(like) {
        m_.zero();
        v_.zero();
    }

    void step(MlpWeights& w, const Grads& g, bool skip_first_bias) {
        ++t_;
        const double corr1 = 1.0 - std::pow(beta1_, t_);
        const double corr2 = 1.0 - std::pow(beta2_, t_);
        auto update = [&](double& param, double& m, double& v, double grad) {
            m = beta1_ * m + (1.0 - beta1_) * grad;
            v = beta2_ * v + (1.0 - beta2_) * grad * grad;
            param -= lr_ * (m / corr1) / (std::sqrt(v / corr2) + eps_);
        };
        for (std::size_t l = 0; l < w.w.size(); ++l) {
            for (std::size_t i = 0; i < w.w[l].data.size(); ++i)
                update(w.w[l].data[i], m_.w[l].data[i], v_.w[l].data[i], g.w[l].data[i]);
            if (l == 0 && skip_first_bias) continue;
            for (std::size_t i = 0; i < w.b[l].size(); ++i)
                update(w.b[l][i], m_.b[l][i], v_.b[l][i], g.b[l][i]);
        }
    }

private:
    double lr_;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
    Grads m_, v_;
};

struct Transition {
    Vec state;
    int action = 0;
    double reward = 0.0;
    Vec next_state;
    bool terminal = false;
};

double evaluate_greedy(const MlpWeights& w, const PolicySpec& spec, envs::Environment& env,
                       int episodes, std::uint64_t seed_base) {
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
        Vec obs = env.reset(mix_seed(seed_base, static_cast<std::uint64_t>(e)));
        double ep_reward = 0.0;
        while (!env.done()) {
            const int a = argmax(forward_mlp(obs, w, spec));
            const auto r = env.step(a);
            ep_reward += r.reward;
            obs = r.observation;
        }
        total += ep_reward;
    }
    return total / episodes;
}

}  // namespace

void PolicySpec::validate() const {
    require(sizes.size() >= 2, "policy needs at least two layers");
    for (auto s : sizes) require(s >= 1, "layer sizes must be >= 1");
    require(T >= 1 && T <= 64, "T must be in 1..64");
    require(n >= 2 && q >= 2, "bit widths must be >= 2");
}

void DqnConfig::validate() const {
    require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0,1]");
    require(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0,
            "epsilon must be in [0,1]");
    require(batch_size >= 1 && replay_capacity >= batch_size, "bad replay configuration");
    require(max_episodes >= 1, "max_episodes must be >= 1");
}

DqnConfig default_dqn_for(envs::EnvKind kind) {
    DqnConfig config;
    switch (kind) {
        case envs::EnvKind::cartpole:
            config.success_reward = 1900.0;
            config.max_episodes = 12'000;
            config.eps_decay_steps = 30'000;
            // Shorter credit horizon keeps the action gap large relative to
            // the Q scale, which the binarized hidden layer needs.
            config.gamma = 0.9;
            break;
        case envs::EnvKind::acrobot:
            config.success_reward = -95.0;
            config.max_episodes = 2000;
            config.eps_decay_steps = 20'000;
            break;
        case envs::EnvKind::mountaincar:
            // The evaluation band caps how good this policy may be, so the
            // bar stops training early instead of squeezing out more reward.
            config.success_reward = -128.0;
            config.max_episodes = 2000;
            config.eps_decay_steps = 20'000;
            config.velocity_bonus = 30.0;
            // A slightly shorter horizon sharpens the hidden representation
            // the classifier head is distilled from.
            config.gamma = 0.95;
            break;
    }
    return config;
}

PolicySpec preset_for(envs::EnvKind kind) {
    PolicySpec spec;
    switch (kind) {
        case envs::EnvKind::cartpole: spec.sizes = {4, 10, 2}; break;
        case envs::EnvKind::acrobot: spec.sizes = {6, 64, 3}; break;
        case envs::EnvKind::mountaincar: spec.sizes = {2, 24, 24, 3}; break;
    }
    return spec;
}

MlpWeights init_weights(const PolicySpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    MlpWeights w;
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        const std::size_t in = spec.sizes[l], out = spec.sizes[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> u(-bound, bound);
        Matrix W(out, in);
        for (auto& v : W.data) v = u(rng);
        w.w.push_back(std::move(W));
        w.b.emplace_back(out, 0.0);
    }
    return w;
}

double cq_activation(double x, int T) {
    require(std::isfinite(x), "non-finite activation input");
    require(T >= 1, "T must be >= 1");
    const double c = std::clamp(x, 0.0, 1.0);
    return std::floor(c * T) / T;  // c = 1 maps to exactly 1
}

double cq_gradient(double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; }

Vec forward_mlp(const Vec& x, const MlpWeights& weights, const PolicySpec& spec) {
    return forward_cached(x, weights, spec, nullptr);
}

int argmax(const Vec& v) {
    require(!v.empty(), "argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return static_cast<int>(best);
}

TrainResult train_dqn(const PolicySpec& spec, const DqnConfig& config, envs::Environment& env) {
    spec.validate();
    config.validate();
    require(spec.sizes.front() == env.obs_dim() && spec.sizes.back() == env.num_actions(),
            "policy shape does not match the environment");

    std::mt19937_64 rng(config.seed);
    MlpWeights online = init_weights(spec, mix_seed(config.seed, 0xA11CE));
    MlpWeights target = online;
    Adam opt(online, config.learning_rate);
    const bool skip_first_bias = !spec.embedding_bias;

    std::vector<Transition> replay;
    replay.reserve(config.replay_capacity);
    std::size_t replay_next = 0;
    auto push = [&](Transition t) {
        if (replay.size() < config.replay_capacity) {
            replay.push_back(std::move(t));
        } else {
            replay[replay_next] = std::move(t);
            replay_next = (replay_next + 1) % config.replay_capacity;
        }
    };

    Grads grads(online);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::size_t global_step = 0;

    auto epsilon = [&]() {
        if (global_step >= config.eps_decay_steps) return config.eps_end;
        const double frac = static_cast<double>(global_step) / config.eps_decay_steps;
        return config.eps_start + frac * (config.eps_end - config.eps_start);
    };

    auto learn = [&]() {
        if (replay.size() < std::max(config.warmup_transitions, config.batch_size)) return;
        grads.zero();
        std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
        ForwardCache cache;
        for (std::size_t b = 0; b < config.batch_size; ++b) {
            const Transition& tr = replay[pick(rng)];
            double target_q = tr.reward;
            if (!tr.terminal) {
                const Vec qn = forward_mlp(tr.next_state, target, spec);
                target_q += config.gamma * *std::max_element(qn.begin(), qn.end());
            }
            const Vec q = forward_cached(tr.state, online, spec, &cache);
            const double err = q[static_cast<std::size_t>(tr.action)] - target_q;
            Vec dout(q.size(), 0.0);
            // Huber loss, delta = 1
            dout[static_cast<std::size_t>(tr.action)] =
                std::clamp(err, -1.0, 1.0) / static_cast<double>(config.batch_size);
            backprop(online, spec, cache, std::move(dout), grads);
        }
        opt.step(online, grads, skip_first_bias);
    };

    TrainResult result;
    result.best_eval = -std::numeric_limits<double>::infinity();
    const bool shape_reward =
        config.velocity_bonus > 0.0 && env.kind() == envs::EnvKind::mountaincar;

    for (int episode = 1; episode <= config.max_episodes; ++episode) {
        Vec obs = env.reset(rng());
        while (!env.done()) {
            int action;
            if (coin(rng) < epsilon()) {
                std::uniform_int_distribution<int> ua(0, static_cast<int>(env.num_actions()) - 1);
                action = ua(rng);
            } else {
                action = argmax(forward_mlp(obs, online, spec));
            }
            const auto r = env.step(action);
            double reward = r.reward;
            if (shape_reward) reward += config.velocity_bonus * std::fabs(r.observation[1]);
            // Time-limit truncation is not a terminal state for bootstrapping.
            const bool truncated = env.step_count() >= env.max_steps() && r.done;
            const bool terminal = r.done && !truncated;
            push(Transition{obs, action, reward, r.observation, terminal});
            obs = r.observation;
            ++global_step;
            learn();
            if (global_step % config.target_sync_interval == 0) target = online;
        }
        result.episodes_run = episode;

        if (episode % config.eval_interval == 0) {
            auto eval_env = env.clone();
            const double mean = evaluate_greedy(online, spec, *eval_env,
                                                config.eval_episodes,
                                                mix_seed(config.seed, 0xEBA1));
            result.eval_history.push_back(mean);
            if (mean > result.best_eval) {
                result.best_eval = mean;
                result.weights = online;
            }
            if (mean >= config.success_reward) {
                result.reached_bar = true;
                return result;
            }
        }
    }

    if (result.eval_history.empty()) result.weights = online;
    throw TrainingError("training did not reach the success bar; best greedy mean = " +
                            std::to_string(result.best_eval),
                        result);
}

int SnnNetwork::act(const Vec& obs) const {
    snn::SpikeTelemetry unused;
    return act(obs, unused);
}

int SnnNetwork::act(const Vec& obs, snn::SpikeTelemetry& telemetry) const {
    const auto fwd = snn::forward_snn(obs, input_spec, layers, T, mode);
    telemetry = fwd.telemetry;
    if (mode == snn::OutputMode::dense)
        return static_cast<int>(snn::argmax_class(fwd.dense_scores));
    require(codebook.has_value(), "hdc network has no codebook");
    const std::size_t cls = hdc::classify(fwd.output_spikes, *codebook, T > 1).cls;
    return static_cast<int>(codebook->class_actions[cls]);
}

SnnNetwork convert(const MlpWeights& weights, const PolicySpec& spec, envs::Environment& env,
                   int codebook_episodes, std::uint64_t codebook_seed) {
    spec.validate();
    require(weights.w.size() == spec.num_layers(), "weight/spec layer count mismatch");
    require(spec.sizes.front() == env.obs_dim(), "spec does not match environment");

    const Vec m = env.nominal_ranges();
    SnnNetwork net;
    net.T = spec.T;
    net.source_spec = spec;
    net.input_spec = quant::InputQuantSpec{spec.n, m};

    const double levels_n = static_cast<double>(std::int64_t{1} << (spec.n - 1));
    // Per-dimension normalizers are folded into the embedding weights, so
    // theta0 is the m = 1 scale.
    const double theta0 = (1.0 - 1.0 / levels_n) * levels_n;

    Matrix w0 = weights.w[0];
    for (std::size_t i = 0; i < w0.rows; ++i)
        for (std::size_t j = 0; j < w0.cols; ++j) w0(i, j) *= m[j];
    net.layers.push_back(quant::quantize_layer(w0, weights.b[0], spec.q, theta0));

    // The embedding drive carries the input scale theta0 on its weight
    // products; rescale the bias into the same domain so one add per
    // timestep reproduces w*x + b instead of losing the bias entirely.
    {
        auto& l0 = net.layers.front();
        const double levels_q = static_cast<double>(std::int64_t{1} << (spec.q - 1));
        const double sq = (1.0 - 1.0 / levels_q) * levels_q / l0.spec.f;
        l0.b_drive.resize(weights.b[0].size());
        for (std::size_t i = 0; i < weights.b[0].size(); ++i)
            l0.b_drive[i] = static_cast<std::int64_t>(std::floor(weights.b[0][i] * theta0 * sq));
    }

    // Spike inputs carry activation scale 1, so each later threshold is just
    // that layer's own quantization factor.
    for (std::size_t l = 1; l < weights.w.size(); ++l)
        net.layers.push_back(quant::quantize_layer(weights.w[l], weights.b[l], spec.q, 1.0));

    net.mode = snn::OutputMode::dense;
    if (spec.output_mode == snn::OutputMode::hdc) {
        auto samples = hdc::collect_codebook_samples(net, env, codebook_episodes, codebook_seed,
                                                     4096, /*require_all_classes=*/false);
        // Actions the dense policy never chose get no hypervector; pack the
        // observed ones densely and remember which action each label means.
        std::vector<std::size_t> observed;
        for (const auto& [action, bits] : samples)
            if (std::find(observed.begin(), observed.end(), action) == observed.end())
                observed.push_back(action);
        std::sort(observed.begin(), observed.end());
        require(observed.size() >= 2, "codebook collection saw fewer than two distinct actions");
        for (auto& [action, bits] : samples)
            action = static_cast<std::size_t>(
                std::find(observed.begin(), observed.end(), action) - observed.begin());
        auto cb = hdc::hygen(samples, observed.size());
        cb.class_actions = observed;
        net.codebook = hdc::truncate(cb);
        net.mode = snn::OutputMode::hdc;
    }
    return net;
}

SnnNetwork convert(const SnnNetwork&, const PolicySpec&, envs::Environment&, int,
                   std::uint64_t) {
    throw std::logic_error("already quantized");
}

}  // namespace hypersnn::network

namespace hypersnn::hdc {

ClassSamples collect_codebook_samples(const network::SnnNetwork& net, envs::Environment& env,
                                      int episodes, std::uint64_t seed,
                                      std::size_t per_class_cap, bool require_all_classes) {
    require(episodes >= 1, "episodes must be >= 1");
    require(net.layers.size() >= 2, "network too small for codebook collection");

    const std::size_t classes = env.num_actions();
    std::vector<std::vector<std::vector<std::uint8_t>>> buckets(classes);
    std::vector<std::int64_t> seen(classes, 0);
    std::mt19937_64 rng(seed);

    for (int e = 0; e < episodes; ++e) {
        Vec obs = env.reset(seed + static_cast<std::uint64_t>(e));
        while (!env.done()) {
            const auto fwd = snn::forward_snn(obs, net.input_spec, net.layers, net.T,
                                              snn::OutputMode::dense);
            const std::size_t action = snn::argmax_class(fwd.dense_scores);

            const BitVec bv = net.T == 1 ? BitVec::from_bits(std::vector<std::uint8_t>(
                                               fwd.output_spikes.bits.begin(),
                                               fwd.output_spikes.bits.end()))
                                         : collapse_train(fwd.output_spikes);
            std::vector<std::uint8_t> bits(fwd.output_spikes.width);
            for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bv.get(i) ? 1 : 0;

            ++seen[action];
            auto& bucket = buckets[action];
            if (bucket.size() < per_class_cap) {
                bucket.push_back(std::move(bits));
            } else {
                std::uniform_int_distribution<std::int64_t> pick(0, seen[action] - 1);
                const std::int64_t slot = pick(rng);
                if (static_cast<std::size_t>(slot) < per_class_cap)
                    bucket[static_cast<std::size_t>(slot)] = std::move(bits);
            }

            obs = env.step(static_cast<int>(action)).observation;
        }
    }

    ClassSamples samples;
    for (std::size_t c = 0; c < classes; ++c) {
        if (buckets[c].empty() && require_all_classes)
            throw std::runtime_error(
                "action " + std::to_string(c) +
                " was never chosen during codebook collection; increase the number of "
                "exploration episodes");
        for (auto& bits : buckets[c]) samples.emplace_back(c, std::move(bits));
    }
    require(!samples.empty(), "codebook collection produced no samples");
    return samples;
}

}  // namespace hypersnn::hdc
