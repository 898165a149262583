#include "hypersnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace hypersnn::harness {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9E3779B97F4A7C15ull + b + 0x2545F4914F6CDD1Dull;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    return x;
}

struct EpisodeOutcome {
    double reward = 0.0;
    std::vector<double> rate_sums;  // per spiking layer
    std::int64_t inferences = 0;
};

EpisodeOutcome run_episode(const EvalTarget& target, envs::Environment& env,
                           const noise::NoiseSpec& noise_spec, std::uint64_t episode_seed) {
    noise::NoiseSpec spec = noise_spec;
    spec.seed = mix(episode_seed, 0x4015Eull);
    noise::Injector injector(spec);

    EpisodeOutcome out;
    Vec obs = env.reset(episode_seed);
    Vec prev = obs;
    const bool track_rates = target.snn.has_value();

    while (!env.done()) {
        const Vec noisy = injector.apply(obs, prev);
        snn::SpikeTelemetry telemetry;
        const int action = target.act(noisy, track_rates ? &telemetry : nullptr);
        if (track_rates) {
            if (out.rate_sums.empty()) out.rate_sums.resize(telemetry.layer_rates.size(), 0.0);
            for (std::size_t i = 0; i < telemetry.layer_rates.size(); ++i)
                out.rate_sums[i] += telemetry.layer_rates[i];
        }
        ++out.inferences;
        const auto r = env.step(action);
        out.reward += r.reward;
        prev = obs;
        obs = r.observation;
    }
    return out;
}

}  // namespace

Variant variant_from_string(const std::string& s) {
    if (s == "mlp_fp32") return Variant::mlp_fp32;
    if (s == "snn_int32") return Variant::snn_int32;
    if (s == "snn_int8") return Variant::snn_int8;
    if (s == "snn_int32_hdc") return Variant::snn_int32_hdc;
    if (s == "snn_int8_hdc") return Variant::snn_int8_hdc;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::mlp_fp32: return "mlp_fp32";
        case Variant::snn_int32: return "snn_int32";
        case Variant::snn_int8: return "snn_int8";
        case Variant::snn_int32_hdc: return "snn_int32_hdc";
        case Variant::snn_int8_hdc: return "snn_int8_hdc";
    }
    throw std::logic_error("bad Variant");
}

bool variant_uses_hdc(Variant v) {
    return v == Variant::snn_int32_hdc || v == Variant::snn_int8_hdc;
}

int variant_bits(Variant v) {
    switch (v) {
        case Variant::mlp_fp32: return 0;
        case Variant::snn_int32:
        case Variant::snn_int32_hdc: return 32;
        case Variant::snn_int8:
        case Variant::snn_int8_hdc: return 8;
    }
    throw std::logic_error("bad Variant");
}

std::string ExperimentConfig::canonical_string() const {
    std::ostringstream s;
    s << envs::to_string(env) << '|' << harness::to_string(variant) << '|' << episodes << '|'
      << seed << '|' << noise_scale << '|';
    for (double v : per_dim_scale) s << v << ',';
    s << '|';
    for (const auto& p : grid) s << noise::to_string(p.kind) << ':' << p.k << ';';
    s << '|' << (energy_mode == energy::EnergyMode::measured ? "measured" : "conservative");
    return s.str();
}

std::string ExperimentConfig::hash() const {
    const std::string c = canonical_string();
    std::vector<std::uint8_t> bytes(c.begin(), c.end());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "env,variant,n,q,T,noise_kind,k,mean_reward,reward_std,"
           "energy_pj_per_inference,energy_mode,config_hash,weight_checksum,code_version\n";
    out.precision(10);
    for (const auto& r : rows) {
        out << r.env << ',' << r.variant << ',' << r.n << ',' << r.q << ',' << r.T << ','
            << r.noise_kind << ',' << r.k << ',' << r.mean_reward << ',' << r.reward_std << ','
            << r.energy_pj_per_inference << ',' << r.energy_mode << ',' << r.config_hash << ','
            << r.weight_checksum << ',' << r.code_version << '\n';
    }
    return out.str();
}

int EvalTarget::act(const Vec& obs, snn::SpikeTelemetry* telemetry) const {
    if (variant == Variant::mlp_fp32) {
        require(float_weights.has_value(), "missing float weights; run the train command first");
        return network::argmax(network::forward_mlp(obs, *float_weights, spec));
    }
    require(snn.has_value(), "missing converted network; run the convert command first");
    snn::SpikeTelemetry local;
    const int a = snn->act(obs, local);
    if (telemetry) *telemetry = local;
    return a;
}

EvalTarget EvalTarget::from_weight_file(const WeightFile& wf, Variant variant) {
    EvalTarget t;
    t.variant = variant;
    t.spec = wf.spec;
    if (variant == Variant::mlp_fp32) {
        require(wf.float_weights.has_value(),
                "weight file has no float weights; train a baseline first");
        t.float_weights = wf.float_weights;
    } else {
        require(wf.snn.has_value(),
                "weight file has no converted network; run the convert command first");
        require(variant_bits(variant) == wf.snn->source_spec.q,
                "variant bit width does not match the converted network");
        require(variant_uses_hdc(variant) == (wf.snn->mode == snn::OutputMode::hdc),
                "variant HDC mode does not match the converted network");
        t.snn = wf.snn;
    }
    // Provenance: checksum over the serialized payload-bearing fields.
    std::ostringstream s;
    if (t.float_weights)
        for (const auto& m : t.float_weights->w)
            for (double v : m.data) s << v << ',';
    if (t.snn)
        for (const auto& l : t.snn->layers)
            for (auto v : l.w_int.data) s << v << ',';
    const std::string str = s.str();
    std::vector<std::uint8_t> bytes(str.begin(), str.end());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    t.weight_checksum = buf;
    return t;
}

int worker_count() {
    if (const char* env = std::getenv("HYPERSNN_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

energy::EnergyLedger target_energy(const EvalTarget& target, energy::EnergyMode mode,
                                   const std::vector<double>& measured_rates) {
    energy::NetShape shape{target.spec.sizes};
    if (target.variant == Variant::mlp_fp32) return energy::count_mlp(shape);

    energy::SnnCountSpec spec;
    spec.shape = shape;
    spec.T = target.spec.T;
    spec.weight_precision =
        variant_bits(target.variant) == 8 ? energy::Precision::int8 : energy::Precision::int32;
    spec.output_mode =
        variant_uses_hdc(target.variant) ? snn::OutputMode::hdc : snn::OutputMode::dense;
    if (spec.output_mode == snn::OutputMode::hdc) {
        require(target.snn && target.snn->codebook, "hdc variant needs a codebook");
        spec.retained_width = target.snn->codebook->retained();
    }
    return energy::count_snn(spec, mode, measured_rates);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, const EvalTarget& target) {
    require(config.episodes >= 1, "episodes must be >= 1");
    const std::string config_hash = config.hash();

    std::vector<ResultRow> rows;
    for (const auto& point : config.grid) {
        noise::NoiseSpec noise_spec;
        noise_spec.kind = point.kind;
        noise_spec.k = point.k;
        noise_spec.scale = config.noise_scale;
        noise_spec.per_dim_scale = config.per_dim_scale;

        std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(config.episodes));
        const int workers =
            std::min(worker_count(), config.episodes);
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        auto work = [&]() {
            auto env = envs::make_env(config.env);
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= config.episodes) break;
                const std::uint64_t ep_seed =
                    mix(config.seed, mix(static_cast<std::uint64_t>(point.k) * 131 +
                                             static_cast<std::uint64_t>(point.kind),
                                         static_cast<std::uint64_t>(i)));
                outcomes[static_cast<std::size_t>(i)] =
                    run_episode(target, *env, noise_spec, ep_seed);
            }
        };
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();

        double sum = 0.0, sum_sq = 0.0;
        std::vector<double> rate_sums;
        std::int64_t inferences = 0;
        for (const auto& o : outcomes) {
            sum += o.reward;
            sum_sq += o.reward * o.reward;
            inferences += o.inferences;
            if (rate_sums.size() < o.rate_sums.size()) rate_sums.resize(o.rate_sums.size(), 0.0);
            for (std::size_t i = 0; i < o.rate_sums.size(); ++i) rate_sums[i] += o.rate_sums[i];
        }
        const double mean = sum / config.episodes;
        const double var = std::max(0.0, sum_sq / config.episodes - mean * mean);

        std::vector<double> mean_rates(rate_sums.size());
        for (std::size_t i = 0; i < rate_sums.size(); ++i)
            mean_rates[i] = inferences > 0 ? rate_sums[i] / static_cast<double>(inferences) : 0.0;

        const auto ledger = target_energy(target, config.energy_mode, mean_rates);

        ResultRow row;
        row.env = envs::to_string(config.env);
        row.variant = to_string(target.variant);
        row.n = target.spec.n;
        row.q = target.spec.q;
        row.T = target.spec.T;
        row.noise_kind = noise::to_string(point.kind);
        row.k = point.k;
        row.mean_reward = mean;
        row.reward_std = std::sqrt(var);
        row.energy_pj_per_inference = ledger.total_pj(energy::CostTable{});
        row.energy_mode =
            config.energy_mode == energy::EnergyMode::measured ? "measured" : "conservative";
        row.config_hash = config_hash;
        row.weight_checksum = target.weight_checksum;
        row.code_version = kCodeVersion;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hypersnn::harness
