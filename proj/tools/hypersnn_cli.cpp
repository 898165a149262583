#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hypersnn/experiment.hpp"
#include "hypersnn/mpc.hpp"

using namespace hypersnn;

namespace {

struct CommonArgs {
    std::string env = "cartpole";
    std::string weights;
    std::string out;
    std::uint64_t seed = 1;
    int episodes = 100;
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

int cmd_train(const CommonArgs& common, const std::string& activation, double success_reward,
              int max_episodes, int T) {
    const auto kind = envs::env_kind_from_string(common.env);
    auto spec = network::preset_for(kind);
    spec.T = T;
    spec.activation =
        activation == "relu" ? network::Activation::relu : network::Activation::cq;

    auto config = network::default_dqn_for(kind);
    config.seed = common.seed;
    if (!std::isnan(success_reward)) config.success_reward = success_reward;
    if (max_episodes > 0) config.max_episodes = max_episodes;

    auto env = envs::make_env(kind);
    network::TrainResult result;
    try {
        result = network::train_dqn(spec, config, *env);
    } catch (const network::TrainingError& e) {
        std::cerr << "warning: " << e.what() << "; saving the best checkpoint (greedy mean "
                  << e.best_result.best_eval << ")\n";
        result = e.best_result;
    }

    harness::WeightFile wf;
    wf.spec = spec;
    wf.env = kind;
    wf.float_weights = result.weights;
    wf.train_seed = common.seed;
    const std::string path = common.out.empty() ? common.env + "_weights.json" : common.out;
    harness::save_weights(path, wf);
    std::cout << "trained " << common.env << " (" << activation << "), greedy mean "
              << result.best_eval << " after " << result.episodes_run << " episodes -> " << path
              << "\n";
    return 0;
}

int cmd_convert(const CommonArgs& common, int n, int q, int T, bool hdc, int codebook_episodes) {
    if (common.weights.empty()) throw std::runtime_error("--weights is required");
    auto wf = harness::load_weights(common.weights);
    if (!wf.float_weights)
        throw std::runtime_error("weight file has no float weights; run the train command first");

    wf.spec.n = n;
    wf.spec.q = q;
    wf.spec.T = T;
    wf.spec.output_mode = hdc ? snn::OutputMode::hdc : snn::OutputMode::dense;
    auto env = envs::make_env(wf.env);
    wf.snn = network::convert(*wf.float_weights, wf.spec, *env, codebook_episodes, common.seed);

    const std::string path = common.out.empty() ? common.weights : common.out;
    harness::save_weights(path, wf);
    std::cout << "converted to " << q << "-bit SNN (T=" << T << (hdc ? ", HDC" : "") << ") -> "
              << path << "\n";
    if (hdc && wf.snn->codebook)
        std::cout << "codebook retained " << wf.snn->codebook->retained() << " of "
                  << wf.snn->codebook->dim() << " positions\n";
    return 0;
}

harness::ExperimentConfig base_config(const CommonArgs& common, const std::string& energy_mode) {
    harness::ExperimentConfig config;
    config.env = envs::env_kind_from_string(common.env);
    config.episodes = common.episodes;
    config.seed = common.seed;
    config.energy_mode = energy_mode == "measured" ? energy::EnergyMode::measured
                                                   : energy::EnergyMode::conservative;
    if (config.env == envs::EnvKind::acrobot) {
        config.noise_scale = 0.1;
        config.per_dim_scale = {1, 1, 1, 1, 4, 9};
    }
    return config;
}

int cmd_eval(const CommonArgs& common, const std::string& variant_name,
             const std::string& energy_mode) {
    if (common.weights.empty()) throw std::runtime_error("--weights is required");
    const auto wf = harness::load_weights(common.weights);
    const auto variant = harness::variant_from_string(variant_name);
    const auto target = harness::EvalTarget::from_weight_file(wf, variant);

    auto config = base_config(common, energy_mode);
    config.env = wf.env;
    config.variant = variant;
    const auto rows = harness::run_experiment(config, target);
    write_output(common.out, harness::results_to_csv(rows));
    return 0;
}

int cmd_sweep(const CommonArgs& common, const std::vector<std::string>& variant_names,
              const std::vector<std::string>& kinds, const std::vector<int>& ks,
              const std::string& energy_mode) {
    if (common.weights.empty()) throw std::runtime_error("--weights is required");
    const auto wf = harness::load_weights(common.weights);

    std::vector<harness::ResultRow> rows;
    for (const auto& vn : variant_names) {
        const auto variant = harness::variant_from_string(vn);
        const auto target = harness::EvalTarget::from_weight_file(wf, variant);
        auto config = base_config(common, energy_mode);
        config.env = wf.env;
        config.variant = variant;
        config.grid.clear();
        for (const auto& kn : kinds) {
            const auto kind = noise::noise_kind_from_string(kn);
            for (int k : ks) config.grid.push_back({kind, k});
        }
        const auto part = harness::run_experiment(config, target);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    write_output(common.out, harness::results_to_csv(rows));
    return 0;
}

int cmd_mpc(const CommonArgs& common, const std::string& variant_name, int lookahead,
            int noise_k, const std::string& noise_kind, double noise_scale) {
    if (common.weights.empty()) throw std::runtime_error("--weights is required");
    const auto wf = harness::load_weights(common.weights);
    const auto variant = harness::variant_from_string(variant_name);
    const auto target = harness::EvalTarget::from_weight_file(wf, variant);

    mpc::MpcConfig config;
    config.lookahead = lookahead;
    config.noise.kind = noise::noise_kind_from_string(noise_kind);
    config.noise.k = noise_k;
    config.noise.scale = noise_scale;

    mpc::Policy policy = [&](const Vec& obs) { return target.act(obs, nullptr); };
    double total = 0.0;
    std::int64_t calls = 0;
    for (int i = 0; i < common.episodes; ++i) {
        auto env = envs::make_env(wf.env);
        const auto r = mpc::mpc_episode(policy, *env, config, common.seed + i);
        total += r.reward;
        calls += r.policy_calls;
    }
    const auto ledger = harness::target_energy(target, energy::EnergyMode::conservative);
    const double per_inference = ledger.total_pj(energy::CostTable{});
    std::cout << "lookahead=" << lookahead << " episodes=" << common.episodes << " mean_reward="
              << total / common.episodes << " policy_calls=" << calls
              << " energy_pj=" << per_inference * static_cast<double>(calls) << "\n";
    return 0;
}

int cmd_energy_report(const std::string& env_name, const std::string& out) {
    std::vector<envs::EnvKind> envs_to_report;
    if (env_name == "all") {
        envs_to_report = {envs::EnvKind::cartpole, envs::EnvKind::acrobot,
                          envs::EnvKind::mountaincar};
    } else {
        envs_to_report = {envs::env_kind_from_string(env_name)};
    }

    std::vector<std::pair<std::string, energy::EnergyLedger>> ledgers;
    for (auto kind : envs_to_report) {
        const auto spec = network::preset_for(kind);
        const energy::NetShape shape{spec.sizes};
        ledgers.emplace_back(envs::to_string(kind) + "/mlp_fp32", energy::count_mlp(shape));
        for (int bits : {32, 8}) {
            energy::SnnCountSpec cs;
            cs.shape = shape;
            cs.T = 1;
            cs.weight_precision =
                bits == 8 ? energy::Precision::int8 : energy::Precision::int32;
            cs.output_mode = snn::OutputMode::hdc;
            // Published retained widths; an actual codebook depends on the
            // trained weights, so the report uses the reference widths.
            switch (kind) {
                case envs::EnvKind::cartpole: cs.retained_width = 1; break;
                case envs::EnvKind::acrobot: cs.retained_width = 61; break;
                case envs::EnvKind::mountaincar: cs.retained_width = 19; break;
            }
            cs.xor_convention = energy::XorConvention::shared;
            ledgers.emplace_back(envs::to_string(kind) + "/snn_int" + std::to_string(bits) +
                                     "_hdc",
                                 energy::count_snn(cs, energy::EnergyMode::conservative));
        }
    }
    write_output(out, energy::report_csv(ledgers, energy::CostTable{}));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-accounted SNN + HDC control engine"};
    app.require_subcommand(1);

    CommonArgs common;
    app.set_config("--config", "",
                   "declarative experiment file (TOML, [subcommand] sections mirror the flags)");

    auto add_common = [&](CLI::App* sub, bool needs_env) {
        if (needs_env)
            sub->add_option("--env", common.env, "cartpole | acrobot | mountaincar");
        sub->add_option("--weights", common.weights, "weight file path");
        sub->add_option("--out", common.out, "output path ('-' = stdout)");
        sub->add_option("--seed", common.seed, "base RNG seed");
        sub->add_option("--episodes", common.episodes, "evaluation episodes");
    };

    auto* train = app.add_subcommand("train", "train a float policy with DQN");
    std::string activation = "cq";
    double success_reward = std::nan("");
    int train_max_episodes = 0;
    int train_T = 1;
    add_common(train, true);
    train->add_option("--activation", activation, "cq | relu");
    train->add_option("--success-reward", success_reward, "early-stop greedy mean");
    train->add_option("--max-episodes", train_max_episodes, "training episode budget");
    train->add_option("-T,--timesteps", train_T, "CQ quantization levels");

    auto* convert = app.add_subcommand("convert", "quantize a trained policy to an SNN");
    int n = 8, q = 8, T = 1, codebook_episodes = 100;
    bool hdc = false;
    add_common(convert, false);
    convert->add_option("-n,--input-bits", n, "input bit width");
    convert->add_option("-q,--weight-bits", q, "weight bit width");
    convert->add_option("-T,--timesteps", T, "inference timesteps");
    convert->add_flag("--hdc", hdc, "replace the dense head with an HDC classifier");
    convert->add_option("--codebook-episodes", codebook_episodes, "rollouts for HyGen samples");

    auto* eval = app.add_subcommand("eval", "evaluate one variant, emit a CSV row");
    std::string variant_name = "snn_int8_hdc";
    std::string energy_mode = "conservative";
    add_common(eval, false);
    eval->add_option("--variant", variant_name, "mlp_fp32 | snn_int{32,8}[_hdc]");
    eval->add_option("--energy-mode", energy_mode, "conservative | measured");

    auto* sweep = app.add_subcommand("sweep", "noise grid evaluation, emits CSV");
    std::vector<std::string> sweep_variants = {"mlp_fp32", "snn_int8_hdc"};
    std::vector<std::string> sweep_kinds = {"gaussian"};
    std::vector<int> sweep_ks = {0, 1, 2, 3, 4, 5};
    add_common(sweep, false);
    sweep->add_option("--variant", sweep_variants, "variants to sweep");
    sweep->add_option("--noise", sweep_kinds, "noise kinds (gaussian uniform poisson clock_jitter)");
    sweep->add_option("--k", sweep_ks, "noise intensity grid");
    sweep->add_option("--energy-mode", energy_mode, "conservative | measured");

    auto* mpc_cmd = app.add_subcommand("mpc", "lookahead-and-flip evaluation on CartPole");
    int lookahead = 1, noise_k = 8;
    std::string mpc_noise = "gaussian";
    double mpc_scale = 0.01;
    add_common(mpc_cmd, false);
    mpc_cmd->add_option("--variant", variant_name, "policy variant");
    mpc_cmd->add_option("--lookahead", lookahead, "simulated steps per real step (1..16)");
    mpc_cmd->add_option("--noise-k", noise_k, "noise intensity on the real observation");
    mpc_cmd->add_option("--noise-kind", mpc_noise, "noise kind");
    mpc_cmd->add_option("--noise-scale", mpc_scale, "base noise multiplier");

    auto* report = app.add_subcommand("energy-report", "per-layer operation/energy tables");
    std::string report_env = "all";
    std::string report_out;
    report->add_option("--env", report_env, "cartpole | acrobot | mountaincar | all");
    report->add_option("--out", report_out, "output path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed())
            return cmd_train(common, activation, success_reward, train_max_episodes, train_T);
        if (convert->parsed()) return cmd_convert(common, n, q, T, hdc, codebook_episodes);
        if (eval->parsed()) return cmd_eval(common, variant_name, energy_mode);
        if (sweep->parsed())
            return cmd_sweep(common, sweep_variants, sweep_kinds, sweep_ks, energy_mode);
        if (mpc_cmd->parsed())
            return cmd_mpc(common, variant_name, lookahead, noise_k, mpc_noise, mpc_scale);
        if (report->parsed()) return cmd_energy_report(report_env, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
