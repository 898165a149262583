#include "hypersnn/mpc.hpp"

namespace hypersnn::mpc {

void MpcConfig::validate() const {
    require(lookahead >= 1 && lookahead <= 16, "lookahead must be in 1..16");
    noise.validate();
}

MpcEpisodeResult mpc_episode(const Policy& policy, envs::Environment& env,
                             const MpcConfig& config, std::uint64_t seed) {
    config.validate();
    require(env.num_actions() == 2, "MPC wrapper needs a binary-action environment");

    noise::NoiseSpec spec = config.noise;
    spec.seed = seed ^ 0x5eedu;
    noise::Injector injector(spec);

    MpcEpisodeResult out;
    Vec obs = env.reset(seed);
    Vec prev = obs;
    const int cap = config.max_steps > 0 ? config.max_steps : env.max_steps();

    while (!env.done() && env.step_count() < cap) {
        const Vec noisy = injector.apply(obs, prev);
        ++out.noise_draws;
        int action = policy(noisy);
        ++out.policy_calls;

        // Lookahead simulation from the true state, noise-free.
        auto sim = env.clone();
        int sim_action = action;
        for (int j = 0; j < config.lookahead && !sim->done(); ++j) {
            const auto r = sim->step(sim_action);
            sim_action = policy(r.observation);
            ++out.policy_calls;
            const bool truncated = sim->step_count() >= sim->max_steps() && r.done;
            if (r.done && !truncated) {
                action = 1 - action;
                if (config.flip_once) break;
            }
        }

        const auto r = env.step(action);
        out.reward += r.reward;
        ++out.real_steps;
        prev = obs;
        obs = r.observation;
    }
    return out;
}

}  // namespace hypersnn::mpc
