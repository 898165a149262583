#pragma once

#include <functional>

#include "hypersnn/envs.hpp"
#include "hypersnn/noise.hpp"

namespace hypersnn::mpc {

using Policy = std::function<int(const Vec&)>;

struct MpcConfig {
    int lookahead = 1;            // l_mpc, 1..16
    noise::NoiseSpec noise;       // applied to the real observation only
    int max_steps = 0;            // 0 = use the environment's own cap
    // Stop the lookahead at the first veto instead of letting every failing
    // simulated step toggle the action. A finished simulation cannot step
    // again, so with this engine both settings act identically; the flag
    // exists to document the choice.
    bool flip_once = true;

    void validate() const;
};

struct MpcEpisodeResult {
    double reward = 0.0;
    std::int64_t real_steps = 0;
    std::int64_t policy_calls = 0;  // real + simulated inferences
    std::int64_t noise_draws = 0;   // injector applications (real steps only)
};

/// Rollout-and-veto lookahead for a binary-action environment: the policy
/// proposes an action from the noisy observation, a noiseless simulation
/// from the true state runs lookahead steps feeding the policy its own
/// simulated states, and the proposed action is flipped if the simulation
/// terminates early.
MpcEpisodeResult mpc_episode(const Policy& policy, envs::Environment& env,
                             const MpcConfig& config, std::uint64_t seed);

}  // namespace hypersnn::mpc
