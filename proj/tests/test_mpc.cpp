#include "doctest.h"
#include "hypersnn/mpc.hpp"

using namespace hypersnn;
using namespace hypersnn::mpc;

namespace {

// Hand PD controller; balances the pole essentially forever.
int pd_policy(const Vec& obs) { return obs[2] + obs[3] >= 0.0 ? 1 : 0; }

// Actively destabilizing: proposes the opposite of the stabilizing action.
int inverted_pd(const Vec& obs) { return 1 - pd_policy(obs); }

}  // namespace

TEST_CASE("lookahead is a no-op when rollouts never fail") {
    MpcConfig cfg;
    cfg.lookahead = 4;
    cfg.max_steps = 100;

    auto env = envs::make_cartpole();
    const auto res = mpc_episode(pd_policy, *env, cfg, 77);

    auto plain = envs::make_cartpole();
    Vec obs = plain->reset(77);
    double reward = 0.0;
    for (int t = 0; t < 100 && !plain->done(); ++t) {
        const auto r = plain->step(pd_policy(obs));
        reward += r.reward;
        obs = r.observation;
    }
    CHECK(res.reward == reward);
    CHECK(res.real_steps == 100);
}

TEST_CASE("policy-call accounting gives the (1 + lookahead) energy product") {
    for (int l : {1, 3, 7}) {
        MpcConfig cfg;
        cfg.lookahead = l;
        cfg.max_steps = 50;
        auto env = envs::make_cartpole();
        const auto res = mpc_episode(pd_policy, *env, cfg, 5);
        // One real inference plus l simulated inferences per real step, so
        // MPC costs (1 + l_mpc) times the per-inference energy.
        CHECK(res.policy_calls == res.real_steps * (1 + l));
    }
}

TEST_CASE("noise applies to real observations only") {
    MpcConfig cfg;
    cfg.lookahead = 6;
    cfg.max_steps = 40;
    cfg.noise.kind = noise::NoiseKind::gaussian;
    cfg.noise.k = 8;

    auto env = envs::make_cartpole();
    const auto res = mpc_episode(pd_policy, *env, cfg, 11);
    // One injector draw per real step; the 6 simulated steps per real step
    // feed the policy clean states and never touch the injector.
    CHECK(res.noise_draws == res.real_steps);
    CHECK(res.policy_calls == res.real_steps * 7);
}

TEST_CASE("failing rollouts veto the proposed action") {
    // The destabilizing policy dies quickly on its own; with enough
    // lookahead the simulated failure flips its proposals back to the
    // stabilizing side.
    MpcConfig cfg;
    cfg.max_steps = 200;

    cfg.lookahead = 1;
    auto env1 = envs::make_cartpole();
    const auto short_sight = mpc_episode(inverted_pd, *env1, cfg, 3);

    cfg.lookahead = 8;
    auto env8 = envs::make_cartpole();
    const auto long_sight = mpc_episode(inverted_pd, *env8, cfg, 3);

    CHECK(long_sight.reward > short_sight.reward);
}

TEST_CASE("episodes are deterministic under a fixed seed") {
    MpcConfig cfg;
    cfg.lookahead = 5;
    cfg.max_steps = 80;
    cfg.noise.kind = noise::NoiseKind::gaussian;
    cfg.noise.k = 8;

    auto run = [&] {
        auto env = envs::make_cartpole();
        return mpc_episode(inverted_pd, *env, cfg, 42);
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.reward == b.reward);
    CHECK(a.real_steps == b.real_steps);
    CHECK(a.policy_calls == b.policy_calls);
    CHECK(a.noise_draws == b.noise_draws);
}

TEST_CASE("configuration guards") {
    MpcConfig cfg;
    cfg.lookahead = 0;
    CHECK_THROWS(cfg.validate());
    cfg.lookahead = 17;
    CHECK_THROWS(cfg.validate());

    cfg.lookahead = 2;
    auto acrobot = envs::make_acrobot();
    CHECK_THROWS(mpc_episode(pd_policy, *acrobot, cfg, 1));
}
