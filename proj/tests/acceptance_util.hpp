#pragma once

#include <functional>
#include <string>

#include "hypersnn/network.hpp"
#include "hypersnn/noise.hpp"

namespace acceptance {

using hypersnn::Vec;
using Policy = std::function<int(const Vec&)>;

/// Trains (or loads from ./acceptance_cache/) the float policy for one
/// (environment, activation, seed) triple. Training is deterministic, so the
/// cache is purely a speedup for reruns.
hypersnn::network::MlpWeights train_cached(hypersnn::envs::EnvKind kind,
                                           hypersnn::network::Activation activation,
                                           std::uint64_t seed);

/// Mean reward over seeded episodes, optionally with observation noise.
double eval_mean(hypersnn::envs::EnvKind kind, const Policy& policy, int episodes,
                 std::uint64_t seed_base,
                 const hypersnn::noise::NoiseSpec* noise = nullptr);

/// Prints one acceptance line (criterion number, verdict, detail) and
/// returns pass so callers can assert on it.
bool report(int criterion, const std::string& name, bool pass, const std::string& detail);

}  // namespace acceptance
