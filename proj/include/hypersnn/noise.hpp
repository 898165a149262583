#pragma once

#include <random>

#include "hypersnn/core.hpp"

namespace hypersnn::noise {

enum class NoiseKind { gaussian, uniform, poisson, clock_jitter };

NoiseKind noise_kind_from_string(const std::string& s);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    int k = 0;             // intensity index, >= 0
    double scale = 0.01;   // base multiplier
    Vec per_dim_scale;     // optional per-dimension multiplier (empty = all ones)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Observation-noise injector. Each evaluation worker owns one; the injected
/// sequence is fully determined by the spec's seed.
class Injector {
public:
    explicit Injector(const NoiseSpec& spec);

    /// prev_obs is the previous (clean) observation, used only by clock
    /// jitter; pass obs itself on the first step of an episode.
    Vec apply(const Vec& obs, const Vec& prev_obs);

    const NoiseSpec& spec() const { return spec_; }

private:
    NoiseSpec spec_;
    std::mt19937_64 rng_;
};

}  // namespace hypersnn::noise
