#include "hypersnn/noise.hpp"

#include <cmath>

namespace hypersnn::noise {

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian" || s == "gn") return NoiseKind::gaussian;
    if (s == "uniform" || s == "un") return NoiseKind::uniform;
    if (s == "poisson" || s == "pn") return NoiseKind::poisson;
    if (s == "clock_jitter" || s == "cjn") return NoiseKind::clock_jitter;
    throw std::invalid_argument("unknown noise kind: " + s);
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::uniform: return "uniform";
        case NoiseKind::poisson: return "poisson";
        case NoiseKind::clock_jitter: return "clock_jitter";
    }
    throw std::logic_error("bad NoiseKind");
}

void NoiseSpec::validate() const {
    require(k >= 0, "noise intensity k must be >= 0");
    require(scale > 0.0, "noise scale must be > 0");
    for (double v : per_dim_scale) require(v >= 0.0, "per_dim_scale must be >= 0");
}

Injector::Injector(const NoiseSpec& spec) : spec_(spec), rng_(spec.seed) {
    spec_.validate();
}

Vec Injector::apply(const Vec& obs, const Vec& prev_obs) {
    for (double v : obs) require(std::isfinite(v), "non-finite observation");
    require(prev_obs.size() == obs.size(), "prev_obs width mismatch");
    if (!spec_.per_dim_scale.empty())
        require(spec_.per_dim_scale.size() == obs.size(), "per_dim_scale width mismatch");

    const double amp = static_cast<double>(spec_.k) * spec_.scale;
    auto dim_scale = [&](std::size_t i) {
        return spec_.per_dim_scale.empty() ? 1.0 : spec_.per_dim_scale[i];
    };

    Vec out = obs;
    if (spec_.k == 0) return out;

    switch (spec_.kind) {
        case NoiseKind::gaussian: {
            std::normal_distribution<double> n(0.0, 1.0);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += amp * dim_scale(i) * n(rng_);
            break;
        }
        case NoiseKind::uniform: {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += amp * dim_scale(i) * u(rng_);
            break;
        }
        case NoiseKind::poisson: {
            // Mean-centered shot noise: Pois(1) - 1 keeps it zero-mean like
            // the other injectors.
            std::poisson_distribution<int> p(1.0);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += amp * dim_scale(i) * static_cast<double>(p(rng_) - 1);
            break;
        }
        case NoiseKind::clock_jitter: {
            // Timing offset shared across dimensions, first-order
            // extrapolation error along the observation derivative.
            std::normal_distribution<double> n(0.0, amp);
            const double delta = n(rng_);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += (obs[i] - prev_obs[i]) * delta * dim_scale(i);
            break;
        }
    }
    return out;
}

}  // namespace hypersnn::noise
