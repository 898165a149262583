#pragma once

#include <memory>
#include <random>

#include "hypersnn/core.hpp"

namespace hypersnn::envs {

enum class EnvKind { cartpole, acrobot, mountaincar };

EnvKind env_kind_from_string(const std::string& s);
std::string to_string(EnvKind kind);

struct StepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;
};

class Environment {
public:
    virtual ~Environment() = default;

    virtual EnvKind kind() const = 0;
    virtual std::size_t obs_dim() const = 0;
    virtual std::size_t num_actions() const = 0;
    virtual int max_steps() const = 0;

    virtual Vec reset(std::uint64_t seed) = 0;
    virtual StepResult step(int action) = 0;
    virtual std::unique_ptr<Environment> clone() const = 0;

    virtual const Vec& observation() const = 0;
    virtual int step_count() const = 0;
    virtual bool done() const = 0;

    /// Nominal per-dimension observation ranges, used as the input
    /// normalizer m during quantization.
    virtual Vec nominal_ranges() const = 0;
};

struct CartPoleOptions {
    double angle_limit_deg = 12.0;  // the toolchain the reported results used
    int max_steps = 2000;
};

std::unique_ptr<Environment> make_cartpole(const CartPoleOptions& opts = {});
std::unique_ptr<Environment> make_acrobot();
std::unique_ptr<Environment> make_mountaincar();
std::unique_ptr<Environment> make_env(EnvKind kind);

}  // namespace hypersnn::envs
