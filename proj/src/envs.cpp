#include "hypersnn/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hypersnn::envs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double x) {
    while (x > kPi) x -= 2.0 * kPi;
    while (x < -kPi) x += 2.0 * kPi;
    return x;
}

// Shared episode bookkeeping: done is monotone and stepping past it throws.
class EnvBase : public Environment {
public:
    const Vec& observation() const override { return obs_; }
    int step_count() const override { return steps_; }
    bool done() const override { return done_; }

    StepResult step(int action) override {
        require(!done_, "cannot step a finished episode");
        require(action >= 0 && static_cast<std::size_t>(action) < num_actions(),
                "action out of range");
        StepResult r = do_step(action);
        ++steps_;
        if (steps_ >= max_steps()) r.done = true;
        done_ = r.done;
        obs_ = r.observation;
        return r;
    }

protected:
    virtual StepResult do_step(int action) = 0;

    void begin_episode(Vec obs) {
        obs_ = std::move(obs);
        steps_ = 0;
        done_ = false;
    }

    Vec obs_;
    int steps_ = 0;
    bool done_ = true;
};

class CartPole final : public EnvBase {
public:
    explicit CartPole(const CartPoleOptions& opts)
        : opts_(opts), angle_limit_(opts.angle_limit_deg * kPi / 180.0) {}

    EnvKind kind() const override { return EnvKind::cartpole; }
    std::size_t obs_dim() const override { return 4; }
    std::size_t num_actions() const override { return 2; }
    int max_steps() const override { return opts_.max_steps; }

    Vec reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        Vec s(4);
        for (auto& v : s) v = u(rng);
        begin_episode(s);
        return s;
    }

    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<CartPole>(*this);
    }

    Vec nominal_ranges() const override { return {2.4, 3.0, angle_limit_, 3.0}; }

protected:
    StepResult do_step(int action) override {
        const double gravity = 9.8, masscart = 1.0, masspole = 0.1;
        const double total_mass = masscart + masspole;
        const double length = 0.5;  // half the pole length
        const double polemass_length = masspole * length;
        const double force_mag = 10.0, tau = 0.02;

        double x = obs_[0], x_dot = obs_[1], theta = obs_[2], theta_dot = obs_[3];
        const double force = action == 1 ? force_mag : -force_mag;
        const double cos_t = std::cos(theta), sin_t = std::sin(theta);

        const double temp =
            (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass;
        const double theta_acc =
            (gravity * sin_t - cos_t * temp) /
            (length * (4.0 / 3.0 - masspole * cos_t * cos_t / total_mass));
        const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

        x += tau * x_dot;
        x_dot += tau * x_acc;
        theta += tau * theta_dot;
        theta_dot += tau * theta_acc;

        StepResult r;
        r.observation = {x, x_dot, theta, theta_dot};
        r.reward = 1.0;
        r.done = std::fabs(x) > 2.4 || std::fabs(theta) > angle_limit_;
        return r;
    }

private:
    CartPoleOptions opts_;
    double angle_limit_;
};

class Acrobot final : public EnvBase {
public:
    EnvKind kind() const override { return EnvKind::acrobot; }
    std::size_t obs_dim() const override { return 6; }
    std::size_t num_actions() const override { return 3; }
    int max_steps() const override { return 500; }

    Vec reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        for (auto& v : state_) v = u(rng);
        begin_episode(to_obs());
        return obs_;
    }

    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<Acrobot>(*this);
    }

    Vec nominal_ranges() const override {
        return {1.0, 1.0, 1.0, 1.0, 4.0 * kPi, 9.0 * kPi};
    }

protected:
    StepResult do_step(int action) override {
        const double torque = static_cast<double>(action - 1);
        rk4_step(torque, 0.2);
        state_[0] = wrap_angle(state_[0]);
        state_[1] = wrap_angle(state_[1]);
        state_[2] = std::clamp(state_[2], -4.0 * kPi, 4.0 * kPi);
        state_[3] = std::clamp(state_[3], -9.0 * kPi, 9.0 * kPi);

        StepResult r;
        r.observation = to_obs();
        r.done = -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
        r.reward = -1.0;
        return r;
    }

private:
    Vec to_obs() const {
        return {std::cos(state_[0]), std::sin(state_[0]),
                std::cos(state_[1]), std::sin(state_[1]),
                state_[2], state_[3]};
    }

    static std::array<double, 4> dynamics(const std::array<double, 4>& s, double torque) {
        const double m1 = 1.0, m2 = 1.0, l1 = 1.0, lc1 = 0.5, lc2 = 0.5;
        const double i1 = 1.0, i2 = 1.0, g = 9.8;
        const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];

        const double d1 = m1 * lc1 * lc1 +
                          m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) +
                          i1 + i2;
        const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
        const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - kPi / 2.0);
        const double phi1 =
            -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
            2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
            (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - kPi / 2.0) + phi2;
        const double ddtheta2 =
            (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) -
             phi2) /
            (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
        const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
        return {dtheta1, dtheta2, ddtheta1, ddtheta2};
    }

    void rk4_step(double torque, double dt) {
        const std::array<double, 4> s0 = state_;
        auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b,
                      double scale) {
            std::array<double, 4> r;
            for (int i = 0; i < 4; ++i) r[i] = a[i] + scale * b[i];
            return r;
        };
        const auto k1 = dynamics(s0, torque);
        const auto k2 = dynamics(add(s0, k1, dt / 2.0), torque);
        const auto k3 = dynamics(add(s0, k2, dt / 2.0), torque);
        const auto k4 = dynamics(add(s0, k3, dt), torque);
        for (int i = 0; i < 4; ++i)
            state_[i] = s0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    std::array<double, 4> state_{};  // theta1, theta2, dtheta1, dtheta2
};

class MountainCar final : public EnvBase {
public:
    EnvKind kind() const override { return EnvKind::mountaincar; }
    std::size_t obs_dim() const override { return 2; }
    std::size_t num_actions() const override { return 3; }
    int max_steps() const override { return 200; }

    Vec reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.6, -0.4);
        begin_episode({u(rng), 0.0});
        return obs_;
    }

    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<MountainCar>(*this);
    }

    Vec nominal_ranges() const override { return {1.2, 0.07}; }

protected:
    StepResult do_step(int action) override {
        double p = obs_[0], v = obs_[1];
        v += 0.001 * static_cast<double>(action - 1) - 0.0025 * std::cos(3.0 * p);
        v = std::clamp(v, -0.07, 0.07);
        p += v;
        p = std::clamp(p, -1.2, 0.6);

        StepResult r;
        r.observation = {p, v};
        r.reward = -1.0;
        r.done = p >= 0.5;
        return r;
    }
};

}  // namespace

EnvKind env_kind_from_string(const std::string& s) {
    if (s == "cartpole") return EnvKind::cartpole;
    if (s == "acrobot") return EnvKind::acrobot;
    if (s == "mountaincar") return EnvKind::mountaincar;
    throw std::invalid_argument("unknown environment: " + s);
}

std::string to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::cartpole: return "cartpole";
        case EnvKind::acrobot: return "acrobot";
        case EnvKind::mountaincar: return "mountaincar";
    }
    throw std::logic_error("bad EnvKind");
}

std::unique_ptr<Environment> make_cartpole(const CartPoleOptions& opts) {
    return std::make_unique<CartPole>(opts);
}
std::unique_ptr<Environment> make_acrobot() { return std::make_unique<Acrobot>(); }
std::unique_ptr<Environment> make_mountaincar() { return std::make_unique<MountainCar>(); }

std::unique_ptr<Environment> make_env(EnvKind kind) {
    switch (kind) {
        case EnvKind::cartpole: return make_cartpole();
        case EnvKind::acrobot: return make_acrobot();
        case EnvKind::mountaincar: return make_mountaincar();
    }
    throw std::logic_error("bad EnvKind");
}

}  // namespace hypersnn::envs
