#include "hypersnn/quant.hpp"

#include <algorithm>
#include <cmath>

namespace hypersnn::quant {

void InputQuantSpec::validate(std::size_t input_dim) const {
    require(n >= 2, "input bit width n must be >= 2");
    require(m.size() == 1 || m.size() == input_dim,
            "normalizer m must be scalar or match the input dimension");
    for (double v : m) require(std::isfinite(v) && v > 0.0, "normalizer m must be > 0");
}

QuantizedInput quantize_input(const Vec& x, const InputQuantSpec& spec) {
    spec.validate(x.size());
    for (double v : x) require(std::isfinite(v), "non-finite input");

    const double levels = static_cast<double>(std::int64_t{1} << (spec.n - 1));
    const double shrink = 1.0 - 1.0 / levels;

    QuantizedInput out;
    out.x_int.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mi = spec.m_at(i);
        const double clipped = std::clamp(x[i], -mi, mi);
        out.x_int[i] = static_cast<std::int64_t>(std::floor(shrink * (clipped / mi) * levels));
    }
    // With per-dimension normalizers the integer values live in the m = 1
    // domain; the caller has folded m into the weights.
    const double m_eff = spec.scalar() ? spec.m[0] : 1.0;
    out.theta0 = shrink * levels / m_eff;
    return out;
}

QuantizedLinear quantize_layer(const Matrix& w, const Vec& b, int q, double theta_in) {
    require(q >= 2, "weight bit width q must be >= 2");
    require(w.rows == b.size(), "bias length must match output dimension");
    require(theta_in > 0.0, "theta_in must be > 0");

    double f = 0.0;
    for (double v : w.data) {
        require(std::isfinite(v), "non-finite weight");
        f = std::max(f, std::fabs(v));
    }
    for (double v : b) {
        require(std::isfinite(v), "non-finite bias");
        f = std::max(f, std::fabs(v));
    }
    require(f > 0.0, "degenerate layer: all-zero weights and bias");

    const double levels = static_cast<double>(std::int64_t{1} << (q - 1));
    const double shrink = 1.0 - 1.0 / levels;
    auto map = [&](double v) {
        return static_cast<std::int64_t>(std::floor(shrink * (v / f) * levels));
    };

    QuantizedLinear layer;
    layer.spec = WeightQuantSpec{q, f};
    layer.w_int = IntMatrix(w.rows, w.cols);
    for (std::size_t i = 0; i < w.data.size(); ++i) layer.w_int.data[i] = map(w.data[i]);
    layer.b_int.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) layer.b_int[i] = map(b[i]);
    layer.theta = theta_in * shrink * levels / f;
    return layer;
}

double max_quant_error(const WeightQuantSpec& spec) {
    require(spec.q >= 2 && spec.f > 0.0, "invalid weight quantization spec");
    const double levels = static_cast<double>(std::int64_t{1} << (spec.q - 1));
    return 2.0 * spec.f / levels;
}

}  // namespace hypersnn::quant
