#pragma once

#include "hypersnn/core.hpp"

namespace hypersnn::quant {

/// Input-side fixed-point spec. `m` is the per-dimension normalizer; a
/// single-element vector acts as a scalar normalizer shared by all
/// dimensions. Representable integer range is [-(2^{n-1}-1), 2^{n-1}-1].
struct InputQuantSpec {
    int n = 8;       // bit width, >= 2
    Vec m = {1.0};   // normalizer(s), all > 0

    void validate(std::size_t input_dim) const;
    bool scalar() const { return m.size() == 1; }
    double m_at(std::size_t i) const { return scalar() ? m[0] : m[i]; }
};

struct WeightQuantSpec {
    int q = 8;        // bit width, >= 2
    double f = 1.0;   // max over |w| and |b| of the quantized layer, > 0
};

/// One fixed-point linear layer plus the firing threshold that the
/// quantization rescaling produced for it.
struct QuantizedLinear {
    IntMatrix w_int;       // out x in
    IntVec b_int;          // out
    WeightQuantSpec spec;
    double theta = 0.0;    // threshold in the quantized domain, > 0
    // Embedding layers only: bias pre-scaled to the drive domain
    // (input scale x weight scale), kept in a wide accumulator like the
    // int32 bias registers of int8 inference engines. When set, the IF
    // loop adds this per timestep instead of b_int, which lives at the
    // weight scale and would land two orders of magnitude too small.
    IntVec b_drive;

    std::size_t in_dim() const { return w_int.cols; }
    std::size_t out_dim() const { return w_int.rows; }
};

struct QuantizedInput {
    IntVec x_int;
    double theta0 = 0.0;
};

/// Fixed-point conversion of an observation vector. Out-of-range inputs are
/// clipped to [-m, m] first. With a vector normalizer each dimension is
/// normalized independently and theta0 is reported for the normalized
/// (m = 1) domain; the caller folds the per-dimension scales into the
/// weights before quantizing them.
QuantizedInput quantize_input(const Vec& x, const InputQuantSpec& spec);

/// Weight/bias quantization with threshold rescaling. `theta_in` is the
/// threshold expressed in the layer's input scale; the returned layer
/// carries theta_in multiplied by the quantization scale factor.
QuantizedLinear quantize_layer(const Matrix& w, const Vec& b, int q, double theta_in);

/// Upper bound on the per-entry dequantization error of a floor quantizer
/// at bit width q and normalizer f: one floor step plus the shrinkage.
double max_quant_error(const WeightQuantSpec& spec);

/// Inverse of the weight mapping, for error-bound checks.
inline double dequantize(std::int64_t v, const WeightQuantSpec& spec) {
    const double levels = static_cast<double>(std::int64_t{1} << (spec.q - 1));
    return static_cast<double>(v) * spec.f / ((1.0 - 1.0 / levels) * levels);
}

}  // namespace hypersnn::quant
