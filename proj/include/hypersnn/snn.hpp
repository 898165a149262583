#pragma once

#include "hypersnn/core.hpp"
#include "hypersnn/quant.hpp"

namespace hypersnn::snn {

/// Binary spike tensor of shape (T, d); the inter-layer currency.
struct SpikeTrain {
    int T = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> bits;  // row-major (T, width), entries in {0,1}

    SpikeTrain() = default;
    SpikeTrain(int t, std::size_t d) : T(t), width(d), bits(static_cast<std::size_t>(t) * d, 0) {}

    std::uint8_t& at(int t, std::size_t j) { return bits[static_cast<std::size_t>(t) * width + j]; }
    std::uint8_t at(int t, std::size_t j) const { return bits[static_cast<std::size_t>(t) * width + j]; }

    std::int64_t spike_count() const;
    /// Per-position spike counts summed over time.
    IntVec column_counts() const;
};

/// Integrate-and-fire state for one neuron.
struct NeuronState {
    long double drive = 0.0L;      // V: accumulated (or averaged) input drive
    long double potential = 0.0L;  // U: membrane potential
};

struct SpikeTelemetry {
    std::vector<std::int64_t> layer_spikes;  // one entry per spiking layer
    std::vector<double> layer_rates;         // spikes / (T * width)
    std::int64_t total_spikes = 0;
};

enum class OutputMode { dense, hdc };

/// Embedding-layer spike train generation: the drive w_int*x_int + b_int is
/// accumulated each timestep and a spike fires whenever V reaches theta.
SpikeTrain spike_gen(const IntVec& x_int, const quant::QuantizedLinear& layer, int T);

/// Intermediate-layer activation: averages the spike-driven drive over T,
/// then runs the IF recurrence on the constant average.
SpikeTrain inter_layer_act(const SpikeTrain& s_prev, const quant::QuantizedLinear& layer, int T);

struct ForwardResult {
    OutputMode mode = OutputMode::dense;
    IntVec dense_scores;        // dense mode: integer accumulator per class
    SpikeTrain output_spikes;   // hdc mode: penultimate-layer spike train
    SpikeTelemetry telemetry;
};

/// Full inference pass over a converted network. In dense mode the final
/// layer is evaluated as spike-count-weighted integer sums (argmax-ready);
/// in hdc mode the spike train feeding the classifier is returned instead.
ForwardResult forward_snn(const Vec& x, const quant::InputQuantSpec& input_spec,
                          const std::vector<quant::QuantizedLinear>& layers, int T,
                          OutputMode mode);

inline std::size_t argmax_class(const IntVec& scores) {
    require(!scores.empty(), "empty score vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

}  // namespace hypersnn::snn
