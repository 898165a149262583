#include "hypersnn/snn.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hypersnn::snn {

namespace {

constexpr __int128 kDriveLimit = (static_cast<__int128>(1) << 126);

void check_drive(__int128 v) {
    if (v >= kDriveLimit || v <= -kDriveLimit) throw std::overflow_error("SNN drive overflow");
}

// Per-neuron drive w_int * input + b_int, where input is either the integer
// input vector (embedding layer) or one binary spike row.
std::vector<__int128> integer_drive(const quant::QuantizedLinear& layer, const IntVec& x_int) {
    // A populated b_drive is the bias already rescaled to the drive domain;
    // otherwise the raw b_int is used as written in the conversion recipe.
    const IntVec& bias = layer.b_drive.empty() ? layer.b_int : layer.b_drive;
    std::vector<__int128> drive(layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        __int128 acc = bias[i];
        for (std::size_t j = 0; j < layer.in_dim(); ++j) {
            acc += static_cast<__int128>(layer.w_int(i, j)) * x_int[j];
            check_drive(acc);
        }
        drive[i] = acc;
    }
    return drive;
}

}  // namespace

std::int64_t SpikeTrain::spike_count() const {
    return std::accumulate(bits.begin(), bits.end(), std::int64_t{0});
}

IntVec SpikeTrain::column_counts() const {
    IntVec counts(width, 0);
    for (int t = 0; t < T; ++t)
        for (std::size_t j = 0; j < width; ++j) counts[j] += at(t, j);
    return counts;
}

SpikeTrain spike_gen(const IntVec& x_int, const quant::QuantizedLinear& layer, int T) {
    require(T >= 1 && T <= 64, "T must be in 1..64");
    require(x_int.size() == layer.in_dim(), "input width mismatch");
    require(layer.theta > 0.0, "threshold must be > 0");

    const auto drive = integer_drive(layer, x_int);
    SpikeTrain s(T, layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        NeuronState st;
        const long double v = static_cast<long double>(drive[i]);
        for (int t = 0; t < T; ++t) {
            st.drive += v;
            if (st.drive >= layer.theta) {
                s.at(t, i) = 1;
                st.drive -= layer.theta;
            }
        }
    }
    return s;
}

SpikeTrain inter_layer_act(const SpikeTrain& s_prev, const quant::QuantizedLinear& layer, int T) {
    require(T >= 1 && T <= 64, "T must be in 1..64");
    require(s_prev.width == layer.in_dim(), "spike train width mismatch");
    require(s_prev.T == T, "spike train length mismatch");

    // STEP 1: average drive over the T timesteps of the incoming train.
    std::vector<__int128> total(layer.out_dim(), 0);
    for (int t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < layer.out_dim(); ++i) {
            __int128 acc = total[i] + layer.b_int[i];
            for (std::size_t j = 0; j < layer.in_dim(); ++j)
                if (s_prev.at(t, j)) acc += layer.w_int(i, j);
            check_drive(acc);
            total[i] = acc;
        }
    }

    // STEP 2: IF recurrence with the constant averaged drive.
    SpikeTrain s(T, layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        NeuronState st;
        st.drive = static_cast<long double>(total[i]) / T;
        for (int t = 0; t < T; ++t) {
            st.potential += st.drive;
            if (st.potential >= layer.theta) {
                s.at(t, i) = 1;
                st.potential -= layer.theta;
            }
        }
    }
    return s;
}

ForwardResult forward_snn(const Vec& x, const quant::InputQuantSpec& input_spec,
                          const std::vector<quant::QuantizedLinear>& layers, int T,
                          OutputMode mode) {
    require(layers.size() >= 2, "converted network needs at least two layers");
    require(x.size() == layers.front().in_dim(), "observation width mismatch");

    ForwardResult out;
    out.mode = mode;

    const auto qi = quant::quantize_input(x, input_spec);
    SpikeTrain train = spike_gen(qi.x_int, layers.front(), T);

    auto record = [&](const SpikeTrain& s) {
        const std::int64_t n = s.spike_count();
        out.telemetry.layer_spikes.push_back(n);
        out.telemetry.layer_rates.push_back(
            static_cast<double>(n) / (static_cast<double>(s.T) * static_cast<double>(s.width)));
        out.telemetry.total_spikes += n;
    };
    record(train);

    // All layers but the last exchange spike trains; the last is either the
    // dense readout or (hdc mode) replaced by the classifier downstream.
    for (std::size_t l = 1; l + 1 < layers.size(); ++l) {
        train = inter_layer_act(train, layers[l], T);
        record(train);
    }

    out.output_spikes = train;
    if (mode == OutputMode::hdc) return out;

    const auto& head = layers.back();
    require(train.width == head.in_dim(), "head width mismatch");
    const IntVec counts = train.column_counts();
    out.dense_scores.resize(head.out_dim());
    for (std::size_t i = 0; i < head.out_dim(); ++i) {
        __int128 acc = static_cast<__int128>(head.b_int[i]) * T;
        for (std::size_t j = 0; j < head.in_dim(); ++j)
            acc += static_cast<__int128>(head.w_int(i, j)) * counts[j];
        check_drive(acc);
        if (acc > std::numeric_limits<std::int64_t>::max() ||
            acc < std::numeric_limits<std::int64_t>::min())
            throw std::overflow_error("dense readout overflow");
        out.dense_scores[i] = static_cast<std::int64_t>(acc);
    }
    return out;
}

}  // namespace hypersnn::snn
