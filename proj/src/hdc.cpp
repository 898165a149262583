#include "hypersnn/hdc.hpp"

#include <bit>

namespace hypersnn::hdc {

BitVec BitVec::from_bits(const std::vector<std::uint8_t>& bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
    return v;
}

void BitVec::set(std::size_t i, bool v) {
    if (v)
        words[i / 64] |= (std::uint64_t{1} << (i % 64));
    else
        words[i / 64] &= ~(std::uint64_t{1} << (i % 64));
}

std::int64_t hamming(const BitVec& a, const BitVec& b, const BitVec& mask) {
    require(a.d == b.d && a.d == mask.d, "hamming width mismatch");
    std::int64_t dist = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w)
        dist += std::popcount((a.words[w] ^ b.words[w]) & mask.words[w]);
    return dist;
}

std::size_t HdcCodebook::retained() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < keep_mask.d; ++i) n += keep_mask.get(i) ? 1 : 0;
    return n;
}

HdcCodebook hygen(const ClassSamples& samples, std::size_t num_classes,
                  std::optional<double> theta_maj) {
    require(num_classes >= 1, "need at least one class");
    require(!samples.empty(), "no samples");
    const std::size_t d = samples.front().second.size();
    require(d >= 1, "zero-width samples");

    std::vector<IntVec> sums(num_classes, IntVec(d, 0));
    std::vector<std::int64_t> counts(num_classes, 0);
    for (const auto& [cls, bits] : samples) {
        require(cls < num_classes, "class index out of range");
        require(bits.size() == d, "sample width mismatch");
        ++counts[cls];
        for (std::size_t i = 0; i < d; ++i) {
            require(bits[i] <= 1, "samples must be binary");
            sums[cls][i] += bits[i];
        }
    }
    for (std::size_t c = 0; c < num_classes; ++c)
        require(counts[c] > 0, "empty class " + std::to_string(c));

    HdcCodebook cb;
    cb.keep_mask = BitVec(d);
    for (std::size_t i = 0; i < d; ++i) cb.keep_mask.set(i, true);
    cb.n_per_class = counts;
    cb.class_actions.resize(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) cb.class_actions[c] = c;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double thr = theta_maj.value_or(static_cast<double>(counts[c]) / 2.0);
        cb.threshold.push_back(thr);
        BitVec label(d);
        for (std::size_t i = 0; i < d; ++i)
            label.set(i, static_cast<double>(sums[c][i]) > thr);
        cb.labels.push_back(std::move(label));
    }
    return cb;
}

HdcCodebook truncate(const HdcCodebook& codebook) {
    require(codebook.classes() >= 2, "truncation needs at least two classes");
    HdcCodebook out = codebook;
    const std::size_t d = codebook.dim();
    std::size_t kept = 0;
    for (std::size_t i = 0; i < d; ++i) {
        bool all_same = true;
        for (std::size_t c = 1; c < codebook.classes(); ++c)
            if (codebook.labels[c].get(i) != codebook.labels[0].get(i)) {
                all_same = false;
                break;
            }
        out.keep_mask.set(i, !all_same);
        kept += all_same ? 0 : 1;
    }
    if (kept == 0) {
        for (std::size_t i = 0; i < d; ++i) out.keep_mask.set(i, true);
        out.degenerate = true;
    }
    return out;
}

BitVec collapse_train(const snn::SpikeTrain& train) {
    BitVec v(train.width);
    const IntVec counts = train.column_counts();
    for (std::size_t j = 0; j < train.width; ++j)
        v.set(j, 2 * counts[j] > train.T);  // strict majority over time
    return v;
}

ClassifyResult classify(const snn::SpikeTrain& spike_out, const HdcCodebook& codebook,
                        bool collapse_time) {
    require(spike_out.width == codebook.dim(), "query width mismatch");
    require(spike_out.T == 1 || collapse_time,
            "T > 1 classification requires explicit time collapse");

    BitVec query(spike_out.width);
    if (spike_out.T == 1) {
        for (std::size_t j = 0; j < spike_out.width; ++j) query.set(j, spike_out.at(0, j) != 0);
    } else {
        query = collapse_train(spike_out);
    }

    ClassifyResult res;
    std::int64_t best = -1;
    for (std::size_t c = 0; c < codebook.classes(); ++c) {
        const std::int64_t dist = hamming(query, codebook.labels[c], codebook.keep_mask);
        if (best < 0 || dist < best) {
            best = dist;
            res.cls = c;
        }
    }
    res.xor_ops = static_cast<std::int64_t>(codebook.classes()) *
                  static_cast<std::int64_t>(codebook.retained());
    return res;
}

}  // namespace hypersnn::hdc
