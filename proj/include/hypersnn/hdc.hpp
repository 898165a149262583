#pragma once

#include <optional>
#include <utility>

#include "hypersnn/core.hpp"
#include "hypersnn/snn.hpp"

namespace hypersnn::hdc {

/// Bit-packed binary vector; Hamming distances go through xor + popcount.
struct BitVec {
    std::size_t d = 0;
    std::vector<std::uint64_t> words;

    BitVec() = default;
    explicit BitVec(std::size_t dim) : d(dim), words((dim + 63) / 64, 0) {}
    static BitVec from_bits(const std::vector<std::uint8_t>& bits);

    bool get(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
    void set(std::size_t i, bool v);
    bool operator==(const BitVec&) const = default;
};

std::int64_t hamming(const BitVec& a, const BitVec& b, const BitVec& mask);

/// (action class, penultimate-layer binary vector) pairs.
using ClassSamples = std::vector<std::pair<std::size_t, std::vector<std::uint8_t>>>;

/// Per-class binary hypervectors plus the retained-position mask.
struct HdcCodebook {
    std::vector<BitVec> labels;       // one per class
    BitVec keep_mask;                 // retained positions (all-ones before truncate)
    std::vector<double> threshold;    // majority threshold per class
    std::vector<std::int64_t> n_per_class;
    // Maps label index to the action it stands for. Identity unless the
    // collection policy never chose some action, in which case that action
    // has no hypervector and the remaining ones are packed densely.
    std::vector<std::size_t> class_actions;
    bool degenerate = false;          // truncation found no distinguishing position

    std::size_t classes() const { return labels.size(); }
    std::size_t dim() const { return keep_mask.d; }
    std::size_t retained() const;
};

/// Majority-rule hypervector generation. The default majority threshold is
/// N_c / 2 per class, with strict `>`.
HdcCodebook hygen(const ClassSamples& samples, std::size_t num_classes,
                  std::optional<double> theta_maj = std::nullopt);

/// Drops every position on which all class labels agree. If that would drop
/// everything, the full mask is kept and the codebook flagged degenerate.
HdcCodebook truncate(const HdcCodebook& codebook);

struct ClassifyResult {
    std::size_t cls = 0;
    std::int64_t xor_ops = 0;  // classes * retained width
};

/// Nearest label by Hamming distance on retained positions; ties break to
/// the lowest class index. Trains with T > 1 must be collapsed explicitly
/// (sum over time, strict majority), which is opt-in.
ClassifyResult classify(const snn::SpikeTrain& spike_out, const HdcCodebook& codebook,
                        bool collapse_time = false);

BitVec collapse_train(const snn::SpikeTrain& train);

}  // namespace hypersnn::hdc
