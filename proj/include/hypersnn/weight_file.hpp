#pragma once

#include <optional>

#include "hypersnn/network.hpp"

namespace hypersnn::harness {

inline constexpr int kWeightFormatVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

/// On-disk policy container: JSON headers with base64 binary payloads so the
/// numeric data round-trips bit-exactly. Holds either the float teacher or a
/// converted fixed-point network.
struct WeightFile {
    int version = kWeightFormatVersion;
    network::PolicySpec spec;
    envs::EnvKind env = envs::EnvKind::cartpole;
    std::optional<network::MlpWeights> float_weights;
    std::optional<network::SnnNetwork> snn;
    std::uint64_t train_seed = 0;
    std::string config_hash;

    bool converted() const { return snn.has_value(); }
};

void save_weights(const std::string& path, const WeightFile& wf);
WeightFile load_weights(const std::string& path);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);
std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace hypersnn::harness
