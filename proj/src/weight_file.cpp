#include "hypersnn/weight_file.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace hypersnn::harness {

namespace {

using nlohmann::json;

constexpr char kB64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::vector<std::uint8_t> doubles_to_bytes(const std::vector<double>& v) {
    std::vector<std::uint8_t> out(v.size() * sizeof(double));
    std::memcpy(out.data(), v.data(), out.size());
    return out;
}

std::vector<double> bytes_to_doubles(const std::vector<std::uint8_t>& b) {
    require(b.size() % sizeof(double) == 0, "corrupt double payload");
    std::vector<double> out(b.size() / sizeof(double));
    std::memcpy(out.data(), b.data(), b.size());
    return out;
}

std::vector<std::uint8_t> ints_to_bytes(const std::vector<std::int64_t>& v) {
    std::vector<std::uint8_t> out(v.size() * sizeof(std::int64_t));
    std::memcpy(out.data(), v.data(), out.size());
    return out;
}

std::vector<std::int64_t> bytes_to_ints(const std::vector<std::uint8_t>& b) {
    require(b.size() % sizeof(std::int64_t) == 0, "corrupt integer payload");
    std::vector<std::int64_t> out(b.size() / sizeof(std::int64_t));
    std::memcpy(out.data(), b.data(), b.size());
    return out;
}

std::vector<std::uint8_t> words_to_bytes(const std::vector<std::uint64_t>& v) {
    std::vector<std::uint8_t> out(v.size() * sizeof(std::uint64_t));
    std::memcpy(out.data(), v.data(), out.size());
    return out;
}

std::vector<std::uint64_t> bytes_to_words(const std::vector<std::uint8_t>& b) {
    require(b.size() % sizeof(std::uint64_t) == 0, "corrupt bit-packed payload");
    std::vector<std::uint64_t> out(b.size() / sizeof(std::uint64_t));
    std::memcpy(out.data(), b.data(), b.size());
    return out;
}

json spec_to_json(const network::PolicySpec& s) {
    return json{{"sizes", s.sizes},
                {"T", s.T},
                {"n", s.n},
                {"q", s.q},
                {"output_mode", s.output_mode == snn::OutputMode::hdc ? "hdc" : "dense"},
                {"activation", s.activation == network::Activation::cq ? "cq" : "relu"},
                {"embedding_bias", s.embedding_bias}};
}

network::PolicySpec spec_from_json(const json& j) {
    network::PolicySpec s;
    s.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    s.T = j.at("T").get<int>();
    s.n = j.at("n").get<int>();
    s.q = j.at("q").get<int>();
    s.output_mode = j.at("output_mode").get<std::string>() == "hdc" ? snn::OutputMode::hdc
                                                                    : snn::OutputMode::dense;
    s.activation = j.at("activation").get<std::string>() == "cq" ? network::Activation::cq
                                                                 : network::Activation::relu;
    s.embedding_bias = j.at("embedding_bias").get<bool>();
    return s;
}

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t v = bytes[i] << 16;
        if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
        if (i + 2 < bytes.size()) v |= bytes[i + 2];
        out.push_back(kB64Chars[(v >> 18) & 63]);
        out.push_back(kB64Chars[(v >> 12) & 63]);
        out.push_back(i + 1 < bytes.size() ? kB64Chars[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < bytes.size() ? kB64Chars[v & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    require(text.size() % 4 == 0, "bad base64 length");
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        if (c == '=') return -1;
        throw std::invalid_argument("bad base64 character");
    };
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const int a = val(text[i]), b = val(text[i + 1]);
        const int c = val(text[i + 2]), d = val(text[i + 3]);
        require(a >= 0 && b >= 0, "bad base64 padding");
        std::uint32_t v = (static_cast<std::uint32_t>(a) << 18) |
                          (static_cast<std::uint32_t>(b) << 12) |
                          (c >= 0 ? static_cast<std::uint32_t>(c) << 6 : 0) |
                          (d >= 0 ? static_cast<std::uint32_t>(d) : 0);
        out.push_back((v >> 16) & 0xFF);
        if (c >= 0) out.push_back((v >> 8) & 0xFF);
        if (d >= 0) out.push_back(v & 0xFF);
    }
    return out;
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

void save_weights(const std::string& path, const WeightFile& wf) {
    json j;
    j["format"] = "hypersnn-weights";
    j["version"] = wf.version;
    j["env"] = envs::to_string(wf.env);
    j["spec"] = spec_to_json(wf.spec);
    j["train_seed"] = wf.train_seed;
    j["config_hash"] = wf.config_hash;

    std::vector<std::uint8_t> payload;
    auto push_payload = [&](const std::vector<std::uint8_t>& bytes) {
        payload.insert(payload.end(), bytes.begin(), bytes.end());
        return base64_encode(bytes);
    };

    if (wf.float_weights) {
        json layers = json::array();
        for (std::size_t l = 0; l < wf.float_weights->w.size(); ++l) {
            const auto& W = wf.float_weights->w[l];
            layers.push_back(json{{"rows", W.rows},
                                  {"cols", W.cols},
                                  {"w", push_payload(doubles_to_bytes(W.data))},
                                  {"b", push_payload(doubles_to_bytes(wf.float_weights->b[l]))}});
        }
        j["float_layers"] = layers;
    }

    if (wf.snn) {
        const auto& net = *wf.snn;
        json layers = json::array();
        for (const auto& layer : net.layers) {
            json lj{{"rows", layer.w_int.rows},
                    {"cols", layer.w_int.cols},
                    {"w_int", push_payload(ints_to_bytes(layer.w_int.data))},
                    {"b_int", push_payload(ints_to_bytes(layer.b_int))},
                    {"q", layer.spec.q},
                    {"f", layer.spec.f},
                    {"theta", layer.theta}};
            if (!layer.b_drive.empty())
                lj["b_drive"] = push_payload(ints_to_bytes(layer.b_drive));
            layers.push_back(std::move(lj));
        }
        json net_json;
        net_json["layers"] = layers;
        net_json["T"] = net.T;
        net_json["mode"] = net.mode == snn::OutputMode::hdc ? "hdc" : "dense";
        net_json["input_spec"] = json{{"n", net.input_spec.n}, {"m", net.input_spec.m}};
        if (net.codebook) {
            const auto& cb = *net.codebook;
            json labels = json::array();
            for (const auto& label : cb.labels)
                labels.push_back(push_payload(words_to_bytes(label.words)));
            net_json["codebook"] = json{{"d", cb.dim()},
                                        {"labels", labels},
                                        {"keep_mask", push_payload(words_to_bytes(cb.keep_mask.words))},
                                        {"threshold", cb.threshold},
                                        {"n_per_class", cb.n_per_class},
                                        {"class_actions", cb.class_actions},
                                        {"degenerate", cb.degenerate}};
        }
        j["snn"] = net_json;
    }

    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    j["checksum"] = checksum;

    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    require(out.good(), "write to " + path + " failed");
}

WeightFile load_weights(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path);
    json j = json::parse(in);

    require(j.at("format").get<std::string>() == "hypersnn-weights", "not a weight file");
    const int version = j.at("version").get<int>();
    if (version != kWeightFormatVersion)
        throw std::runtime_error("weight file version " + std::to_string(version) +
                                 " does not match supported version " +
                                 std::to_string(kWeightFormatVersion));

    WeightFile wf;
    wf.version = version;
    wf.env = envs::env_kind_from_string(j.at("env").get<std::string>());
    wf.spec = spec_from_json(j.at("spec"));
    wf.train_seed = j.at("train_seed").get<std::uint64_t>();
    wf.config_hash = j.at("config_hash").get<std::string>();

    std::vector<std::uint8_t> payload;
    auto pull_payload = [&](const std::string& b64) {
        auto bytes = base64_decode(b64);
        payload.insert(payload.end(), bytes.begin(), bytes.end());
        return bytes;
    };

    if (j.contains("float_layers")) {
        network::MlpWeights fw;
        for (const auto& layer : j.at("float_layers")) {
            Matrix W(layer.at("rows").get<std::size_t>(), layer.at("cols").get<std::size_t>());
            W.data = bytes_to_doubles(pull_payload(layer.at("w").get<std::string>()));
            require(W.data.size() == W.rows * W.cols, "weight payload shape mismatch");
            fw.w.push_back(std::move(W));
            fw.b.push_back(bytes_to_doubles(pull_payload(layer.at("b").get<std::string>())));
            require(fw.b.back().size() == fw.w.back().rows, "bias payload shape mismatch");
        }
        wf.float_weights = std::move(fw);
    }

    if (j.contains("snn")) {
        const auto& net_json = j.at("snn");
        network::SnnNetwork net;
        net.T = net_json.at("T").get<int>();
        net.mode = net_json.at("mode").get<std::string>() == "hdc" ? snn::OutputMode::hdc
                                                                   : snn::OutputMode::dense;
        net.input_spec.n = net_json.at("input_spec").at("n").get<int>();
        net.input_spec.m = net_json.at("input_spec").at("m").get<Vec>();
        net.source_spec = wf.spec;
        for (const auto& layer : net_json.at("layers")) {
            quant::QuantizedLinear ql;
            ql.w_int = IntMatrix(layer.at("rows").get<std::size_t>(),
                                 layer.at("cols").get<std::size_t>());
            ql.w_int.data = bytes_to_ints(pull_payload(layer.at("w_int").get<std::string>()));
            require(ql.w_int.data.size() == ql.w_int.rows * ql.w_int.cols,
                    "integer payload shape mismatch");
            ql.b_int = bytes_to_ints(pull_payload(layer.at("b_int").get<std::string>()));
            ql.spec.q = layer.at("q").get<int>();
            ql.spec.f = layer.at("f").get<double>();
            ql.theta = layer.at("theta").get<double>();
            if (layer.contains("b_drive"))
                ql.b_drive = bytes_to_ints(pull_payload(layer.at("b_drive").get<std::string>()));
            net.layers.push_back(std::move(ql));
        }
        if (net_json.contains("codebook")) {
            const auto& cbj = net_json.at("codebook");
            hdc::HdcCodebook cb;
            const std::size_t d = cbj.at("d").get<std::size_t>();
            for (const auto& label : cbj.at("labels")) {
                hdc::BitVec v(d);
                v.words = bytes_to_words(pull_payload(label.get<std::string>()));
                cb.labels.push_back(std::move(v));
            }
            cb.keep_mask = hdc::BitVec(d);
            cb.keep_mask.words = bytes_to_words(pull_payload(cbj.at("keep_mask").get<std::string>()));
            cb.threshold = cbj.at("threshold").get<std::vector<double>>();
            cb.n_per_class = cbj.at("n_per_class").get<std::vector<std::int64_t>>();
            cb.class_actions = cbj.at("class_actions").get<std::vector<std::size_t>>();
            cb.degenerate = cbj.at("degenerate").get<bool>();
            net.codebook = std::move(cb);
        }
        wf.snn = std::move(net);
    }

    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    if (j.at("checksum").get<std::string>() != checksum)
        throw std::runtime_error("weight file checksum mismatch: payload is corrupted");
    return wf;
}

}  // namespace hypersnn::harness
