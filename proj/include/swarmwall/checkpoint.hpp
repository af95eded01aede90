#pragma once

// Checkpoint files: one JSON document holding the hyperparameters, every
// tensor's shape, and base64-encoded little-endian float32 data, plus a
// format-version field. Round-trips are bit-exact. An optional
// trainer_state section carries everything needed to resume training.

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmwall/base64.hpp"
#include "swarmwall/qnet.hpp"

namespace swarmwall {

inline constexpr const char* kCheckpointVersion = "1";

inline std::string encode_f32(const std::vector<float>& v) {
    std::vector<std::uint8_t> bytes(v.size() * 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(v[i]);
        bytes[4 * i + 0] = static_cast<std::uint8_t>(u & 0xff);
        bytes[4 * i + 1] = static_cast<std::uint8_t>((u >> 8) & 0xff);
        bytes[4 * i + 2] = static_cast<std::uint8_t>((u >> 16) & 0xff);
        bytes[4 * i + 3] = static_cast<std::uint8_t>((u >> 24) & 0xff);
    }
    return base64_encode(bytes.data(), bytes.size());
}

inline std::vector<float> decode_f32(const std::string& b64, std::size_t expected_count) {
    const std::vector<std::uint8_t> bytes = base64_decode(b64);
    if (bytes.size() != expected_count * 4)
        throw CheckpointCorruptError("tensor data: got " + std::to_string(bytes.size()) +
                                     " bytes, expected " + std::to_string(expected_count * 4));
    std::vector<float> out(expected_count);
    for (std::size_t i = 0; i < expected_count; ++i) {
        const std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i + 0]) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

inline nlohmann::json tensors_to_json(QNetwork<float>& net) {
    nlohmann::json tensors = nlohmann::json::object();
    for (auto& [name, tensor] : net.named_tensors()) {
        tensors[name] = {{"shape", tensor->shape}, {"data", encode_f32(tensor->data)}};
    }
    return tensors;
}

inline void save_checkpoint(QNetwork<float>& net, const std::string& path,
                            const nlohmann::json& trainer_state = nlohmann::json()) {
    nlohmann::json doc;
    doc["format_version"] = kCheckpointVersion;
    const QNetHyper& h = net.hyper();
    doc["hyperparameters"] = {{"tokens", h.tokens},       {"features", h.features},
                              {"model_dim", h.model_dim}, {"heads", h.heads},
                              {"actions", h.actions},     {"dropout_rate", h.dropout_rate}};
    doc["tensors"] = tensors_to_json(net);
    if (!trainer_state.is_null()) doc["trainer_state"] = trainer_state;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out << doc.dump(1, '\t') << '\n';
    if (!out) throw Error("checkpoint write failed: " + path);
}

// Loads parameters into `net`, validating the version and every shape.
// Returns the trainer_state section (null when absent).
inline nlohmann::json load_checkpoint(QNetwork<float>& net, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointCorruptError("cannot open checkpoint: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointCorruptError(std::string("checkpoint parse failure: ") + e.what());
    }
    try {
        if (!doc.contains("format_version") || !doc["format_version"].is_string())
            throw CheckpointCorruptError("checkpoint missing format_version");
        if (doc["format_version"].get<std::string>() != kCheckpointVersion)
            throw CheckpointVersionError("unsupported checkpoint version " +
                                         doc["format_version"].get<std::string>());
        const auto& tensors = doc.at("tensors");
        for (auto& [name, tensor] : net.named_tensors()) {
            if (!tensors.contains(name))
                throw CheckpointCorruptError("checkpoint missing tensor " + name);
            const auto& entry = tensors.at(name);
            const auto shape = entry.at("shape").get<std::vector<long>>();
            if (shape != tensor->shape)
                throw CheckpointShapeError("tensor " + name + ": shape " + shape_string(shape) +
                                           " does not match expected " + shape_string(tensor->shape));
            tensor->data = decode_f32(entry.at("data").get<std::string>(), tensor->numel());
        }
        return doc.contains("trainer_state") ? doc["trainer_state"] : nlohmann::json();
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointCorruptError(std::string("checkpoint structure: ") + e.what());
    }
}

} // namespace swarmwall
