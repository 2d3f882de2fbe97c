#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bnncim/bnn.hpp"

namespace bnncim::io {

// Weights file: 8-byte magic "BNNCIMWT", u32 version, u32 reserved, then
// blobs addressed by byte offset from the start of the file. Binary weight
// matrices are one column-major bit stream (bit k is element k % m of weight
// vector k / m), packed LSB-first. Full-precision weights and thresholds are
// little-endian int32, column-major.
inline constexpr char kWeightsMagic[8] = {'B', 'N', 'N', 'C', 'I', 'M', 'W', 'T'};
// Inputs file: 8-byte magic "BNNCIMIN", u32 version, u32 format flag
// (0 = packed bits, 1 = int32), u64 count, u64 vector_len, then the vectors.
// Packed vectors start on a byte boundary.
inline constexpr char kInputsMagic[8] = {'B', 'N', 'N', 'C', 'I', 'M', 'I', 'N'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kWeightsHeaderBytes = 16;
inline constexpr std::size_t kInputsHeaderBytes = 32;

struct NamedNetwork {
    std::string name;
    BnnNetwork network;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file(const std::string& path, const std::string& text);

// Errors name the offending layer. Networks need at least three layers:
// full input layer, binary hidden layers, full output layer.
NamedNetwork parse_network(const std::string& manifest_text, std::span<const std::uint8_t> weights);
NamedNetwork load_network(const std::string& manifest_path, const std::string& weights_path);

struct SerializedNetwork {
    std::string manifest;  // JSON text, trailing newline
    std::vector<std::uint8_t> weights;
};
SerializedNetwork serialize_network(const NamedNetwork& net);
void save_network(const NamedNetwork& net, const std::string& manifest_path, const std::string& weights_path);

enum class InputFormat : std::uint32_t { bits = 0, int32 = 1 };

struct InputSet {
    InputFormat format = InputFormat::int32;
    std::size_t vector_len = 0;
    std::vector<LayerValue> vectors;
};

InputSet parse_inputs(std::span<const std::uint8_t> bytes);
InputSet load_inputs(const std::string& path);
std::vector<std::uint8_t> serialize_inputs(const InputSet& inputs);
void save_inputs(const InputSet& inputs, const std::string& path);

// FNV-1a 64 over the concatenated byte ranges, as 16 hex digits.
std::string content_hash(std::initializer_list<std::span<const std::uint8_t>> parts);

}  // namespace bnncim::io
