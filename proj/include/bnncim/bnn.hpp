#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bnncim/bitvec.hpp"

namespace bnncim {

using IntVector = std::vector<std::int64_t>;

// Bipolar dot product recovered from an XNOR popcount:
// value = 2 * popcount_raw - len.
struct DotResult {
    std::int64_t value = 0;
    std::uint64_t popcount_raw = 0;
    std::size_t len = 0;

    static DotResult from_popcount(std::uint64_t popcount_raw, std::size_t len) noexcept {
        return {2 * static_cast<std::int64_t>(popcount_raw) - static_cast<std::int64_t>(len), popcount_raw, len};
    }

    friend bool operator==(const DotResult&, const DotResult&) = default;
};

BitVector xnor(const BitVector& a, const BitVector& b);
DotResult xnor_popcount_dot(const BitVector& in_bits, const BitVector& w_bits);

// bit i = 1 iff x[i] >= threshold, so sign(0) = +1.
BitVector binarize(std::span<const double> x, double threshold);
BitVector binarize(std::span<const std::int64_t> x, std::int64_t threshold);
// Per-element thresholds.
BitVector binarize(std::span<const std::int64_t> x, std::span<const std::int64_t> thresholds);

enum class LayerKind { dense, conv2d };
enum class Precision { binary, full };

std::string to_string(LayerKind kind);
std::string to_string(Precision precision);

struct ConvGeometry {
    std::size_t in_ch = 1;
    std::size_t in_h = 1;
    std::size_t in_w = 1;
    std::size_t out_ch = 1;
    std::size_t kh = 1;
    std::size_t kw = 1;
    std::size_t stride = 1;
    std::size_t pad = 0;

    std::size_t patch_len() const noexcept { return in_ch * kh * kw; }
    std::size_t out_h() const noexcept { return (in_h + 2 * pad - kh) / stride + 1; }
    std::size_t out_w() const noexcept { return (in_w + 2 * pad - kw) / stride + 1; }
    std::size_t input_size() const noexcept { return in_ch * in_h * in_w; }
    std::size_t output_size() const noexcept { return out_ch * out_h() * out_w(); }
    void validate() const;

    friend bool operator==(const ConvGeometry&, const ConvGeometry&) = default;
};

// A dense or lowered-convolution layer. Weight vector j (column j) has
// vector_len() elements; for conv2d the element order is (channel, ky, kx).
// Binary layers hold bits; full layers hold int32 weights, column-major.
struct BnnLayer {
    LayerKind kind = LayerKind::dense;
    Precision precision = Precision::binary;
    std::size_t dense_inputs = 0;
    ConvGeometry conv;
    BitMatrix weights;
    std::vector<std::int32_t> full_weights;
    // One per output channel / neuron. A full layer that feeds a binary layer
    // binarizes with these; the last layer ignores them.
    std::vector<std::int64_t> thresholds;

    static BnnLayer binary_dense(BitMatrix w, std::vector<std::int64_t> thresholds = {});
    static BnnLayer binary_conv(const ConvGeometry& g, BitMatrix w, std::vector<std::int64_t> thresholds = {});
    static BnnLayer full_dense(std::size_t inputs, std::size_t outputs, std::vector<std::int32_t> w,
                               std::vector<std::int64_t> thresholds = {});
    static BnnLayer full_conv(const ConvGeometry& g, std::vector<std::int32_t> w,
                              std::vector<std::int64_t> thresholds = {});

    std::size_t vector_len() const noexcept;    // m
    std::size_t neuron_count() const noexcept;  // n
    std::size_t input_size() const noexcept;
    std::size_t output_size() const noexcept;
    // Dot products per layer input: 1 for dense, out_h*out_w for conv.
    std::size_t vectors_per_input() const noexcept;

    std::int32_t full_weight(std::size_t row, std::size_t col) const {
        return full_weights.at(col * vector_len() + row);
    }

    void validate() const;
};

struct BnnNetwork {
    std::vector<BnnLayer> layers;
    std::vector<std::size_t> input_shape;
    std::size_t class_count = 0;

    std::size_t input_size() const noexcept;
    // Boundary layers full precision, hidden layers binary, shapes compose.
    void validate() const;
};

using LayerValue = std::variant<BitVector, IntVector>;

struct Im2colResult {
    BitMatrix patches;  // patch_len x (out_h*out_w), patch p = oy*out_w + ox
    std::size_t out_h = 0;
    std::size_t out_w = 0;
};

// Lowers a CHW bit feature map into patch columns. Padding positions read 0
// (bipolar -1).
Im2colResult im2col_lower(const ConvGeometry& g, const BitVector& input);

// Drive vectors a binary layer applies to its weights for one input.
std::vector<BitVector> layer_input_vectors(const BnnLayer& layer, const BitVector& input);

// Thresholds dot products (indexed [vector][neuron]) into the layer's output
// bits; conv outputs are laid out CHW.
BitVector assemble_binary_output(const BnnLayer& layer, const std::vector<std::vector<DotResult>>& dots);

// Pre-threshold dots of a binary layer, [vector][neuron].
std::vector<std::vector<DotResult>> reference_binary_dots(const BnnLayer& layer, const BitVector& input);

// Binary layer: BitVector output. Full layer: pre-activation integer output.
// Bit inputs to a full layer are decoded as bipolar values.
LayerValue reference_layer_forward(const BnnLayer& layer, const LayerValue& input);

struct InferenceResult {
    IntVector scores;
    std::size_t predicted = 0;
};

// Lowest index wins ties.
std::size_t argmax(std::span<const std::int64_t> scores);

struct LayerRecord {
    LayerValue output;
    std::vector<std::vector<DotResult>> dots;  // binary layers only
};

// Every layer's activations; full layers that feed binary layers are
// binarized with their thresholds.
std::vector<LayerRecord> reference_trace(const BnnNetwork& net, const LayerValue& input);
InferenceResult reference_infer(const BnnNetwork& net, const LayerValue& input);

// Converts a full layer's pre-activation to the next layer's input.
LayerValue activate_full_output(const BnnLayer& layer, const IntVector& pre, bool is_last);

}  // namespace bnncim
