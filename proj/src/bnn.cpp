#include "bnncim/bnn.hpp"

#include "bnncim/errors.hpp"
#include "bnncim/kernels.hpp"

namespace bnncim {

namespace {

std::string sz(std::size_t v) { return std::to_string(v); }

void require_same_length(const BitVector& a, const BitVector& b, const char* what) {
    if (a.size() != b.size())
        throw DimensionError(std::string(what) + ": length mismatch " + sz(a.size()) + " vs " + sz(b.size()));
}

std::vector<std::int64_t> default_thresholds(std::vector<std::int64_t> t, std::size_t n) {
    if (t.empty()) t.assign(n, 0);
    return t;
}

IntVector to_ints(const LayerValue& v) {
    if (const auto* ints = std::get_if<IntVector>(&v)) return *ints;
    const auto& bits = std::get<BitVector>(v);
    IntVector out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 1 : -1;
    return out;
}

IntVector full_forward(const BnnLayer& layer, const IntVector& x) {
    const std::size_t m = layer.vector_len();
    const std::size_t n = layer.neuron_count();
    if (layer.kind == LayerKind::dense) {
        IntVector y(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < m; ++i) acc += x[i] * layer.full_weight(i, j);
            y[j] = acc;
        }
        return y;
    }
    const auto& g = layer.conv;
    const std::size_t oh = g.out_h(), ow = g.out_w();
    IntVector y(g.output_size(), 0);
    for (std::size_t o = 0; o < g.out_ch; ++o)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::int64_t acc = 0;
                for (std::size_t c = 0; c < g.in_ch; ++c)
                    for (std::size_t ky = 0; ky < g.kh; ++ky)
                        for (std::size_t kx = 0; kx < g.kw; ++kx) {
                            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                                            static_cast<std::ptrdiff_t>(g.pad);
                            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                                            static_cast<std::ptrdiff_t>(g.pad);
                            if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h) ||
                                ix >= static_cast<std::ptrdiff_t>(g.in_w))
                                continue;
                            const std::size_t in_idx =
                                (c * g.in_h + static_cast<std::size_t>(iy)) * g.in_w + static_cast<std::size_t>(ix);
                            acc += x[in_idx] * layer.full_weight((c * g.kh + ky) * g.kw + kx, o);
                        }
                y[(o * oh + oy) * ow + ox] = acc;
            }
    return y;
}

}  // namespace

BitVector xnor(const BitVector& a, const BitVector& b) {
    require_same_length(a, b, "xnor");
    BitVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] == b[i]);
    return out;
}

DotResult xnor_popcount_dot(const BitVector& in_bits, const BitVector& w_bits) {
    require_same_length(in_bits, w_bits, "xnor_popcount_dot");
    if (in_bits.empty()) throw DimensionError("xnor_popcount_dot: empty vectors");
    // Tail bits are zero in both operands, so xor never counts them.
    const std::uint64_t differing = kernels::xor_popcount(in_bits.words(), w_bits.words());
    return DotResult::from_popcount(in_bits.size() - differing, in_bits.size());
}

BitVector binarize(std::span<const double> x, double threshold) {
    BitVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.set(i, x[i] >= threshold);
    return out;
}

BitVector binarize(std::span<const std::int64_t> x, std::int64_t threshold) {
    BitVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.set(i, x[i] >= threshold);
    return out;
}

BitVector binarize(std::span<const std::int64_t> x, std::span<const std::int64_t> thresholds) {
    if (x.size() != thresholds.size())
        throw DimensionError("binarize: " + sz(x.size()) + " values vs " + sz(thresholds.size()) + " thresholds");
    BitVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.set(i, x[i] >= thresholds[i]);
    return out;
}

std::string to_string(LayerKind kind) { return kind == LayerKind::dense ? "dense" : "conv2d"; }
std::string to_string(Precision precision) { return precision == Precision::binary ? "binary" : "full"; }

void ConvGeometry::validate() const {
    if (in_ch == 0 || in_h == 0 || in_w == 0 || out_ch == 0 || kh == 0 || kw == 0 || stride == 0)
        throw DimensionError("conv geometry has a zero dimension");
    if (in_h + 2 * pad < kh || in_w + 2 * pad < kw)
        throw DimensionError("conv kernel " + sz(kh) + "x" + sz(kw) + " larger than padded input " +
                             sz(in_h + 2 * pad) + "x" + sz(in_w + 2 * pad));
}

BnnLayer BnnLayer::binary_dense(BitMatrix w, std::vector<std::int64_t> thresholds) {
    BnnLayer l;
    l.kind = LayerKind::dense;
    l.precision = Precision::binary;
    l.dense_inputs = w.rows();
    l.thresholds = default_thresholds(std::move(thresholds), w.cols());
    l.weights = std::move(w);
    l.validate();
    return l;
}

BnnLayer BnnLayer::binary_conv(const ConvGeometry& g, BitMatrix w, std::vector<std::int64_t> thresholds) {
    BnnLayer l;
    l.kind = LayerKind::conv2d;
    l.precision = Precision::binary;
    l.conv = g;
    l.thresholds = default_thresholds(std::move(thresholds), g.out_ch);
    l.weights = std::move(w);
    l.validate();
    return l;
}

BnnLayer BnnLayer::full_dense(std::size_t inputs, std::size_t outputs, std::vector<std::int32_t> w,
                              std::vector<std::int64_t> thresholds) {
    BnnLayer l;
    l.kind = LayerKind::dense;
    l.precision = Precision::full;
    l.dense_inputs = inputs;
    l.weights = BitMatrix(0, outputs);
    l.full_weights = std::move(w);
    l.thresholds = default_thresholds(std::move(thresholds), outputs);
    l.validate();
    return l;
}

BnnLayer BnnLayer::full_conv(const ConvGeometry& g, std::vector<std::int32_t> w,
                             std::vector<std::int64_t> thresholds) {
    BnnLayer l;
    l.kind = LayerKind::conv2d;
    l.precision = Precision::full;
    l.conv = g;
    l.weights = BitMatrix(0, g.out_ch);
    l.full_weights = std::move(w);
    l.thresholds = default_thresholds(std::move(thresholds), g.out_ch);
    l.validate();
    return l;
}

std::size_t BnnLayer::vector_len() const noexcept {
    return kind == LayerKind::dense ? dense_inputs : conv.patch_len();
}

std::size_t BnnLayer::neuron_count() const noexcept {
    return kind == LayerKind::dense ? weights.cols() : conv.out_ch;
}

std::size_t BnnLayer::input_size() const noexcept {
    return kind == LayerKind::dense ? dense_inputs : conv.input_size();
}

std::size_t BnnLayer::output_size() const noexcept {
    return kind == LayerKind::dense ? weights.cols() : conv.output_size();
}

std::size_t BnnLayer::vectors_per_input() const noexcept {
    return kind == LayerKind::dense ? 1 : conv.out_h() * conv.out_w();
}

void BnnLayer::validate() const {
    if (kind == LayerKind::conv2d) {
        conv.validate();
        if (weights.cols() != conv.out_ch)
            throw DimensionError("conv layer has " + sz(weights.cols()) + " weight vectors, expected out_ch " +
                                 sz(conv.out_ch));
    }
    const std::size_t m = vector_len();
    const std::size_t n = neuron_count();
    if (m == 0 || n == 0) throw DimensionError("layer has zero-length weight vectors or no neurons");
    if (precision == Precision::binary) {
        if (weights.rows() != m)
            throw DimensionError("binary weight vectors have length " + sz(weights.rows()) + ", expected " + sz(m));
        if (!full_weights.empty()) throw DimensionError("binary layer carries full-precision weights");
    } else {
        if (full_weights.size() != m * n)
            throw DimensionError("full layer has " + sz(full_weights.size()) + " weights, expected " + sz(m * n));
    }
    if (thresholds.size() != n)
        throw DimensionError("layer has " + sz(thresholds.size()) + " thresholds, expected " + sz(n));
}

std::size_t BnnNetwork::input_size() const noexcept {
    std::size_t n = input_shape.empty() ? 0 : 1;
    for (auto d : input_shape) n *= d;
    return n;
}

void BnnNetwork::validate() const {
    if (layers.empty()) throw DimensionError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        try {
            l.validate();
        } catch (const DimensionError& e) {
            throw DimensionError("layer " + sz(i) + ": " + e.what());
        }
        const bool boundary = i == 0 || i + 1 == layers.size();
        if (boundary && l.precision != Precision::full)
            throw DimensionError("layer " + sz(i) + ": boundary layers must be full precision");
        if (!boundary && l.precision != Precision::binary)
            throw DimensionError("layer " + sz(i) + ": hidden layers must be binary");
        const std::size_t expected_in = i == 0 ? input_size() : layers[i - 1].output_size();
        if (l.input_size() != expected_in)
            throw DimensionError("layer " + sz(i) + ": expects " + sz(l.input_size()) + " inputs, receives " +
                                 sz(expected_in));
    }
    if (layers.back().output_size() != class_count)
        throw DimensionError("last layer produces " + sz(layers.back().output_size()) + " scores, class_count is " +
                             sz(class_count));
}

Im2colResult im2col_lower(const ConvGeometry& g, const BitVector& input) {
    g.validate();
    if (input.size() != g.input_size())
        throw DimensionError("im2col: input has " + sz(input.size()) + " bits, geometry expects " + sz(g.input_size()));
    const std::size_t oh = g.out_h(), ow = g.out_w();
    Im2colResult r{BitMatrix(g.patch_len(), oh * ow), oh, ow};
    for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
            BitVector& patch = r.patches.column(oy * ow + ox);
            std::size_t k = 0;
            for (std::size_t c = 0; c < g.in_ch; ++c)
                for (std::size_t ky = 0; ky < g.kh; ++ky)
                    for (std::size_t kx = 0; kx < g.kw; ++kx, ++k) {
                        const std::size_t py = oy * g.stride + ky;
                        const std::size_t px = ox * g.stride + kx;
                        if (py < g.pad || px < g.pad || py - g.pad >= g.in_h || px - g.pad >= g.in_w) continue;
                        patch.set(k, input[(c * g.in_h + py - g.pad) * g.in_w + px - g.pad]);
                    }
        }
    return r;
}

std::vector<BitVector> layer_input_vectors(const BnnLayer& layer, const BitVector& input) {
    if (input.size() != layer.input_size())
        throw DimensionError("layer input has " + sz(input.size()) + " bits, expected " + sz(layer.input_size()));
    if (layer.kind == LayerKind::dense) return {input};
    auto lowered = im2col_lower(layer.conv, input);
    std::vector<BitVector> out;
    out.reserve(lowered.patches.cols());
    for (std::size_t p = 0; p < lowered.patches.cols(); ++p) out.push_back(lowered.patches.column(p));
    return out;
}

BitVector assemble_binary_output(const BnnLayer& layer, const std::vector<std::vector<DotResult>>& dots) {
    const std::size_t vectors = layer.vectors_per_input();
    const std::size_t n = layer.neuron_count();
    if (dots.size() != vectors)
        throw DimensionError("expected dots for " + sz(vectors) + " vectors, got " + sz(dots.size()));
    BitVector out(layer.output_size());
    for (std::size_t p = 0; p < vectors; ++p) {
        if (dots[p].size() != n)
            throw DimensionError("vector " + sz(p) + " has " + sz(dots[p].size()) + " dots, expected " + sz(n));
        for (std::size_t j = 0; j < n; ++j) out.set(j * vectors + p, dots[p][j].value >= layer.thresholds[j]);
    }
    return out;
}

std::vector<std::vector<DotResult>> reference_binary_dots(const BnnLayer& layer, const BitVector& input) {
    if (layer.precision != Precision::binary) throw DimensionError("reference_binary_dots on a full layer");
    const auto vectors = layer_input_vectors(layer, input);
    std::vector<std::vector<DotResult>> dots(vectors.size());
    for (std::size_t p = 0; p < vectors.size(); ++p) {
        dots[p].reserve(layer.neuron_count());
        for (std::size_t j = 0; j < layer.neuron_count(); ++j)
            dots[p].push_back(xnor_popcount_dot(vectors[p], layer.weights.column(j)));
    }
    return dots;
}

LayerValue reference_layer_forward(const BnnLayer& layer, const LayerValue& input) {
    if (layer.precision == Precision::binary) {
        const auto* bits = std::get_if<BitVector>(&input);
        if (bits == nullptr) throw DimensionError("binary layer given an integer input");
        return assemble_binary_output(layer, reference_binary_dots(layer, *bits));
    }
    IntVector x = to_ints(input);
    if (x.size() != layer.input_size())
        throw DimensionError("full layer input has " + sz(x.size()) + " values, expected " + sz(layer.input_size()));
    return full_forward(layer, x);
}

std::size_t argmax(std::span<const std::int64_t> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

LayerValue activate_full_output(const BnnLayer& layer, const IntVector& pre, bool is_last) {
    if (is_last) return pre;
    const std::size_t per_channel = layer.output_size() / layer.neuron_count();
    BitVector out(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) out.set(i, pre[i] >= layer.thresholds[i / per_channel]);
    return out;
}

std::vector<LayerRecord> reference_trace(const BnnNetwork& net, const LayerValue& input) {
    const std::size_t in_len = std::visit([](const auto& v) { return v.size(); }, input);
    if (in_len != net.input_size())
        throw DimensionError("network input has " + sz(in_len) + " values, expected " + sz(net.input_size()));
    std::vector<LayerRecord> records;
    records.reserve(net.layers.size());
    LayerValue current = input;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& layer = net.layers[i];
        LayerRecord rec;
        if (layer.precision == Precision::binary) {
            const auto* bits = std::get_if<BitVector>(&current);
            if (bits == nullptr) throw DimensionError("layer " + sz(i) + ": binary layer given an integer input");
            rec.dots = reference_binary_dots(layer, *bits);
            rec.output = assemble_binary_output(layer, rec.dots);
        } else {
            const auto pre = std::get<IntVector>(reference_layer_forward(layer, current));
            rec.output = activate_full_output(layer, pre, i + 1 == net.layers.size());
        }
        current = rec.output;
        records.push_back(std::move(rec));
    }
    return records;
}

InferenceResult reference_infer(const BnnNetwork& net, const LayerValue& input) {
    auto records = reference_trace(net, input);
    InferenceResult r;
    r.scores = std::visit(
        [](const auto& v) -> IntVector {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, IntVector>) {
                return v;
            } else {
                IntVector out(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? 1 : 0;
                return out;
            }
        },
        records.back().output);
    r.predicted = argmax(r.scores);
    return r;
}

}  // namespace bnncim
