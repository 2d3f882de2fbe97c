#include "bnncim/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "bnncim/errors.hpp"

namespace bnncim::io {

using nlohmann::json;

namespace {

std::string sz(std::size_t v) { return std::to_string(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[offset + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

std::int32_t get_i32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(get_le(bytes, offset, 4)));
}

void put_bits(std::vector<std::uint8_t>& out, const BitVector& v) {
    const std::size_t start = out.size();
    out.resize(start + (v.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) out[start + i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
}

BitVector get_bits(std::span<const std::uint8_t> bytes, std::size_t offset, std::size_t len) {
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i) v.set(i, (bytes[offset + i / 8] >> (i % 8)) & 1U);
    return v;
}

struct BlobRef {
    std::size_t offset = 0;
    std::size_t length = 0;
};

BlobRef parse_ref(const json& j, std::size_t layer, const char* key) {
    if (!j.contains(key)) throw FormatError("layer " + sz(layer) + ": missing " + key);
    const auto& r = j.at(key);
    return {r.at("offset").get<std::size_t>(), r.at("length").get<std::size_t>()};
}

std::span<const std::uint8_t> resolve(std::span<const std::uint8_t> weights, const BlobRef& ref, std::size_t expected,
                                      std::size_t layer, const char* what) {
    if (ref.length != expected)
        throw FormatError("layer " + sz(layer) + ": " + what + " length " + sz(ref.length) + " bytes, expected " +
                          sz(expected));
    if (ref.offset < kWeightsHeaderBytes || ref.offset + ref.length > weights.size())
        throw FormatError("layer " + sz(layer) + ": dangling " + what + " reference [" + sz(ref.offset) + ", " +
                          sz(ref.offset + ref.length) + ") in a " + sz(weights.size()) + "-byte weights file");
    return weights.subspan(ref.offset, ref.length);
}

ConvGeometry parse_conv(const json& j) {
    ConvGeometry g;
    g.in_ch = j.at("in_ch").get<std::size_t>();
    g.in_h = j.at("in_h").get<std::size_t>();
    g.in_w = j.at("in_w").get<std::size_t>();
    g.out_ch = j.at("out_ch").get<std::size_t>();
    g.kh = j.at("kh").get<std::size_t>();
    g.kw = j.at("kw").get<std::size_t>();
    g.stride = j.value("stride", std::size_t{1});
    g.pad = j.value("pad", std::size_t{0});
    return g;
}

json conv_json(const ConvGeometry& g) {
    return {{"in_ch", g.in_ch}, {"in_h", g.in_h}, {"in_w", g.in_w}, {"out_ch", g.out_ch},
            {"kh", g.kh},       {"kw", g.kw},     {"stride", g.stride}, {"pad", g.pad}};
}

BnnLayer parse_layer(const json& j, std::span<const std::uint8_t> weights, std::size_t index) {
    const std::string kind = j.at("kind").get<std::string>();
    const std::string precision = j.at("precision").get<std::string>();
    if (kind != "dense" && kind != "conv2d") throw FormatError("layer " + sz(index) + ": unknown kind '" + kind + "'");
    if (precision != "binary" && precision != "full")
        throw FormatError("layer " + sz(index) + ": unknown precision '" + precision + "'");

    ConvGeometry g;
    std::size_t m = 0;
    std::size_t n = 0;
    if (kind == "dense") {
        m = j.at("inputs").get<std::size_t>();
        n = j.at("outputs").get<std::size_t>();
    } else {
        g = parse_conv(j.at("conv"));
        m = g.patch_len();
        n = g.out_ch;
    }
    if (m == 0 || n == 0) throw FormatError("layer " + sz(index) + ": zero-sized weight matrix");

    const auto t_bytes = resolve(weights, parse_ref(j, index, "threshold_ref"), 4 * n, index, "threshold");
    std::vector<std::int64_t> thresholds(n);
    for (std::size_t i = 0; i < n; ++i) thresholds[i] = get_i32(t_bytes, 4 * i);

    if (precision == "binary") {
        const auto w_bytes = resolve(weights, parse_ref(j, index, "weight_ref"), (m * n + 7) / 8, index, "weight");
        BitMatrix w(m, n);
        for (std::size_t k = 0; k < m * n; ++k)
            if ((w_bytes[k / 8] >> (k % 8)) & 1U) w.set(k % m, k / m, true);
        return kind == "dense" ? BnnLayer::binary_dense(std::move(w), std::move(thresholds))
                               : BnnLayer::binary_conv(g, std::move(w), std::move(thresholds));
    }
    const auto w_bytes = resolve(weights, parse_ref(j, index, "weight_ref"), 4 * m * n, index, "weight");
    std::vector<std::int32_t> w(m * n);
    for (std::size_t k = 0; k < m * n; ++k) w[k] = get_i32(w_bytes, 4 * k);
    return kind == "dense" ? BnnLayer::full_dense(m, n, std::move(w), std::move(thresholds))
                           : BnnLayer::full_conv(g, std::move(w), std::move(thresholds));
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + path);
}

void write_file(const std::string& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

NamedNetwork parse_network(const std::string& manifest_text, std::span<const std::uint8_t> weights) {
    if (weights.size() < kWeightsHeaderBytes || std::memcmp(weights.data(), kWeightsMagic, 8) != 0)
        throw FormatError("weights file lacks the BNNCIMWT header");
    if (get_le(weights, 8, 4) != kFormatVersion)
        throw FormatError("unsupported weights file version " + std::to_string(get_le(weights, 8, 4)));
    json j;
    try {
        j = json::parse(manifest_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
    NamedNetwork out;
    std::size_t index = 0;
    try {
        if (j.at("format_version").get<std::uint32_t>() != kFormatVersion)
            throw FormatError("unsupported manifest format_version " + j.at("format_version").dump());
        out.name = j.value("name", std::string("network"));
        out.network.input_shape = j.at("input_shape").get<std::vector<std::size_t>>();
        out.network.class_count = j.at("class_count").get<std::size_t>();
        const auto& layers = j.at("layers");
        if (!layers.is_array()) throw FormatError("manifest 'layers' is not an array");
        for (; index < layers.size(); ++index) out.network.layers.push_back(parse_layer(layers[index], weights, index));
    } catch (const json::exception& e) {
        throw FormatError("malformed manifest at layer " + sz(index) + ": " + e.what());
    } catch (const DimensionError& e) {
        throw FormatError("layer " + sz(index) + ": " + e.what());
    }
    if (out.network.layers.size() < 3)
        throw FormatError("network has " + sz(out.network.layers.size()) +
                          " layers; needs a full input layer, at least one binary hidden layer and a full output layer");
    try {
        out.network.validate();
    } catch (const DimensionError& e) {
        throw FormatError(e.what());
    }
    return out;
}

NamedNetwork load_network(const std::string& manifest_path, const std::string& weights_path) {
    const auto manifest = read_file(manifest_path);
    const auto weights = read_file(weights_path);
    return parse_network(std::string(manifest.begin(), manifest.end()), weights);
}

SerializedNetwork serialize_network(const NamedNetwork& named) {
    SerializedNetwork out;
    out.weights.assign(kWeightsMagic, kWeightsMagic + 8);
    put_u32(out.weights, kFormatVersion);
    put_u32(out.weights, 0);
    json layers = json::array();
    for (const auto& l : named.network.layers) {
        const std::size_t m = l.vector_len();
        const std::size_t n = l.neuron_count();
        json jl = {{"kind", to_string(l.kind)}, {"precision", to_string(l.precision)}};
        if (l.kind == LayerKind::dense) {
            jl["inputs"] = m;
            jl["outputs"] = n;
        } else {
            jl["conv"] = conv_json(l.conv);
        }
        const std::size_t w_off = out.weights.size();
        if (l.precision == Precision::binary) {
            BitVector stream;
            for (std::size_t j = 0; j < n; ++j) stream.append(l.weights.column(j));
            put_bits(out.weights, stream);
        } else {
            for (auto w : l.full_weights) put_u32(out.weights, static_cast<std::uint32_t>(w));
        }
        jl["weight_ref"] = {{"offset", w_off}, {"length", out.weights.size() - w_off}};
        const std::size_t t_off = out.weights.size();
        for (auto t : l.thresholds) put_u32(out.weights, static_cast<std::uint32_t>(static_cast<std::int32_t>(t)));
        jl["threshold_ref"] = {{"offset", t_off}, {"length", out.weights.size() - t_off}};
        layers.push_back(std::move(jl));
    }
    json manifest = {{"format_version", kFormatVersion},
                     {"name", named.name},
                     {"input_shape", named.network.input_shape},
                     {"class_count", named.network.class_count},
                     {"layers", layers}};
    out.manifest = manifest.dump(2) + "\n";
    return out;
}

void save_network(const NamedNetwork& net, const std::string& manifest_path, const std::string& weights_path) {
    const auto s = serialize_network(net);
    write_file(manifest_path, s.manifest);
    write_file(weights_path, s.weights);
}

InputSet parse_inputs(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kInputsHeaderBytes || std::memcmp(bytes.data(), kInputsMagic, 8) != 0)
        throw FormatError("inputs file lacks the BNNCIMIN header");
    if (get_le(bytes, 8, 4) != kFormatVersion)
        throw FormatError("unsupported inputs file version " + std::to_string(get_le(bytes, 8, 4)));
    InputSet set;
    const auto flag = get_le(bytes, 12, 4);
    if (flag > 1) throw FormatError("unknown inputs format flag " + std::to_string(flag));
    set.format = static_cast<InputFormat>(flag);
    const std::uint64_t count = get_le(bytes, 16, 8);
    set.vector_len = static_cast<std::size_t>(get_le(bytes, 24, 8));
    const std::size_t stride = set.format == InputFormat::bits ? (set.vector_len + 7) / 8 : 4 * set.vector_len;
    if (stride != 0 && count > (bytes.size() - kInputsHeaderBytes) / stride)
        throw FormatError("inputs file truncated: header declares " + std::to_string(count) + " vectors of " +
                          sz(stride) + " bytes, payload has " + sz(bytes.size() - kInputsHeaderBytes));
    if (kInputsHeaderBytes + count * stride != bytes.size())
        throw FormatError("inputs file has " + sz(bytes.size() - kInputsHeaderBytes - count * stride) +
                          " trailing bytes");
    set.vectors.reserve(static_cast<std::size_t>(count));
    for (std::size_t v = 0; v < count; ++v) {
        const std::size_t off = kInputsHeaderBytes + v * stride;
        if (set.format == InputFormat::bits) {
            set.vectors.emplace_back(get_bits(bytes, off, set.vector_len));
        } else {
            IntVector x(set.vector_len);
            for (std::size_t i = 0; i < set.vector_len; ++i) x[i] = get_i32(bytes, off + 4 * i);
            set.vectors.emplace_back(std::move(x));
        }
    }
    return set;
}

InputSet load_inputs(const std::string& path) { return parse_inputs(read_file(path)); }

std::vector<std::uint8_t> serialize_inputs(const InputSet& set) {
    std::vector<std::uint8_t> out(kInputsMagic, kInputsMagic + 8);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(set.format));
    put_u64(out, set.vectors.size());
    put_u64(out, set.vector_len);
    for (std::size_t v = 0; v < set.vectors.size(); ++v) {
        const auto& val = set.vectors[v];
        const std::size_t len = std::visit([](const auto& x) { return x.size(); }, val);
        if (len != set.vector_len)
            throw DimensionError("input " + sz(v) + " has " + sz(len) + " values, set declares " + sz(set.vector_len));
        if (set.format == InputFormat::bits) {
            const auto* bits = std::get_if<BitVector>(&val);
            if (bits == nullptr) throw DimensionError("input " + sz(v) + " is not a bit vector");
            put_bits(out, *bits);
        } else {
            const auto* ints = std::get_if<IntVector>(&val);
            if (ints == nullptr) throw DimensionError("input " + sz(v) + " is not an integer vector");
            for (auto x : *ints) put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(x)));
        }
    }
    return out;
}

void save_inputs(const InputSet& inputs, const std::string& path) { write_file(path, serialize_inputs(inputs)); }

std::string content_hash(std::initializer_list<std::span<const std::uint8_t>> parts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& part : parts) {
        for (auto b : part) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace bnncim::io
