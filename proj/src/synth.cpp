#include "bnncim/synth.hpp"

#include <random>

#include "bnncim/errors.hpp"

namespace bnncim::synth {

namespace {

// Modulo draws keep the stream identical across standard libraries.
std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::vector<std::int32_t> full_weights(std::mt19937_64& rng, std::size_t count) {
    std::vector<std::int32_t> w(count);
    for (auto& x : w) x = static_cast<std::int32_t>(draw(rng, -3, 3));
    return w;
}

std::vector<std::int64_t> thresholds(std::mt19937_64& rng, std::size_t count, std::int64_t spread) {
    std::vector<std::int64_t> t(count);
    for (auto& x : t) x = draw(rng, -spread, spread);
    return t;
}

}  // namespace

Workload generate(const WorkloadSpec& spec) {
    if (spec.widths.size() < 2)
        throw ConfigError("synthetic workloads need at least two hidden widths (one binary hidden layer)");
    if (spec.classes == 0 || spec.input_len == 0 || spec.side == 0 || spec.input_channels == 0)
        throw ConfigError("synthetic workload dimensions must be positive");
    for (auto w : spec.widths)
        if (w == 0) throw ConfigError("synthetic workload widths must be positive");

    std::mt19937_64 rng(spec.seed);
    Workload out;
    out.network.name = spec.name;
    BnnNetwork& net = out.network.network;
    net.class_count = spec.classes;

    if (spec.kind == NetKind::mlp) {
        net.input_shape = {spec.input_len};
        net.layers.push_back(BnnLayer::full_dense(spec.input_len, spec.widths[0],
                                                  full_weights(rng, spec.input_len * spec.widths[0]),
                                                  thresholds(rng, spec.widths[0], 2)));
        for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i)
            net.layers.push_back(BnnLayer::binary_dense(BitMatrix::random(spec.widths[i], spec.widths[i + 1], rng),
                                                        thresholds(rng, spec.widths[i + 1], 2)));
        const std::size_t last = spec.widths.back();
        net.layers.push_back(BnnLayer::full_dense(last, spec.classes, full_weights(rng, last * spec.classes)));
    } else {
        net.input_shape = {spec.input_channels, spec.side, spec.side};
        ConvGeometry g{spec.input_channels, spec.side, spec.side, spec.widths[0], 3, 3, 1, 1};
        net.layers.push_back(BnnLayer::full_conv(g, full_weights(rng, g.patch_len() * g.out_ch),
                                                 thresholds(rng, g.out_ch, 2)));
        for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
            ConvGeometry b{spec.widths[i], spec.side, spec.side, spec.widths[i + 1], 3, 3, 1, 1};
            net.layers.push_back(BnnLayer::binary_conv(b, BitMatrix::random(b.patch_len(), b.out_ch, rng),
                                                       thresholds(rng, b.out_ch, 2)));
        }
        const std::size_t flat = spec.widths.back() * spec.side * spec.side;
        net.layers.push_back(BnnLayer::full_dense(flat, spec.classes, full_weights(rng, flat * spec.classes)));
    }
    net.validate();

    out.inputs.format = io::InputFormat::int32;
    out.inputs.vector_len = net.input_size();
    for (std::size_t v = 0; v < spec.input_count; ++v) {
        IntVector x(out.inputs.vector_len);
        for (auto& e : x) e = draw(rng, -8, 8);
        out.inputs.vectors.emplace_back(std::move(x));
    }
    return out;
}

}  // namespace bnncim::synth
