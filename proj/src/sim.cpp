#include "bnncim/sim.hpp"

#include <sstream>

#include "bnncim/errors.hpp"
#include "bnncim/opcm.hpp"

namespace bnncim {

namespace {

std::string sz(std::size_t v) { return std::to_string(v); }

std::string dot_string(const DotResult& d) {
    return "value " + std::to_string(d.value) + " (popcount " + std::to_string(d.popcount_raw) + ")";
}

std::vector<std::size_t> tiles_for_neuron(const MappedLayer& mapped, std::size_t neuron) {
    std::vector<std::size_t> ids;
    for (const auto& t : mapped.tiles)
        if (neuron >= t.vectors.begin && neuron < t.vectors.end()) ids.push_back(t.tile_id);
    return ids;
}

}  // namespace

void RunConfig::validate() const {
    dims.validate();
    if (mapping == MappingKind::custbinary && backend == Technology::opcm)
        throw ConfigError("unsupported configuration: CustBinaryMap has no oPCM/WDM execution path");
    if (wdm_k && *wdm_k == 0) throw ConfigError("WDM capacity must be at least 1");
    if (counter_bits == 0) throw ConfigError("counter width must be at least 1 bit");
    tech.validate();
}

std::string RunConfig::design() const {
    return label.empty() ? to_string(mapping) + "-" + to_string(backend) : label;
}

SimulationResult simulate(const RunConfig& cfg, const io::NamedNetwork& named, const std::vector<LayerValue>& inputs,
                          const SimulationOptions& opts) {
    cfg.validate();
    const BnnNetwork& net = named.network;
    net.validate();
    TechConstants tech = cfg.tech;
    if (cfg.backend == Technology::opcm && cfg.wdm_k) tech.wdm.capacity = *cfg.wdm_k;

    SimulationResult result;
    result.report.design = cfg.design();
    result.report.network = named.name;
    result.report.tech = tech;
    result.mapped.resize(net.layers.size());
    if (opts.keep_dots) result.dots.resize(net.layers.size());

    std::vector<LayerValue> current = inputs;
    for (std::size_t i = 0; i < current.size(); ++i) {
        const std::size_t len = std::visit([](const auto& v) { return v.size(); }, current[i]);
        if (len != net.input_size())
            throw DimensionError("input " + sz(i) + " has " + sz(len) + " values, network expects " +
                                 sz(net.input_size()));
    }

    XbarConfig xcfg{cfg.adc, cfg.counter_bits};
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const BnnLayer& layer = net.layers[l];
        const bool is_last = l + 1 == net.layers.size();
        if (layer.precision == Precision::full) {
            for (auto& v : current) {
                const auto pre = std::get<IntVector>(reference_layer_forward(layer, v));
                v = activate_full_output(layer, pre, is_last);
            }
            result.report.host.layers.push_back(l);
            result.report.host.macs += static_cast<std::uint64_t>(layer.vector_len() * layer.neuron_count() *
                                                                  layer.vectors_per_input() * current.size());
            continue;
        }

        MappedLayer mapped = map_layer(cfg.mapping, layer.weights, cfg.dims);
        if (opts.fault && opts.fault->layer == l) {
            const auto& f = *opts.fault;
            if (f.tile >= mapped.tiles.size())
                throw ConfigError("fault injection: layer " + sz(l) + " has " + sz(mapped.tiles.size()) + " tiles");
            mapped.tiles[f.tile].flip_device(f.row, f.col, f.device);
        }

        const std::size_t per_input = layer.vectors_per_input();
        std::vector<BitVector> vectors;
        vectors.reserve(per_input * current.size());
        for (std::size_t i = 0; i < current.size(); ++i) {
            const auto* bits = std::get_if<BitVector>(&current[i]);
            if (bits == nullptr) throw DimensionError("layer " + sz(l) + ": input " + sz(i) + " is not binary");
            auto vs = layer_input_vectors(layer, *bits);
            for (auto& v : vs) vectors.push_back(std::move(v));
        }

        LayerExecution exec;
        try {
            exec = cfg.backend == Technology::opcm ? execute_layer_opcm(mapped, vectors, tech.wdm, cfg.adc)
                                                   : execute_layer(mapped, vectors, xcfg);
        } catch (const ConfigError& e) {
            throw ConfigError("layer " + sz(l) + ": " + e.what());
        }

        if (opts.keep_dots) result.dots[l].resize(current.size());
        for (std::size_t i = 0; i < current.size(); ++i) {
            std::vector<std::vector<DotResult>> mine(exec.dots.begin() + static_cast<std::ptrdiff_t>(i * per_input),
                                                     exec.dots.begin() + static_cast<std::ptrdiff_t>((i + 1) * per_input));
            current[i] = assemble_binary_output(layer, mine);
            if (opts.keep_dots) result.dots[l][i] = std::move(mine);
        }

        LayerReport lr = layer_report(exec.trace, tech);
        lr.layer_index = l;
        lr.mapping = to_string(cfg.mapping);
        lr.backend = to_string(cfg.backend);
        lr.vectors = vectors.size();
        result.report.add_layer(std::move(lr));
        result.mapped[l] = std::move(mapped);
    }

    result.outputs.reserve(current.size());
    for (const auto& v : current) {
        InferenceResult r;
        r.scores = std::get<IntVector>(v);
        r.predicted = argmax(r.scores);
        result.outputs.push_back(std::move(r));
    }
    return result;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    if (passed) {
        os << "PASS: " << dots_checked << " dot products across " << layers_checked
           << " binary layers match the reference engine";
        return os.str();
    }
    const auto& d = *divergence;
    os << "FAIL: layer " << d.layer << ", input " << d.input << ", vector " << d.vector << ", neuron " << d.neuron
       << ": expected " << dot_string(d.expected) << ", simulated " << dot_string(d.actual) << "; tiles";
    for (auto t : d.tiles) os << ' ' << t;
    if (!d.diagnostics.empty()) os << "; " << d.diagnostics;
    return os.str();
}

ValidationReport validate_simulation(const RunConfig& cfg, const io::NamedNetwork& net,
                                     const std::vector<LayerValue>& inputs, const SimulationOptions& opts) {
    SimulationOptions o = opts;
    o.keep_dots = true;
    const SimulationResult sim = simulate(cfg, net, inputs, o);

    ValidationReport report;
    const auto& layers = net.network.layers;
    // The reference runs on its own activations so a divergence is reported
    // at the layer where it first appears.
    std::vector<std::vector<LayerRecord>> traces;
    traces.reserve(inputs.size());
    for (const auto& in : inputs) traces.push_back(reference_trace(net.network, in));

    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].precision != Precision::binary) continue;
        ++report.layers_checked;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto& expected = traces[i][l].dots;
            const auto& actual = sim.dots[l][i];
            for (std::size_t p = 0; p < expected.size(); ++p) {
                for (std::size_t j = 0; j < expected[p].size(); ++j) {
                    ++report.dots_checked;
                    if (expected[p][j] == actual[p][j]) continue;
                    Divergence d;
                    d.layer = l;
                    d.input = i;
                    d.vector = p;
                    d.neuron = j;
                    d.tiles = tiles_for_neuron(sim.mapped[l], j);
                    d.expected = expected[p][j];
                    d.actual = actual[p][j];
                    if (cfg.adc.mode == AdcMode::quantized && cfg.mapping == MappingKind::tacit) {
                        const AdcModel adc = resolve_adc(cfg.adc, cfg.dims);
                        std::ostringstream os;
                        os << "quantized ADC: " << adc.bits << " bits over full scale " << adc.max_level
                           << " gives step " << format_double(adc.step())
                           << ", so column sums are not exactly representable; popcount off by "
                           << static_cast<std::int64_t>(d.actual.popcount_raw) -
                                  static_cast<std::int64_t>(d.expected.popcount_raw);
                        d.diagnostics = os.str();
                    }
                    report.passed = false;
                    report.divergence = std::move(d);
                    return report;
                }
            }
        }
    }
    return report;
}

std::string predictions_csv(const std::vector<InferenceResult>& outputs) {
    std::ostringstream os;
    os << "input,predicted,scores\n";
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        os << i << ',' << outputs[i].predicted << ',';
        for (std::size_t k = 0; k < outputs[i].scores.size(); ++k) os << (k ? " " : "") << outputs[i].scores[k];
        os << '\n';
    }
    return os.str();
}

}  // namespace bnncim
