#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnncim/io.hpp"
#include "bnncim/mapping.hpp"
#include "bnncim/report.hpp"
#include "bnncim/xbar.hpp"

namespace bnncim {

struct RunConfig {
    MappingKind mapping = MappingKind::tacit;
    Technology backend = Technology::epcm;
    CrossbarDims dims{32, 16};
    AdcModel adc;                    // ideal unless bits are given
    std::optional<unsigned> wdm_k;   // overrides tech.wdm.capacity; oPCM only
    unsigned counter_bits = 5;
    TechConstants tech;
    std::uint64_t seed = 0;
    std::string label;  // defaults to "<mapping>-<backend>"

    // Rejects CustBinaryMap on oPCM and degenerate crossbars.
    void validate() const;
    std::string design() const;
};

// Test hook: flips one device of one tile before execution.
struct FaultInjection {
    std::size_t layer = 0;
    std::size_t tile = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    int device = 0;
};

struct SimulationOptions {
    std::optional<FaultInjection> fault;
    bool keep_dots = false;
};

struct SimulationResult {
    std::vector<InferenceResult> outputs;
    CostReport report;
    std::vector<MappedLayer> mapped;  // per layer, empty for full layers
    // [layer][input][vector][neuron], filled when keep_dots is set.
    std::vector<std::vector<std::vector<std::vector<DotResult>>>> dots;
};

// Binary hidden layers go through the configured crossbar; full-precision
// boundary layers run on the host engine. Layers are processed one at a time
// over the whole input set, so WDM batches may span inputs.
SimulationResult simulate(const RunConfig& cfg, const io::NamedNetwork& net, const std::vector<LayerValue>& inputs,
                          const SimulationOptions& opts = {});

struct Divergence {
    std::size_t layer = 0;
    std::size_t input = 0;
    std::size_t vector = 0;
    std::size_t neuron = 0;
    std::vector<std::size_t> tiles;  // tiles that hold this neuron's weights
    DotResult expected;
    DotResult actual;
    std::string diagnostics;
};

struct ValidationReport {
    bool passed = true;
    std::size_t layers_checked = 0;
    std::uint64_t dots_checked = 0;
    std::optional<Divergence> divergence;

    std::string summary() const;
};

// Compares every binary layer's simulated dots against the reference engine
// and reports the first divergence.
ValidationReport validate_simulation(const RunConfig& cfg, const io::NamedNetwork& net,
                                     const std::vector<LayerValue>& inputs, const SimulationOptions& opts = {});

// "input,predicted,scores" with scores space-separated.
std::string predictions_csv(const std::vector<InferenceResult>& outputs);

}  // namespace bnncim
