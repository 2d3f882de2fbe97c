#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnncim/opcm.hpp"
#include "bnncim/xbar.hpp"

namespace bnncim {

// Technology constants. The defaults are configuration assumptions, not
// measured device data; every report embeds the values it was computed with.
struct TechConstants {
    double step_time_epcm_s = 100e-9;
    double e_adc_conversion_j = 2e-12;
    double e_sa_activation_j = 0.1e-12;
    double e_counter_increment_j = 0.05e-12;
    double e_tree_reduction_j = 0.5e-12;
    WdmConfig wdm;  // oPCM step time, capacity and laser power

    void validate() const;
    double step_time_opcm_s() const noexcept { return wdm.step_time_s; }
};

nlohmann::json to_json(const TechConstants& tech);
// Missing keys keep their defaults.
TechConstants tech_from_json(const nlohmann::json& j);
TechConstants load_tech_constants(const std::string& path);

struct EnergyBreakdown {
    double adc = 0;
    double sa = 0;
    double counter = 0;
    double tree = 0;
    double tia = 0;
    double transmitter = 0;

    double total() const noexcept { return adc + sa + counter + tree + tia + transmitter; }
    EnergyBreakdown& operator+=(const EnergyBreakdown& o) noexcept;
};

struct LatencyReport {
    std::uint64_t steps = 0;
    std::uint64_t steps_epcm = 0;
    std::uint64_t steps_opcm = 0;
    double seconds = 0;
};

LatencyReport latency_report(const StepTrace& trace, const TechConstants& tech);

struct LayerReport {
    std::size_t layer_index = 0;
    std::string mapping;
    std::string backend;
    std::uint64_t vectors = 0;  // drive vectors executed
    std::uint64_t activations = 0;
    LatencyReport latency;
    EnergyBreakdown energy;
};

// Full-precision boundary layers run on the host and stay out of the
// crossbar step and energy totals.
struct HostReport {
    std::vector<std::size_t> layers;
    std::uint64_t macs = 0;
};

struct CostReport {
    std::string design;
    std::string network;
    std::string workload_hash;
    std::uint64_t total_steps = 0;
    std::uint64_t steps_epcm = 0;
    std::uint64_t steps_opcm = 0;
    std::uint64_t activations = 0;
    double total_time_s = 0;
    EnergyBreakdown energy;
    std::vector<LayerReport> layers;
    HostReport host;
    TechConstants tech;

    double total_energy_j() const noexcept { return energy.total(); }
    void add_layer(LayerReport layer);
};

// Energy of every record in the trace; oPCM steps add transmitter and TIA
// power integrated over the step time.
CostReport energy_report(const StepTrace& trace, const TechConstants& tech);
LayerReport layer_report(const StepTrace& trace, const TechConstants& tech);

struct ComparisonRow {
    std::string design;
    std::string network;  // "geomean" on aggregate rows
    std::uint64_t steps = 0;
    double time_s = 0;
    double energy_j = 0;
    double latency_improvement = 1.0;  // baseline_time / design_time
    double energy_ratio = 1.0;         // design_energy / baseline_energy
};

struct ComparisonTable {
    std::string baseline;
    std::vector<ComparisonRow> rows;       // per design x network
    std::vector<ComparisonRow> aggregate;  // geometric mean per design
};

// Per-network ratios against the baseline design, then geometric means.
ComparisonTable compare(const std::vector<CostReport>& reports, const std::string& baseline);

nlohmann::json to_json(const CostReport& report);
CostReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComparisonTable& table);

std::string format_double(double v);
std::string report_csv(const CostReport& report);
std::string comparison_csv(const ComparisonTable& table);

}  // namespace bnncim
