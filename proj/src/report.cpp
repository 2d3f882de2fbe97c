#include "bnncim/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bnncim/errors.hpp"

namespace bnncim {

using nlohmann::json;

namespace {

constexpr const char* kAssumptions =
    "technology constants are configurable assumptions, not measured device data";
constexpr const char* kAggregation = "geometric mean of per-network ratios";

double ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 1.0 : INFINITY;
    return num / den;
}

json energy_json(const EnergyBreakdown& e) {
    return {{"adc", e.adc},   {"sa", e.sa},   {"counter", e.counter},         {"tree", e.tree},
            {"tia", e.tia},   {"transmitter", e.transmitter}, {"total", e.total()}};
}

EnergyBreakdown energy_from_json(const json& j) {
    EnergyBreakdown e;
    e.adc = j.at("adc").get<double>();
    e.sa = j.at("sa").get<double>();
    e.counter = j.at("counter").get<double>();
    e.tree = j.at("tree").get<double>();
    e.tia = j.at("tia").get<double>();
    e.transmitter = j.at("transmitter").get<double>();
    return e;
}

json latency_json(const LatencyReport& l) {
    return {{"steps", l.steps}, {"steps_epcm", l.steps_epcm}, {"steps_opcm", l.steps_opcm}, {"time_s", l.seconds}};
}

}  // namespace

void TechConstants::validate() const {
    if (step_time_epcm_s < 0 || e_adc_conversion_j < 0 || e_sa_activation_j < 0 || e_counter_increment_j < 0 ||
        e_tree_reduction_j < 0)
        throw ConfigError("technology constants must be non-negative");
    wdm.validate();
}

json to_json(const TechConstants& t) {
    return {{"step_time_epcm_s", t.step_time_epcm_s},
            {"step_time_opcm_s", t.wdm.step_time_s},
            {"e_adc_conversion_j", t.e_adc_conversion_j},
            {"e_sa_activation_j", t.e_sa_activation_j},
            {"e_counter_increment_j", t.e_counter_increment_j},
            {"e_tree_reduction_j", t.e_tree_reduction_j},
            {"wdm_capacity", t.wdm.capacity},
            {"p_laser_mw", t.wdm.p_laser_mw}};
}

TechConstants tech_from_json(const json& j) {
    TechConstants t;
    try {
        t.step_time_epcm_s = j.value("step_time_epcm_s", t.step_time_epcm_s);
        t.wdm.step_time_s = j.value("step_time_opcm_s", t.wdm.step_time_s);
        t.e_adc_conversion_j = j.value("e_adc_conversion_j", t.e_adc_conversion_j);
        t.e_sa_activation_j = j.value("e_sa_activation_j", t.e_sa_activation_j);
        t.e_counter_increment_j = j.value("e_counter_increment_j", t.e_counter_increment_j);
        t.e_tree_reduction_j = j.value("e_tree_reduction_j", t.e_tree_reduction_j);
        t.wdm.capacity = j.value("wdm_capacity", t.wdm.capacity);
        t.wdm.p_laser_mw = j.value("p_laser_mw", t.wdm.p_laser_mw);
    } catch (const json::exception& e) {
        throw FormatError(std::string("technology constants: ") + e.what());
    }
    t.validate();
    return t;
}

TechConstants load_tech_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open technology constants file " + path);
    try {
        return tech_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

EnergyBreakdown& EnergyBreakdown::operator+=(const EnergyBreakdown& o) noexcept {
    adc += o.adc;
    sa += o.sa;
    counter += o.counter;
    tree += o.tree;
    tia += o.tia;
    transmitter += o.transmitter;
    return *this;
}

LatencyReport latency_report(const StepTrace& trace, const TechConstants& tech) {
    const TraceTotals t = trace.totals();
    LatencyReport r;
    r.steps_epcm = t.steps_epcm;
    r.steps_opcm = t.steps_opcm;
    r.steps = t.steps();
    r.seconds = static_cast<double>(t.steps_epcm) * tech.step_time_epcm_s +
                static_cast<double>(t.steps_opcm) * tech.step_time_opcm_s();
    return r;
}

LayerReport layer_report(const StepTrace& trace, const TechConstants& tech) {
    LayerReport r;
    r.latency = latency_report(trace, tech);
    const TraceTotals t = trace.totals();
    r.activations = t.activations;
    r.energy.adc = static_cast<double>(t.adc_conversions) * tech.e_adc_conversion_j;
    r.energy.sa = static_cast<double>(t.sa_activations) * tech.e_sa_activation_j;
    r.energy.counter = static_cast<double>(t.counter_increments) * tech.e_counter_increment_j;
    r.energy.tree = static_cast<double>(t.tree_reductions) * tech.e_tree_reduction_j;
    for (const auto& rec : trace.records()) {
        if (rec.tech != Technology::opcm) continue;
        // Partial batches still run the laser and comb at full capacity.
        const double seconds = static_cast<double>(rec.duration) * tech.step_time_opcm_s();
        r.energy.tia += crossbar_tia_power_mw(rec.columns) * 1e-3 * seconds;
        r.energy.transmitter += transmitter_power_mw(tech.wdm, rec.drive_rows) * 1e-3 * seconds;
    }
    return r;
}

void CostReport::add_layer(LayerReport layer) {
    total_steps += layer.latency.steps;
    steps_epcm += layer.latency.steps_epcm;
    steps_opcm += layer.latency.steps_opcm;
    activations += layer.activations;
    total_time_s += layer.latency.seconds;
    energy += layer.energy;
    layers.push_back(std::move(layer));
}

CostReport energy_report(const StepTrace& trace, const TechConstants& tech) {
    CostReport r;
    r.tech = tech;
    r.add_layer(layer_report(trace, tech));
    return r;
}

ComparisonTable compare(const std::vector<CostReport>& reports, const std::string& baseline) {
    std::map<std::string, const CostReport*> baselines;
    std::map<std::string, std::string> hashes;
    for (const auto& r : reports) {
        auto [it, inserted] = hashes.try_emplace(r.network, r.workload_hash);
        if (!inserted && it->second != r.workload_hash)
            throw ComparisonError("network '" + r.network + "': design '" + r.design +
                                  "' ran a different workload (hash " + r.workload_hash + " vs " + it->second + ")");
        if (r.design == baseline) {
            if (!baselines.emplace(r.network, &r).second)
                throw ComparisonError("network '" + r.network + "' has two baseline reports");
        }
    }
    for (const auto& [network, hash] : hashes)
        if (!baselines.contains(network))
            throw ComparisonError("network '" + network + "' has no report for baseline design '" + baseline + "'");

    ComparisonTable table;
    table.baseline = baseline;
    std::vector<std::string> design_order;
    std::map<std::string, std::pair<double, double>> log_sums;
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::uint64_t> step_sums;
    std::map<std::string, std::pair<double, double>> totals;
    for (const auto& r : reports) {
        const CostReport& b = *baselines.at(r.network);
        ComparisonRow row;
        row.design = r.design;
        row.network = r.network;
        row.steps = r.total_steps;
        row.time_s = r.total_time_s;
        row.energy_j = r.total_energy_j();
        row.latency_improvement = ratio(b.total_time_s, r.total_time_s);
        row.energy_ratio = ratio(r.total_energy_j(), b.total_energy_j());
        table.rows.push_back(row);
        if (!counts.contains(r.design)) design_order.push_back(r.design);
        ++counts[r.design];
        log_sums[r.design].first += std::log(row.latency_improvement);
        log_sums[r.design].second += std::log(row.energy_ratio);
        step_sums[r.design] += row.steps;
        totals[r.design].first += row.time_s;
        totals[r.design].second += row.energy_j;
    }
    for (const auto& design : design_order) {
        const double n = static_cast<double>(counts[design]);
        ComparisonRow row;
        row.design = design;
        row.network = "geomean";
        row.steps = step_sums[design];
        row.time_s = totals[design].first;
        row.energy_j = totals[design].second;
        row.latency_improvement = std::exp(log_sums[design].first / n);
        row.energy_ratio = std::exp(log_sums[design].second / n);
        table.aggregate.push_back(row);
    }
    return table;
}

json to_json(const CostReport& r) {
    json layers = json::array();
    for (const auto& l : r.layers)
        layers.push_back({{"layer", l.layer_index},
                          {"mapping", l.mapping},
                          {"backend", l.backend},
                          {"vectors", l.vectors},
                          {"activations", l.activations},
                          {"latency", latency_json(l.latency)},
                          {"energy_j", energy_json(l.energy)}});
    return {{"design", r.design},
            {"network", r.network},
            {"workload_hash", r.workload_hash},
            {"total_steps", r.total_steps},
            {"steps_epcm", r.steps_epcm},
            {"steps_opcm", r.steps_opcm},
            {"activations", r.activations},
            {"total_time_s", r.total_time_s},
            {"energy_j", energy_json(r.energy)},
            {"layers", layers},
            {"host", {{"layers", r.host.layers}, {"macs", r.host.macs}}},
            {"tech", to_json(r.tech)},
            {"assumptions", kAssumptions}};
}

CostReport report_from_json(const json& j) {
    try {
        CostReport r;
        r.design = j.at("design").get<std::string>();
        r.network = j.at("network").get<std::string>();
        r.workload_hash = j.at("workload_hash").get<std::string>();
        r.tech = tech_from_json(j.at("tech"));
        for (const auto& l : j.at("layers")) {
            LayerReport lr;
            lr.layer_index = l.at("layer").get<std::size_t>();
            lr.mapping = l.at("mapping").get<std::string>();
            lr.backend = l.at("backend").get<std::string>();
            lr.vectors = l.at("vectors").get<std::uint64_t>();
            lr.activations = l.at("activations").get<std::uint64_t>();
            const auto& lat = l.at("latency");
            lr.latency.steps = lat.at("steps").get<std::uint64_t>();
            lr.latency.steps_epcm = lat.at("steps_epcm").get<std::uint64_t>();
            lr.latency.steps_opcm = lat.at("steps_opcm").get<std::uint64_t>();
            lr.latency.seconds = lat.at("time_s").get<double>();
            lr.energy = energy_from_json(l.at("energy_j"));
            r.add_layer(std::move(lr));
        }
        r.host.layers = j.at("host").at("layers").get<std::vector<std::size_t>>();
        r.host.macs = j.at("host").at("macs").get<std::uint64_t>();
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed cost report: ") + e.what());
    }
}

json to_json(const ComparisonTable& t) {
    auto rows = [](const std::vector<ComparisonRow>& v) {
        json a = json::array();
        for (const auto& r : v)
            a.push_back({{"design", r.design},
                         {"network", r.network},
                         {"steps", r.steps},
                         {"time_s", r.time_s},
                         {"energy_j", r.energy_j},
                         {"latency_improvement", r.latency_improvement},
                         {"energy_ratio", r.energy_ratio}});
        return a;
    };
    return {{"baseline", t.baseline}, {"rows", rows(t.rows)}, {"aggregate", rows(t.aggregate)},
            {"aggregation", kAggregation}};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
constexpr const char* kCsvHeader = "design,network,steps,time_s,energy_J,latency_improvement,energy_ratio\n";

void csv_row(std::ostringstream& os, const ComparisonRow& r) {
    os << r.design << ',' << r.network << ',' << r.steps << ',' << format_double(r.time_s) << ','
       << format_double(r.energy_j) << ',' << format_double(r.latency_improvement) << ','
       << format_double(r.energy_ratio) << '\n';
}
}  // namespace

std::string report_csv(const CostReport& r) {
    std::ostringstream os;
    os << kCsvHeader;
    // A lone report has no baseline, so the ratio columns stay empty.
    os << r.design << ',' << r.network << ',' << r.total_steps << ',' << format_double(r.total_time_s) << ','
       << format_double(r.total_energy_j()) << ",,\n";
    return os.str();
}

std::string comparison_csv(const ComparisonTable& t) {
    std::ostringstream os;
    os << kCsvHeader;
    for (const auto& r : t.rows) csv_row(os, r);
    for (const auto& r : t.aggregate) csv_row(os, r);
    return os.str();
}

}  // namespace bnncim
