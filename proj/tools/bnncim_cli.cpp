// bnncim: run, validate and compare BNN workloads on simulated PCM crossbars.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 I/O or format error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnncim/errors.hpp"
#include "bnncim/io.hpp"
#include "bnncim/kernels.hpp"
#include "bnncim/report.hpp"
#include "bnncim/sim.hpp"
#include "bnncim/synth.hpp"

namespace {

using namespace bnncim;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct SimFlags {
    std::string network, weights, inputs;
    std::string mapping = "tacit";
    std::string backend = "epcm";
    std::string crossbar = "32x16";
    std::string adc = "ideal";
    unsigned adc_share = 1;
    std::optional<unsigned> wdm_k;
    unsigned counter_bits = 5;
    std::string tech;
    std::uint64_t seed = 0;
    std::string label;
    std::string out;
    std::string predictions;
    std::string format = "json";
    std::string fault;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--network", f.network, "Network manifest (JSON)")->required();
    cmd->add_option("--weights", f.weights, "Packed weights file")->required();
    cmd->add_option("--inputs", f.inputs, "Inputs file")->required();
    cmd->add_option("--mapping", f.mapping, "tacit|custbinary")->check(CLI::IsMember({"tacit", "custbinary"}));
    cmd->add_option("--backend", f.backend, "epcm|opcm")->check(CLI::IsMember({"epcm", "opcm"}));
    cmd->add_option("--crossbar", f.crossbar, "Crossbar size MxN (rows x logical columns)");
    cmd->add_option("--adc", f.adc, "ideal or an ADC resolution in bits");
    cmd->add_option("--adc-share", f.adc_share, "Columns sharing one ADC")->check(CLI::PositiveNumber);
    cmd->add_option("--wdm-k", f.wdm_k, "WDM capacity K (oPCM only)")->check(CLI::PositiveNumber);
    cmd->add_option("--counter-bits", f.counter_bits, "Local popcount counter width (CustBinaryMap)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tech", f.tech, "Technology constants JSON");
    cmd->add_option("--seed", f.seed, "Seed, recorded in the report");
    cmd->add_option("--label", f.label, "Design label in reports");
    cmd->add_option("--out", f.out, "Report path (stdout when omitted)");
    cmd->add_option("--format", f.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

CrossbarDims parse_dims(const std::string& s) {
    const auto x = s.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument(s);
        std::size_t used = 0;
        CrossbarDims d{std::stoul(s.substr(0, x), &used), 0};
        if (used != x) throw std::invalid_argument(s);
        const std::string cols = s.substr(x + 1);
        d.cols = std::stoul(cols, &used);
        if (used != cols.size()) throw std::invalid_argument(s);
        return d;
    } catch (const std::logic_error&) {
        throw ConfigError("--crossbar expects MxN, got '" + s + "'");
    }
}

RunConfig make_config(const SimFlags& f) {
    RunConfig cfg;
    cfg.mapping = f.mapping == "custbinary" ? MappingKind::custbinary : MappingKind::tacit;
    cfg.backend = f.backend == "opcm" ? Technology::opcm : Technology::epcm;
    cfg.dims = parse_dims(f.crossbar);
    if (f.adc != "ideal") {
        unsigned bits = 0;
        try {
            bits = static_cast<unsigned>(std::stoul(f.adc));
        } catch (const std::logic_error&) {
            throw ConfigError("--adc expects 'ideal' or a bit count, got '" + f.adc + "'");
        }
        cfg.adc = AdcModel::quantized(bits, 0);
    }
    cfg.adc.columns_per_adc = f.adc_share;
    cfg.wdm_k = f.wdm_k;
    cfg.counter_bits = f.counter_bits;
    if (!f.tech.empty()) cfg.tech = load_tech_constants(f.tech);
    cfg.seed = f.seed;
    cfg.label = f.label;
    cfg.validate();
    return cfg;
}

FaultInjection parse_fault(const std::string& s) {
    std::vector<std::size_t> parts;
    std::size_t start = 0;
    try {
        while (start <= s.size()) {
            const auto colon = s.find(':', start);
            parts.push_back(std::stoul(s.substr(start, colon - start)));
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
    } catch (const std::logic_error&) {
        parts.clear();
    }
    if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("--inject-fault expects layer:tile:row:col[:device], got '" + s + "'");
    return {parts[0], parts[1], parts[2], parts[3], parts.size() == 5 ? static_cast<int>(parts[4]) : 0};
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        io::write_file(path, text);
}

struct Loaded {
    io::NamedNetwork network;
    io::InputSet inputs;
    std::string hash;
};

Loaded load_workload(const SimFlags& f) {
    const auto manifest = io::read_file(f.network);
    const auto weights = io::read_file(f.weights);
    const auto inputs = io::read_file(f.inputs);
    Loaded l{io::parse_network(std::string(manifest.begin(), manifest.end()), weights), io::parse_inputs(inputs),
             io::content_hash({manifest, weights, inputs})};
    if (l.inputs.vector_len != l.network.network.input_size())
        throw FormatError("inputs have length " + std::to_string(l.inputs.vector_len) + ", network expects " +
                          std::to_string(l.network.network.input_size()));
    return l;
}

std::string render_report(const CostReport& r, std::uint64_t seed, const std::string& format) {
    if (format == "csv") return report_csv(r);
    auto j = to_json(r);
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

int cmd_run(const SimFlags& f) {
    const RunConfig cfg = make_config(f);
    Loaded w = load_workload(f);
    SimulationResult sim = simulate(cfg, w.network, w.inputs.vectors);
    sim.report.workload_hash = w.hash;
    emit(f.out, render_report(sim.report, cfg.seed, f.format));
    std::string predictions = f.predictions;
    if (predictions.empty() && !f.out.empty()) predictions = f.out + ".predictions.csv";
    if (!predictions.empty()) io::write_file(predictions, predictions_csv(sim.outputs));
    return kExitOk;
}

int cmd_validate(const SimFlags& f) {
    const RunConfig cfg = make_config(f);
    Loaded w = load_workload(f);
    SimulationOptions opts;
    if (!f.fault.empty()) opts.fault = parse_fault(f.fault);
    const ValidationReport v = validate_simulation(cfg, w.network, w.inputs.vectors, opts);
    std::string text;
    if (f.format == "json") {
        nlohmann::json j = {{"passed", v.passed},
                            {"design", cfg.design()},
                            {"layers_checked", v.layers_checked},
                            {"dots_checked", v.dots_checked},
                            {"summary", v.summary()}};
        if (v.divergence) {
            const auto& d = *v.divergence;
            j["divergence"] = {{"layer", d.layer},
                               {"input", d.input},
                               {"vector", d.vector},
                               {"neuron", d.neuron},
                               {"tiles", d.tiles},
                               {"expected", d.expected.value},
                               {"actual", d.actual.value},
                               {"diagnostics", d.diagnostics}};
        }
        text = j.dump(2) + "\n";
    } else {
        text = v.summary() + "\n";
    }
    emit(f.out, text);
    if (!f.out.empty()) std::cerr << v.summary() << "\n";
    return v.passed ? kExitOk : kExitValidation;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& baseline, const std::string& out,
                const std::string& format) {
    std::vector<CostReport> reports;
    for (const auto& p : paths) {
        const auto bytes = io::read_file(p);
        try {
            reports.push_back(report_from_json(nlohmann::json::parse(bytes.begin(), bytes.end())));
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(p + ": " + e.what());
        }
    }
    const ComparisonTable t = compare(reports, baseline);
    emit(out, format == "csv" ? comparison_csv(t) : to_json(t).dump(2) + "\n");
    return kExitOk;
}

std::vector<std::size_t> parse_widths(const std::string& s) {
    std::vector<std::size_t> widths;
    std::size_t start = 0;
    try {
        while (start < s.size()) {
            const auto comma = s.find(',', start);
            widths.push_back(std::stoul(s.substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } catch (const std::logic_error&) {
        throw ConfigError("--widths expects comma-separated integers, got '" + s + "'");
    }
    return widths;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-accurate BNN crossbar simulator (TacitMap / CustBinaryMap on ePCM and WDM oPCM)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "bnncim 0.1.0");
    bool show_isa = false;
    app.add_flag("--isa", show_isa, "Print the active popcount kernel ISA to stderr");

    SimFlags run_flags;
    auto* run = app.add_subcommand("run", "Simulate a workload and write a cost report plus predictions");
    add_sim_flags(run, run_flags);
    run->add_option("--predictions", run_flags.predictions, "Predictions CSV (default <out>.predictions.csv)");

    SimFlags val_flags;
    auto* validate = app.add_subcommand("validate", "Check simulated dot products against the reference engine");
    add_sim_flags(validate, val_flags);
    validate->add_option("--inject-fault", val_flags.fault, "Flip one device: layer:tile:row:col[:device]");

    std::vector<std::string> report_paths;
    std::string baseline, cmp_out, cmp_format = "json";
    auto* cmp = app.add_subcommand("compare", "Normalize reports against a baseline design");
    cmp->add_option("reports", report_paths, "Report JSON files")->required();
    cmp->add_option("--baseline", baseline, "Baseline design label")->required();
    cmp->add_option("--out", cmp_out, "Output path (stdout when omitted)");
    cmp->add_option("--format", cmp_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    synth::WorkloadSpec spec;
    std::string kind = "mlp", widths = "32,32", out_dir = ".";
    auto* gen = app.add_subcommand("gen", "Write a seeded synthetic workload (network.json, weights.bin, inputs.bin)");
    gen->add_option("--kind", kind, "mlp|cnn")->check(CLI::IsMember({"mlp", "cnn"}));
    gen->add_option("--name", spec.name, "Network name");
    gen->add_option("--input-len", spec.input_len, "MLP input length");
    gen->add_option("--channels", spec.input_channels, "CNN input channels");
    gen->add_option("--side", spec.side, "CNN input height/width");
    gen->add_option("--widths", widths, "Hidden widths (MLP neurons / CNN channels), comma-separated");
    gen->add_option("--classes", spec.classes, "Class count");
    gen->add_option("--count", spec.input_count, "Number of inputs");
    gen->add_option("--seed", spec.seed, "Generator seed");
    gen->add_option("--out-dir", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (show_isa) std::cerr << "kernels: " << kernels::isa_name(kernels::active_isa()) << "\n";

    try {
        if (*run) return cmd_run(run_flags);
        if (*validate) return cmd_validate(val_flags);
        if (*cmp) return cmd_compare(report_paths, baseline, cmp_out, cmp_format);
        if (*gen) {
            spec.kind = kind == "cnn" ? synth::NetKind::cnn : synth::NetKind::mlp;
            spec.widths = parse_widths(widths);
            const auto w = synth::generate(spec);
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            io::save_network(w.network, (dir / "network.json").string(), (dir / "weights.bin").string());
            io::save_inputs(w.inputs, (dir / "inputs.bin").string());
            return kExitOk;
        }
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ComparisonError& e) {
        std::cerr << "comparison error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
