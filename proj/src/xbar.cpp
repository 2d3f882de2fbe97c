#include "bnncim/xbar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bnncim/errors.hpp"
#include "bnncim/kernels.hpp"

namespace bnncim {

namespace {
std::string sz(std::size_t v) { return std::to_string(v); }
}  // namespace

AdcModel AdcModel::ideal(std::size_t max_level) {
    return {static_cast<unsigned>(std::bit_width(max_level)), AdcMode::ideal, max_level, 1};
}

AdcModel AdcModel::quantized(unsigned bits, std::size_t max_level) {
    if (bits == 0 || bits > 32) throw ConfigError("ADC resolution must be 1..32 bits, got " + std::to_string(bits));
    return {bits, AdcMode::quantized, max_level, 1};
}

double AdcModel::step() const noexcept {
    if (bits == 0) return 1.0;
    const double levels = std::ldexp(1.0, static_cast<int>(bits)) - 1.0;
    return static_cast<double>(max_level) / levels;
}

std::int64_t AdcModel::convert(std::uint64_t column_sum) const noexcept {
    if (mode == AdcMode::ideal) return static_cast<std::int64_t>(column_sum);
    const double delta = step();
    if (delta <= 0.0) return 0;
    const double max_code = std::ldexp(1.0, static_cast<int>(bits)) - 1.0;
    const double code = std::clamp(std::round(static_cast<double>(column_sum) / delta), 0.0, max_code);
    const double level = std::min(code * delta, static_cast<double>(max_level));
    return std::llround(level);
}

std::string to_string(StepKind kind) {
    switch (kind) {
        case StepKind::vmm: return "vmm";
        case StepKind::mmm: return "mmm";
        case StepKind::pcsa_read: return "pcsa_read";
    }
    return "unknown";
}

std::string to_string(Technology tech) { return tech == Technology::epcm ? "epcm" : "opcm"; }

void StepTrace::add(StepRecord record) {
    if (record.epoch >= next_epoch_) next_epoch_ = record.epoch + 1;
    records_.push_back(record);
}

void StepTrace::append(const StepTrace& other) {
    const std::uint64_t offset = next_epoch_;
    records_.reserve(records_.size() + other.records_.size());
    for (StepRecord r : other.records_) {
        r.epoch += offset;
        records_.push_back(r);
    }
    next_epoch_ += other.next_epoch_;
}

TraceTotals StepTrace::totals() const {
    TraceTotals t;
    std::map<std::uint64_t, std::pair<Technology, unsigned>> longest;
    for (const auto& r : records_) {
        ++t.activations;
        t.adc_conversions += r.adc_conversions;
        t.sa_activations += r.sa_activations;
        t.counter_increments += r.counter_increments;
        t.tree_reductions += r.tree_reductions;
        t.tia_activations += r.tia_activations;
        auto [it, inserted] = longest.try_emplace(r.epoch, r.tech, r.duration);
        if (!inserted) it->second.second = std::max(it->second.second, r.duration);
    }
    for (const auto& [epoch, entry] : longest)
        (entry.first == Technology::epcm ? t.steps_epcm : t.steps_opcm) += entry.second;
    return t;
}

std::map<std::size_t, std::uint64_t> StepTrace::activations_per_tile() const {
    std::map<std::size_t, std::uint64_t> counts;
    for (const auto& r : records_) ++counts[r.tile_id];
    return counts;
}

VmmResult vmm_step(const TilePlacement& tile, const BitVector& drive, const AdcModel& adc) {
    if (tile.kind != MappingKind::tacit) throw ConfigError("vmm_step needs a TacitMap tile, got tile " + sz(tile.tile_id));
    if (drive.size() != tile.rows_used())
        throw DimensionError("tile " + sz(tile.tile_id) + ": drive has " + sz(drive.size()) + " lines, tile uses " +
                             sz(tile.rows_used()) + " rows");
    VmmResult r;
    r.column_sums.resize(tile.dims.cols);
    for (std::size_t c = 0; c < tile.dims.cols; ++c)
        r.column_sums[c] = adc.convert(kernels::and_popcount(drive.words(), tile.columns[c].words()));
    r.record.kind = StepKind::vmm;
    r.record.tech = Technology::epcm;
    r.record.tile_id = tile.tile_id;
    r.record.duration = std::max(1U, adc.columns_per_adc);
    r.record.adc_conversions = tile.dims.cols;
    r.record.drive_rows = tile.dims.rows;
    r.record.columns = tile.dims.cols;
    return r;
}

PcsaResult pcsa_read(const TilePlacement& tile, std::size_t row, const InterleavedDrive& drive) {
    if (tile.kind != MappingKind::custbinary)
        throw ConfigError("pcsa_read needs a CustBinaryMap tile, got tile " + sz(tile.tile_id));
    if (row >= tile.vectors.count)
        throw DimensionError("tile " + sz(tile.tile_id) + ": row " + sz(row) + " out of range (" +
                             sz(tile.vectors.count) + " rows mapped)");
    const std::size_t width = tile.elements.count;
    if (drive.in.size() != width || drive.in_comp.size() != width)
        throw DimensionError("tile " + sz(tile.tile_id) + ": drive has " + sz(drive.in.size()) + " cells, row holds " +
                             sz(width));
    // The pair conducts through whichever device the driven line selects.
    PcsaResult r;
    r.xnor_bits = (drive.in & tile.row_true[row].slice(0, width)) | (drive.in_comp & tile.row_comp[row].slice(0, width));
    r.record.kind = StepKind::pcsa_read;
    r.record.tech = Technology::epcm;
    r.record.tile_id = tile.tile_id;
    r.record.sa_activations = width;
    r.record.drive_rows = tile.dims.rows;
    r.record.columns = tile.dims.cols;
    return r;
}

std::uint64_t local_popcount(const BitVector& bits, unsigned counter_bits, std::size_t tile_id) {
    if (counter_bits == 0) throw ConfigError("tile " + sz(tile_id) + ": counter width must be at least 1 bit");
    const std::uint64_t count = bits.popcount();
    if (counter_bits < 64 && count >= (std::uint64_t{1} << counter_bits))
        throw ConfigError("tile " + sz(tile_id) + ": popcount " + std::to_string(count) + " overflows a " +
                          std::to_string(counter_bits) + "-bit counter");
    return count;
}

std::uint64_t global_popcount_tree(std::span<const std::uint64_t> local_counts) noexcept {
    // Pairwise reduction, as the adder tree would do it.
    std::vector<std::uint64_t> level(local_counts.begin(), local_counts.end());
    if (level.empty()) return 0;
    while (level.size() > 1) {
        std::vector<std::uint64_t> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2)
            next[i / 2] = level[i] + (i + 1 < level.size() ? level[i + 1] : 0);
        level.swap(next);
    }
    return level.front();
}

void check_counter_budget(const MappedLayer& mapped, unsigned counter_bits) {
    if (mapped.kind != MappingKind::custbinary) return;
    if (counter_bits == 0) throw ConfigError("counter width must be at least 1 bit");
    if (counter_bits >= 64) return;
    const std::uint64_t max_count = (std::uint64_t{1} << counter_bits) - 1;
    for (const auto& t : mapped.tiles)
        if (t.dims.cols > max_count)
            throw ConfigError("tile " + sz(t.tile_id) + ": CustBinaryMap crossbar has " + sz(t.dims.cols) +
                              " logical columns but " + std::to_string(counter_bits) +
                              "-bit counters hold at most " + std::to_string(max_count));
}

AdcModel resolve_adc(const AdcModel& adc, const CrossbarDims& dims) {
    AdcModel out = adc;
    if (out.max_level == 0) out.max_level = dims.rows;
    if (out.mode == AdcMode::ideal) out.bits = static_cast<unsigned>(std::bit_width(out.max_level));
    if (out.columns_per_adc == 0) out.columns_per_adc = 1;
    return out;
}

namespace {

LayerExecution execute_tacit(const MappedLayer& mapped, std::span<const BitVector> inputs, const AdcModel& adc) {
    LayerExecution out;
    out.dots.reserve(inputs.size());
    std::vector<std::uint64_t> acc(mapped.n);
    for (const auto& in : inputs) {
        const auto drives = tacitmap_encode_input(in, mapped);
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t gr = 0; gr < mapped.row_tiles; ++gr) {
            const std::uint64_t epoch = out.trace.begin_epoch();
            for (std::size_t gc = 0; gc < mapped.col_tiles; ++gc) {
                const auto& tile = mapped.tile(gr, gc);
                auto r = vmm_step(tile, drives[gr], adc);
                r.record.epoch = epoch;
                out.trace.add(r.record);
                for (std::size_t j = 0; j < tile.vectors.count; ++j)
                    acc[tile.vectors.begin + j] += static_cast<std::uint64_t>(r.column_sums[j]);
            }
        }
        std::vector<DotResult> dots(mapped.n);
        for (std::size_t j = 0; j < mapped.n; ++j) dots[j] = DotResult::from_popcount(acc[j], mapped.post_len);
        out.dots.push_back(std::move(dots));
    }
    return out;
}

LayerExecution execute_custbinary(const MappedLayer& mapped, std::span<const BitVector> inputs, unsigned counter_bits) {
    check_counter_budget(mapped, counter_bits);
    LayerExecution out;
    out.dots.reserve(inputs.size());
    std::vector<std::uint64_t> locals(mapped.col_tiles);
    std::vector<StepRecord> records(mapped.col_tiles);
    for (const auto& in : inputs) {
        const auto drives = custbinary_encode_input(in, mapped);
        std::vector<DotResult> dots(mapped.n);
        for (std::size_t j = 0; j < mapped.n; ++j) {
            const std::size_t gr = j / mapped.dims.rows;
            const std::size_t row = j % mapped.dims.rows;
            const std::uint64_t epoch = out.trace.begin_epoch();
            for (std::size_t gc = 0; gc < mapped.col_tiles; ++gc) {
                const auto& tile = mapped.tile(gr, gc);
                auto r = pcsa_read(tile, row, drives[gc]);
                locals[gc] = local_popcount(r.xnor_bits, counter_bits, tile.tile_id);
                r.record.counter_increments = locals[gc];
                r.record.epoch = epoch;
                records[gc] = r.record;
            }
            records.back().tree_reductions = 1;
            for (const auto& rec : records) out.trace.add(rec);
            dots[j] = DotResult::from_popcount(global_popcount_tree(locals), mapped.post_len);
        }
        out.dots.push_back(std::move(dots));
    }
    return out;
}

}  // namespace

LayerExecution execute_layer(const MappedLayer& mapped, std::span<const BitVector> inputs, const XbarConfig& cfg) {
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (inputs[i].size() != mapped.m)
            throw DimensionError("input " + sz(i) + " has " + sz(inputs[i].size()) + " bits, layer expects " +
                                 sz(mapped.m));
    if (mapped.kind == MappingKind::tacit) return execute_tacit(mapped, inputs, resolve_adc(cfg.adc, mapped.dims));
    return execute_custbinary(mapped, inputs, cfg.counter_bits);
}

}  // namespace bnncim
