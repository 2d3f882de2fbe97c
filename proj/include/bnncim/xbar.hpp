#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bnncim/bitvec.hpp"
#include "bnncim/bnn.hpp"
#include "bnncim/mapping.hpp"

namespace bnncim {

enum class AdcMode { ideal, quantized };

// Column readout. Quantized mode reconstructs round(v/step)*step with
// step = max_level/(2^bits - 1), clipped to [0, max_level], then rounds the
// level to the nearest integer.
struct AdcModel {
    unsigned bits = 0;
    AdcMode mode = AdcMode::ideal;
    std::size_t max_level = 0;
    // Columns sharing one converter; a VMM costs this many sub-steps.
    unsigned columns_per_adc = 1;

    static AdcModel ideal(std::size_t max_level);
    static AdcModel quantized(unsigned bits, std::size_t max_level);

    double step() const noexcept;
    std::int64_t convert(std::uint64_t column_sum) const noexcept;
};

enum class StepKind { vmm, mmm, pcsa_read };
enum class Technology { epcm, opcm };

std::string to_string(StepKind kind);
std::string to_string(Technology tech);

// One crossbar activation. Records sharing an epoch run in the same time step
// on different tiles.
struct StepRecord {
    StepKind kind = StepKind::vmm;
    Technology tech = Technology::epcm;
    std::uint64_t epoch = 0;
    std::size_t tile_id = 0;
    unsigned wavelength_count = 1;
    unsigned duration = 1;  // sub-steps (ADC sharing)
    std::uint64_t adc_conversions = 0;
    std::uint64_t sa_activations = 0;
    std::uint64_t counter_increments = 0;
    std::uint64_t tree_reductions = 0;
    std::uint64_t tia_activations = 0;
    std::size_t drive_rows = 0;  // M of the activated crossbar
    std::size_t columns = 0;     // N of the activated crossbar

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct TraceTotals {
    std::uint64_t activations = 0;
    std::uint64_t steps_epcm = 0;
    std::uint64_t steps_opcm = 0;
    std::uint64_t adc_conversions = 0;
    std::uint64_t sa_activations = 0;
    std::uint64_t counter_increments = 0;
    std::uint64_t tree_reductions = 0;
    std::uint64_t tia_activations = 0;

    std::uint64_t steps() const noexcept { return steps_epcm + steps_opcm; }
    friend bool operator==(const TraceTotals&, const TraceTotals&) = default;
};

class StepTrace {
public:
    std::uint64_t begin_epoch() noexcept { return next_epoch_++; }
    void add(StepRecord record);
    // Appends another trace, shifting its epochs after ours.
    void append(const StepTrace& other);

    const std::vector<StepRecord>& records() const noexcept { return records_; }
    std::uint64_t epochs() const noexcept { return next_epoch_; }

    // Latency: each epoch counts its longest record.
    TraceTotals totals() const;
    std::map<std::size_t, std::uint64_t> activations_per_tile() const;

private:
    std::vector<StepRecord> records_;
    std::uint64_t next_epoch_ = 0;
};

struct VmmResult {
    std::vector<std::int64_t> column_sums;  // dims.cols entries
    StepRecord record;
};

// One analog VMM on a TacitMap tile: column j sums drive_i * cell_ij.
VmmResult vmm_step(const TilePlacement& tile, const BitVector& drive, const AdcModel& adc);

struct PcsaResult {
    BitVector xnor_bits;  // one per mapped element of the tile slice
    StepRecord record;
};

// Reads one CustBinaryMap row through the precharge sense amplifiers.
PcsaResult pcsa_read(const TilePlacement& tile, std::size_t row, const InterleavedDrive& drive);

// Digital counter of `counter_bits` width; throws ConfigError naming the tile
// when the count does not fit.
std::uint64_t local_popcount(const BitVector& bits, unsigned counter_bits, std::size_t tile_id = 0);

std::uint64_t global_popcount_tree(std::span<const std::uint64_t> local_counts) noexcept;

struct XbarConfig {
    AdcModel adc;  // max_level 0 means "use the crossbar row count"
    unsigned counter_bits = 5;
};

struct LayerExecution {
    // [input][neuron]
    std::vector<std::vector<DotResult>> dots;
    StepTrace trace;
};

// Throws ConfigError when a CustBinaryMap crossbar is wider than the counters.
void check_counter_budget(const MappedLayer& mapped, unsigned counter_bits);

AdcModel resolve_adc(const AdcModel& adc, const CrossbarDims& dims);

// Runs every input through the mapped layer on the ePCM crossbar. TacitMap
// issues one VMM per input per row-tile (column tiles in parallel);
// CustBinaryMap one PCSA row read per input per weight vector, with counters
// and the popcount tree overlapping the read.
LayerExecution execute_layer(const MappedLayer& mapped, std::span<const BitVector> inputs, const XbarConfig& cfg);

}  // namespace bnncim
