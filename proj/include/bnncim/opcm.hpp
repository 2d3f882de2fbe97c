#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bnncim/bitvec.hpp"
#include "bnncim/mapping.hpp"
#include "bnncim/xbar.hpp"

namespace bnncim {

struct WdmConfig {
    unsigned capacity = 16;    // K, wavelengths combined per step
    double step_time_s = 1e-9;
    double p_laser_mw = 0.0;

    void validate() const;
};

// Up to K drives carried on distinct wavelengths through one crossbar.
struct WdmBatch {
    std::vector<BitVector> drives;
    std::vector<unsigned> wavelength_ids;
    std::size_t first_input = 0;

    std::size_t size() const noexcept { return drives.size(); }
};

// Groups drives in input order, ceil(|inputs|/K) batches, last one partial.
std::vector<WdmBatch> wdm_batch(std::span<const BitVector> inputs, unsigned capacity);

struct MmmResult {
    std::vector<std::vector<std::int64_t>> sums;  // [wavelength][column]
    StepRecord record;
};

// Fused MMM: every wavelength in the batch through the TacitMap tile at once.
MmmResult mmm_step(const TilePlacement& tile, const WdmBatch& batch, const AdcModel& adc, unsigned capacity);

// Receiver TIAs, 2 mW per column.
double crossbar_tia_power_mw(std::size_t columns) noexcept;

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

// Laser-free transmitter power in mW: 3KM + ((3KM + 1)/K) * 45, kept exact.
Rational transmitter_overhead_mw(unsigned capacity, std::size_t drive_len);
// Adds the laser power to the overhead above.
double transmitter_power_mw(const WdmConfig& cfg, std::size_t drive_len);

// TacitMap layer on an oPCM crossbar: ceil(V/K) MMM steps per row-tile.
LayerExecution execute_layer_opcm(const MappedLayer& mapped, std::span<const BitVector> inputs,
                                  const WdmConfig& wdm, const AdcModel& adc);

}  // namespace bnncim
