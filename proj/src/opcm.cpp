#include "bnncim/opcm.hpp"

#include <numeric>

#include "bnncim/errors.hpp"

namespace bnncim {

namespace {
std::string sz(std::size_t v) { return std::to_string(v); }
}  // namespace

void WdmConfig::validate() const {
    if (capacity == 0) throw ConfigError("WDM capacity must be at least 1");
    if (step_time_s < 0.0 || p_laser_mw < 0.0) throw ConfigError("WDM step time and laser power must be non-negative");
}

std::vector<WdmBatch> wdm_batch(std::span<const BitVector> inputs, unsigned capacity) {
    if (capacity == 0) throw ConfigError("WDM capacity must be at least 1");
    for (std::size_t i = 1; i < inputs.size(); ++i)
        if (inputs[i].size() != inputs[0].size())
            throw DimensionError("drive " + sz(i) + " has length " + sz(inputs[i].size()) + ", drive 0 has " +
                                 sz(inputs[0].size()));
    std::vector<WdmBatch> batches;
    batches.reserve((inputs.size() + capacity - 1) / capacity);
    for (std::size_t first = 0; first < inputs.size(); first += capacity) {
        WdmBatch b;
        b.first_input = first;
        const std::size_t count = std::min<std::size_t>(capacity, inputs.size() - first);
        for (std::size_t k = 0; k < count; ++k) {
            b.drives.push_back(inputs[first + k]);
            b.wavelength_ids.push_back(static_cast<unsigned>(k));
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

MmmResult mmm_step(const TilePlacement& tile, const WdmBatch& batch, const AdcModel& adc, unsigned capacity) {
    if (tile.kind != MappingKind::tacit)
        throw ConfigError("tile " + sz(tile.tile_id) + ": the oPCM MMM path supports TacitMap tiles only");
    if (batch.size() > capacity)
        throw ConfigError("batch of " + sz(batch.size()) + " drives exceeds WDM capacity " + std::to_string(capacity));
    MmmResult r;
    r.sums.reserve(batch.size());
    // Wavelengths are ideally separable: each one sees its own VMM.
    for (const auto& drive : batch.drives) r.sums.push_back(vmm_step(tile, drive, adc).column_sums);
    r.record.kind = StepKind::mmm;
    r.record.tech = Technology::opcm;
    r.record.tile_id = tile.tile_id;
    r.record.wavelength_count = static_cast<unsigned>(batch.size());
    r.record.duration = std::max(1U, adc.columns_per_adc);
    r.record.adc_conversions = tile.dims.cols;
    r.record.tia_activations = tile.dims.cols;
    r.record.drive_rows = tile.dims.rows;
    r.record.columns = tile.dims.cols;
    return r;
}

double crossbar_tia_power_mw(std::size_t columns) noexcept { return 2.0 * static_cast<double>(columns); }

Rational transmitter_overhead_mw(unsigned capacity, std::size_t drive_len) {
    if (capacity == 0) throw ConfigError("WDM capacity must be at least 1");
    const auto k = static_cast<std::int64_t>(capacity);
    const std::int64_t km3 = 3 * k * static_cast<std::int64_t>(drive_len);
    // km3 + (km3 + 1) * 45 / k over the common denominator k.
    Rational r{km3 * k + (km3 + 1) * 45, k};
    const std::int64_t g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    return r;
}

double transmitter_power_mw(const WdmConfig& cfg, std::size_t drive_len) {
    return cfg.p_laser_mw + transmitter_overhead_mw(cfg.capacity, drive_len).value();
}

LayerExecution execute_layer_opcm(const MappedLayer& mapped, std::span<const BitVector> inputs,
                                  const WdmConfig& wdm, const AdcModel& adc_in) {
    if (mapped.kind != MappingKind::tacit)
        throw ConfigError("unsupported backend: CustBinaryMap has no WDM execution path");
    wdm.validate();
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (inputs[i].size() != mapped.m)
            throw DimensionError("input " + sz(i) + " has " + sz(inputs[i].size()) + " bits, layer expects " +
                                 sz(mapped.m));
    const AdcModel adc = resolve_adc(adc_in, mapped.dims);

    // Per row-tile drive lists, one entry per input.
    std::vector<std::vector<BitVector>> drives(mapped.row_tiles);
    for (auto& d : drives) d.reserve(inputs.size());
    for (const auto& in : inputs) {
        auto per_tile = tacitmap_encode_input(in, mapped);
        for (std::size_t gr = 0; gr < mapped.row_tiles; ++gr) drives[gr].push_back(std::move(per_tile[gr]));
    }

    LayerExecution out;
    std::vector<std::vector<std::uint64_t>> acc(inputs.size(), std::vector<std::uint64_t>(mapped.n, 0));
    const std::size_t batch_count = (inputs.size() + wdm.capacity - 1) / wdm.capacity;
    std::vector<std::vector<WdmBatch>> batches(mapped.row_tiles);
    for (std::size_t gr = 0; gr < mapped.row_tiles; ++gr) batches[gr] = wdm_batch(drives[gr], wdm.capacity);

    for (std::size_t b = 0; b < batch_count; ++b) {
        for (std::size_t gr = 0; gr < mapped.row_tiles; ++gr) {
            const WdmBatch& batch = batches[gr][b];
            const std::uint64_t epoch = out.trace.begin_epoch();
            for (std::size_t gc = 0; gc < mapped.col_tiles; ++gc) {
                const auto& tile = mapped.tile(gr, gc);
                auto r = mmm_step(tile, batch, adc, wdm.capacity);
                r.record.epoch = epoch;
                out.trace.add(r.record);
                for (std::size_t k = 0; k < batch.size(); ++k)
                    for (std::size_t j = 0; j < tile.vectors.count; ++j)
                        acc[batch.first_input + k][tile.vectors.begin + j] +=
                            static_cast<std::uint64_t>(r.sums[k][j]);
            }
        }
    }
    out.dots.resize(inputs.size());
    for (std::size_t v = 0; v < inputs.size(); ++v) {
        out.dots[v].reserve(mapped.n);
        for (std::size_t j = 0; j < mapped.n; ++j)
            out.dots[v].push_back(DotResult::from_popcount(acc[v][j], mapped.post_len));
    }
    return out;
}

}  // namespace bnncim
