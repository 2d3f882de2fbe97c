// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bnncim/errors.hpp"
#include "bnncim/opcm.hpp"
#include "bnncim/xbar.hpp"
#include "cli_harness.hpp"

using namespace bnncim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

BitVector from_int(std::uint32_t v, std::size_t len) {
    BitVector b(len);
    for (std::size_t i = 0; i < len; ++i) b.set(i, (v >> i) & 1);
    return b;
}

// Decoded bipolar dot over plain ints.
std::int64_t bipolar(std::uint32_t a, std::uint32_t w, std::size_t len) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < len; ++i) s += (2 * int((a >> i) & 1) - 1) * (2 * int((w >> i) & 1) - 1);
    return s;
}

std::int64_t bipolar(const BitVector& a, const BitVector& w) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (2 * int(a.at(i)) - 1) * (2 * int(w.at(i)) - 1);
    return s;
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(std::string why) {
        if (pass) detail = std::move(why);
        pass = false;
    }
};

Outcome eq1_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    for (std::size_t len = 1; len <= 12 && o.pass; ++len) {
        const std::uint32_t count = 1U << len;
        std::vector<BitVector> vecs;
        for (std::uint32_t v = 0; v < count; ++v) vecs.push_back(from_int(v, len));
        for (std::uint32_t a = 0; a < count && o.pass; ++a)
            for (std::uint32_t w = 0; w < count; ++w)
                if (xnor_popcount_dot(vecs[a], vecs[w]).value != bipolar(a, w, len)) {
                    o.fail("len " + std::to_string(len) + " a=" + std::to_string(a) + " w=" + std::to_string(w));
                    break;
                }
    }
    std::mt19937_64 rng(101);
    for (int i = 0; i < 10000 && o.pass; ++i) {
        const std::size_t len = 1 + rng() % 256;
        const auto a = BitVector::random(len, rng), w = BitVector::random(len, rng);
        if (xnor_popcount_dot(a, w).value != bipolar(a, w)) o.fail("random pair " + std::to_string(i));
    }
    const double t = seconds_since(t0);
    if (o.pass && t >= 10.0) o.fail("took " + std::to_string(t) + " s");
    if (o.pass) o.detail = std::to_string(t).substr(0, 5) + " s";
    return o;
}

// Every weight vector of length L on one TacitMap tile; each input drive is one
// VMM, and column w must read popcount(xnor(a, w)).
Outcome column_mac_identity() {
    Outcome o;
    for (std::size_t len = 1; len <= 12 && o.pass; ++len) {
        const std::uint32_t count = 1U << len;
        std::vector<BitVector> cols;
        for (std::uint32_t w = 0; w < count; ++w) cols.push_back(from_int(w, len));
        const auto layer = tacitmap_layout(BitMatrix(cols), {2 * len, count});
        const auto adc = AdcModel::ideal(2 * len);
        for (std::uint32_t a = 0; a < count && o.pass; ++a) {
            const auto drive = tacitmap_encode_input(from_int(a, len), layer)[0];
            const auto sums = vmm_step(layer.tiles[0], drive, adc).column_sums;
            for (std::uint32_t w = 0; w < count; ++w)
                if (sums[w] != static_cast<std::int64_t>(len) - std::popcount(a ^ w)) {
                    o.fail("len " + std::to_string(len) + " a=" + std::to_string(a) + " w=" + std::to_string(w));
                    break;
                }
        }
    }
    return o;
}

struct RandomLayer {
    BitMatrix w;
    CrossbarDims dims;
    std::vector<BitVector> inputs;
};

std::vector<RandomLayer> criterion3_workloads() {
    std::mt19937_64 rng(303);
    std::vector<RandomLayer> out;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t m = 1 + rng() % 64, n = 1 + rng() % 64;
        RandomLayer l{BitMatrix::random(m, n, rng), {4 + rng() % 29, 4 + rng() % 29}, {}};
        const std::size_t v = 1 + rng() % 40;
        for (std::size_t k = 0; k < v; ++k) l.inputs.push_back(BitVector::random(m, rng));
        out.push_back(std::move(l));
    }
    return out;
}

Outcome mapping_equivalence(const std::vector<RandomLayer>& layers, Outcome& activations) {
    Outcome o;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < layers.size() && o.pass; ++i) {
        const auto& l = layers[i];
        std::vector<std::vector<DotResult>> expected;
        for (const auto& in : l.inputs) {
            std::vector<DotResult> row;
            for (std::size_t j = 0; j < l.w.cols(); ++j) {
                const std::int64_t d = bipolar(in, l.w.column(j));
                const auto m = static_cast<std::int64_t>(in.size());
                row.push_back({d, static_cast<std::uint64_t>((d + m) / 2), in.size()});
            }
            expected.push_back(row);
        }
        const auto tacit = tacitmap_layout(l.w, l.dims);
        const auto epcm = execute_layer(tacit, l.inputs, {});
        XbarConfig cb_cfg;
        // Counters wide enough for the crossbar's logical columns.
        cb_cfg.counter_bits = static_cast<unsigned>(std::bit_width(l.dims.cols));
        const auto cust = execute_layer(custbinary_layout(l.w, l.dims), l.inputs, cb_cfg);
        if (epcm.dots != expected) o.fail("layer " + std::to_string(i) + ": TacitMap-ePCM");
        if (cust.dots != expected) o.fail("layer " + std::to_string(i) + ": CustBinaryMap-ePCM");
        const auto ep = epcm.trace.activations_per_tile();
        for (unsigned k : {1U, 4U, 16U}) {
            WdmConfig wdm;
            wdm.capacity = k;
            const auto opcm = execute_layer_opcm(tacit, l.inputs, wdm, AdcModel{});
            if (opcm.dots != expected) o.fail("layer " + std::to_string(i) + ": TacitMap-oPCM K=" + std::to_string(k));
            const auto op = opcm.trace.activations_per_tile();
            if (op.size() != ep.size()) activations.fail("layer " + std::to_string(i) + ": tile sets differ");
            for (const auto& [tile, count] : ep) {
                const auto it = op.find(tile);
                if (it == op.end() || it->second != (count + k - 1) / k)
                    activations.fail("layer " + std::to_string(i) + " tile " + std::to_string(tile) + " K=" +
                                     std::to_string(k));
            }
        }
    }
    const double t = seconds_since(t0);
    if (o.pass && t >= 60.0) o.fail("took " + std::to_string(t) + " s");
    if (o.pass) o.detail = std::to_string(t).substr(0, 5) + " s";
    return o;
}

Outcome n_step_law() {
    Outcome o;
    std::mt19937_64 rng(404);
    const auto w = BitMatrix::random(16, 32, rng);
    const std::vector<BitVector> in{BitVector::random(16, rng)};
    const auto t = execute_layer(tacitmap_layout(w, {32, 32}), in, {});
    const auto c = execute_layer(custbinary_layout(w, {32, 16}), in, {});
    const auto ts = t.trace.totals().steps(), cs = c.trace.totals().steps();
    if (ts != 1 || cs != 32) o.fail("steps " + std::to_string(ts) + " vs " + std::to_string(cs));
    if (t.dots != c.dots) o.fail("outputs differ");
    o.detail = std::to_string(cs) + "/" + std::to_string(ts);
    return o;
}

Outcome fig5_scenario() {
    Outcome o;
    // 4x3 tile: three 2-bit kernels with complements.
    const BitMatrix w(std::vector<BitVector>{BitVector{1, 0}, BitVector{0, 1}, BitVector{1, 1}});
    const std::vector<BitVector> acts{BitVector{1, 1}, BitVector{0, 1}, BitVector{0, 0}};
    const auto layer = tacitmap_layout(w, {4, 3});
    if (layer.tiles.size() != 1) o.fail("expected one tile");
    const auto e = execute_layer(layer, acts, {});
    if (e.trace.totals().steps() != 3) o.fail("ePCM steps " + std::to_string(e.trace.totals().steps()));
    for (unsigned k : {3U, 16U}) {
        WdmConfig wdm;
        wdm.capacity = k;
        const auto p = execute_layer_opcm(layer, acts, wdm, AdcModel{});
        if (p.trace.totals().steps() != 1) o.fail("oPCM steps " + std::to_string(p.trace.totals().steps()));
        if (p.dots != e.dots) o.fail("outputs differ at K=" + std::to_string(k));
    }
    return o;
}

Outcome wdm_law() {
    Outcome o;
    std::mt19937_64 rng(606);
    const auto w = BitMatrix::random(8, 8, rng);
    const auto layer = tacitmap_layout(w, {16, 8});
    std::vector<BitVector> in;
    for (int i = 0; i < 33; ++i) in.push_back(BitVector::random(8, rng));
    const std::vector<BitVector> sixteen(in.begin(), in.begin() + 16);
    const auto e = execute_layer(layer, sixteen, {}).trace.totals().steps();
    const auto p = execute_layer_opcm(layer, sixteen, {}, AdcModel{}).trace.totals().steps();
    if (p == 0 || e != 16 * p) o.fail("ratio " + std::to_string(e) + "/" + std::to_string(p));
    const auto p33 = execute_layer_opcm(layer, in, {}, AdcModel{}).trace.totals().steps();
    if (p33 != 3) o.fail("V=33 took " + std::to_string(p33) + " steps");
    return o;
}

Outcome eq2() {
    Outcome o;
    if (crossbar_tia_power_mw(3) != 6.0) o.fail("N=3");
    if (crossbar_tia_power_mw(128) != 256.0) o.fail("N=128");
    return o;
}

Outcome eq3() {
    Outcome o;
    WdmConfig a;
    a.capacity = 16;
    const auto ra = transmitter_overhead_mw(16, 4);
    if (ra.num * 10000 != 7348125 * ra.den || transmitter_power_mw(a, 4) != 734.8125) o.fail("K=16 M=4");
    WdmConfig b;
    b.capacity = 1;
    const auto rb = transmitter_overhead_mw(1, 1);
    if (rb.num != 183 || rb.den != 1 || transmitter_power_mw(b, 1) != 183.0) o.fail("K=1 M=1");
    return o;
}

Outcome counter_guard() {
    Outcome o;
    std::mt19937_64 rng(1010);
    const auto w = BitMatrix::random(32, 4, rng);
    const auto layer = custbinary_layout(w, {8, 32});
    // Input equal to weight vector 0: its popcount would be 32.
    const std::vector<BitVector> in{w.column(0)};
    try {
        const auto r = execute_layer(layer, in, {});
        o.fail("no error; dot[0] = " + std::to_string(r.dots[0][0].value));
    } catch (const ConfigError&) {
    }
    return o;
}

Outcome cli_determinism() {
    Outcome o;
    clitest::ScratchDir dir;
    if (clitest::run("gen --kind cnn --widths 8,8 --side 8 --count 24 --seed 11 --out-dir \"" + dir.path.string() + "\"") != 0) {
        o.fail("gen failed");
        return o;
    }
    const std::vector<std::string> designs{"--mapping tacit --backend epcm", "--mapping tacit --backend opcm",
                                           "--mapping custbinary --backend epcm"};
    for (std::size_t d = 0; d < designs.size(); ++d) {
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = dir / ("r" + std::to_string(d) + "_" + std::to_string(rep) + ".json");
            if (clitest::run("run " + dir.workload() + " " + designs[d] + " --seed 5 --out \"" + out + "\"") != 0)
                o.fail("run failed: " + designs[d]);
        }
        const auto a = dir / ("r" + std::to_string(d) + "_0.json"), b = dir / ("r" + std::to_string(d) + "_1.json");
        if (clitest::slurp(a).empty() || clitest::slurp(a) != clitest::slurp(b)) o.fail("report differs: " + designs[d]);
        if (clitest::slurp(a + ".predictions.csv").empty() ||
            clitest::slurp(a + ".predictions.csv") != clitest::slurp(b + ".predictions.csv"))
            o.fail("predictions differ: " + designs[d]);
    }
    return o;
}

Outcome guarded(const std::function<Outcome()>& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        Outcome o;
        o.fail(std::string("exception: ") + e.what());
        return o;
    }
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("%s criterion %d: %s%s%s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.empty() ? "" : " - ",
                    o.detail.c_str());
        if (!o.pass) ++failures;
    };

    report(1, "xnor-popcount dot equals the bipolar dot", guarded(eq1_oracle));
    report(2, "column-MAC identity", guarded(column_mac_identity));

    Outcome activations;
    const auto workloads = criterion3_workloads();
    report(3, "mapping equivalence across designs",
           guarded([&] { return mapping_equivalence(workloads, activations); }));
    report(4, "single tile, 32 weight vectors: 1 step vs 32", guarded(n_step_law));
    report(5, "4x3 tile, three activations: 3 ePCM steps, 1 oPCM step", guarded(fig5_scenario));
    report(6, "WDM step law", guarded(wdm_law));
    report(7, "receiver TIA power", guarded(eq2));
    report(8, "transmitter power", guarded(eq3));
    report(9, "oPCM activations per tile equal ceil(ePCM/K)", activations);
    report(10, "counter overflow is a configuration error", guarded(counter_guard));
    report(11, "repeated CLI runs are byte-identical", guarded(cli_determinism));

    std::printf("%d of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
