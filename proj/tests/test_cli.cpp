#include <doctest.h>

#include <json.hpp>

#include "cli_harness.hpp"

using clitest::run;
using clitest::slurp;

TEST_CASE("cli: gen, run, validate and exit codes") {
    clitest::ScratchDir dir;
    REQUIRE(run("gen --widths 24,20 --input-len 16 --count 20 --seed 7 --out-dir \"" + dir.path.string() + "\"") == 0);
    const auto w = dir.workload();

    SUBCASE("successful run writes report and predictions") {
        CHECK(run("run " + w + " --out \"" + (dir / "r.json") + "\"") == 0);
        const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
        CHECK(j.at("design") == "tacit-epcm");
        CHECK(slurp(dir / "r.json.predictions.csv").rfind("input,predicted,scores", 0) == 0);
    }
    SUBCASE("validate") {
        CHECK(run("validate " + w) == 0);
        CHECK(run("validate " + w + " --mapping custbinary") == 0);
        CHECK(run("validate " + w + " --inject-fault 1:0:0:0") == 1);
        CHECK(run("validate " + w + " --adc 1") == 1);
    }
    SUBCASE("configuration errors") {
        CHECK(run("run " + w + " --mapping custbinary --backend opcm") == 2);
        CHECK(run("run " + w + " --crossbar 1x4") == 2);
        CHECK(run("run " + w + " --mapping custbinary --crossbar 16x32") == 2);
        CHECK(run("run " + w + " --bogus") == 2);
    }
    SUBCASE("I/O and format errors") {
        CHECK(run("run --network \"" + (dir / "missing.json") + "\" --weights \"" + (dir / "weights.bin") +
                  "\" --inputs \"" + (dir / "inputs.bin") + "\"") == 3);
        CHECK(run("run --network \"" + (dir / "network.json") + "\" --weights \"" + (dir / "inputs.bin") +
                  "\" --inputs \"" + (dir / "inputs.bin") + "\"") == 3);
    }
}

TEST_CASE("cli: backends agree on predictions and compare normalizes") {
    clitest::ScratchDir dir;
    REQUIRE(run("gen --kind cnn --widths 4,6 --side 6 --count 12 --seed 9 --out-dir \"" + dir.path.string() + "\"") ==
            0);
    const auto w = dir.workload();
    REQUIRE(run("run " + w + " --out \"" + (dir / "e.json") + "\"") == 0);
    REQUIRE(run("run " + w + " --backend opcm --wdm-k 4 --out \"" + (dir / "o.json") + "\"") == 0);
    REQUIRE(run("run " + w + " --mapping custbinary --crossbar 16x16 --out \"" + (dir / "c.json") + "\"") == 0);
    const auto preds = slurp(dir / "e.json.predictions.csv");
    CHECK(preds == slurp(dir / "o.json.predictions.csv"));
    CHECK(preds == slurp(dir / "c.json.predictions.csv"));

    REQUIRE(run("compare \"" + (dir / "e.json") + "\" \"" + (dir / "o.json") + "\" \"" + (dir / "c.json") +
                "\" --baseline custbinary-epcm --out \"" + (dir / "cmp.json") + "\"") == 0);
    const auto t = nlohmann::json::parse(slurp(dir / "cmp.json"));
    CHECK(t.at("baseline") == "custbinary-epcm");
    CHECK(run("compare \"" + (dir / "e.json") + "\" --baseline nobody") == 2);
}

TEST_CASE("cli: compare refuses reports from different workloads") {
    clitest::ScratchDir a, b;
    REQUIRE(run("gen --seed 1 --out-dir \"" + a.path.string() + "\"") == 0);
    REQUIRE(run("gen --seed 2 --out-dir \"" + b.path.string() + "\"") == 0);
    REQUIRE(run("run " + a.workload() + " --out \"" + (a / "r.json") + "\"") == 0);
    REQUIRE(run("run " + b.workload() + " --backend opcm --out \"" + (b / "r.json") + "\"") == 0);
    CHECK(run("compare \"" + (a / "r.json") + "\" \"" + (b / "r.json") + "\" --baseline tacit-epcm") == 2);
}

TEST_CASE("cli: repeated runs are byte-identical") {
    clitest::ScratchDir dir;
    REQUIRE(run("gen --seed 4 --out-dir \"" + dir.path.string() + "\"") == 0);
    for (const char* fmt : {"json", "csv"}) {
        const std::string f(fmt);
        REQUIRE(run("run " + dir.workload() + " --backend opcm --format " + f + " --out \"" + (dir / ("1." + f)) + "\"") == 0);
        REQUIRE(run("run " + dir.workload() + " --backend opcm --format " + f + " --out \"" + (dir / ("2." + f)) + "\"") == 0);
        CHECK(slurp(dir / ("1." + f)) == slurp(dir / ("2." + f)));
        CHECK(slurp(dir / ("1." + f + ".predictions.csv")) == slurp(dir / ("2." + f + ".predictions.csv")));
    }
}

TEST_CASE("cli: a 32-neuron layer on one tile") {
    clitest::ScratchDir dir;
    // binary layer 16 -> 32, a single input
    REQUIRE(run("gen --input-len 8 --widths 16,32 --count 1 --out-dir \"" + dir.path.string() + "\"") == 0);
    REQUIRE(run("run " + dir.workload() + " --crossbar 32x32 --out \"" + (dir / "t.json") + "\"") == 0);
    REQUIRE(run("run " + dir.workload() + " --mapping custbinary --crossbar 32x16 --out \"" + (dir / "c.json") + "\"") ==
            0);
    CHECK(nlohmann::json::parse(slurp(dir / "t.json")).at("total_steps") == 1);
    CHECK(nlohmann::json::parse(slurp(dir / "c.json")).at("total_steps") == 32);
}
