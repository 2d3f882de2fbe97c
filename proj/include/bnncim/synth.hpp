#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnncim/io.hpp"

namespace bnncim::synth {

enum class NetKind { mlp, cnn };

// Seeded stand-in workloads. An MLP is
//   full dense(input -> widths[0]), binary dense(widths[i] -> widths[i+1]),
//   full dense(widths.back() -> classes).
// A CNN uses 3x3/pad-1 convolutions with `widths` as channel counts on an
// input_channels x side x side image, then a full dense classifier.
struct WorkloadSpec {
    NetKind kind = NetKind::mlp;
    std::string name = "synthetic";
    std::size_t input_len = 64;  // MLP input length
    std::size_t input_channels = 1;
    std::size_t side = 8;        // CNN input height and width
    std::vector<std::size_t> widths{32, 32};
    std::size_t classes = 10;
    std::size_t input_count = 8;
    std::uint64_t seed = 1;
};

struct Workload {
    io::NamedNetwork network;
    io::InputSet inputs;
};

Workload generate(const WorkloadSpec& spec);

}  // namespace bnncim::synth
