#pragma once

#include <cstdint>
#include <span>
#include <string_view>

// Word-level popcount kernels behind every XNOR+Popcount and column-MAC in the
// simulator. A scalar reference and SIMD variants share one signature; the
// widest variant the CPU supports is picked on first use.

namespace bnncim::kernels {

using Word = std::uint64_t;

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    std::uint64_t (*popcount)(const Word* a, std::size_t words);
    std::uint64_t (*and_popcount)(const Word* a, const Word* b, std::size_t words);
    std::uint64_t (*xor_popcount)(const Word* a, const Word* b, std::size_t words);
};

// Reference implementations, always available.
const KernelTable& scalar_table() noexcept;

// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

bool isa_supported(Isa isa) noexcept;

// Active table. Defaults to the best supported ISA; BNNCIM_ISA=scalar|avx2|neon
// in the environment overrides the default.
const KernelTable& active() noexcept;
Isa active_isa() noexcept;

// Returns false (and changes nothing) when the ISA is unsupported.
bool force_isa(Isa isa) noexcept;
void reset_isa() noexcept;

inline std::uint64_t popcount(std::span<const Word> a) noexcept {
    return active().popcount(a.data(), a.size());
}

// popcount(a & b) over min(|a|,|b|) words.
inline std::uint64_t and_popcount(std::span<const Word> a, std::span<const Word> b) noexcept {
    return active().and_popcount(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline std::uint64_t xor_popcount(std::span<const Word> a, std::span<const Word> b) noexcept {
    return active().xor_popcount(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace bnncim::kernels
