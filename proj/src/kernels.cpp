#include "bnncim/kernels.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>

namespace bnncim::kernels {

namespace {

std::uint64_t popcount_scalar(const Word* a, std::size_t words) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < words; ++i) n += static_cast<std::uint64_t>(std::popcount(a[i]));
    return n;
}

std::uint64_t and_popcount_scalar(const Word* a, const Word* b, std::size_t words) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < words; ++i) n += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    return n;
}

std::uint64_t xor_popcount_scalar(const Word* a, const Word* b, std::size_t words) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < words; ++i) n += static_cast<std::uint64_t>(std::popcount(a[i] ^ b[i]));
    return n;
}

constexpr KernelTable kScalar{Isa::scalar, popcount_scalar, and_popcount_scalar, xor_popcount_scalar};

const KernelTable* best_table() noexcept {
    if (const char* env = std::getenv("BNNCIM_ISA")) {
        if (std::strcmp(env, "scalar") == 0) return &kScalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_table()) return avx2_table();
        if (std::strcmp(env, "neon") == 0 && neon_table()) return neon_table();
    }
    if (const auto* t = avx2_table()) return t;
    if (const auto* t = neon_table()) return t;
    return &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable& scalar_table() noexcept { return kScalar; }

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return avx2_table() != nullptr;
        case Isa::neon: return neon_table() != nullptr;
    }
    return false;
}

const KernelTable& active() noexcept {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = best_table();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

Isa active_isa() noexcept { return active().isa; }

bool force_isa(Isa isa) noexcept {
    const KernelTable* t = nullptr;
    switch (isa) {
        case Isa::scalar: t = &kScalar; break;
        case Isa::avx2: t = avx2_table(); break;
        case Isa::neon: t = neon_table(); break;
    }
    if (t == nullptr) return false;
    g_active.store(t, std::memory_order_release);
    return true;
}

void reset_isa() noexcept { g_active.store(best_table(), std::memory_order_release); }

}  // namespace bnncim::kernels
