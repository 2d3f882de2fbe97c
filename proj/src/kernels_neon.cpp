// NEON popcount kernels (AArch64): vcntq_u8 per byte, widened with pairwise adds.

#include "bnncim/kernels.hpp"

#include <bit>

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define BNNCIM_HAVE_NEON_KERNELS 1
#endif

namespace bnncim::kernels {

#if BNNCIM_HAVE_NEON_KERNELS

namespace {

template <typename Op>
std::uint64_t popcount_neon_impl(const Word* a, const Word* b, std::size_t words, Op op) {
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= words; i += 2) {
        const uint8x16_t x = vreinterpretq_u8_u64(op(vld1q_u64(a + i), vld1q_u64(b + i)));
        acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(x)))));
    }
    std::uint64_t n = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    for (; i < words; ++i) {
        const uint64x2_t x = op(vdupq_n_u64(a[i]), vdupq_n_u64(b[i]));
        n += static_cast<std::uint64_t>(std::popcount(vgetq_lane_u64(x, 0)));
    }
    return n;
}

std::uint64_t popcount_neon(const Word* a, std::size_t words) {
    return popcount_neon_impl(a, a, words, [](uint64x2_t x, uint64x2_t) { return x; });
}
std::uint64_t and_popcount_neon(const Word* a, const Word* b, std::size_t words) {
    return popcount_neon_impl(a, b, words, [](uint64x2_t x, uint64x2_t y) { return vandq_u64(x, y); });
}
std::uint64_t xor_popcount_neon(const Word* a, const Word* b, std::size_t words) {
    return popcount_neon_impl(a, b, words, [](uint64x2_t x, uint64x2_t y) { return veorq_u64(x, y); });
}

constexpr KernelTable kNeon{Isa::neon, popcount_neon, and_popcount_neon, xor_popcount_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeon; }

#else

const KernelTable* neon_table() noexcept { return nullptr; }

#endif

}  // namespace bnncim::kernels
