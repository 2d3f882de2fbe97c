// AVX2 popcount kernels: nibble lookup through vpshufb, byte counts folded
// with vpsadbw. Compiled with per-function target attributes so the rest of
// the library keeps the baseline ISA.

#include "bnncim/kernels.hpp"

#include <bit>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define BNNCIM_HAVE_AVX2_KERNELS 1
#endif

namespace bnncim::kernels {

#if BNNCIM_HAVE_AVX2_KERNELS

namespace {

__attribute__((target("avx2"))) inline __m256i popcount_bytes(__m256i v) {
    const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                            0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

__attribute__((target("avx2"))) inline std::uint64_t hsum_epi64(__m256i acc) {
    const __m128i s = _mm_add_epi64(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(s)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

// Op combines the two operands before counting; Unary ignores the second one.
template <typename Op>
__attribute__((target("avx2"))) inline std::uint64_t popcount_avx2_impl(const Word* a, const Word* b,
                                                                         std::size_t words, Op op) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc = zero;
    std::size_t i = 0;
    for (; i + 8 <= words; i += 8) {
        const __m256i x0 = op(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)),
                              _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)));
        const __m256i x1 = op(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i + 4)),
                              _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i + 4)));
        // Each byte count is at most 8, so two can be added without overflow.
        const __m256i c = _mm256_add_epi8(popcount_bytes(x0), popcount_bytes(x1));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(c, zero));
    }
    for (; i + 4 <= words; i += 4) {
        const __m256i x = op(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)),
                             _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(x), zero));
    }
    std::uint64_t n = hsum_epi64(acc);
    for (; i < words; ++i) {
        n += static_cast<std::uint64_t>(std::popcount(op(a[i], b[i])));
    }
    return n;
}

struct TakeFirst {
    __attribute__((target("avx2"))) __m256i operator()(__m256i x, __m256i) const { return x; }
    Word operator()(Word x, Word) const { return x; }
};
struct And {
    __attribute__((target("avx2"))) __m256i operator()(__m256i x, __m256i y) const {
        return _mm256_and_si256(x, y);
    }
    Word operator()(Word x, Word y) const { return x & y; }
};
struct Xor {
    __attribute__((target("avx2"))) __m256i operator()(__m256i x, __m256i y) const {
        return _mm256_xor_si256(x, y);
    }
    Word operator()(Word x, Word y) const { return x ^ y; }
};

__attribute__((target("avx2"))) std::uint64_t popcount_avx2(const Word* a, std::size_t words) {
    return popcount_avx2_impl(a, a, words, TakeFirst{});
}
__attribute__((target("avx2"))) std::uint64_t and_popcount_avx2(const Word* a, const Word* b,
                                                                std::size_t words) {
    return popcount_avx2_impl(a, b, words, And{});
}
__attribute__((target("avx2"))) std::uint64_t xor_popcount_avx2(const Word* a, const Word* b,
                                                                std::size_t words) {
    return popcount_avx2_impl(a, b, words, Xor{});
}

constexpr KernelTable kAvx2{Isa::avx2, popcount_avx2, and_popcount_avx2, xor_popcount_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_table() noexcept { return nullptr; }

#endif

}  // namespace bnncim::kernels
