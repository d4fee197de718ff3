#include "femsyn/kernels.hpp"

#if FEMSYN_HAVE_AVX2_KERNELS

#include <immintrin.h>

#define FEMSYN_AVX2 __attribute__((target("avx2")))

namespace femsyn::kernels::avx2 {

namespace {

// 32 comparison bits -> 32 byte lanes of 0x00/0xFF.
FEMSYN_AVX2 inline __m256i expand_bits(std::uint32_t bits) {
    const __m256i v = _mm256_set1_epi32(static_cast<int>(bits));
    const __m256i shuffle = _mm256_setr_epi64x(0x0000000000000000, 0x0101010101010101,
                                               0x0202020202020202, 0x0303030303030303);
    const __m256i bytes = _mm256_shuffle_epi8(v, shuffle);
    const __m256i select = _mm256_set1_epi64x(static_cast<long long>(0x8040201008040201ULL));
    return _mm256_cmpeq_epi8(_mm256_and_si256(bytes, select), select);
}

FEMSYN_AVX2 inline std::uint32_t le_mask4(const double* p, __m256d cut) {
    return static_cast<std::uint32_t>(
        _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(p), cut, _CMP_LE_OQ)));
}

}  // namespace

FEMSYN_AVX2 void switch_below(std::span<const double> log_threshold,
                              std::span<std::uint8_t> state, double cut,
                              std::uint8_t target) {
    const std::size_t n = log_threshold.size();
    const double* x = log_threshold.data();
    std::uint8_t* s = state.data();
    const __m256d vcut = _mm256_set1_pd(cut);
    const __m256i vtarget = _mm256_set1_epi8(static_cast<char>(target));

    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        std::uint32_t bits = 0;
        for (int j = 0; j < 8; ++j) bits |= le_mask4(x + i + 4 * j, vcut) << (4 * j);
        if (bits == 0) continue;
        auto* dst = reinterpret_cast<__m256i*>(s + i);
        const __m256i cur = _mm256_loadu_si256(dst);
        _mm256_storeu_si256(dst, _mm256_blendv_epi8(cur, vtarget, expand_bits(bits)));
    }
    for (; i < n; ++i) {
        if (x[i] <= cut) s[i] = target;
    }
}

FEMSYN_AVX2 std::size_t count_set(std::span<const std::uint8_t> state) {
    const std::size_t n = state.size();
    const std::uint8_t* s = state.data();
    __m256i acc = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::size_t count = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) count += s[i];
    return count;
}

}  // namespace femsyn::kernels::avx2

#endif
