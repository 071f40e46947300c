// Built with -mavx2 on x86-64; selected only when the CPU reports AVX2.

#include <algorithm>
#include <cmath>

#include "trainer/perf/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace trainer::perf::kernels {

namespace {

void quantize_avx2(std::span<const double> in, std::span<double> out, double period) {
    const __m256d p = _mm256_set1_pd(period);
    std::size_t i = 0;
    for (; i + 4 <= in.size(); i += 4) {
        const __m256d t = _mm256_loadu_pd(in.data() + i);
        const __m256d k = _mm256_round_pd(_mm256_div_pd(t, p), _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC);
        _mm256_storeu_pd(out.data() + i, _mm256_max_pd(t, _mm256_mul_pd(p, k)));
    }
    for (; i < in.size(); ++i) {
        const double t = in[i];
        out[i] = std::max(t, period * std::ceil(t / period));
    }
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

Moments moments_avx2(std::span<const double> in) {
    const __m256d thousand = _mm256_set1_pd(1000.0);
    __m256d sum = _mm256_setzero_pd();
    __m256d max = _mm256_setzero_pd();
    __m256d rec = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= in.size(); i += 4) {
        const __m256d t = _mm256_loadu_pd(in.data() + i);
        sum = _mm256_add_pd(sum, t);
        max = _mm256_max_pd(max, t);
        rec = _mm256_add_pd(rec, _mm256_div_pd(thousand, t));
    }
    Moments m{hsum(sum), hmax(max), hsum(rec)};
    for (; i < in.size(); ++i) {
        const double t = in[i];
        m.sum += t;
        m.max = std::max(m.max, t);
        m.sum_reciprocal += 1000.0 / t;
    }
    return m;
}

}  // namespace

const KernelSet* avx2() noexcept {
    static constexpr KernelSet set{"avx2", quantize_avx2, moments_avx2};
    return &set;
}

}  // namespace trainer::perf::kernels

#else

namespace trainer::perf::kernels {
const KernelSet* avx2() noexcept { return nullptr; }
}  // namespace trainer::perf::kernels

#endif
