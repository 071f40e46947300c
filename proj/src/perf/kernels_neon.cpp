#include <algorithm>
#include <cmath>

#include "trainer/perf/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace trainer::perf::kernels {

namespace {

void quantize_neon(std::span<const double> in, std::span<double> out, double period) {
    const float64x2_t p = vdupq_n_f64(period);
    std::size_t i = 0;
    for (; i + 2 <= in.size(); i += 2) {
        const float64x2_t t = vld1q_f64(in.data() + i);
        const float64x2_t k = vrndpq_f64(vdivq_f64(t, p));
        vst1q_f64(out.data() + i, vmaxq_f64(t, vmulq_f64(p, k)));
    }
    for (; i < in.size(); ++i) {
        const double t = in[i];
        out[i] = std::max(t, period * std::ceil(t / period));
    }
}

Moments moments_neon(std::span<const double> in) {
    const float64x2_t thousand = vdupq_n_f64(1000.0);
    float64x2_t sum = vdupq_n_f64(0.0);
    float64x2_t max = vdupq_n_f64(0.0);
    float64x2_t rec = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= in.size(); i += 2) {
        const float64x2_t t = vld1q_f64(in.data() + i);
        sum = vaddq_f64(sum, t);
        max = vmaxq_f64(max, t);
        rec = vaddq_f64(rec, vdivq_f64(thousand, t));
    }
    Moments m{vaddvq_f64(sum), vmaxvq_f64(max), vaddvq_f64(rec)};
    for (; i < in.size(); ++i) {
        const double t = in[i];
        m.sum += t;
        m.max = std::max(m.max, t);
        m.sum_reciprocal += 1000.0 / t;
    }
    return m;
}

}  // namespace

const KernelSet* neon() noexcept {
    static constexpr KernelSet set{"neon", quantize_neon, moments_neon};
    return &set;
}

}  // namespace trainer::perf::kernels

#else

namespace trainer::perf::kernels {
const KernelSet* neon() noexcept { return nullptr; }
}  // namespace trainer::perf::kernels

#endif
