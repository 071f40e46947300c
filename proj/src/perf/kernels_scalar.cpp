#include <algorithm>
#include <cmath>

#include "trainer/perf/kernels.hpp"

namespace trainer::perf::kernels {

namespace {

void quantize_scalar(std::span<const double> in, std::span<double> out, double period) {
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double t = in[i];
        out[i] = std::max(t, period * std::ceil(t / period));
    }
}

Moments moments_scalar(std::span<const double> in) {
    Moments m;
    for (double t : in) {
        m.sum += t;
        m.max = std::max(m.max, t);
        m.sum_reciprocal += 1000.0 / t;
    }
    return m;
}

}  // namespace

const KernelSet& scalar() noexcept {
    static constexpr KernelSet set{"scalar", quantize_scalar, moments_scalar};
    return set;
}

}  // namespace trainer::perf::kernels
