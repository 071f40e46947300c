#pragma once

// Frame-trace inner loops. Every variant must match the scalar reference:
// quantize bit-exactly, moments within reduction-order rounding.

#include <span>
#include <vector>

namespace trainer::perf::kernels {

struct Moments {
    double sum = 0.0;             // sum of t
    double max = 0.0;             // max of t
    double sum_reciprocal = 0.0;  // sum of 1000 / t
};

using QuantizeFn = void (*)(std::span<const double> in, std::span<double> out, double period);
using MomentsFn = Moments (*)(std::span<const double> in);

struct KernelSet {
    const char* name;
    /// out[i] = max(in[i], period * ceil(in[i] / period)); period > 0.
    QuantizeFn quantize;
    MomentsFn moments;
};

const KernelSet& scalar() noexcept;
/// nullptr when the variant was not compiled in.
const KernelSet* avx2() noexcept;
const KernelSet* neon() noexcept;

/// Compiled-in variants the running CPU supports, scalar first.
std::vector<const KernelSet*> available();

/// The named variant when supported, else the best one. nullptr/unknown names pick the best.
const KernelSet& select(const char* requested);

/// select(TRAINER_SIMD), resolved once per process.
const KernelSet& active();

}  // namespace trainer::perf::kernels
