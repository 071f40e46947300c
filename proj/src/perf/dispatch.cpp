#include <cstdlib>
#include <string_view>

#include "trainer/perf/kernels.hpp"

namespace trainer::perf::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

}  // namespace

std::vector<const KernelSet*> available() {
    std::vector<const KernelSet*> out{&scalar()};
    if (const auto* k = avx2(); k && cpu_has_avx2()) out.push_back(k);
    // Advanced SIMD is mandatory on AArch64.
    if (const auto* k = neon()) out.push_back(k);
    return out;
}

const KernelSet& select(const char* requested) {
    const auto sets = available();
    if (requested) {
        for (const auto* k : sets) {
            if (std::string_view(requested) == k->name) return *k;
        }
    }
    return *sets.back();
}

const KernelSet& active() {
    static const KernelSet& chosen = select(std::getenv("TRAINER_SIMD"));
    return chosen;
}

}  // namespace trainer::perf::kernels
