#include <atomic>
#include <stdexcept>
#include <string>

#include "lyo/kernels.hpp"

namespace lyo::kernels {

namespace {

Isa detect() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
#if defined(__aarch64__)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

std::atomic<int> g_forced{-1};

StencilFn resolve(Isa isa) {
    switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
        case Isa::Avx2: return stencil_avx2;
#endif
#if defined(__aarch64__)
        case Isa::Neon: return stencil_neon;
#endif
        default: return stencil_scalar;
    }
}

}  // namespace

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

Isa active_isa() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    static const Isa best = detect();
    return best;
}

void force_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument(std::string("force_isa: ") + isa_name(isa) +
                                    " is not available on this CPU");
    }
    g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

void stencil(const double* Tpad, std::size_t n, const StencilParams& p, double* out) {
    resolve(active_isa())(Tpad, n, p, out);
}

}  // namespace lyo::kernels
