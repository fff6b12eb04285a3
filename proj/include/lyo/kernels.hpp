#pragma once

// Method-of-lines row kernel shared by both drying stages.
//
// For interior node j (0-based, n nodes, xi_j = j*dxi) with the padded array
// Tp[0..n+1] holding the two ghost values at its ends:
//
//   out_j = diff*(T_{j+1} - 2 T_j + T_{j-1})
//         - adv*(xi_j - 1)*(T_{j+1} - T_{j-1})
//         + rad*(Tc4 - T_j^4)
//
// Every variant performs the same operations in the same order without fused
// multiply-add, so results agree to the last bit on IEEE hardware.

#include <cstddef>

namespace lyo::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct StencilParams {
    double diff = 0.0;
    double adv = 0.0;
    double dxi = 0.0;
    double rad = 0.0;
    double Tc4 = 0.0;
};

using StencilFn = void (*)(const double* Tpad, std::size_t n, const StencilParams& p, double* out);

void stencil_scalar(const double* Tpad, std::size_t n, const StencilParams& p, double* out);
// Rows [begin, n) only; vector variants use it for their remainder.
void stencil_scalar_rows(const double* Tpad, std::size_t begin, std::size_t n,
                         const StencilParams& p, double* out);
#if defined(__x86_64__) || defined(__i386__)
void stencil_avx2(const double* Tpad, std::size_t n, const StencilParams& p, double* out);
#endif
#if defined(__aarch64__)
void stencil_neon(const double* Tpad, std::size_t n, const StencilParams& p, double* out);
#endif

bool isa_available(Isa isa);
const char* isa_name(Isa isa);

// Best available variant unless one was forced.
Isa active_isa();
// Pins the dispatcher to one variant (throws std::invalid_argument if this CPU
// lacks it). Intended for tests and benchmarking.
void force_isa(Isa isa);
void reset_isa();

void stencil(const double* Tpad, std::size_t n, const StencilParams& p, double* out);

}  // namespace lyo::kernels
