#include "lyo/kernels.hpp"

namespace lyo::kernels {

void stencil_scalar_rows(const double* Tpad, std::size_t begin, std::size_t n,
                         const StencilParams& p, double* out) {
    for (std::size_t j = begin; j < n; ++j) {
        const double tm = Tpad[j];
        const double t = Tpad[j + 1];
        const double tp = Tpad[j + 2];
        const double xi1 = static_cast<double>(j) * p.dxi - 1.0;
        const double t2 = t * t;
        const double lap = (tp - (t + t)) + tm;
        out[j] = (p.diff * lap - p.adv * (xi1 * (tp - tm))) + p.rad * (p.Tc4 - t2 * t2);
    }
}

void stencil_scalar(const double* Tpad, std::size_t n, const StencilParams& p, double* out) {
    stencil_scalar_rows(Tpad, 0, n, p, out);
}

}  // namespace lyo::kernels
