#include "lyo/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace lyo::kernels {

void stencil_neon(const double* Tpad, std::size_t n, const StencilParams& p, double* out) {
    const float64x2_t diff = vdupq_n_f64(p.diff);
    const float64x2_t adv = vdupq_n_f64(p.adv);
    const float64x2_t dxi = vdupq_n_f64(p.dxi);
    const float64x2_t rad = vdupq_n_f64(p.rad);
    const float64x2_t tc4 = vdupq_n_f64(p.Tc4);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t two = vdupq_n_f64(2.0);
    const double base[2] = {0.0, 1.0};
    float64x2_t idx = vld1q_f64(base);

    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t tm = vld1q_f64(Tpad + j);
        const float64x2_t t = vld1q_f64(Tpad + j + 1);
        const float64x2_t tp = vld1q_f64(Tpad + j + 2);
        // vmulq/vsubq separately: vfmaq would change rounding.
        const float64x2_t xi1 = vsubq_f64(vmulq_f64(idx, dxi), one);
        const float64x2_t t2 = vmulq_f64(t, t);
        const float64x2_t lap = vaddq_f64(vsubq_f64(tp, vaddq_f64(t, t)), tm);
        const float64x2_t conv = vmulq_f64(adv, vmulq_f64(xi1, vsubq_f64(tp, tm)));
        const float64x2_t src = vmulq_f64(rad, vsubq_f64(tc4, vmulq_f64(t2, t2)));
        vst1q_f64(out + j, vaddq_f64(vsubq_f64(vmulq_f64(diff, lap), conv), src));
        idx = vaddq_f64(idx, two);
    }
    stencil_scalar_rows(Tpad, j, n, p, out);
}

}  // namespace lyo::kernels
#endif
