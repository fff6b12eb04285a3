#include "lyo/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace lyo::kernels {

__attribute__((target("avx2"))) void stencil_avx2(const double* Tpad, std::size_t n,
                                                   const StencilParams& p, double* out) {
    const __m256d diff = _mm256_set1_pd(p.diff);
    const __m256d adv = _mm256_set1_pd(p.adv);
    const __m256d dxi = _mm256_set1_pd(p.dxi);
    const __m256d rad = _mm256_set1_pd(p.rad);
    const __m256d tc4 = _mm256_set1_pd(p.Tc4);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d four = _mm256_set1_pd(4.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d tm = _mm256_loadu_pd(Tpad + j);
        const __m256d t = _mm256_loadu_pd(Tpad + j + 1);
        const __m256d tp = _mm256_loadu_pd(Tpad + j + 2);
        const __m256d xi1 = _mm256_sub_pd(_mm256_mul_pd(idx, dxi), one);
        const __m256d t2 = _mm256_mul_pd(t, t);
        const __m256d lap = _mm256_add_pd(_mm256_sub_pd(tp, _mm256_add_pd(t, t)), tm);
        const __m256d conv = _mm256_mul_pd(adv, _mm256_mul_pd(xi1, _mm256_sub_pd(tp, tm)));
        const __m256d src = _mm256_mul_pd(rad, _mm256_sub_pd(tc4, _mm256_mul_pd(t2, t2)));
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(diff, lap), conv), src));
        idx = _mm256_add_pd(idx, four);
    }
    stencil_scalar_rows(Tpad, j, n, p, out);
}

}  // namespace lyo::kernels
#endif
