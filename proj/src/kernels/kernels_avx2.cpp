#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "locallaw/kernels.hpp"

// Multiplies and adds are kept separate (no _mm256_fmadd_pd) so that the
// elementwise kernels round exactly like the scalar reference.

namespace locallaw::kernels::avx2 {

void add_scaled(const double* x, double a, double* acc, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d vx = _mm256_loadu_pd(x + k);
        const __m256d vacc = _mm256_loadu_pd(acc + k);
        _mm256_storeu_pd(acc + k, _mm256_add_pd(vacc, _mm256_mul_pd(va, vx)));
    }
    for (; k < n; ++k) acc[k] += a * x[k];
}

void add_scaled_complex(const double* x, double wr, double wi, double* acc_re, double* acc_im,
                        std::size_t n) {
    const __m256d vr = _mm256_set1_pd(wr);
    const __m256d vi = _mm256_set1_pd(wi);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d vx = _mm256_loadu_pd(x + k);
        _mm256_storeu_pd(acc_re + k, _mm256_add_pd(_mm256_loadu_pd(acc_re + k), _mm256_mul_pd(vr, vx)));
        _mm256_storeu_pd(acc_im + k, _mm256_add_pd(_mm256_loadu_pd(acc_im + k), _mm256_mul_pd(vi, vx)));
    }
    for (; k < n; ++k) {
        acc_re[k] += wr * x[k];
        acc_im[k] += wi * x[k];
    }
}

void add_modulus(const double* re, const double* im, double* acc, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d r = _mm256_loadu_pd(re + k);
        const __m256d i = _mm256_loadu_pd(im + k);
        const __m256d mod = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(i, i)));
        _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), mod));
    }
    for (; k < n; ++k) acc[k] += std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

double max_modulus_sq(const double* re, const double* im, std::size_t n) {
    __m256d best = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d r = _mm256_loadu_pd(re + k);
        const __m256d i = _mm256_loadu_pd(im + k);
        best = _mm256_max_pd(best, _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(i, i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; k < n; ++k) {
        const double v = re[k] * re[k] + im[k] * im[k];
        if (v > out) out = v;
    }
    return out;
}

ComplexSum weighted_product_sum(const double* a, const double* b, const double* wr,
                                const double* wi, std::size_t n) {
    __m256d sr = _mm256_setzero_pd();
    __m256d si = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        sr = _mm256_add_pd(sr, _mm256_mul_pd(p, _mm256_loadu_pd(wr + k)));
        si = _mm256_add_pd(si, _mm256_mul_pd(p, _mm256_loadu_pd(wi + k)));
    }
    alignas(32) double lr[4];
    alignas(32) double li[4];
    _mm256_store_pd(lr, sr);
    _mm256_store_pd(li, si);
    ComplexSum s{(lr[0] + lr[1]) + (lr[2] + lr[3]), (li[0] + li[1]) + (li[2] + li[3])};
    for (; k < n; ++k) {
        const double p = a[k] * b[k];
        s.re += p * wr[k];
        s.im += p * wi[k];
    }
    return s;
}

}  // namespace locallaw::kernels::avx2
