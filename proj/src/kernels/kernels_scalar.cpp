#include "locallaw/kernels.hpp"

#include <cmath>

namespace locallaw::kernels::scalar {

void add_scaled(const double* x, double a, double* acc, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) acc[k] += a * x[k];
}

void add_scaled_complex(const double* x, double wr, double wi, double* acc_re, double* acc_im,
                        std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        acc_re[k] += wr * x[k];
        acc_im[k] += wi * x[k];
    }
}

void add_modulus(const double* re, const double* im, double* acc, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) acc[k] += std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

double max_modulus_sq(const double* re, const double* im, std::size_t n) {
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = re[k] * re[k] + im[k] * im[k];
        if (v > best) best = v;
    }
    return best;
}

ComplexSum weighted_product_sum(const double* a, const double* b, const double* wr,
                                const double* wi, std::size_t n) {
    ComplexSum s;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = a[k] * b[k];
        s.re += p * wr[k];
        s.im += p * wi[k];
    }
    return s;
}

}  // namespace locallaw::kernels::scalar
