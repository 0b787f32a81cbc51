#pragma once

// Data-parallel inner loops used by the resolvent and verification code.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant compiled in its own translation unit. The active variant is
// chosen once at startup from CPUID; setting LOCALLAW_SIMD=scalar forces the
// reference path. Elementwise kernels and max-reductions are bitwise identical
// across variants (no FMA contraction); sum-reductions agree to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace locallaw::kernels {

enum class Isa { scalar, avx2 };

/// acc[k] += a * x[k]
void add_scaled(std::span<const double> x, double a, std::span<double> acc);

/// acc_re[k] += wr * x[k];  acc_im[k] += wi * x[k]
void add_scaled_complex(std::span<const double> x, double wr, double wi,
                        std::span<double> acc_re, std::span<double> acc_im);

/// acc[k] += |re[k] + i im[k]|
void add_modulus(std::span<const double> re, std::span<const double> im,
                 std::span<double> acc);

/// max_k (re[k]^2 + im[k]^2); 0 for empty input.
double max_modulus_sq(std::span<const double> re, std::span<const double> im);

/// sum_k a[k] * b[k] * (wr[k] + i wi[k]), returned as {re, im}.
struct ComplexSum {
    double re = 0.0;
    double im = 0.0;
};
ComplexSum weighted_product_sum(std::span<const double> a, std::span<const double> b,
                                std::span<const double> wr, std::span<const double> wi);

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

/// Overrides runtime selection. Throws std::invalid_argument when the
/// requested ISA is not available on this CPU.
void force_isa(Isa isa);

// Direct entry points for equivalence tests.
namespace scalar {
void add_scaled(const double* x, double a, double* acc, std::size_t n);
void add_scaled_complex(const double* x, double wr, double wi, double* acc_re, double* acc_im,
                        std::size_t n);
void add_modulus(const double* re, const double* im, double* acc, std::size_t n);
double max_modulus_sq(const double* re, const double* im, std::size_t n);
ComplexSum weighted_product_sum(const double* a, const double* b, const double* wr,
                                const double* wi, std::size_t n);
}  // namespace scalar

#if defined(LOCALLAW_HAVE_AVX2)
namespace avx2 {
void add_scaled(const double* x, double a, double* acc, std::size_t n);
void add_scaled_complex(const double* x, double wr, double wi, double* acc_re, double* acc_im,
                        std::size_t n);
void add_modulus(const double* re, const double* im, double* acc, std::size_t n);
double max_modulus_sq(const double* re, const double* im, std::size_t n);
ComplexSum weighted_product_sum(const double* a, const double* b, const double* wr,
                                const double* wi, std::size_t n);
}  // namespace avx2
#endif

}  // namespace locallaw::kernels
