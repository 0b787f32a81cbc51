#include <cstdlib>
#include <stdexcept>
#include <string>

#include "locallaw/kernels.hpp"

namespace locallaw::kernels {

namespace {

struct Table {
    Isa isa;
    void (*add_scaled)(const double*, double, double*, std::size_t);
    void (*add_scaled_complex)(const double*, double, double, double*, double*, std::size_t);
    void (*add_modulus)(const double*, const double*, double*, std::size_t);
    double (*max_modulus_sq)(const double*, const double*, std::size_t);
    ComplexSum (*weighted_product_sum)(const double*, const double*, const double*,
                                       const double*, std::size_t);
};

constexpr Table kScalar{Isa::scalar, scalar::add_scaled, scalar::add_scaled_complex,
                        scalar::add_modulus, scalar::max_modulus_sq,
                        scalar::weighted_product_sum};
#if defined(LOCALLAW_HAVE_AVX2)
constexpr Table kAvx2{Isa::avx2, avx2::add_scaled, avx2::add_scaled_complex, avx2::add_modulus,
                      avx2::max_modulus_sq, avx2::weighted_product_sum};
#endif

bool cpu_has_avx2() {
#if defined(LOCALLAW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Table* select_table() {
    if (const char* env = std::getenv("LOCALLAW_SIMD"); env != nullptr && std::string(env) == "scalar") {
        return &kScalar;
    }
#if defined(LOCALLAW_HAVE_AVX2)
    if (cpu_has_avx2()) return &kAvx2;
#endif
    return &kScalar;
}

const Table*& table() {
    static const Table* active = select_table();
    return active;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": span sizes differ");
}

}  // namespace

void add_scaled(std::span<const double> x, double a, std::span<double> acc) {
    require_same_size(x.size(), acc.size(), "add_scaled");
    table()->add_scaled(x.data(), a, acc.data(), x.size());
}

void add_scaled_complex(std::span<const double> x, double wr, double wi,
                        std::span<double> acc_re, std::span<double> acc_im) {
    require_same_size(x.size(), acc_re.size(), "add_scaled_complex");
    require_same_size(x.size(), acc_im.size(), "add_scaled_complex");
    table()->add_scaled_complex(x.data(), wr, wi, acc_re.data(), acc_im.data(), x.size());
}

void add_modulus(std::span<const double> re, std::span<const double> im, std::span<double> acc) {
    require_same_size(re.size(), im.size(), "add_modulus");
    require_same_size(re.size(), acc.size(), "add_modulus");
    table()->add_modulus(re.data(), im.data(), acc.data(), re.size());
}

double max_modulus_sq(std::span<const double> re, std::span<const double> im) {
    require_same_size(re.size(), im.size(), "max_modulus_sq");
    return table()->max_modulus_sq(re.data(), im.data(), re.size());
}

ComplexSum weighted_product_sum(std::span<const double> a, std::span<const double> b,
                                std::span<const double> wr, std::span<const double> wi) {
    require_same_size(a.size(), b.size(), "weighted_product_sum");
    require_same_size(a.size(), wr.size(), "weighted_product_sum");
    require_same_size(a.size(), wi.size(), "weighted_product_sum");
    return table()->weighted_product_sum(a.data(), b.data(), wr.data(), wi.data(), a.size());
}

Isa active_isa() { return table()->isa; }

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return cpu_has_avx2();
    }
    return false;
}

void force_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument("force_isa: " + std::string(isa_name(isa)) + " not available");
    }
#if defined(LOCALLAW_HAVE_AVX2)
    table() = isa == Isa::avx2 ? &kAvx2 : &kScalar;
#else
    table() = &kScalar;
#endif
}

}  // namespace locallaw::kernels
