#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "locallaw/kernels.hpp"

using namespace locallaw::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::bit_cast<std::uint64_t>(a[k]) != std::bit_cast<std::uint64_t>(b[k])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("dispatch reports a usable isa") {
    CHECK(isa_available(Isa::scalar));
    CHECK(isa_name(Isa::scalar) == "scalar");
    const Isa before = active_isa();
    force_isa(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    std::vector<double> x{1, 2, 3}, acc{1, 1, 1};
    add_scaled(x, 2.0, acc);
    CHECK(acc == std::vector<double>{3, 5, 7});
    force_isa(before);
    CHECK(active_isa() == before);
}

#if defined(LOCALLAW_HAVE_AVX2)
TEST_CASE("avx2 kernels match the scalar reference") {
    if (!isa_available(Isa::avx2)) {
        MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(42);
    // Lengths straddle the vector width and the unrolled tail; offsets misalign the data.
    for (std::size_t n = 0; n <= 70; ++n) {
        for (std::size_t offset : {0u, 1u, 3u}) {
            CAPTURE(n);
            CAPTURE(offset);
            const auto xs = random_vector(rng, n + offset);
            const auto ys = random_vector(rng, n + offset);
            const auto wr = random_vector(rng, n + offset);
            const auto wi = random_vector(rng, n + offset);
            const double* x = xs.data() + offset;
            const double* y = ys.data() + offset;

            auto acc_s = random_vector(rng, n);
            auto acc_v = acc_s;
            scalar::add_scaled(x, -1.75, acc_s.data(), n);
            avx2::add_scaled(x, -1.75, acc_v.data(), n);
            CHECK(bitwise_equal(acc_s, acc_v));

            auto re_s = random_vector(rng, n), im_s = random_vector(rng, n);
            auto re_v = re_s, im_v = im_s;
            scalar::add_scaled_complex(x, 0.3, -2.5, re_s.data(), im_s.data(), n);
            avx2::add_scaled_complex(x, 0.3, -2.5, re_v.data(), im_v.data(), n);
            CHECK(bitwise_equal(re_s, re_v));
            CHECK(bitwise_equal(im_s, im_v));

            auto mod_s = random_vector(rng, n);
            auto mod_v = mod_s;
            scalar::add_modulus(x, y, mod_s.data(), n);
            avx2::add_modulus(x, y, mod_v.data(), n);
            CHECK(bitwise_equal(mod_s, mod_v));

            CHECK(std::bit_cast<std::uint64_t>(scalar::max_modulus_sq(x, y, n)) ==
                  std::bit_cast<std::uint64_t>(avx2::max_modulus_sq(x, y, n)));

            const ComplexSum s = scalar::weighted_product_sum(x, y, wr.data() + offset, wi.data() + offset, n);
            const ComplexSum v = avx2::weighted_product_sum(x, y, wr.data() + offset, wi.data() + offset, n);
            double scale = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                scale += std::abs(x[k] * y[k]) * (std::abs(wr[offset + k]) + std::abs(wi[offset + k]));
            }
            CHECK(std::abs(s.re - v.re) <= 1e-14 * scale);
            CHECK(std::abs(s.im - v.im) <= 1e-14 * scale);
        }
    }
}

TEST_CASE("max_modulus_sq handles special values") {
    if (!isa_available(Isa::avx2)) return;
    std::vector<double> re(9, 0.0), im(9, 0.0);
    CHECK(avx2::max_modulus_sq(re.data(), im.data(), 9) == 0.0);
    re[8] = 3.0;
    im[8] = 4.0;
    CHECK(avx2::max_modulus_sq(re.data(), im.data(), 9) == 25.0);
    CHECK(scalar::max_modulus_sq(re.data(), im.data(), 0) == 0.0);
    CHECK(avx2::max_modulus_sq(re.data(), im.data(), 0) == 0.0);
}
#endif

TEST_CASE("span api rejects mismatched lengths") {
    std::vector<double> x(4, 1.0), acc(3, 0.0);
    CHECK_THROWS_AS(add_scaled(x, 1.0, acc), std::invalid_argument);
}
