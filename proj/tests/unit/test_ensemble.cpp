#include <doctest.h>

#include <cmath>

#include "locallaw/ensemble.hpp"

using namespace locallaw;

namespace {

EnsembleConfig make_config(Distribution d, SymmetryClass c, std::uint64_t seed = 11) {
    EnsembleConfig config;
    config.distribution = d;
    config.symmetry = c;
    config.master_seed = seed;
    config.sample_count = 4;
    return config;
}

}  // namespace

TEST_CASE("config validation") {
    auto config = make_config(Distribution::complex_gaussian, SymmetryClass::real_symmetric);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.symmetry = SymmetryClass::hermitian;
    CHECK_NOTHROW(config.validate());
    config.sample_count = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    CHECK(parse_distribution("symmetric-bernoulli") == Distribution::symmetric_bernoulli);
    CHECK(to_string(parse_symmetry_class("hermitian")) == "hermitian");
    CHECK_THROWS(parse_distribution("cauchy"));
}

TEST_CASE("samples are deterministic functions of seed and index") {
    const auto profile = build_band_profile(40, 6);
    const auto config = make_config(Distribution::real_gaussian, SymmetryClass::real_symmetric);
    const auto a = sample_hermitian(profile, config, 2);
    const auto b = sample_hermitian(profile, config, 2);
    CHECK((a.re.array() == b.re.array()).all());
    CHECK(a.seed_used == sample_seed(config.master_seed, 2));
    const auto c = sample_hermitian(profile, config, 3);
    CHECK_FALSE((a.re.array() == c.re.array()).all());
    const auto d = sample_hermitian(profile, make_config(Distribution::real_gaussian, SymmetryClass::real_symmetric, 12), 2);
    CHECK_FALSE((a.re.array() == d.re.array()).all());
    CHECK(sample_seed(1, 0) != sample_seed(1, 1));
    CHECK(sample_seed(1, 0) != sample_seed(2, 0));
}

TEST_CASE("samples are symmetric and vanish where the variance does") {
    const auto profile = build_band_profile(50, 4);
    for (const auto d : {Distribution::real_gaussian, Distribution::symmetric_bernoulli}) {
        const auto h = sample_hermitian(profile, make_config(d, SymmetryClass::real_symmetric), 0);
        CHECK(h.re == h.re.transpose());
        CHECK_FALSE(h.is_complex());
        for (Eigen::Index i = 0; i < 50; ++i)
            for (Eigen::Index j = 0; j < 50; ++j)
                if (profile.entries()(i, j) == 0.0) CHECK(h.re(i, j) == 0.0);
    }
    const auto h = sample_hermitian(profile, make_config(Distribution::complex_gaussian, SymmetryClass::hermitian), 0);
    REQUIRE(h.is_complex());
    CHECK(h.re == h.re.transpose());
    CHECK(h.im == -h.im.transpose());
    CHECK(h.im.diagonal().cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXcd c = h.as_complex();
    CHECK((c - c.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second moments follow the profile") {
    const std::size_t n = 400;
    const auto profile = build_band_profile(n, 50);
    for (const auto d : {Distribution::real_gaussian, Distribution::complex_gaussian, Distribution::symmetric_bernoulli}) {
        const auto symmetry = d == Distribution::complex_gaussian ? SymmetryClass::hermitian : SymmetryClass::real_symmetric;
        const auto h = sample_hermitian(profile, make_config(d, symmetry), 0);
        const Eigen::MatrixXd off_mask = (profile.entries().array() > 0).cast<double>().matrix() -
                                         Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        double sum = 0.0, sumsq = 0.0, var = 0.0, count = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                if (off_mask(i, j) == 0.0) continue;
                const double s = profile.entries()(i, j);
                const double re = h.re(i, j) / std::sqrt(s);
                const double im = h.is_complex() ? h.im(i, j) / std::sqrt(s) : 0.0;
                sum += re;
                sumsq += re * re + im * im;
                var += 1.0;
                count += 1.0;
            }
        }
        CAPTURE(to_string(d));
        // 20000 off-diagonal entries: mean and variance within 5 sigma.
        CHECK(std::abs(sum / count) < 5.0 / std::sqrt(count));
        CHECK(std::abs(sumsq / var - 1.0) < 5.0 * std::sqrt(2.0 / count));
        if (d == Distribution::symmetric_bernoulli) {
            const double a = std::sqrt(profile.entries()(1, 0));
            CHECK(std::abs(std::abs(h.re(1, 0)) - a) < 1e-15);
        }
    }
}

TEST_CASE("bipartite sampling equals hermitian sampling on the bipartite profile") {
    const auto factor = band_bipartite_factor(30, 4);
    const auto profile = build_bipartite_profile(factor);
    for (const auto d : {Distribution::real_gaussian, Distribution::complex_gaussian}) {
        const auto symmetry = d == Distribution::complex_gaussian ? SymmetryClass::hermitian : SymmetryClass::real_symmetric;
        const auto config = make_config(d, symmetry);
        const auto a = sample_bipartite(factor, config, 1);
        const auto b = sample_hermitian(profile, config, 1);
        CHECK((a.re.array() == b.re.array()).all());
        CHECK((a.im.array() == b.im.array()).all());
        CHECK(a.re.topLeftCorner(30, 30).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.re.bottomRightCorner(30, 30).cwiseAbs().maxCoeff() == 0.0);
    }
}
