#include "locallaw/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace locallaw {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(state);
}

/// Counter-mode stream for one matrix entry.
class EntryStream {
public:
    EntryStream(std::uint64_t sample_seed, std::uint64_t i, std::uint64_t j)
        : state_(mix(mix(sample_seed, i), j)) {}

    /// Uniform in (0, 1], 53-bit resolution.
    double uniform() { return (static_cast<double>(splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53; }

    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    bool coin() { return (splitmix64(state_) >> 63) != 0; }

private:
    std::uint64_t state_;
};

struct Entry {
    double re = 0.0;
    double im = 0.0;
};

Entry draw(const EnsembleConfig& config, std::uint64_t seed, std::size_t i, std::size_t j, double variance) {
    if (variance == 0.0) return {};
    EntryStream stream(seed, i, j);
    const double sd = std::sqrt(variance);
    switch (config.distribution) {
        case Distribution::real_gaussian:
            return {sd * stream.normal_pair().first, 0.0};
        case Distribution::complex_gaussian: {
            const auto [a, b] = stream.normal_pair();
            if (i == j) return {sd * a, 0.0};
            const double half = std::sqrt(variance / 2.0);
            return {half * a, half * b};
        }
        case Distribution::symmetric_bernoulli:
            return {stream.coin() ? sd : -sd, 0.0};
    }
    return {};
}

}  // namespace

std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::real_gaussian: return "real-gaussian";
        case Distribution::complex_gaussian: return "complex-gaussian";
        case Distribution::symmetric_bernoulli: return "symmetric-bernoulli";
    }
    return "unknown";
}

std::string_view to_string(SymmetryClass c) {
    return c == SymmetryClass::hermitian ? "hermitian" : "real-symmetric";
}

Distribution parse_distribution(std::string_view name) {
    if (name == "real-gaussian") return Distribution::real_gaussian;
    if (name == "complex-gaussian") return Distribution::complex_gaussian;
    if (name == "symmetric-bernoulli") return Distribution::symmetric_bernoulli;
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

SymmetryClass parse_symmetry_class(std::string_view name) {
    if (name == "hermitian") return SymmetryClass::hermitian;
    if (name == "real-symmetric") return SymmetryClass::real_symmetric;
    throw std::invalid_argument("unknown symmetry class '" + std::string(name) + "'");
}

void EnsembleConfig::validate() const {
    if (sample_count == 0) throw std::invalid_argument("EnsembleConfig: sample_count must be >= 1");
    if (distribution == Distribution::complex_gaussian && symmetry != SymmetryClass::hermitian) {
        throw std::invalid_argument("EnsembleConfig: complex-gaussian requires the hermitian class");
    }
}

Eigen::MatrixXcd SampledMatrix::as_complex() const {
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    if (is_complex()) {
        out.imag() = im;
    } else {
        out.imag().setZero();
    }
    return out;
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t index) {
    return mix(master_seed, 0x5eed0000ULL + static_cast<std::uint64_t>(index));
}

SampledMatrix sample_hermitian(const VarianceProfile& profile, const EnsembleConfig& config,
                               std::size_t index) {
    config.validate();
    if (index >= config.sample_count) {
        throw std::invalid_argument("sample_hermitian: index " + std::to_string(index) +
                                    " >= sample_count");
    }
    const auto n = static_cast<Eigen::Index>(profile.dim());
    const bool complex = config.distribution == Distribution::complex_gaussian;
    SampledMatrix out;
    out.sample_index = index;
    out.seed_used = sample_seed(config.master_seed, index);
    out.re = Eigen::MatrixXd::Zero(n, n);
    if (complex) out.im = Eigen::MatrixXd::Zero(n, n);

    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const Entry h = draw(config, out.seed_used, static_cast<std::size_t>(i),
                                 static_cast<std::size_t>(j), profile.entries()(i, j));
            out.re(i, j) = h.re;
            out.re(j, i) = h.re;
            if (complex) {
                out.im(i, j) = h.im;
                out.im(j, i) = -h.im;
            }
        }
    }
    return out;
}

SampledMatrix sample_bipartite(const BipartiteFactor& factor, const EnsembleConfig& config,
                               std::size_t index) {
    config.validate();
    if (index >= config.sample_count) {
        throw std::invalid_argument("sample_bipartite: index " + std::to_string(index) +
                                    " >= sample_count");
    }
    const auto d = static_cast<Eigen::Index>(factor.dim());
    const bool complex = config.distribution == Distribution::complex_gaussian;
    SampledMatrix out;
    out.sample_index = index;
    out.seed_used = sample_seed(config.master_seed, index);
    out.re = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    if (complex) out.im = Eigen::MatrixXd::Zero(2 * d, 2 * d);

    // x_rc sits at H(d + r, c), below the diagonal, matching sample_hermitian.
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            const Entry x = draw(config, out.seed_used, static_cast<std::size_t>(d + r),
                                 static_cast<std::size_t>(c), factor.entries()(r, c));
            out.re(d + r, c) = x.re;
            out.re(c, d + r) = x.re;
            if (complex) {
                out.im(d + r, c) = x.im;
                out.im(c, d + r) = -x.im;
            }
        }
    }
    return out;
}

}  // namespace locallaw
