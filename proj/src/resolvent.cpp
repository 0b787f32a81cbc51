#include "locallaw/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <string>

#include "locallaw/kernels.hpp"

namespace locallaw {

namespace {

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index j, Eigen::Index from = 0) {
    return {m.col(j).data() + from, static_cast<std::size_t>(m.rows() - from)};
}

double inf_norm(const SampledMatrix& h) {
    if (!h.is_complex()) return h.re.cwiseAbs().rowwise().sum().maxCoeff();
    return h.as_complex().cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXcd shifted(const SampledMatrix& h, cplx z) {
    Eigen::MatrixXcd a = h.as_complex();
    a.diagonal().array() -= z;
    return a;
}

}  // namespace

namespace {

/// max_i |((H - z) G x - x)_i| over fixed probe vectors with |x_i| <= 1.
double probe_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& g) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd probes(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        probes(i, 0) = 1.0;
        probes(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
        probes(i, 2) = std::polar(1.0, 0.7548776662 * static_cast<double>(i * i));
    }
    return (a * (g * probes) - probes).cwiseAbs().maxCoeff();
}

}  // namespace

ResolventSlice resolvent(const SampledMatrix& h, const SpectralPoint& z, bool keep_full) {
    const Eigen::MatrixXcd a = shifted(h, z.z());
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::MatrixXcd g = lu.inverse();
    if (!g.allFinite()) throw std::runtime_error("resolvent: factorization produced non-finite values");

    ResolventSlice out;
    out.z = z;
    out.residual = probe_residual(a, g);
    const double limit = 1e-8 * (inf_norm(h) + std::abs(z.z()));
    if (!(out.residual <= limit)) {
        throw std::runtime_error("resolvent: residual " + std::to_string(out.residual) +
                                 " exceeds " + std::to_string(limit));
    }
    out.diag = g.diagonal();
    out.trace_normalized = out.diag.mean();
    if (keep_full) out.full = std::move(g);
    return out;
}

EigenData eigen(const Eigen::MatrixXd& symmetric, bool with_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        symmetric, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigen: symmetric eigensolver failed to converge (n = " +
                                 std::to_string(symmetric.rows()) + ")");
    }
    EigenData out;
    out.eigenvalues = solver.eigenvalues();
    if (with_vectors) out.vectors = solver.eigenvectors();
    return out;
}

EigenData eigen(const Eigen::MatrixXcd& hermitian, bool with_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        hermitian, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigen: hermitian eigensolver failed to converge (n = " +
                                 std::to_string(hermitian.rows()) + ")");
    }
    EigenData out;
    out.eigenvalues = solver.eigenvalues();
    if (with_vectors) out.complex_vectors = solver.eigenvectors();
    return out;
}

EigenData eigen(const SampledMatrix& h, bool with_vectors) {
    return h.is_complex() ? eigen(h.as_complex(), with_vectors) : eigen(h.re, with_vectors);
}

cplx spectral_trace(const Eigen::VectorXd& eigenvalues, cplx z) {
    cplx sum{};
    for (Eigen::Index a = 0; a < eigenvalues.size(); ++a) sum += 1.0 / (eigenvalues(a) - z);
    return sum / static_cast<double>(eigenvalues.size());
}

SpectralResolvent::SpectralResolvent(EigenData data) : data_(std::move(data)) {
    if (!data_.has_vectors()) throw std::invalid_argument("SpectralResolvent: eigenvectors required");
    if (data_.is_complex()) {
        squared_moduli_ = data_.complex_vectors.cwiseAbs2();
    } else {
        squared_moduli_ = data_.vectors.cwiseAbs2();
        transposed_ = data_.vectors.transpose();
    }
}

Eigen::VectorXcd SpectralResolvent::weights(cplx z) const {
    if (!(z.imag() > 0.0)) throw DomainError("SpectralResolvent: requires Im z > 0");
    Eigen::VectorXcd w(data_.eigenvalues.size());
    for (Eigen::Index a = 0; a < w.size(); ++a) w(a) = 1.0 / (data_.eigenvalues(a) - z);
    return w;
}

Eigen::VectorXcd SpectralResolvent::diag(cplx z) const {
    const Eigen::VectorXcd w = weights(z);
    const auto n = static_cast<Eigen::Index>(dim());
    std::vector<double> re(static_cast<std::size_t>(n), 0.0);
    std::vector<double> im(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index a = 0; a < n; ++a) {
        kernels::add_scaled_complex(column(squared_moduli_, a), w(a).real(), w(a).imag(), re, im);
    }
    Eigen::VectorXcd out(n);
    for (Eigen::Index k = 0; k < n; ++k) out(k) = {re[static_cast<std::size_t>(k)], im[static_cast<std::size_t>(k)]};
    return out;
}

cplx SpectralResolvent::entry(std::size_t i, std::size_t j, cplx z) const {
    const Eigen::VectorXcd w = weights(z);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    if (data_.is_complex()) {
        cplx sum{};
        for (Eigen::Index a = 0; a < w.size(); ++a) {
            sum += data_.complex_vectors(ii, a) * std::conj(data_.complex_vectors(jj, a)) * w(a);
        }
        return sum;
    }
    const Eigen::VectorXd wr = w.real();
    const Eigen::VectorXd wi = w.imag();
    const auto n = dim();
    const auto s = kernels::weighted_product_sum({transposed_.col(ii).data(), n},
                                                 {transposed_.col(jj).data(), n},
                                                 {wr.data(), n}, {wi.data(), n});
    return {s.re, s.im};
}

Eigen::MatrixXcd SpectralResolvent::full(cplx z) const {
    const Eigen::VectorXcd w = weights(z);
    if (data_.is_complex()) {
        const Eigen::MatrixXcd& v = data_.complex_vectors;
        return (v * w.asDiagonal()) * v.adjoint();
    }
    const Eigen::MatrixXd& v = data_.vectors;
    Eigen::MatrixXcd out(v.rows(), v.cols());
    out.real() = (v * w.real().asDiagonal()) * v.transpose();
    out.imag() = (v * w.imag().asDiagonal()) * v.transpose();
    return out;
}

double SpectralResolvent::max_entry_error(cplx z, cplx target) const {
    const Eigen::VectorXcd w = weights(z);
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd re = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
    if (data_.is_complex()) {
        // G is not symmetric for complex Hermitian H, so both triangles count.
        const Eigen::MatrixXcd& v = data_.complex_vectors;
        Eigen::MatrixXcd g = (v * w.asDiagonal()) * v.adjoint();
        g.diagonal().array() -= target;
        re = g.real();
        im = g.imag();
        double best_sq = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            best_sq = std::max(best_sq, kernels::max_modulus_sq(column(re, j, 0), column(im, j, 0)));
        }
        return std::sqrt(best_sq);
    } else {
        const Eigen::MatrixXd& v = data_.vectors;
        re.triangularView<Eigen::Lower>() = (v * w.real().asDiagonal()) * v.transpose();
        im.triangularView<Eigen::Lower>() = (v * w.imag().asDiagonal()) * v.transpose();
    }
    double best_sq = 0.0;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        best_sq = std::max(best_sq, kernels::max_modulus_sq(column(re, j, j + 1), column(im, j, j + 1)));
    }
    double best = std::sqrt(best_sq);
    for (Eigen::Index k = 0; k < n; ++k) best = std::max(best, std::abs(cplx(re(k, k), im(k, k)) - target));
    return best;
}

double SpectralResolvent::max_entry_error(cplx z, cplx target,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const {
    const Eigen::VectorXcd d = diag(z);
    double best = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) best = std::max(best, std::abs(d(k) - target));
    for (const auto& [i, j] : pairs) best = std::max(best, std::abs(entry(i, j, z)));
    return best;
}

std::vector<std::pair<std::size_t, std::size_t>> offdiagonal_subset(std::size_t n, std::size_t count,
                                                                    std::uint64_t seed) {
    const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
    count = std::min(count, total);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    std::uint64_t state = seed ^ 0x6a09e667f3bcc908ULL;
    auto next = [&state] {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    while (chosen.size() < count) {
        const std::size_t a = static_cast<std::size_t>(next() % n);
        const std::size_t b = static_cast<std::size_t>(next() % n);
        if (a == b) continue;
        chosen.emplace(std::max(a, b), std::min(a, b));
    }
    return {chosen.begin(), chosen.end()};
}

bool has_bipartite_structure(const SampledMatrix& h) {
    const auto n2 = static_cast<Eigen::Index>(h.dim());
    if (n2 % 2 != 0 || n2 == 0) return false;
    const Eigen::Index n = n2 / 2;
    auto zero_blocks = [n](const Eigen::MatrixXd& m) {
        return (m.topLeftCorner(n, n).array() == 0.0).all() && (m.bottomRightCorner(n, n).array() == 0.0).all();
    };
    return zero_blocks(h.re) && (!h.is_complex() || zero_blocks(h.im));
}

Eigen::MatrixXcd bipartite_block(const SampledMatrix& h) {
    if (!has_bipartite_structure(h)) throw std::invalid_argument("bipartite_block: H is not bipartite");
    const Eigen::Index n = static_cast<Eigen::Index>(h.dim()) / 2;
    return h.as_complex().bottomLeftCorner(n, n);
}

Eigen::MatrixXcd covariance_resolvent(const Eigen::MatrixXcd& x, cplx w) {
    Eigen::MatrixXcd a = x.adjoint() * x;
    a.diagonal().array() -= w;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::MatrixXcd r = lu.inverse();
    if (!r.allFinite()) throw std::runtime_error("covariance_resolvent: non-finite inverse");
    return r;
}

CovarianceBlocks covariance_blocks(const SampledMatrix& h, const SpectralPoint& z) {
    if (!has_bipartite_structure(h)) throw std::invalid_argument("covariance_blocks: H is not bipartite");
    const Eigen::Index n = static_cast<Eigen::Index>(h.dim()) / 2;
    const ResolventSlice slice = resolvent(h, z, true);
    CovarianceBlocks out;
    out.g11 = slice.full->topLeftCorner(n, n);
    out.g22 = slice.full->bottomRightCorner(n, n);

    const Eigen::MatrixXcd x = bipartite_block(h);
    const cplx zz = z.z();
    const Eigen::MatrixXcd g11 = zz * covariance_resolvent(x, zz * zz);
    const Eigen::MatrixXcd g22 = zz * covariance_resolvent(x.adjoint(), zz * zz);
    out.schur_residual = std::max((out.g11 - g11).cwiseAbs().maxCoeff(), (out.g22 - g22).cwiseAbs().maxCoeff());
    return out;
}

double balancing_ratio(const Eigen::VectorXcd& diag) {
    const Eigen::Index n2 = diag.size();
    if (n2 % 2 != 0 || n2 == 0) throw std::invalid_argument("balancing_ratio: dimension must be even");
    const Eigen::Index n = n2 / 2;
    const cplx top = diag.head(n).sum();
    const cplx bottom = diag.tail(n).sum();
    const double scale = diag.cwiseAbs().sum();
    return scale == 0.0 ? 0.0 : std::abs(top - bottom) / scale;
}

double check_balancing(const SampledMatrix& h, const SpectralPoint& z) {
    return balancing_ratio(resolvent(h, z, false).diag);
}

}  // namespace locallaw
