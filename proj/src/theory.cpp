#include "locallaw/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "locallaw/kernels.hpp"

namespace locallaw {

namespace {

void require_upper_half_plane(cplx z, const char* who) {
    if (!(z.imag() > 0.0)) throw DomainError(std::string(who) + ": requires Im > 0");
}

}  // namespace

SpectralPoint::SpectralPoint(double energy, double eta) : energy_(energy), eta_(eta) {
    if (!(eta > 0.0) || !std::isfinite(eta) || !std::isfinite(energy)) {
        throw DomainError("SpectralPoint: eta must be positive and finite");
    }
}

cplx m_sc(cplx z) {
    require_upper_half_plane(z, "m_sc");
    // sqrt(z-2) sqrt(z+2) ~ z at infinity; |z + root| >= 2 on this branch, so
    // the reciprocal form never cancels.
    const cplx root = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
    return -2.0 / (z + root);
}

double rho_sc(double x) {
    return std::sqrt(std::max(4.0 - x * x, 0.0)) / (2.0 * std::numbers::pi);
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + (x * std::sqrt(4.0 - x * x)) / (4.0 * std::numbers::pi) +
           std::asin(x / 2.0) / std::numbers::pi;
}

double semicircle_quantile(std::size_t alpha, std::size_t n) {
    if (alpha < 1 || alpha > n) throw std::invalid_argument("semicircle_quantile: need 1 <= alpha <= n");
    // Exact midpoint by symmetry.
    if (2 * alpha == n + 1) return 0.0;
    const double target = static_cast<double>(alpha) / static_cast<double>(n + 1);
    double lo = -2.0;
    double hi = 2.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_cdf(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

cplx m_mp(cplx w) {
    require_upper_half_plane(w, "m_mp");
    const cplx z = std::sqrt(w);  // principal root of an upper-half-plane w has Im > 0
    return m_sc(z) / z;
}

double rho_mp(double x) {
    if (x <= 0.0 || x >= 4.0) return 0.0;
    return std::sqrt((4.0 - x) / x) / (2.0 * std::numbers::pi);
}

ErrorBound pi_bound(const SpectralPoint& z, double m_bound) {
    if (!(m_bound > 0.0)) throw std::invalid_argument("pi_bound: M must be positive");
    const double m_eta = m_bound * z.eta();
    return {std::sqrt(m_sc(z.z()).imag() / m_eta) + 1.0 / m_eta, 1.0 / m_eta};
}

double edge_distance(double energy) {
    return std::min(std::abs(energy - 2.0), std::abs(energy + 2.0));
}

double outside_bound(const SpectralPoint& z, const DomainParams& params) {
    const double e = z.energy();
    const double eta = z.eta();
    const double m = params.m_bound;
    if (std::abs(e) < 2.0) {
        throw DomainError("outside_bound: |E| = " + std::to_string(std::abs(e)) + " < 2");
    }
    const double kappa = edge_distance(e);
    if (eta * std::sqrt(kappa + eta) < std::pow(m, -1.0 + params.gamma)) {
        throw DomainError("outside_bound: eta*sqrt(kappa+eta) below M^(-1+gamma)");
    }
    const double m_eta = m * eta;
    return 1.0 / (m * (kappa + eta)) + 1.0 / (m_eta * m_eta * std::sqrt(kappa + eta));
}

// Grid points placed exactly on the boundary survive pow() rounding.
constexpr double kBoundarySlack = 1e-12;

bool in_domain(const SpectralPoint& z, const DomainParams& params) {
    return std::abs(z.z()) <= 10.0 && z.eta() >= std::pow(params.m_bound, -1.0 + params.gamma) * (1.0 - kBoundarySlack);
}

bool in_mp_domain(cplx w, const DomainParams& params) {
    return std::abs(w) <= 100.0 &&
           w.imag() >= std::sqrt(std::abs(w.real())) * std::pow(params.m_bound, -1.0 + params.gamma) * (1.0 - kBoundarySlack);
}

ErrorBound mp_bound(cplx w, double m_bound) {
    require_upper_half_plane(w, "mp_bound");
    const double m_im = m_bound * w.imag();
    return {std::sqrt(m_mp(w).imag() / m_im) + 1.0 / m_im, 1.0 / m_im};
}

StabilityNorm::StabilityNorm(const BlockDecomposition& decomposition, double unit_tol) {
    auto add_block = [&](const Eigen::MatrixXd& matrix, bool bipartite) {
        const Eigen::Index n = matrix.rows();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("StabilityNorm: eigensolver did not converge");
        }
        Block b;
        b.eigenvalues = solver.eigenvalues();
        b.vectors = solver.eigenvectors();

        const Eigen::VectorXd e = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        Eigen::VectorXd f = e;
        if (bipartite) f.tail(n / 2) *= -1.0;

        b.projected = b.vectors.transpose();
        const Eigen::VectorXd ue = b.vectors.transpose() * e;
        b.projected.noalias() -= ue * e.transpose();
        Eigen::VectorXd uf = Eigen::VectorXd::Zero(n);
        if (bipartite) {
            uf = b.vectors.transpose() * f;
            b.projected.noalias() -= uf * f.transpose();
        }
        b.deflated.resize(static_cast<std::size_t>(n));
        for (Eigen::Index a = 0; a < n; ++a) {
            const double weight = ue(a) * ue(a) + uf(a) * uf(a);
            b.deflated[static_cast<std::size_t>(a)] =
                std::abs(std::abs(b.eigenvalues(a)) - 1.0) <= unit_tol && weight > 0.5;
        }
        blocks_.push_back(std::move(b));
    };
    for (const auto& blk : decomposition.bipartite_blocks) add_block(blk.matrix(), true);
    for (const auto& blk : decomposition.primitive_blocks) add_block(blk.matrix, false);
    if (blocks_.empty()) throw std::invalid_argument("StabilityNorm: empty decomposition");
}

double StabilityNorm::operator()(const SpectralPoint& z) const {
    const cplx m2 = m_sc(z.z()) * m_sc(z.z());
    double best = 0.0;
    for (const auto& b : blocks_) {
        const Eigen::Index n = b.eigenvalues.size();
        Eigen::VectorXd g_re(n);
        Eigen::VectorXd g_im(n);
        for (Eigen::Index a = 0; a < n; ++a) {
            if (b.deflated[static_cast<std::size_t>(a)]) {
                g_re(a) = g_im(a) = 0.0;
                continue;
            }
            const cplx denom = 1.0 - m2 * b.eigenvalues(a);
            if (std::abs(denom) < 1e-12) {
                throw std::runtime_error("StabilityNorm: 1 - m^2 lambda is singular off the deflated span");
            }
            const cplx g = 1.0 / denom;
            g_re(a) = g.real();
            g_im(a) = g.imag();
        }
        const Eigen::MatrixXd re = (b.vectors * g_re.asDiagonal()) * b.projected;
        const Eigen::MatrixXd im = (b.vectors * g_im.asDiagonal()) * b.projected;
        std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
        const auto un = static_cast<std::size_t>(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            kernels::add_modulus(std::span<const double>(re.col(j).data(), un),
                                 std::span<const double>(im.col(j).data(), un), row_sums);
        }
        best = std::max(best, *std::max_element(row_sums.begin(), row_sums.end()));
    }
    return best;
}

double StabilityNorm::l2_norm(const SpectralPoint& z) const {
    const cplx m2 = m_sc(z.z()) * m_sc(z.z());
    double best = 0.0;
    for (const auto& b : blocks_) {
        for (Eigen::Index a = 0; a < b.eigenvalues.size(); ++a) {
            if (b.deflated[static_cast<std::size_t>(a)]) continue;
            best = std::max(best, 1.0 / std::abs(1.0 - m2 * b.eigenvalues(a)));
        }
    }
    return best;
}

double gamma_hat(const SpectralPoint& z, const VarianceProfile& profile,
                 const BlockDecomposition& decomposition) {
    if (decomposition.dim() != profile.dim()) {
        throw std::invalid_argument("gamma_hat: decomposition does not match profile");
    }
    return StabilityNorm(decomposition)(z);
}

}  // namespace locallaw
