#pragma once

// Deterministic analytic kernel: semicircle and Marchenko-Pastur transforms,
// densities and quantiles, the spectral domains, the local-law error bounds,
// and the deflated stability norm of (1 - m^2 S)^{-1}.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "locallaw/profile.hpp"
#include "locallaw/structure.hpp"

namespace locallaw {

using cplx = std::complex<double>;

/// z = E + i*eta with eta > 0.
class SpectralPoint {
public:
    SpectralPoint(double energy, double eta);
    double energy() const { return energy_; }
    double eta() const { return eta_; }
    cplx z() const { return {energy_, eta_}; }

private:
    double energy_;
    double eta_;
};

struct DomainParams {
    double gamma = 0.3;
    double m_bound = 1.0;
};

/// Thrown when a point violates the preconditions of a bound or a suite.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Semicircle Stieltjes transform, the root of m^2 + z m + 1 = 0 with
/// Im m > 0. Requires Im z > 0.
cplx m_sc(cplx z);
double rho_sc(double x);
/// Closed-form semicircle distribution function on [-2, 2].
double semicircle_cdf(double x);
/// gamma_alpha with semicircle_cdf(gamma_alpha) = alpha / (n + 1).
double semicircle_quantile(std::size_t alpha, std::size_t n);

/// Marchenko-Pastur (square, hard edge) transform m_sc(sqrt w) / sqrt w.
/// Requires Im w > 0.
cplx m_mp(cplx w);
double rho_mp(double x);

struct ErrorBound {
    double entrywise = 0.0;
    double averaged = 0.0;
};

/// sqrt(Im m / (M eta)) + 1/(M eta) and 1/(M eta).
ErrorBound pi_bound(const SpectralPoint& z, double m_bound);

/// Distance of E from the nearest spectral edge +-2.
double edge_distance(double energy);

/// 1/(M(kappa + eta)) + 1/((M eta)^2 sqrt(kappa + eta)). Throws DomainError
/// when |E| < 2 or eta sqrt(kappa + eta) < M^{-1+gamma}.
double outside_bound(const SpectralPoint& z, const DomainParams& params);

/// |z| <= 10 and eta >= M^{-1+gamma}.
bool in_domain(const SpectralPoint& z, const DomainParams& params);

/// |w| <= 100 and Im w >= sqrt(|Re w|) M^{-1+gamma}.
bool in_mp_domain(cplx w, const DomainParams& params);

/// Entrywise and trace bounds for (X^*X - w)^{-1}:
/// sqrt(Im m_mp / (M Im w)) + 1/(M Im w) and 1/(M Im w).
ErrorBound mp_bound(cplx w, double m_bound);

/// l-infinity operator norm of B = (1 - m(z)^2 S)^{-1} Q, where Q projects
/// off span{e, f} for bipartite blocks and off e for primitive blocks. The
/// eigendecomposition of every block is computed once, so evaluating many z
/// is O(n^3) per point without refactorisation. For several blocks the
/// maximum over blocks is returned.
class StabilityNorm {
public:
    explicit StabilityNorm(const BlockDecomposition& decomposition, double unit_tol = 1e-8);

    double operator()(const SpectralPoint& z) const;
    /// Spectral norm of (1 - m^2 S)^{-1} on the deflated subspace.
    double l2_norm(const SpectralPoint& z) const;

private:
    struct Block {
        Eigen::VectorXd eigenvalues;
        Eigen::MatrixXd vectors;    // U
        Eigen::MatrixXd projected;  // U^T Q
        std::vector<bool> deflated;
    };
    std::vector<Block> blocks_;
};

double gamma_hat(const SpectralPoint& z, const VarianceProfile& profile,
                 const BlockDecomposition& decomposition);

}  // namespace locallaw
