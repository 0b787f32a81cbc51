#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "locallaw/ensemble.hpp"
#include "locallaw/theory.hpp"

namespace locallaw {

/// diag(G(z)), (1/dim) Tr G(z) and optionally G(z) itself.
struct ResolventSlice {
    SpectralPoint z{0.0, 1.0};
    Eigen::VectorXcd diag;
    cplx trace_normalized{};
    std::optional<Eigen::MatrixXcd> full;
    double residual = 0.0;  ///< max |((H - z) G x - x)_i| over fixed probe vectors x
};

/// Matrices above this size keep only diag(G) unless asked otherwise.
inline constexpr std::size_t kKeepFullMaxDim = 1024;
inline bool default_keep_full(std::size_t dim) { return dim <= kKeepFullMaxDim; }

/// G(z) = (H - z)^{-1} by dense LU. Throws std::runtime_error when the probe
/// residual exceeds 1e-8 (||H||_inf + |z|).
ResolventSlice resolvent(const SampledMatrix& h, const SpectralPoint& z, bool keep_full);

struct EigenData {
    Eigen::VectorXd eigenvalues;  ///< ascending
    Eigen::MatrixXd vectors;      ///< real eigenvectors (real input), columns
    Eigen::MatrixXcd complex_vectors;  ///< complex eigenvectors (complex input)

    bool has_vectors() const { return vectors.size() != 0 || complex_vectors.size() != 0; }
    bool is_complex() const { return complex_vectors.size() != 0; }
    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

EigenData eigen(const SampledMatrix& h, bool with_vectors);
EigenData eigen(const Eigen::MatrixXd& symmetric, bool with_vectors);
EigenData eigen(const Eigen::MatrixXcd& hermitian, bool with_vectors);

/// (1/dim) sum_alpha 1/(lambda_alpha - z).
cplx spectral_trace(const Eigen::VectorXd& eigenvalues, cplx z);

/// Resolvent of a Hermitian matrix assembled from its eigendecomposition,
/// G_ij(z) = sum_alpha v_i^(alpha) conj(v_j^(alpha)) / (lambda_alpha - z).
/// Cheaper than repeated LU once many spectral points share one matrix.
class SpectralResolvent {
public:
    explicit SpectralResolvent(EigenData data);

    std::size_t dim() const { return data_.dim(); }
    const EigenData& data() const { return data_; }

    Eigen::VectorXcd diag(cplx z) const;
    cplx trace_normalized(cplx z) const { return spectral_trace(data_.eigenvalues, z); }
    cplx entry(std::size_t i, std::size_t j, cplx z) const;
    Eigen::MatrixXcd full(cplx z) const;

    /// max_ij |G_ij(z) - target delta_ij| over the whole matrix.
    double max_entry_error(cplx z, cplx target) const;
    /// Same maximum restricted to the diagonal plus the given (i, j) pairs.
    double max_entry_error(cplx z, cplx target,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const;

private:
    Eigen::VectorXcd weights(cplx z) const;

    EigenData data_;
    Eigen::MatrixXd squared_moduli_;  // |v_i^(alpha)|^2, column alpha
    Eigen::MatrixXd transposed_;      // V^T for row access (real case)
};

/// Deterministic distinct off-diagonal pairs (i > j), at most n(n-1)/2.
std::vector<std::pair<std::size_t, std::size_t>> offdiagonal_subset(std::size_t n, std::size_t count,
                                                                    std::uint64_t seed);

/// True when h is 2N x 2N with both N x N diagonal blocks exactly zero.
bool has_bipartite_structure(const SampledMatrix& h);

/// X = lower-left N x N block of a bipartite H.
Eigen::MatrixXcd bipartite_block(const SampledMatrix& h);

struct CovarianceBlocks {
    Eigen::MatrixXcd g11;
    Eigen::MatrixXcd g22;
    /// max |G11 - z (X^*X - z^2)^{-1}| and the same for G22 with X X^*.
    double schur_residual = 0.0;
};

/// Diagonal blocks of G(z) for bipartite H, cross-checked against the Schur
/// complement formulas. Throws std::invalid_argument for non-bipartite H.
CovarianceBlocks covariance_blocks(const SampledMatrix& h, const SpectralPoint& z);

/// (X^*X - w)^{-1} by dense LU.
Eigen::MatrixXcd covariance_resolvent(const Eigen::MatrixXcd& x, cplx w);

/// |sum_{k<=N} G_kk - sum_{k>N} G_kk| / sum_k |G_kk| for 2N x 2N H.
/// Defined for any even-sized H so broken inputs can serve as controls.
double balancing_ratio(const Eigen::VectorXcd& diag);
double check_balancing(const SampledMatrix& h, const SpectralPoint& z);

}  // namespace locallaw
