#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace locallaw {

/// Variance matrix S = (s_ij) of a generalized Wigner ensemble, together with
/// the entry bound scale M (s_ij <= 1/M) and, once certified, the spectral
/// gap rho.
///
/// Construction only enforces shape and finiteness. Symmetry, stochasticity
/// and the spectral conditions are diagnosed by validate_assumptions() so
/// that broken inputs can be reported rather than rejected.
class VarianceProfile {
public:
    VarianceProfile(Eigen::MatrixXd entries, double m_bound, std::optional<double> gap = std::nullopt);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double m_bound() const { return m_bound_; }
    std::optional<double> gap() const { return gap_; }

    VarianceProfile with_gap(std::optional<double> gap) const;

private:
    Eigen::MatrixXd entries_;
    double m_bound_;
    std::optional<double> gap_;
};

/// Square nonnegative matrix A whose rows and columns all sum to one; the
/// off-diagonal block of a bipartite variance profile.
class BipartiteFactor {
public:
    explicit BipartiteFactor(Eigen::MatrixXd entries, double tol = 1e-10);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    /// Largest M with a_ij <= 1/M.
    double m_bound() const { return m_bound_; }

private:
    Eigen::MatrixXd entries_;
    double m_bound_;
};

/// S = [[0, A^T], [A, 0]]. Rejects factors that are not doubly stochastic.
VarianceProfile build_bipartite_profile(const BipartiteFactor& factor);

/// Periodic band profile: s_ij = 1/L when the circular distance of i and j is
/// at most `bandwidth`, with L = 2*bandwidth + 1. Falls back to the flat
/// profile s_ij = 1/n when the band wraps around (L > n). M = L.
VarianceProfile build_band_profile(std::size_t n, std::size_t bandwidth);

/// A = J_d / d.
BipartiteFactor flat_bipartite_factor(std::size_t d);

/// One-sided circulant factor: a_ij = 1/L for (j - i) mod d in [0, L), with
/// L = min(2*bandwidth + 1, d). Not symmetric unless L is 1 or d.
BipartiteFactor band_bipartite_factor(std::size_t d, std::size_t bandwidth);

struct AssumptionOptions {
    double delta = 0.1;        ///< scaling exponent: N^delta <= M <= N
    double tol = 1e-10;        ///< stochasticity and spectrum membership
    double rho_ceiling = 0.999;  ///< certified rho must not exceed this
};

struct AssumptionReport {
    std::size_t dim = 0;
    double m_bound = 0.0;

    bool symmetric = false;
    double max_asymmetry = 0.0;

    bool a1_entry_bound = false;  ///< 0 <= s_ij <= 1/M
    bool m_in_range = false;      ///< N^delta <= M <= N
    double max_entry = 0.0;
    double min_entry = 0.0;

    bool a2_row_sums = false;
    double max_row_deviation = 0.0;
    std::vector<std::size_t> bad_rows;

    bool eigensolver_ok = false;
    std::string eigensolver_error;
    bool a3_spectrum = false;
    bool plus_one_present = false;
    bool minus_one_present = false;
    std::size_t plus_one_multiplicity = 0;
    std::size_t minus_one_multiplicity = 0;
    std::optional<double> rho;  ///< max |lambda| over eigenvalues away from +-1; empty if none
    std::vector<double> eigenvalues;

    bool all_pass() const {
        return symmetric && a1_entry_bound && m_in_range && a2_row_sums && eigensolver_ok && a3_spectrum;
    }
};

AssumptionReport validate_assumptions(const VarianceProfile& profile,
                                      const AssumptionOptions& options = {});

/// Spectrum of a symmetric matrix, ascending. Uses the lower triangle.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix);

}  // namespace locallaw
