#pragma once

// Monte Carlo verification suites.
//
// Stochastic domination X < Y cannot be observed at a single size N; each
// suite instead reports, for fixed epsilon, the fraction of (sample, z) cells
// with X > N^epsilon Y, plus the empirical exponent
// max log(X/Y) / log N. Exact algebraic identities are checked per cell at
// machine precision and come with a negative control that must fail.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "locallaw/ensemble.hpp"
#include "locallaw/profile.hpp"
#include "locallaw/resolvent.hpp"
#include "locallaw/structure.hpp"
#include "locallaw/theory.hpp"

namespace locallaw {

struct DominationSummary {
    std::vector<double> epsilons;
    std::vector<double> exceedance;  ///< parallel to epsilons, in [0, 1]
    double exponent = 0.0;           ///< max log(observed/bound) / log(dim)
    double worst_ratio = 0.0;        ///< max observed/bound
    std::size_t count = 0;

    /// Exceedance at `epsilon`; throws if epsilon was not evaluated.
    double at(double epsilon) const;
};

/// Throws std::invalid_argument for length mismatch, empty input,
/// nonpositive bounds or dim < 2. Non-finite observations are skipped.
DominationSummary estimate_domination(const std::vector<double>& observed, const std::vector<double>& bound,
                                      double dim, const std::vector<double>& epsilons);

struct SuiteOptions {
    std::vector<double> epsilons{0.1, 0.2, 0.3};
    double decision_epsilon = 0.2;
    double max_exceedance = 0.05;
    double gamma = 0.3;
    /// N in the N^epsilon slack; defaults to the matrix dimension.
    std::optional<double> domination_n;
    /// Full G for the entrywise law; defaults to default_keep_full(dim).
    std::optional<bool> keep_full;
    std::size_t threads = 1;
};

struct LocalLawCell {
    std::size_t sample_index = 0;
    std::size_t point_index = 0;
    double energy = 0.0;  ///< Re z (Re w for the hard-edge suite)
    double eta = 0.0;     ///< Im z (Im w)
    double observed_entrywise = 0.0;  ///< NaN when not evaluated
    double observed_averaged = 0.0;
    double bound_entrywise = 0.0;     ///< NaN when not evaluated
    double bound_averaged = 0.0;
    std::string error;                ///< nonempty when the cell failed

    double ratio() const;  ///< worst of the available observed/bound ratios
};

struct LocalLawReport {
    std::string suite;
    std::size_t dim = 0;
    double m_bound = 0.0;
    double domination_n = 0.0;
    double decision_epsilon = 0.2;
    double max_exceedance = 0.05;
    bool entrywise_evaluated = true;
    bool full_matrix = true;  ///< false when a subset of off-diagonal entries was used
    std::vector<LocalLawCell> cells;
    DominationSummary entrywise;
    DominationSummary averaged;
    std::size_t failed_cells = 0;
    /// Hard-edge suite only: max relative gap between the Schur-block and the
    /// direct inverse of X^*X - w.
    std::optional<double> block_direct_gap;

    bool passed() const;
};

/// Entrywise and averaged local law on z_grid, every point in D(gamma).
LocalLawReport check_local_law(const VarianceProfile& profile, const EnsembleConfig& config,
                               const std::vector<SpectralPoint>& z_grid, const SuiteOptions& options);

/// Averaged law outside the spectrum against outside_bound.
LocalLawReport check_outside_law(const VarianceProfile& profile, const EnsembleConfig& config,
                                 const std::vector<SpectralPoint>& z_list, const SuiteOptions& options);

/// Hard-edge Marchenko-Pastur law for X^*X, X sampled from `factor`.
/// The block-vs-direct comparison runs at the first grid point of every sample.
LocalLawReport check_mp_hard_edge(const BipartiteFactor& factor, const EnsembleConfig& config,
                                  const std::vector<cplx>& w_grid, const SuiteOptions& options);

struct RigidityOptions {
    double epsilon = 0.5;          ///< bulk: alpha_hat >= N M^{-1+epsilon}
    double slack_exponent = 0.1;   ///< flag when gap > N^slack * bound
    double max_flagged = 0.05;
    std::optional<double> domination_n;
    std::size_t threads = 1;
};

struct RigidityEntry {
    std::size_t sample_index = 0;
    std::size_t alpha = 0;  ///< 1-based
    double eigenvalue = 0.0;
    double quantile = 0.0;
    double bound = 0.0;
    double ratio() const;
};

struct RigidityReport {
    std::size_t dim = 0;
    double m_bound = 0.0;
    double epsilon = 0.0;
    double slack = 0.0;           ///< N^slack_exponent
    double max_flagged = 0.05;
    std::size_t bulk_first = 0;   ///< first bulk alpha (1-based)
    std::size_t bulk_last = 0;
    std::vector<RigidityEntry> entries;  ///< bulk indices only
    std::size_t flagged = 0;
    double flagged_fraction = 0.0;
    double worst_ratio = 0.0;
    double median_eigenvalue_max = 0.0;  ///< max over samples of |median eigenvalue|

    bool passed() const;
};

RigidityReport check_rigidity(const VarianceProfile& profile, const EnsembleConfig& config,
                              const RigidityOptions& options);

struct SceOptions {
    double gamma = 0.3;
    double identity_tol = 1e-10;
    double linearization_constant = 3.0;
    double linearization_fraction = 0.95;
    double fa_slack_exponent = 0.2;
    double fa_fraction = 0.90;
    std::optional<double> domination_n;
    std::size_t threads = 1;
};

struct SceCell {
    std::size_t sample_index = 0;
    std::size_t point_index = 0;
    double energy = 0.0;
    double eta = 0.0;
    double upsilon_inf = 0.0;      ///< ||Upsilon||_inf
    double v_inf = 0.0;            ///< ||v||_inf, proxy for Lambda
    double f_v = 0.0;              ///< |(f, v)| / (||v||_2 sqrt(dim)); NaN without f
    double f_w = 0.0;              ///< |(f, w)| / (||v||_2 sqrt(dim)); NaN without f
    double linearization = 0.0;    ///< ||(1 - m^2 S) v||_inf
    double w_inf = 0.0;
    double gamma_hat = 0.0;
    double min_abs_g = 0.0;        ///< min_i |m + v_i|
    bool division_hazard = false;  ///< min |m + v_i| < 1e-12
    double psi2() const { return upsilon_inf + v_inf * v_inf; }
};

struct SceReport {
    std::string suite;  ///< "sce" or "fa"
    std::size_t dim = 0;
    double m_bound = 0.0;
    double domination_n = 0.0;
    SceOptions options;
    bool has_f = false;
    std::vector<SceCell> cells;
    double max_f_v = 0.0;
    double max_f_w = 0.0;
    double linearization_pass_fraction = 0.0;  ///< cells with lin <= C psi2
    double fa_pass_fraction = 0.0;             ///< cells with w <= N^slack Gamma psi2
    std::size_t hazards = 0;

    bool passed() const;
};

/// Self-consistent equation residuals v, Upsilon and the f-projection of v.
SceReport check_sce(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                    const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                    const SceOptions& options);

/// Fluctuation-averaging vector w = S (v - [v]) with t = s: its f-projection
/// and its size against Gamma_hat * Psi^2.
SceReport check_fluctuation_averaging(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                                      const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                                      const SceOptions& options);

struct IdentityOptions {
    double tol = 1e-10;
    /// A negative control counts as detected when its residual exceeds this.
    double control_threshold = 1e-3;
    bool negative_control = true;
    /// Run the main check on broken inputs (see negative control); the
    /// identities must then fail.
    bool break_structure = false;
    std::size_t threads = 1;
};

struct IdentityCell {
    std::size_t sample_index = 0;
    std::size_t point_index = 0;
    double energy = 0.0;
    double eta = 0.0;
    double f_diag = 0.0;     ///< |(f, diag G)| / ||diag G||_2; NaN without f
    double balancing = 0.0;  ///< block-trace balancing ratio; NaN without f
    double f_v = 0.0;
    double f_w = 0.0;
    double ward = 0.0;       ///< max_i |sum_j |G_ij|^2 - Im G_ii / eta| / (Im G_ii / eta)
    double trace_consistency = 0.0;  ///< LU trace vs eigenvalue trace, relative
    bool herglotz = true;    ///< Im G_ii > 0 for all i
};

struct IdentityReport {
    std::size_t dim = 0;
    bool has_f = false;
    IdentityOptions options;
    std::vector<IdentityCell> cells;
    double max_f_diag = 0.0;
    double max_balancing = 0.0;
    double max_f_v = 0.0;
    double max_f_w = 0.0;
    double max_ward = 0.0;
    double max_trace_consistency = 0.0;
    bool herglotz = true;
    bool control_run = false;
    double control_residual = 0.0;  ///< largest residual seen on the broken input
    bool control_detected = false;

    bool identities_hold() const;
    bool passed() const { return identities_hold() && (!control_run || control_detected); }
};

/// Exact resolvent identities per (sample, z), with G from dense LU:
/// (f, diag G) = 0, block-trace balancing, (f, v) = 0, (f, w) = 0 for every
/// bipartite block, plus the Ward identity, Herglotz positivity and the
/// spectral trace cross-check for any profile. The negative control breaks
/// the bipartite structure (nonzero diagonal block) or, for profiles without
/// bipartite blocks, applies the half-split balancing test to a primitive
/// sample; either must violate the identity.
IdentityReport check_identities(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                                const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                                const IdentityOptions& options);

/// Helpers shared by the suites; exposed for tests.
struct FProjection {
    std::vector<std::size_t> positive;  ///< original indices with f_i = +1/sqrt(2d)
    std::vector<std::size_t> negative;
};
std::vector<FProjection> f_vectors(const BlockDecomposition& decomposition);
/// |(f, x)| for one f vector.
double f_inner(const FProjection& f, const Eigen::VectorXcd& x);

/// v = diag G - m, Upsilon, w for one cell.
struct SceTerms {
    Eigen::VectorXcd v;
    Eigen::VectorXcd upsilon;
    Eigen::VectorXcd w;
    Eigen::VectorXcd linearized;  ///< (1 - m^2 S) v
};
SceTerms sce_terms(const Eigen::MatrixXd& s, const Eigen::VectorXcd& diag, cplx m);

}  // namespace locallaw
