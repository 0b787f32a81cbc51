#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "locallaw/parallel.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double inf_norm(const Eigen::VectorXcd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

SceReport run_sce(const std::string& suite, const VarianceProfile& profile,
                  const BlockDecomposition& decomposition, const EnsembleConfig& config,
                  const std::vector<SpectralPoint>& z_grid, const SceOptions& options) {
    config.validate();
    if (z_grid.empty()) throw std::invalid_argument("check_" + suite + ": empty z grid");
    if (decomposition.dim() != profile.dim()) {
        throw std::invalid_argument("check_" + suite + ": decomposition does not match profile");
    }
    const DomainParams domain{options.gamma, profile.m_bound()};
    for (const auto& z : z_grid) {
        if (!in_domain(z, domain)) throw DomainError("check_" + suite + ": z outside D(gamma)");
    }

    SceReport report;
    report.suite = suite;
    report.dim = profile.dim();
    report.m_bound = profile.m_bound();
    report.domination_n = options.domination_n.value_or(static_cast<double>(profile.dim()));
    report.options = options;
    const auto fs = f_vectors(decomposition);
    report.has_f = !fs.empty();

    const StabilityNorm stability(decomposition);
    const std::size_t nz = z_grid.size();
    std::vector<double> gamma(nz);
    std::vector<cplx> m(nz);
    for (std::size_t k = 0; k < nz; ++k) {
        gamma[k] = stability(z_grid[k]);
        m[k] = m_sc(z_grid[k].z());
    }

    const double sqrt_dim = std::sqrt(static_cast<double>(profile.dim()));
    report.cells.resize(config.sample_count * nz);
    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        const SpectralResolvent g(eigen(sample_hermitian(profile, config, s), true));
        for (std::size_t k = 0; k < nz; ++k) {
            SceCell& c = report.cells[s * nz + k];
            c.sample_index = s;
            c.point_index = k;
            c.energy = z_grid[k].energy();
            c.eta = z_grid[k].eta();
            c.gamma_hat = gamma[k];

            const Eigen::VectorXcd diag = g.diag(z_grid[k].z());
            c.min_abs_g = diag.cwiseAbs().minCoeff();
            c.division_hazard = c.min_abs_g < 1e-12;
            if (c.division_hazard) {
                c.upsilon_inf = c.linearization = c.w_inf = c.f_v = c.f_w = kNaN;
                c.v_inf = kNaN;
                continue;
            }
            const SceTerms t = sce_terms(profile.entries(), diag, m[k]);
            c.v_inf = inf_norm(t.v);
            c.upsilon_inf = inf_norm(t.upsilon);
            c.linearization = inf_norm(t.linearized);
            c.w_inf = inf_norm(t.w);
            if (report.has_f) {
                const double scale = t.v.norm() * sqrt_dim;
                double fv = 0.0;
                double fw = 0.0;
                for (const auto& f : fs) {
                    fv = std::max(fv, f_inner(f, t.v));
                    fw = std::max(fw, f_inner(f, t.w));
                }
                c.f_v = scale > 0.0 ? fv / scale : 0.0;
                c.f_w = scale > 0.0 ? fw / scale : 0.0;
            } else {
                c.f_v = c.f_w = kNaN;
            }
        }
    });

    const double fa_slack = std::pow(report.domination_n, options.fa_slack_exponent);
    std::size_t lin_ok = 0;
    std::size_t fa_ok = 0;
    for (const auto& c : report.cells) {
        if (c.division_hazard) {
            ++report.hazards;
            continue;
        }
        if (report.has_f) {
            report.max_f_v = std::max(report.max_f_v, c.f_v);
            report.max_f_w = std::max(report.max_f_w, c.f_w);
        }
        if (c.linearization <= options.linearization_constant * c.psi2()) ++lin_ok;
        if (c.w_inf <= fa_slack * c.gamma_hat * c.psi2()) ++fa_ok;
    }
    const double total = static_cast<double>(report.cells.size());
    report.linearization_pass_fraction = static_cast<double>(lin_ok) / total;
    report.fa_pass_fraction = static_cast<double>(fa_ok) / total;
    return report;
}

}  // namespace

std::vector<FProjection> f_vectors(const BlockDecomposition& decomposition) {
    std::vector<FProjection> out;
    for (const auto& b : decomposition.bipartite_blocks) out.push_back({b.column_indices, b.row_indices});
    return out;
}

double f_inner(const FProjection& f, const Eigen::VectorXcd& x) {
    cplx plus{};
    cplx minus{};
    for (std::size_t i : f.positive) plus += x(static_cast<Eigen::Index>(i));
    for (std::size_t i : f.negative) minus += x(static_cast<Eigen::Index>(i));
    const double norm = std::sqrt(static_cast<double>(f.positive.size() + f.negative.size()));
    return std::abs(plus - minus) / norm;
}

SceTerms sce_terms(const Eigen::MatrixXd& s, const Eigen::VectorXcd& diag, cplx m) {
    SceTerms t;
    t.v = diag.array() - m;
    const Eigen::VectorXcd sv = s.cast<cplx>() * t.v;
    t.upsilon.resize(t.v.size());
    for (Eigen::Index i = 0; i < t.v.size(); ++i) t.upsilon(i) = 1.0 / (m + t.v(i)) - 1.0 / m + sv(i);
    t.linearized = t.v - m * m * sv;
    const cplx mean = t.v.mean();
    t.w = s.cast<cplx>() * (t.v.array() - mean).matrix();
    return t;
}

bool SceReport::passed() const {
    if (cells.empty() || hazards != 0) return false;
    if (suite == "fa") {
        return (!has_f || max_f_w <= options.identity_tol) && fa_pass_fraction >= options.fa_fraction;
    }
    return (!has_f || max_f_v <= options.identity_tol) &&
           linearization_pass_fraction >= options.linearization_fraction;
}

SceReport check_sce(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                    const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                    const SceOptions& options) {
    return run_sce("sce", profile, decomposition, config, z_grid, options);
}

SceReport check_fluctuation_averaging(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                                      const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                                      const SceOptions& options) {
    return run_sce("fa", profile, decomposition, config, z_grid, options);
}

}  // namespace locallaw
