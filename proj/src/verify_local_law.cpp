#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "locallaw/parallel.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void summarize(LocalLawReport& report, const std::vector<double>& epsilons) {
    std::vector<double> obs_e, bnd_e, obs_a, bnd_a;
    for (const auto& c : report.cells) {
        if (!c.error.empty()) {
            ++report.failed_cells;
            continue;
        }
        obs_a.push_back(c.observed_averaged);
        bnd_a.push_back(c.bound_averaged);
        if (report.entrywise_evaluated) {
            obs_e.push_back(c.observed_entrywise);
            bnd_e.push_back(c.bound_entrywise);
        }
    }
    if (!obs_a.empty()) report.averaged = estimate_domination(obs_a, bnd_a, report.domination_n, epsilons);
    if (!obs_e.empty()) report.entrywise = estimate_domination(obs_e, bnd_e, report.domination_n, epsilons);
}

std::vector<double> with_decision(std::vector<double> epsilons, double decision) {
    for (double e : epsilons) {
        if (std::abs(e - decision) < 1e-12) return epsilons;
    }
    epsilons.push_back(decision);
    return epsilons;
}

}  // namespace

double LocalLawCell::ratio() const {
    double r = observed_averaged / bound_averaged;
    if (std::isfinite(observed_entrywise) && std::isfinite(bound_entrywise)) {
        r = std::max(r, observed_entrywise / bound_entrywise);
    }
    return r;
}

bool LocalLawReport::passed() const {
    if (failed_cells != 0 || averaged.count == 0) return false;
    if (averaged.at(decision_epsilon) > max_exceedance) return false;
    if (entrywise_evaluated && (entrywise.count == 0 || entrywise.at(decision_epsilon) > max_exceedance)) {
        return false;
    }
    if (block_direct_gap && !(*block_direct_gap <= 1e-8)) return false;
    return true;
}

LocalLawReport check_local_law(const VarianceProfile& profile, const EnsembleConfig& config,
                               const std::vector<SpectralPoint>& z_grid, const SuiteOptions& options) {
    config.validate();
    if (z_grid.empty()) throw std::invalid_argument("check_local_law: empty z grid");
    const DomainParams domain{options.gamma, profile.m_bound()};
    for (const auto& z : z_grid) {
        if (!in_domain(z, domain)) {
            throw DomainError("check_local_law: z = " + std::to_string(z.energy()) + " + " +
                              std::to_string(z.eta()) + "i is outside D(gamma)");
        }
    }

    LocalLawReport report;
    report.suite = "local-law";
    report.dim = profile.dim();
    report.m_bound = profile.m_bound();
    report.domination_n = options.domination_n.value_or(static_cast<double>(profile.dim()));
    report.decision_epsilon = options.decision_epsilon;
    report.max_exceedance = options.max_exceedance;
    report.full_matrix = options.keep_full.value_or(default_keep_full(profile.dim()));

    const std::size_t nz = z_grid.size();
    report.cells.resize(config.sample_count * nz);
    std::vector<cplx> m(nz);
    std::vector<ErrorBound> bounds(nz);
    for (std::size_t k = 0; k < nz; ++k) {
        m[k] = m_sc(z_grid[k].z());
        bounds[k] = pi_bound(z_grid[k], profile.m_bound());
    }

    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        auto cell_at = [&](std::size_t k) -> LocalLawCell& { return report.cells[s * nz + k]; };
        for (std::size_t k = 0; k < nz; ++k) {
            LocalLawCell& c = cell_at(k);
            c.sample_index = s;
            c.point_index = k;
            c.energy = z_grid[k].energy();
            c.eta = z_grid[k].eta();
            c.bound_entrywise = bounds[k].entrywise;
            c.bound_averaged = bounds[k].averaged;
            c.observed_entrywise = c.observed_averaged = kNaN;
        }
        try {
            const SampledMatrix h = sample_hermitian(profile, config, s);
            const SpectralResolvent g(eigen(h, true));
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            if (!report.full_matrix) pairs = offdiagonal_subset(h.dim(), 10 * h.dim(), h.seed_used);
            for (std::size_t k = 0; k < nz; ++k) {
                LocalLawCell& c = cell_at(k);
                const cplx z = z_grid[k].z();
                c.observed_averaged = std::abs(g.trace_normalized(z) - m[k]);
                c.observed_entrywise = report.full_matrix ? g.max_entry_error(z, m[k])
                                                          : g.max_entry_error(z, m[k], pairs);
            }
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < nz; ++k) cell_at(k).error = e.what();
        }
    });

    summarize(report, with_decision(options.epsilons, options.decision_epsilon));
    return report;
}

LocalLawReport check_outside_law(const VarianceProfile& profile, const EnsembleConfig& config,
                                 const std::vector<SpectralPoint>& z_list, const SuiteOptions& options) {
    config.validate();
    if (z_list.empty()) throw std::invalid_argument("check_outside_law: empty z list");
    const DomainParams domain{options.gamma, profile.m_bound()};
    std::vector<double> bounds;
    std::vector<cplx> m;
    for (const auto& z : z_list) {
        bounds.push_back(outside_bound(z, domain));  // throws DomainError on violations
        m.push_back(m_sc(z.z()));
    }

    LocalLawReport report;
    report.suite = "outside";
    report.dim = profile.dim();
    report.m_bound = profile.m_bound();
    report.domination_n = options.domination_n.value_or(static_cast<double>(profile.dim()));
    report.decision_epsilon = options.decision_epsilon;
    report.max_exceedance = options.max_exceedance;
    report.entrywise_evaluated = false;
    report.full_matrix = false;

    const std::size_t nz = z_list.size();
    report.cells.resize(config.sample_count * nz);
    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        for (std::size_t k = 0; k < nz; ++k) {
            LocalLawCell& c = report.cells[s * nz + k];
            c.sample_index = s;
            c.point_index = k;
            c.energy = z_list[k].energy();
            c.eta = z_list[k].eta();
            c.bound_entrywise = c.observed_entrywise = kNaN;
            c.bound_averaged = bounds[k];
            c.observed_averaged = kNaN;
        }
        try {
            const EigenData ed = eigen(sample_hermitian(profile, config, s), false);
            for (std::size_t k = 0; k < nz; ++k) {
                report.cells[s * nz + k].observed_averaged =
                    std::abs(spectral_trace(ed.eigenvalues, z_list[k].z()) - m[k]);
            }
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < nz; ++k) report.cells[s * nz + k].error = e.what();
        }
    });

    summarize(report, with_decision(options.epsilons, options.decision_epsilon));
    return report;
}

LocalLawReport check_mp_hard_edge(const BipartiteFactor& factor, const EnsembleConfig& config,
                                  const std::vector<cplx>& w_grid, const SuiteOptions& options) {
    config.validate();
    if (w_grid.empty()) throw std::invalid_argument("check_mp_hard_edge: empty w grid");
    const DomainParams domain{options.gamma, factor.m_bound()};
    std::vector<cplx> m;
    std::vector<ErrorBound> bounds;
    for (const cplx w : w_grid) {
        if (!(w.imag() > 0.0) || !in_mp_domain(w, domain)) {
            throw DomainError("check_mp_hard_edge: w = " + std::to_string(w.real()) + " + " +
                              std::to_string(w.imag()) + "i violates |w| <= 100, Im w >= sqrt|Re w| M^(-1+gamma)");
        }
        m.push_back(m_mp(w));
        bounds.push_back(mp_bound(w, factor.m_bound()));
    }

    LocalLawReport report;
    report.suite = "mp-hard-edge";
    report.dim = factor.dim();
    report.m_bound = factor.m_bound();
    report.domination_n = options.domination_n.value_or(static_cast<double>(factor.dim()));
    report.decision_epsilon = options.decision_epsilon;
    report.max_exceedance = options.max_exceedance;
    report.full_matrix = options.keep_full.value_or(default_keep_full(factor.dim()));

    const std::size_t nw = w_grid.size();
    report.cells.resize(config.sample_count * nw);
    std::vector<double> gaps(config.sample_count, 0.0);
    const cplx z0 = std::sqrt(w_grid.front());

    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        for (std::size_t k = 0; k < nw; ++k) {
            LocalLawCell& c = report.cells[s * nw + k];
            c.sample_index = s;
            c.point_index = k;
            c.energy = w_grid[k].real();
            c.eta = w_grid[k].imag();
            c.bound_entrywise = bounds[k].entrywise;
            c.bound_averaged = bounds[k].averaged;
            c.observed_entrywise = c.observed_averaged = kNaN;
        }
        try {
            const SampledMatrix h = sample_bipartite(factor, config, s);
            const Eigen::MatrixXcd x = bipartite_block(h);

            // Same matrix two ways: Schur block of G(sqrt w) / sqrt w versus a
            // direct inverse of X^*X - w.
            const CovarianceBlocks blocks = covariance_blocks(h, SpectralPoint(z0.real(), z0.imag()));
            const Eigen::MatrixXcd direct = covariance_resolvent(x, w_grid.front());
            const Eigen::MatrixXcd via_blocks = blocks.g11 / z0;
            gaps[s] = (via_blocks - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff();

            const EigenData ed = h.is_complex() ? eigen(Eigen::MatrixXcd(x.adjoint() * x), true)
                                                : eigen(Eigen::MatrixXd(x.real().transpose() * x.real()), true);
            const SpectralResolvent r(ed);
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            if (!report.full_matrix) pairs = offdiagonal_subset(r.dim(), 10 * r.dim(), h.seed_used);
            for (std::size_t k = 0; k < nw; ++k) {
                LocalLawCell& c = report.cells[s * nw + k];
                c.observed_averaged = std::abs(r.trace_normalized(w_grid[k]) - m[k]);
                c.observed_entrywise = report.full_matrix ? r.max_entry_error(w_grid[k], m[k])
                                                          : r.max_entry_error(w_grid[k], m[k], pairs);
            }
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < nw; ++k) report.cells[s * nw + k].error = e.what();
        }
    });

    double worst_gap = 0.0;
    for (double g : gaps) worst_gap = std::max(worst_gap, g);
    report.block_direct_gap = worst_gap;
    summarize(report, with_decision(options.epsilons, options.decision_epsilon));
    return report;
}

}  // namespace locallaw
