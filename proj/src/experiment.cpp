#include "locallaw/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locallaw/matrix_io.hpp"
#include "locallaw/report.hpp"
#include "locallaw/structure.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

namespace {

std::string pct(double fraction) {
    std::ostringstream out;
    out.precision(3);
    out << 100.0 * fraction << "%";
    return out.str();
}

std::string sci(double x) {
    std::ostringstream out;
    out.precision(3);
    out << x;
    return out.str();
}

class Writer {
public:
    Writer(const ExperimentConfig& config, RunResult& result) : config_(config), result_(result) {
        std::filesystem::create_directories(config.output_dir);
    }

    void text(const std::string& name, std::string_view content) {
        const auto path = config_.output_dir / name;
        write_file(path, content);
        result_.files.push_back(path);
    }

    void json(const std::string& name, Json body) {
        Json j;
        j["provenance"] = provenance_json({config_.hash(), config_.ensemble.master_seed});
        j["config_name"] = config_.name;
        for (auto& [k, v] : body.items()) j[k] = v;
        text(name, dump(j));
    }

private:
    const ExperimentConfig& config_;
    RunResult& result_;
};

struct SuiteOutcome {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string line;
};

std::string local_law_line(const LocalLawReport& r) {
    std::string line = "averaged exceedance " + pct(r.averaged.at(r.decision_epsilon)) + ", exponent " +
                       sci(r.averaged.exponent);
    if (r.entrywise_evaluated) {
        line += "; entrywise exceedance " + pct(r.entrywise.at(r.decision_epsilon)) + ", exponent " +
                sci(r.entrywise.exponent);
    }
    if (r.block_direct_gap) line += "; block/direct gap " + sci(*r.block_direct_gap);
    if (r.failed_cells) line += "; failed cells " + std::to_string(r.failed_cells);
    return line;
}

SuiteOutcome run_suite(const ExperimentConfig& config, const std::string& suite, Writer& out) {
    SuiteOutcome o;
    o.name = suite;
    const VarianceProfile profile = build_profile(config.profile);
    const double m = profile.m_bound();

    if (suite == "local-law" || suite == "outside") {
        LocalLawReport r;
        if (suite == "local-law") {
            r = check_local_law(profile, config.ensemble, local_law_grid(config, m), config.local_law);
            out.text("local-law_error_vs_eta.dat", error_vs_eta_plot(r));
            out.text("local-law_bound_vs_eta.dat", bound_vs_eta_plot(r));
        } else {
            if (config.grid.outside_points.empty()) {
                o.skipped = o.passed = true;
                o.line = "no outside points configured";
                return o;
            }
            r = check_outside_law(profile, config.ensemble, outside_grid(config), config.local_law);
        }
        out.text(suite + ".csv", local_law_csv(r));
        out.json(suite + ".json", to_json(r));
        o.passed = r.passed();
        o.line = local_law_line(r);
    } else if (suite == "mp-hard-edge") {
        const auto factor = build_factor(config.profile);
        if (!factor) {
            o.skipped = o.passed = true;
            o.line = "profile has no bipartite factor";
            return o;
        }
        const LocalLawReport r = check_mp_hard_edge(*factor, config.ensemble, w_grid(config, factor->m_bound()),
                                                    config.local_law);
        out.text("mp-hard-edge.csv", local_law_csv(r));
        out.text("mp-hard-edge_error_vs_eta.dat", error_vs_eta_plot(r));
        out.text("mp-hard-edge_bound_vs_eta.dat", bound_vs_eta_plot(r));
        out.json("mp-hard-edge.json", to_json(r));
        o.passed = r.passed();
        o.line = local_law_line(r);
    } else if (suite == "rigidity") {
        const RigidityReport r = check_rigidity(profile, config.ensemble, config.rigidity);
        out.text("rigidity.csv", rigidity_csv(r));
        out.json("rigidity.json", to_json(r));
        o.passed = r.passed();
        o.line = "flagged " + pct(r.flagged_fraction) + " of bulk indices " + std::to_string(r.bulk_first) +
                 ".." + std::to_string(r.bulk_last) + ", worst ratio " + sci(r.worst_ratio);
    } else if (suite == "sce" || suite == "fa") {
        const BlockDecomposition decomposition = decompose(profile, config.profile.zero_tol);
        const auto grid = local_law_grid(config, m);
        const SceReport r = suite == "sce"
                                ? check_sce(profile, decomposition, config.ensemble, grid, config.sce)
                                : check_fluctuation_averaging(profile, decomposition, config.ensemble, grid, config.sce);
        out.text(suite + ".csv", sce_csv(r));
        out.json(suite + ".json", to_json(r));
        o.passed = r.passed();
        if (suite == "sce") {
            o.line = "linearization within C psi^2 in " + pct(r.linearization_pass_fraction) + " of cells";
            if (r.has_f) o.line += ", max |(f, v)| " + sci(r.max_f_v);
        } else {
            o.line = "w within N^slack Gamma psi^2 in " + pct(r.fa_pass_fraction) + " of cells";
            if (r.has_f) o.line += ", max |(f, w)| " + sci(r.max_f_w);
        }
        if (r.hazards) o.line += ", division hazards " + std::to_string(r.hazards);
    } else if (suite == "identities") {
        const BlockDecomposition decomposition = decompose(profile, config.profile.zero_tol);
        const IdentityReport r =
            check_identities(profile, decomposition, config.ensemble, local_law_grid(config, m), config.identities);
        out.text("identities.csv", identity_csv(r));
        out.json("identities.json", to_json(r));
        o.passed = r.passed();
        std::ostringstream line;
        line << "ward " << sci(r.max_ward) << ", trace " << sci(r.max_trace_consistency);
        if (r.has_f) {
            line << ", f.diag " << sci(r.max_f_diag) << ", balancing " << sci(r.max_balancing) << ", f.v "
                 << sci(r.max_f_v) << ", f.w " << sci(r.max_f_w);
        }
        if (r.control_run) {
            line << "; negative control " << (r.control_detected ? "detected" : "NOT detected") << " (residual "
                 << sci(r.control_residual) << ")";
        }
        o.line = line.str();
    } else {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    return o;
}

template <typename Fn>
RunResult guarded(Fn&& fn) {
    RunResult result;
    try {
        fn(result);
    } catch (const std::exception& e) {
        result.exit_code = kExitInfra;
        result.summary += std::string("error: ") + e.what() + "\n";
    }
    return result;
}

}  // namespace

VarianceProfile build_profile(const ProfileSpec& spec) {
    switch (spec.kind) {
        case ProfileKind::flat_bipartite: return build_bipartite_profile(flat_bipartite_factor(spec.dim));
        case ProfileKind::band_bipartite:
            return build_bipartite_profile(band_bipartite_factor(spec.dim, spec.bandwidth));
        case ProfileKind::band_primitive: return build_band_profile(spec.dim, spec.bandwidth);
        case ProfileKind::file: return load_profile(spec.file);
    }
    throw ConfigError("unknown profile kind");
}

std::optional<BipartiteFactor> build_factor(const ProfileSpec& spec) {
    if (spec.kind == ProfileKind::flat_bipartite) return flat_bipartite_factor(spec.dim);
    if (spec.kind == ProfileKind::band_bipartite) return band_bipartite_factor(spec.dim, spec.bandwidth);
    return std::nullopt;
}

std::vector<SpectralPoint> local_law_grid(const ExperimentConfig& config, double m_bound) {
    const GridSpec& g = config.grid;
    const double eta_lo = g.eta_min.value_or(std::pow(m_bound, -1.0 + config.local_law.gamma));
    const double eta_hi = std::max(g.eta_max, eta_lo);
    std::vector<SpectralPoint> grid;
    for (std::size_t k = 0; k < g.eta_points; ++k) {
        const double t = g.eta_points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(g.eta_points - 1);
        const double eta = eta_lo * std::pow(eta_hi / eta_lo, t);
        for (std::size_t i = 0; i < g.e_points; ++i) {
            const double s = g.e_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(g.e_points - 1);
            grid.emplace_back(g.e_min + s * (g.e_max - g.e_min), eta);
        }
    }
    return grid;
}

std::vector<SpectralPoint> outside_grid(const ExperimentConfig& config) {
    std::vector<SpectralPoint> grid;
    for (const auto& [e, eta] : config.grid.outside_points) grid.emplace_back(e, eta);
    return grid;
}

std::vector<cplx> w_grid(const ExperimentConfig& config, double m_bound) {
    if (!config.grid.w_points.empty()) return config.grid.w_points;
    const double floor = std::pow(m_bound, -1.0 + config.local_law.gamma);
    std::vector<cplx> grid{{0.0, floor}};
    const std::size_t n = config.grid.w_extra;
    for (std::size_t k = 1; k <= n; ++k) {
        const double re = 3.6 * static_cast<double>(k) / static_cast<double>(n);
        grid.emplace_back(re, std::sqrt(re) * floor);
    }
    return grid;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"local-law", "outside", "rigidity",   "sce",
                                                "fa",        "mp-hard-edge", "identities"};
    return names;
}

RunResult run_check_profile(const ExperimentConfig& config) {
    return guarded([&](RunResult& result) {
        const VarianceProfile profile = build_profile(config.profile);
        const AssumptionReport r = validate_assumptions(profile, config.profile.assumptions);
        Writer out(config, result);
        out.json("assumptions.json", to_json(r));
        std::ostringstream s;
        s << "symmetric: " << (r.symmetric ? "ok" : "FAIL") << "\n";
        s << "A1 entry bound: " << (r.a1_entry_bound ? "ok" : "FAIL") << " (max entry " << sci(r.max_entry)
          << ", 1/M " << sci(1.0 / r.m_bound) << ")\n";
        s << "A1 scaling N^delta <= M <= N: " << (r.m_in_range ? "ok" : "FAIL") << "\n";
        s << "A2 row sums: " << (r.a2_row_sums ? "ok" : "FAIL");
        if (!r.bad_rows.empty()) {
            s << " (rows";
            for (std::size_t k = 0; k < std::min<std::size_t>(r.bad_rows.size(), 10); ++k) s << ' ' << r.bad_rows[k];
            if (r.bad_rows.size() > 10) s << " ...";
            s << ")";
        }
        s << "\nA3 spectrum: " << (r.a3_spectrum ? "ok" : "FAIL");
        if (r.rho) s << " (rho " << sci(*r.rho) << ")";
        if (!r.eigensolver_ok) s << " eigensolver: " << r.eigensolver_error;
        s << "\n";
        result.summary = s.str();
        result.exit_code = r.all_pass() ? kExitPass : kExitFail;
    });
}

RunResult run_decompose(const ExperimentConfig& config) {
    return guarded([&](RunResult& result) {
        const VarianceProfile profile = build_profile(config.profile);
        const BlockDecomposition d = decompose(profile, config.profile.zero_tol);
        const CertReport cert = certify_block_spectra(d, profile.gap(), config.profile.assumptions.tol);
        Writer out(config, result);
        out.json("decomposition.json", to_json(d, cert));
        std::ostringstream s;
        s << "p = " << d.bipartite_blocks.size() << ", q = " << d.primitive_blocks.size() << "\n";
        for (const auto& b : cert.blocks) {
            s << (b.bipartite ? "bipartite" : "primitive") << " block at " << b.offset << ", size " << b.size
              << (b.ok() ? ": ok" : ": FAIL") << "\n";
        }
        if (cert.structural_inconsistency) s << "structural inconsistency\n";
        result.summary = s.str();
        result.exit_code = cert.all_ok() && !cert.structural_inconsistency ? kExitPass : kExitFail;
    });
}

RunResult run_verify(const ExperimentConfig& config, std::string_view suite) {
    return guarded([&](RunResult& result) {
        std::vector<std::string> suites;
        if (suite == "all") {
            suites = suite_names();
        } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
            suites.emplace_back(suite);
        } else {
            throw ConfigError("unknown suite '" + std::string(suite) + "'");
        }
        Writer out(config, result);
        Json summary = Json::array();
        bool all_passed = true;
        for (const auto& name : suites) {
            const SuiteOutcome o = run_suite(config, name, out);
            all_passed = all_passed && o.passed;
            result.summary += name + ": " + (o.skipped ? "SKIP" : (o.passed ? "PASS" : "FAIL")) + " (" + o.line + ")\n";
            summary.push_back({{"suite", name}, {"passed", o.passed}, {"skipped", o.skipped}});
        }
        Json body;
        body["suites"] = summary;
        body["passed"] = all_passed;
        out.json("summary.json", body);
        result.exit_code = all_passed ? kExitPass : kExitFail;
    });
}

}  // namespace locallaw
