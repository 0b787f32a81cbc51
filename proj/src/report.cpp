#include "locallaw/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "locallaw/matrix_io.hpp"

#ifndef LOCALLAW_VERSION
#define LOCALLAW_VERSION "0.0.0"
#endif

namespace locallaw {

namespace {

std::string join_row(std::initializer_list<std::string> fields) {
    std::string row;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) row += ',';
        row += f;
        first = false;
    }
    row += '\n';
    return row;
}

std::string num(double x) { return format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json optional_json(const std::optional<double>& x) { return x ? finite_or_null(*x) : Json(nullptr); }

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string eta_plot(const LocalLawReport& report, bool bound) {
    std::map<double, std::vector<double>> by_eta;
    for (const auto& c : report.cells) {
        const double y = bound ? c.bound_averaged : c.observed_averaged;
        if (std::isfinite(y)) by_eta[c.eta].push_back(y);
    }
    std::string out = bound ? "# eta bound_averaged\n" : "# eta median_observed_averaged\n";
    for (const auto& [eta, ys] : by_eta) out += num(eta) + ' ' + num(median(ys)) + '\n';
    return out;
}

}  // namespace

std::string_view version() { return LOCALLAW_VERSION; }

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

Json provenance_json(const Provenance& provenance) {
    Json j;
    j["version"] = std::string(version());
    j["config_hash"] = provenance.config_hash;
    j["master_seed"] = provenance.master_seed;
    return j;
}

std::string local_law_csv(const LocalLawReport& report) {
    std::string out = "sample_index,E,eta,observed_entrywise,observed_averaged,bound_entrywise,bound_averaged,ratio\n";
    for (const auto& c : report.cells) {
        out += join_row({num(c.sample_index), num(c.energy), num(c.eta), num(c.observed_entrywise),
                         num(c.observed_averaged), num(c.bound_entrywise), num(c.bound_averaged), num(c.ratio())});
    }
    return out;
}

std::string rigidity_csv(const RigidityReport& report) {
    std::string out = "sample_index,alpha,eigenvalue,quantile,bound,ratio\n";
    for (const auto& e : report.entries) {
        out += join_row({num(e.sample_index), num(e.alpha), num(e.eigenvalue), num(e.quantile), num(e.bound),
                         num(e.ratio())});
    }
    return out;
}

std::string sce_csv(const SceReport& report) {
    std::string out =
        "sample_index,E,eta,upsilon_inf,v_inf,psi2,linearization,w_inf,gamma_hat,f_v,f_w,min_abs_g\n";
    for (const auto& c : report.cells) {
        out += join_row({num(c.sample_index), num(c.energy), num(c.eta), num(c.upsilon_inf), num(c.v_inf),
                         num(c.psi2()), num(c.linearization), num(c.w_inf), num(c.gamma_hat), num(c.f_v),
                         num(c.f_w), num(c.min_abs_g)});
    }
    return out;
}

std::string identity_csv(const IdentityReport& report) {
    std::string out = "sample_index,E,eta,f_diag,balancing,f_v,f_w,ward,trace_consistency,herglotz\n";
    for (const auto& c : report.cells) {
        out += join_row({num(c.sample_index), num(c.energy), num(c.eta), num(c.f_diag), num(c.balancing),
                         num(c.f_v), num(c.f_w), num(c.ward), num(c.trace_consistency),
                         c.herglotz ? "1" : "0"});
    }
    return out;
}

std::string error_vs_eta_plot(const LocalLawReport& report) { return eta_plot(report, false); }
std::string bound_vs_eta_plot(const LocalLawReport& report) { return eta_plot(report, true); }

Json to_json(const DominationSummary& summary) {
    Json j;
    Json exceed = Json::array();
    for (std::size_t k = 0; k < summary.epsilons.size(); ++k) {
        exceed.push_back({{"epsilon", summary.epsilons[k]}, {"fraction", summary.exceedance[k]}});
    }
    j["exceedance"] = exceed;
    j["exponent"] = finite_or_null(summary.exponent);
    j["worst_ratio"] = finite_or_null(summary.worst_ratio);
    j["count"] = summary.count;
    return j;
}

Json to_json(const LocalLawReport& report) {
    Json j;
    j["suite"] = report.suite;
    j["passed"] = report.passed();
    j["dim"] = report.dim;
    j["m_bound"] = report.m_bound;
    j["domination_n"] = report.domination_n;
    j["decision_epsilon"] = report.decision_epsilon;
    j["max_exceedance"] = report.max_exceedance;
    j["cells"] = report.cells.size();
    j["failed_cells"] = report.failed_cells;
    j["full_matrix"] = report.full_matrix;
    if (report.entrywise_evaluated) {
        j["entrywise"] = to_json(report.entrywise);
    } else {
        j["entrywise"] = nullptr;
    }
    j["averaged"] = to_json(report.averaged);
    if (report.block_direct_gap) j["block_direct_gap"] = finite_or_null(*report.block_direct_gap);
    return j;
}

Json to_json(const RigidityReport& report) {
    Json j;
    j["suite"] = "rigidity";
    j["passed"] = report.passed();
    j["dim"] = report.dim;
    j["m_bound"] = report.m_bound;
    j["epsilon"] = report.epsilon;
    j["slack"] = report.slack;
    j["bulk_first"] = report.bulk_first;
    j["bulk_last"] = report.bulk_last;
    j["entries"] = report.entries.size();
    j["flagged"] = report.flagged;
    j["flagged_fraction"] = report.flagged_fraction;
    j["max_flagged"] = report.max_flagged;
    j["worst_ratio"] = finite_or_null(report.worst_ratio);
    j["median_eigenvalue_max"] = report.median_eigenvalue_max;
    return j;
}

Json to_json(const SceReport& report) {
    Json j;
    j["suite"] = report.suite;
    j["passed"] = report.passed();
    j["dim"] = report.dim;
    j["m_bound"] = report.m_bound;
    j["domination_n"] = report.domination_n;
    j["has_f"] = report.has_f;
    j["cells"] = report.cells.size();
    j["lambda_proxy"] = "max_i |v_i|";
    j["psi2_proxy"] = "||Upsilon||_inf + ||v||_inf^2";
    j["max_f_v"] = report.has_f ? Json(report.max_f_v) : Json(nullptr);
    j["max_f_w"] = report.has_f ? Json(report.max_f_w) : Json(nullptr);
    j["identity_tol"] = report.options.identity_tol;
    j["linearization_pass_fraction"] = report.linearization_pass_fraction;
    j["fa_pass_fraction"] = report.fa_pass_fraction;
    j["hazards"] = report.hazards;
    return j;
}

Json to_json(const IdentityReport& report) {
    Json j;
    j["suite"] = "identities";
    j["passed"] = report.passed();
    j["identities_hold"] = report.identities_hold();
    j["dim"] = report.dim;
    j["has_f"] = report.has_f;
    j["cells"] = report.cells.size();
    j["tol"] = report.options.tol;
    Json residuals;
    residuals["f_diag"] = report.has_f ? Json(report.max_f_diag) : Json(nullptr);
    residuals["balancing"] = report.has_f ? Json(report.max_balancing) : Json(nullptr);
    residuals["f_v"] = report.has_f ? Json(report.max_f_v) : Json(nullptr);
    residuals["f_w"] = report.has_f ? Json(report.max_f_w) : Json(nullptr);
    residuals["ward"] = report.max_ward;
    residuals["trace_consistency"] = report.max_trace_consistency;
    j["residual_maxima"] = residuals;
    j["herglotz"] = report.herglotz;
    Json control;
    control["run"] = report.control_run;
    control["residual"] = report.control_run ? finite_or_null(report.control_residual) : Json(nullptr);
    control["threshold"] = report.options.control_threshold;
    control["detected"] = report.control_detected;
    j["negative_control"] = control;
    return j;
}

Json to_json(const AssumptionReport& report) {
    Json j;
    j["passed"] = report.all_pass();
    j["dim"] = report.dim;
    j["m_bound"] = report.m_bound;
    j["symmetric"] = report.symmetric;
    j["max_asymmetry"] = report.max_asymmetry;
    j["a1_entry_bound"] = report.a1_entry_bound;
    j["m_in_range"] = report.m_in_range;
    j["max_entry"] = report.max_entry;
    j["min_entry"] = report.min_entry;
    j["a2_row_sums"] = report.a2_row_sums;
    j["max_row_deviation"] = report.max_row_deviation;
    j["bad_rows"] = report.bad_rows;
    j["eigensolver_ok"] = report.eigensolver_ok;
    if (!report.eigensolver_error.empty()) j["eigensolver_error"] = report.eigensolver_error;
    j["a3_spectrum"] = report.a3_spectrum;
    j["plus_one_multiplicity"] = report.plus_one_multiplicity;
    j["minus_one_multiplicity"] = report.minus_one_multiplicity;
    j["rho"] = optional_json(report.rho);
    return j;
}

Json to_json(const BlockDecomposition& decomposition, const CertReport& certificate) {
    Json j;
    j["passed"] = certificate.all_ok() && !certificate.structural_inconsistency;
    j["dim"] = decomposition.dim();
    j["p"] = decomposition.bipartite_blocks.size();
    j["q"] = decomposition.primitive_blocks.size();
    j["permutation"] = decomposition.permutation;
    j["rho_bound"] = optional_json(certificate.rho_bound);
    j["structural_inconsistency"] = certificate.structural_inconsistency;
    Json blocks = Json::array();
    for (std::size_t k = 0; k < certificate.blocks.size(); ++k) {
        const auto& b = certificate.blocks[k];
        Json jb;
        jb["type"] = b.bipartite ? "bipartite" : "primitive";
        jb["offset"] = b.offset;
        jb["size"] = b.size;
        if (b.bipartite && k < decomposition.bipartite_blocks.size()) {
            jb["column_indices"] = decomposition.bipartite_blocks[k].column_indices;
            jb["row_indices"] = decomposition.bipartite_blocks[k].row_indices;
        } else {
            jb["indices"] = b.original_indices;
        }
        jb["plus_one_multiplicity"] = b.plus_one_multiplicity;
        jb["minus_one_multiplicity"] = b.minus_one_multiplicity;
        jb["rho_measured"] = optional_json(b.rho_measured);
        jb["unit_eigenvalues_ok"] = b.unit_eigenvalues_ok;
        jb["interior_ok"] = b.interior_ok;
        jb["size_ok"] = b.size_ok;
        jb["consistent"] = b.consistent;
        blocks.push_back(jb);
    }
    j["blocks"] = blocks;
    return j;
}

std::string dump(const Json& json) { return json.dump(2) + '\n'; }

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace locallaw
