#include "locallaw/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "locallaw/matrix_io.hpp"
#include "locallaw/report.hpp"

namespace locallaw {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"name", "seed", "threads"}},
        {"profile", {"kind", "dim", "bandwidth", "file", "delta", "tol", "rho_ceiling", "zero_tol"}},
        {"ensemble", {"distribution", "symmetry", "samples"}},
        {"grid",
         {"e_min", "e_max", "e_points", "eta_min", "eta_max", "eta_points", "outside_points", "w_points", "w_extra"}},
        {"verify",
         {"epsilons", "decision_epsilon", "max_exceedance", "gamma", "domination_n", "keep_full",
          "rigidity_epsilon", "rigidity_slack", "max_flagged", "identity_tol", "control_threshold",
          "negative_control", "break_structure", "linearization_constant", "linearization_fraction",
          "fa_slack", "fa_fraction"}},
        {"output", {"dir"}},
    };
    return keys;
}

double to_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not a number: '" + text + "'");
    return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not an unsigned integer: '" + text + "'");
    return value;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": not a boolean: '" + text + "'");
}

std::vector<std::string> split_ws(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::pair<double, double> to_pair(const std::string& key, const std::string& tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ConfigError(key + ": expected a:b, got '" + tok + "'");
    return {to_double(key, tok.substr(0, colon)), to_double(key, tok.substr(colon + 1))};
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto value = sec->get_optional<std::string>(key);
        if (!value) return std::nullopt;
        std::string v = *value;
        const auto first = v.find_first_not_of(" \t");
        const auto last = v.find_last_not_of(" \t");
        return first == std::string::npos ? std::string{} : v.substr(first, last - first + 1);
    }

    void number(const std::string& section, const std::string& key, double& out) const {
        if (auto v = get(section, key)) out = to_double(section + "." + key, *v);
    }
    void count(const std::string& section, const std::string& key, std::size_t& out) const {
        if (auto v = get(section, key)) out = static_cast<std::size_t>(to_u64(section + "." + key, *v));
    }
    void flag(const std::string& section, const std::string& key, bool& out) const {
        if (auto v = get(section, key)) out = to_bool(section + "." + key, *v);
    }

private:
    const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
    const auto& keys = known_keys();
    for (const auto& [section, child] : tree) {
        const auto it = keys.find(section);
        if (it == keys.end()) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, unused] : child) {
            (void)unused;
            if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
        }
    }
}

}  // namespace

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::flat_bipartite: return "flat-bipartite";
        case ProfileKind::band_bipartite: return "band-bipartite";
        case ProfileKind::band_primitive: return "band-primitive";
        case ProfileKind::file: return "file";
    }
    return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name) {
    if (name == "flat-bipartite") return ProfileKind::flat_bipartite;
    if (name == "band-bipartite") return ProfileKind::band_bipartite;
    if (name == "band-primitive") return ProfileKind::band_primitive;
    if (name == "file") return ProfileKind::file;
    throw ConfigError("unknown profile kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (profile.kind == ProfileKind::file) {
        if (profile.file.empty()) throw ConfigError("profile.file is required for kind = file");
    } else if (profile.dim < 2) {
        throw ConfigError("profile.dim must be at least 2");
    }
    const double gamma = local_law.gamma;
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("verify.gamma must lie in (0, 1)");
    if (grid.e_points == 0 || grid.eta_points == 0) throw ConfigError("grid must be nonempty");
    if (grid.e_points > 1 && !(grid.e_max > grid.e_min)) throw ConfigError("grid.e_max must exceed grid.e_min");
    if (grid.eta_min && !(*grid.eta_min > 0.0)) throw ConfigError("grid.eta_min must be positive");
    if (!(grid.eta_max > 0.0)) throw ConfigError("grid.eta_max must be positive");
    if (grid.eta_min && *grid.eta_min > grid.eta_max) throw ConfigError("grid.eta_min exceeds grid.eta_max");
    for (const auto& [e, eta] : grid.outside_points) {
        (void)e;
        if (!(eta > 0.0)) throw ConfigError("grid.outside_points: eta must be positive");
    }
    if (local_law.epsilons.empty()) throw ConfigError("verify.epsilons must be nonempty");
    bool has_decision = false;
    for (double eps : local_law.epsilons) has_decision = has_decision || eps == local_law.decision_epsilon;
    if (!has_decision) throw ConfigError("verify.decision_epsilon must be one of verify.epsilons");
    if (local_law.domination_n && *local_law.domination_n < 2.0) throw ConfigError("verify.domination_n must be >= 2");
    try {
        ensemble.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    auto d = [](double x) { return format_double(x); };
    out << "name=" << name << '\n'
        << "profile.kind=" << to_string(profile.kind) << '\n'
        << "profile.dim=" << profile.dim << '\n'
        << "profile.bandwidth=" << profile.bandwidth << '\n'
        << "profile.file=" << profile.file.generic_string() << '\n'
        << "profile.delta=" << d(profile.assumptions.delta) << '\n'
        << "profile.tol=" << d(profile.assumptions.tol) << '\n'
        << "profile.rho_ceiling=" << d(profile.assumptions.rho_ceiling) << '\n'
        << "profile.zero_tol=" << d(profile.zero_tol) << '\n'
        << "ensemble.distribution=" << to_string(ensemble.distribution) << '\n'
        << "ensemble.symmetry=" << to_string(ensemble.symmetry) << '\n'
        << "ensemble.samples=" << ensemble.sample_count << '\n'
        << "ensemble.seed=" << ensemble.master_seed << '\n'
        << "grid.e=" << d(grid.e_min) << ',' << d(grid.e_max) << ',' << grid.e_points << '\n'
        << "grid.eta=" << (grid.eta_min ? d(*grid.eta_min) : std::string("auto")) << ',' << d(grid.eta_max)
        << ',' << grid.eta_points << '\n';
    out << "grid.outside=";
    for (const auto& [e, eta] : grid.outside_points) out << d(e) << ':' << d(eta) << ' ';
    out << "\ngrid.w=";
    for (const auto& w : grid.w_points) out << d(w.real()) << ':' << d(w.imag()) << ' ';
    out << "\ngrid.w_extra=" << grid.w_extra << '\n';
    out << "verify.epsilons=";
    for (double eps : local_law.epsilons) out << d(eps) << ' ';
    out << "\nverify.decision_epsilon=" << d(local_law.decision_epsilon) << '\n'
        << "verify.max_exceedance=" << d(local_law.max_exceedance) << '\n'
        << "verify.gamma=" << d(local_law.gamma) << '\n'
        << "verify.domination_n=" << (local_law.domination_n ? d(*local_law.domination_n) : std::string("dim"))
        << '\n'
        << "verify.keep_full="
        << (local_law.keep_full ? (*local_law.keep_full ? "true" : "false") : "auto") << '\n'
        << "verify.rigidity=" << d(rigidity.epsilon) << ',' << d(rigidity.slack_exponent) << ','
        << d(rigidity.max_flagged) << '\n'
        << "verify.identities=" << d(identities.tol) << ',' << d(identities.control_threshold) << ','
        << identities.negative_control << ',' << identities.break_structure << '\n'
        << "verify.sce=" << d(sce.identity_tol) << ',' << d(sce.linearization_constant) << ','
        << d(sce.linearization_fraction) << ',' << d(sce.fa_slack_exponent) << ',' << d(sce.fa_fraction) << '\n';
    return out.str();
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a(canonical())); }

void ExperimentConfig::set_seed(std::uint64_t seed) { ensemble.master_seed = seed; }

void ExperimentConfig::set_threads(std::size_t t) {
    threads = t == 0 ? 1 : t;
    local_law.threads = threads;
    rigidity.threads = threads;
    sce.threads = threads;
    identities.threads = threads;
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    check_keys(tree);
    const Reader r(tree);
    ExperimentConfig c;

    if (auto v = r.get("experiment", "name")) c.name = *v;
    if (auto v = r.get("experiment", "seed")) c.ensemble.master_seed = to_u64("experiment.seed", *v);
    std::size_t threads = 1;
    r.count("experiment", "threads", threads);

    if (auto v = r.get("profile", "kind")) c.profile.kind = parse_profile_kind(*v);
    r.count("profile", "dim", c.profile.dim);
    r.count("profile", "bandwidth", c.profile.bandwidth);
    if (auto v = r.get("profile", "file")) {
        std::filesystem::path p = *v;
        c.profile.file = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    r.number("profile", "delta", c.profile.assumptions.delta);
    r.number("profile", "tol", c.profile.assumptions.tol);
    r.number("profile", "rho_ceiling", c.profile.assumptions.rho_ceiling);
    r.number("profile", "zero_tol", c.profile.zero_tol);

    try {
        if (auto v = r.get("ensemble", "distribution")) c.ensemble.distribution = parse_distribution(*v);
        if (auto v = r.get("ensemble", "symmetry")) c.ensemble.symmetry = parse_symmetry_class(*v);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    r.count("ensemble", "samples", c.ensemble.sample_count);

    r.number("grid", "e_min", c.grid.e_min);
    r.number("grid", "e_max", c.grid.e_max);
    r.count("grid", "e_points", c.grid.e_points);
    if (auto v = r.get("grid", "eta_min"); v && *v != "auto") c.grid.eta_min = to_double("grid.eta_min", *v);
    r.number("grid", "eta_max", c.grid.eta_max);
    r.count("grid", "eta_points", c.grid.eta_points);
    if (auto v = r.get("grid", "outside_points")) {
        c.grid.outside_points.clear();
        for (const auto& tok : split_ws(*v)) c.grid.outside_points.push_back(to_pair("grid.outside_points", tok));
    }
    if (auto v = r.get("grid", "w_points"); v && *v != "auto") {
        for (const auto& tok : split_ws(*v)) {
            const auto [re, im] = to_pair("grid.w_points", tok);
            c.grid.w_points.emplace_back(re, im);
        }
    }
    r.count("grid", "w_extra", c.grid.w_extra);

    if (auto v = r.get("verify", "epsilons")) {
        c.local_law.epsilons.clear();
        for (const auto& tok : split_ws(*v)) c.local_law.epsilons.push_back(to_double("verify.epsilons", tok));
    }
    r.number("verify", "decision_epsilon", c.local_law.decision_epsilon);
    r.number("verify", "max_exceedance", c.local_law.max_exceedance);
    r.number("verify", "gamma", c.local_law.gamma);
    c.sce.gamma = c.local_law.gamma;
    if (auto v = r.get("verify", "domination_n"); v && *v != "dim") {
        const double n = to_double("verify.domination_n", *v);
        c.local_law.domination_n = n;
        c.rigidity.domination_n = n;
        c.sce.domination_n = n;
    }
    if (auto v = r.get("verify", "keep_full"); v && *v != "auto") c.local_law.keep_full = to_bool("verify.keep_full", *v);
    r.number("verify", "rigidity_epsilon", c.rigidity.epsilon);
    r.number("verify", "rigidity_slack", c.rigidity.slack_exponent);
    r.number("verify", "max_flagged", c.rigidity.max_flagged);
    r.number("verify", "identity_tol", c.identities.tol);
    c.sce.identity_tol = c.identities.tol;
    r.number("verify", "control_threshold", c.identities.control_threshold);
    r.flag("verify", "negative_control", c.identities.negative_control);
    r.flag("verify", "break_structure", c.identities.break_structure);
    r.number("verify", "linearization_constant", c.sce.linearization_constant);
    r.number("verify", "linearization_fraction", c.sce.linearization_fraction);
    r.number("verify", "fa_slack", c.sce.fa_slack_exponent);
    r.number("verify", "fa_fraction", c.sce.fa_fraction);

    if (auto v = r.get("output", "dir")) {
        c.output_dir = *v;
    }
    c.set_threads(threads);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

}  // namespace locallaw
