#pragma once

// Experiment configuration in sectioned INI form:
//
//   [experiment] name, seed, threads
//   [profile]    kind, dim, bandwidth, file, delta, tol, rho_ceiling, zero_tol
//   [ensemble]   distribution, symmetry, samples
//   [grid]       e_min, e_max, e_points, eta_min, eta_max, eta_points,
//                outside_points, w_points, w_extra
//   [verify]     epsilons, decision_epsilon, max_exceedance, gamma, ...
//   [output]     dir

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "locallaw/ensemble.hpp"
#include "locallaw/profile.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProfileKind { flat_bipartite, band_bipartite, band_primitive, file };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

struct ProfileSpec {
    ProfileKind kind = ProfileKind::flat_bipartite;
    std::size_t dim = 0;        ///< factor size d for bipartite kinds, n otherwise
    std::size_t bandwidth = 0;
    std::filesystem::path file;  ///< resolved against the config directory
    AssumptionOptions assumptions;
    double zero_tol = 0.0;

    bool bipartite_factor() const {
        return kind == ProfileKind::flat_bipartite || kind == ProfileKind::band_bipartite;
    }
};

struct GridSpec {
    double e_min = -2.2;
    double e_max = 2.2;
    std::size_t e_points = 21;
    std::optional<double> eta_min;  ///< empty means M^{-1+gamma}
    double eta_max = 1.0;
    std::size_t eta_points = 5;
    std::vector<std::pair<double, double>> outside_points{{2.2, 0.05}, {2.5, 0.05}, {3.0, 0.05}};
    std::vector<std::complex<double>> w_points;  ///< empty means the automatic grid
    std::size_t w_extra = 10;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ProfileSpec profile;
    EnsembleConfig ensemble;
    GridSpec grid;
    SuiteOptions local_law;
    RigidityOptions rigidity;
    SceOptions sce;
    IdentityOptions identities;
    std::filesystem::path output_dir = "out";
    std::size_t threads = 1;

    /// Throws ConfigError when an invariant fails.
    void validate() const;
    /// Every resolved field that affects results; excludes threads and output dir.
    std::string canonical() const;
    std::string hash() const;
    void set_seed(std::uint64_t seed);
    void set_threads(std::size_t threads);
};

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
/// Throws ConfigError on I/O or parse failure.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace locallaw
