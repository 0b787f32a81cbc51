#pragma once

// Orchestration of profile -> decompose -> sample -> verify pipelines and
// report emission. Each run returns an exit code: 0 pass, 1 verification
// failure, 2 infrastructure failure (I/O, parse, invalid grid).

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locallaw/config.hpp"

namespace locallaw {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInfra = 2 };

struct RunResult {
    int exit_code = kExitPass;
    std::string summary;                         ///< one line per check
    std::vector<std::filesystem::path> files;   ///< reports written
};

VarianceProfile build_profile(const ProfileSpec& spec);
/// The factor A for bipartite kinds; empty otherwise.
std::optional<BipartiteFactor> build_factor(const ProfileSpec& spec);

/// E linear in [e_min, e_max], eta geometric in [eta_min, eta_max],
/// eta_min defaulting to M^{-1+gamma}. Ordered by eta, then E.
std::vector<SpectralPoint> local_law_grid(const ExperimentConfig& config, double m_bound);
std::vector<SpectralPoint> outside_grid(const ExperimentConfig& config);
/// Configured w points, or i M^{-1+gamma} followed by w_extra points with
/// Re w in (0, 3.6] on the boundary Im w = sqrt(Re w) M^{-1+gamma}.
std::vector<cplx> w_grid(const ExperimentConfig& config, double m_bound);

const std::vector<std::string>& suite_names();

RunResult run_check_profile(const ExperimentConfig& config);
RunResult run_decompose(const ExperimentConfig& config);
RunResult run_verify(const ExperimentConfig& config, std::string_view suite);

}  // namespace locallaw
