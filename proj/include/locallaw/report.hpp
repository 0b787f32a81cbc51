#pragma once

// Report emission: per-cell CSV, JSON summaries and plot data.
//
// Every writer is a pure function of its report, so identical reports give
// byte-identical files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "locallaw/profile.hpp"
#include "locallaw/structure.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

using Json = nlohmann::ordered_json;

std::string_view version();

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t value);

struct Provenance {
    std::string config_hash;  ///< hex FNV-1a of the canonical config
    std::uint64_t master_seed = 0;
};

Json provenance_json(const Provenance& provenance);

std::string local_law_csv(const LocalLawReport& report);
std::string rigidity_csv(const RigidityReport& report);
std::string sce_csv(const SceReport& report);
std::string identity_csv(const IdentityReport& report);

/// Two columns (x, y): median averaged error and its bound per eta,
/// or per Im w for the hard-edge suite.
std::string error_vs_eta_plot(const LocalLawReport& report);
std::string bound_vs_eta_plot(const LocalLawReport& report);

Json to_json(const DominationSummary& summary);
Json to_json(const LocalLawReport& report);
Json to_json(const RigidityReport& report);
Json to_json(const SceReport& report);
Json to_json(const IdentityReport& report);
Json to_json(const AssumptionReport& report);
Json to_json(const BlockDecomposition& decomposition, const CertReport& certificate);

/// Fixed formatting: two-space indent, trailing newline.
std::string dump(const Json& json);

/// Writes via a temporary and rename; throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace locallaw
