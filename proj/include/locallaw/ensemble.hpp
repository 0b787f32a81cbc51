#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "locallaw/profile.hpp"

namespace locallaw {

enum class Distribution { real_gaussian, complex_gaussian, symmetric_bernoulli };
enum class SymmetryClass { hermitian, real_symmetric };

std::string_view to_string(Distribution d);
std::string_view to_string(SymmetryClass c);
Distribution parse_distribution(std::string_view name);
SymmetryClass parse_symmetry_class(std::string_view name);

struct EnsembleConfig {
    Distribution distribution = Distribution::real_gaussian;
    SymmetryClass symmetry = SymmetryClass::real_symmetric;
    std::uint64_t master_seed = 0;
    std::size_t sample_count = 1;

    /// Throws std::invalid_argument on sample_count == 0 or complex entries
    /// requested for the real-symmetric class.
    void validate() const;
};

/// One Hermitian draw. `im` is empty for real samples.
struct SampledMatrix {
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;
    std::size_t sample_index = 0;
    std::uint64_t seed_used = 0;

    std::size_t dim() const { return static_cast<std::size_t>(re.rows()); }
    bool is_complex() const { return im.size() != 0; }
    Eigen::MatrixXcd as_complex() const;
};

/// Seed of sample `index` derived from the master seed.
std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t index);

/// Draws h_ij for i >= j independently with E h = 0 and E|h|^2 = s_ij; the
/// upper triangle follows by conjugate symmetry. Each entry is a pure
/// function of (master_seed, index, i, j), independent of evaluation order.
/// Entries with s_ij = 0 are exactly zero.
SampledMatrix sample_hermitian(const VarianceProfile& profile, const EnsembleConfig& config,
                               std::size_t index);

/// H = [[0, X^*], [X, 0]] with independent x_ij, E|x_ij|^2 = a_ij. Bitwise
/// equal to sample_hermitian on build_bipartite_profile(factor).
SampledMatrix sample_bipartite(const BipartiteFactor& factor, const EnsembleConfig& config,
                               std::size_t index);

}  // namespace locallaw
