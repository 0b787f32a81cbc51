#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "locallaw/profile.hpp"

namespace locallaw {

/// Imprimitive irreducible component. In the permuted order it occupies
/// [offset, offset + 2d) as [[0, A^T], [A, 0]]: the first d positions are the
/// columns of A (the side holding the smallest original index), the next d
/// positions its rows.
struct BipartiteBlock {
    std::size_t offset = 0;
    BipartiteFactor factor;
    std::vector<std::size_t> column_indices;  ///< original labels, ascending
    std::vector<std::size_t> row_indices;     ///< original labels, ascending

    std::size_t half_size() const { return factor.dim(); }
    std::size_t size() const { return 2 * factor.dim(); }
    Eigen::MatrixXd matrix() const;
};

/// Primitive irreducible component S~, original labels ascending.
struct PrimitiveBlock {
    std::size_t offset = 0;
    Eigen::MatrixXd matrix;
    std::vector<std::size_t> indices;

    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

struct BlockDecomposition {
    /// permutation[k] is the original index placed at position k.
    std::vector<std::size_t> permutation;
    std::vector<BipartiteBlock> bipartite_blocks;
    std::vector<PrimitiveBlock> primitive_blocks;
    double m_bound = 0.0;

    std::size_t dim() const { return permutation.size(); }
    /// D(S_1, ..., S_p, S~_1, ..., S~_q) in the permuted order.
    Eigen::MatrixXd block_diagonal() const;
    /// P D P^{-1}, i.e. the profile in its original labelling.
    Eigen::MatrixXd reconstruct() const;
};

/// Splits the support graph {(i, j) : s_ij > zero_tol} into connected
/// components and 2-colours each one. A component is bipartite when the
/// colouring succeeds with every same-colour entry <= zero_tol.
///
/// Bipartite blocks come first, then primitive ones; each group is ordered by
/// smallest original index. Throws std::invalid_argument when a singleton
/// component has s_ii != 1 or a bipartite component has unequal sides (both
/// impossible for a doubly stochastic input).
BlockDecomposition decompose(const VarianceProfile& profile, double zero_tol = 0.0);

struct BlockCertificate {
    bool bipartite = false;
    std::size_t offset = 0;
    std::size_t size = 0;
    std::vector<std::size_t> original_indices;  ///< in permuted order
    std::size_t plus_one_multiplicity = 0;
    std::size_t minus_one_multiplicity = 0;
    std::optional<double> rho_measured;  ///< empty when only +-1 are present
    bool unit_eigenvalues_ok = false;    ///< +1 simple; -1 simple iff bipartite
    bool interior_ok = false;            ///< rest of spectrum within [-rho, rho]
    bool size_ok = false;                ///< d_alpha >= M (half size for bipartite)
    bool consistent = false;             ///< bipartite colouring <=> -1 in spectrum
    std::vector<double> eigenvalues;

    bool ok() const { return unit_eigenvalues_ok && interior_ok && size_ok && consistent; }
};

struct CertReport {
    std::vector<BlockCertificate> blocks;
    std::optional<double> rho_bound;
    bool structural_inconsistency = false;
    bool all_ok() const;
};

/// Spectral certificate for every block. When `rho` is empty the interior is
/// only required to stay strictly inside (-1, 1). Violations are reported,
/// never thrown.
CertReport certify_block_spectra(const BlockDecomposition& decomposition, std::optional<double> rho,
                                 double tol = 1e-10);

/// Square block-diagonal matrix from the given blocks, in order.
Eigen::MatrixXd block_diagonal(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace locallaw
