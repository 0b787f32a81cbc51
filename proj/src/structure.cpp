#include "locallaw/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace locallaw {

namespace {

struct Component {
    std::vector<std::size_t> indices;  // ascending
    std::vector<int> colour;           // parallel to indices; -1 when not bipartite
    bool bipartite = false;
};

std::vector<Component> components(const Eigen::MatrixXd& s, double zero_tol) {
    const auto n = static_cast<std::size_t>(s.rows());
    auto edge = [&](std::size_t i, std::size_t j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        return s(ii, jj) > zero_tol || s(jj, ii) > zero_tol;
    };

    std::vector<int> colour(n, -1);
    std::vector<bool> seen(n, false);
    std::vector<Component> out;
    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        Component comp;
        bool two_colourable = true;
        std::deque<std::size_t> queue{root};
        seen[root] = true;
        colour[root] = 0;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            comp.indices.push_back(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (!edge(i, j)) continue;
                if (!seen[j]) {
                    seen[j] = true;
                    colour[j] = 1 - colour[i];
                    queue.push_back(j);
                } else if (colour[j] == colour[i]) {
                    two_colourable = false;  // includes self-loops
                }
            }
        }
        std::sort(comp.indices.begin(), comp.indices.end());
        comp.bipartite = two_colourable && comp.indices.size() > 1;
        for (std::size_t i : comp.indices) comp.colour.push_back(comp.bipartite ? colour[i] : -1);
        out.push_back(std::move(comp));
    }
    return out;
}

void place(Eigen::MatrixXd& target, std::size_t offset, const Eigen::MatrixXd& block) {
    const auto o = static_cast<Eigen::Index>(offset);
    target.block(o, o, block.rows(), block.cols()) = block;
}

}  // namespace

Eigen::MatrixXd BipartiteBlock::matrix() const {
    const auto d = static_cast<Eigen::Index>(factor.dim());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    s.block(0, d, d, d) = factor.entries().transpose();
    s.block(d, 0, d, d) = factor.entries();
    return s;
}

Eigen::MatrixXd block_diagonal(const std::vector<Eigen::MatrixXd>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) {
        if (b.rows() != b.cols()) throw std::invalid_argument("block_diagonal: blocks must be square");
        n += b.rows();
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        place(out, offset, b);
        offset += static_cast<std::size_t>(b.rows());
    }
    return out;
}

Eigen::MatrixXd BlockDecomposition::block_diagonal() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const auto& b : bipartite_blocks) place(out, b.offset, b.matrix());
    for (const auto& b : primitive_blocks) place(out, b.offset, b.matrix);
    return out;
}

Eigen::MatrixXd BlockDecomposition::reconstruct() const {
    const Eigen::MatrixXd d = block_diagonal();
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            out(static_cast<Eigen::Index>(permutation[static_cast<std::size_t>(a)]),
                static_cast<Eigen::Index>(permutation[static_cast<std::size_t>(b)])) = d(a, b);
        }
    }
    return out;
}

BlockDecomposition decompose(const VarianceProfile& profile, double zero_tol) {
    const Eigen::MatrixXd& s = profile.entries();
    auto comps = components(s, zero_tol);

    // Bipartite first; stable sort keeps the smallest-index order within groups.
    std::stable_sort(comps.begin(), comps.end(),
                     [](const Component& a, const Component& b) { return a.bipartite && !b.bipartite; });

    BlockDecomposition out;
    out.m_bound = profile.m_bound();
    out.permutation.reserve(profile.dim());

    for (const auto& comp : comps) {
        const std::size_t offset = out.permutation.size();
        if (comp.indices.size() == 1) {
            const auto i = static_cast<Eigen::Index>(comp.indices.front());
            if (std::abs(s(i, i) - 1.0) > 1e-10) {
                throw std::invalid_argument("decompose: isolated index " + std::to_string(i) +
                                            " has s_ii = " + std::to_string(s(i, i)) + " != 1");
            }
        }
        if (comp.bipartite) {
            std::vector<std::size_t> cols;
            std::vector<std::size_t> rows;
            for (std::size_t k = 0; k < comp.indices.size(); ++k) {
                (comp.colour[k] == 0 ? cols : rows).push_back(comp.indices[k]);
            }
            if (cols.size() != rows.size()) {
                throw std::invalid_argument("decompose: bipartite component containing index " +
                                            std::to_string(comp.indices.front()) + " has sides " +
                                            std::to_string(cols.size()) + " and " +
                                            std::to_string(rows.size()));
            }
            const auto d = static_cast<Eigen::Index>(cols.size());
            Eigen::MatrixXd a(d, d);
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) {
                    const double v = s(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]),
                                       static_cast<Eigen::Index>(cols[static_cast<std::size_t>(c)]));
                    a(r, c) = v > zero_tol ? v : 0.0;
                }
            }
            BipartiteFactor factor = [&] {
                try {
                    return BipartiteFactor(std::move(a), std::max(1e-10, zero_tol * static_cast<double>(d)));
                } catch (const std::invalid_argument& e) {
                    throw std::invalid_argument(std::string("decompose: ") + e.what());
                }
            }();
            out.permutation.insert(out.permutation.end(), cols.begin(), cols.end());
            out.permutation.insert(out.permutation.end(), rows.begin(), rows.end());
            out.bipartite_blocks.push_back(BipartiteBlock{offset, std::move(factor), std::move(cols), std::move(rows)});
        } else {
            const auto d = static_cast<Eigen::Index>(comp.indices.size());
            Eigen::MatrixXd block(d, d);
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) {
                    const double v = s(static_cast<Eigen::Index>(comp.indices[static_cast<std::size_t>(r)]),
                                       static_cast<Eigen::Index>(comp.indices[static_cast<std::size_t>(c)]));
                    block(r, c) = v > zero_tol ? v : 0.0;
                }
            }
            out.permutation.insert(out.permutation.end(), comp.indices.begin(), comp.indices.end());
            out.primitive_blocks.push_back(PrimitiveBlock{offset, std::move(block), comp.indices});
        }
    }
    return out;
}

bool CertReport::all_ok() const {
    if (structural_inconsistency) return false;
    return std::all_of(blocks.begin(), blocks.end(), [](const BlockCertificate& b) { return b.ok(); });
}

CertReport certify_block_spectra(const BlockDecomposition& decomposition, std::optional<double> rho,
                                 double tol) {
    CertReport report;
    report.rho_bound = rho;

    auto certify = [&](bool bipartite, std::size_t offset, const Eigen::MatrixXd& matrix,
                       std::size_t half_or_full) {
        BlockCertificate cert;
        cert.bipartite = bipartite;
        cert.offset = offset;
        cert.size = static_cast<std::size_t>(matrix.rows());
        cert.original_indices.assign(decomposition.permutation.begin() + static_cast<std::ptrdiff_t>(offset),
                                     decomposition.permutation.begin() + static_cast<std::ptrdiff_t>(offset + cert.size));
        const Eigen::VectorXd ev = symmetric_eigenvalues(matrix);
        cert.eigenvalues.assign(ev.data(), ev.data() + ev.size());
        bool outside = false;
        for (double lambda : cert.eigenvalues) {
            if (std::abs(lambda - 1.0) <= tol) {
                ++cert.plus_one_multiplicity;
            } else if (std::abs(lambda + 1.0) <= tol) {
                ++cert.minus_one_multiplicity;
            } else {
                const double a = std::abs(lambda);
                if (a >= 1.0) outside = true;
                cert.rho_measured = std::max(cert.rho_measured.value_or(0.0), a);
            }
        }
        const bool minus_present = cert.minus_one_multiplicity > 0;
        cert.unit_eigenvalues_ok = cert.plus_one_multiplicity == 1 &&
                                   cert.minus_one_multiplicity == (bipartite ? 1u : 0u);
        cert.interior_ok = !outside && (!rho || !cert.rho_measured || *cert.rho_measured <= *rho + tol);
        cert.size_ok = static_cast<double>(half_or_full) >= decomposition.m_bound * (1.0 - tol);
        cert.consistent = bipartite == minus_present;
        if (!cert.consistent) report.structural_inconsistency = true;
        report.blocks.push_back(std::move(cert));
    };

    for (const auto& b : decomposition.bipartite_blocks) certify(true, b.offset, b.matrix(), b.half_size());
    for (const auto& b : decomposition.primitive_blocks) certify(false, b.offset, b.matrix, b.size());
    return report;
}

}  // namespace locallaw
