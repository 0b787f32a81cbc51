#include <cmath>
#include <limits>
#include <stdexcept>

#include "locallaw/parallel.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// |sum_{f_i > 0} x_i - sum_{f_i < 0} x_i| / sum over the block of |x_i|.
double block_balancing(const FProjection& f, const Eigen::VectorXcd& x) {
    cplx diff{};
    double scale = 0.0;
    for (std::size_t i : f.positive) {
        diff += x(static_cast<Eigen::Index>(i));
        scale += std::abs(x(static_cast<Eigen::Index>(i)));
    }
    for (std::size_t i : f.negative) {
        diff -= x(static_cast<Eigen::Index>(i));
        scale += std::abs(x(static_cast<Eigen::Index>(i)));
    }
    return scale > 0.0 ? std::abs(diff) / scale : 0.0;
}

/// Sample `index` with its bipartite structure broken: the (positive,
/// positive) diagonal block of the first f vector gets an independent Wigner
/// matrix of the same scale. Without f vectors the sample is left intact and
/// the half split stands in for f.
SampledMatrix broken_sample(const VarianceProfile& profile, const std::vector<FProjection>& fs,
                            const EnsembleConfig& config, std::size_t index, FProjection& split) {
    SampledMatrix h = sample_hermitian(profile, config, index);
    split = FProjection{};
    if (fs.empty()) {
        const std::size_t half = h.dim() / 2;
        for (std::size_t i = 0; i < half; ++i) {
            split.positive.push_back(i);
            split.negative.push_back(half + i);
        }
        return h;
    }
    split = fs.front();
    const std::size_t d = split.positive.size();
    EnsembleConfig noise_config = config;
    noise_config.master_seed = config.master_seed ^ 0xc0ffee5eedULL;
    const SampledMatrix noise = sample_hermitian(build_band_profile(d, d), noise_config, index);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            const auto i = static_cast<Eigen::Index>(split.positive[a]);
            const auto j = static_cast<Eigen::Index>(split.positive[b]);
            const auto ai = static_cast<Eigen::Index>(a);
            const auto bi = static_cast<Eigen::Index>(b);
            h.re(i, j) += noise.re(ai, bi);
            if (h.is_complex()) h.im(i, j) += noise.im(ai, bi);
        }
    }
    return h;
}

double negative_control(const VarianceProfile& profile, const std::vector<FProjection>& fs,
                        const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid) {
    FProjection split;
    const SampledMatrix h = broken_sample(profile, fs, config, 0, split);
    double largest = 0.0;
    for (const auto& z : z_grid) {
        const ResolventSlice slice = resolvent(h, z, false);
        largest = std::max(largest, block_balancing(split, slice.diag));
    }
    return largest;
}

}  // namespace

bool IdentityReport::identities_hold() const {
    if (cells.empty() || !herglotz) return false;
    if (max_ward > options.tol || max_trace_consistency > options.tol) return false;
    if (has_f && (max_f_diag > options.tol || max_balancing > options.tol || max_f_v > options.tol ||
                  max_f_w > options.tol)) {
        return false;
    }
    return true;
}

IdentityReport check_identities(const VarianceProfile& profile, const BlockDecomposition& decomposition,
                                const EnsembleConfig& config, const std::vector<SpectralPoint>& z_grid,
                                const IdentityOptions& options) {
    config.validate();
    if (z_grid.empty()) throw std::invalid_argument("check_identities: empty z grid");
    if (decomposition.dim() != profile.dim()) {
        throw std::invalid_argument("check_identities: decomposition does not match profile");
    }

    IdentityReport report;
    report.dim = profile.dim();
    report.options = options;
    auto fs = f_vectors(decomposition);
    const auto clean_fs = fs;
    if (options.break_structure && fs.empty()) {
        FProjection split;
        broken_sample(profile, fs, config, 0, split);
        fs.push_back(split);
    }
    report.has_f = !fs.empty();

    const std::size_t nz = z_grid.size();
    const double sqrt_dim = std::sqrt(static_cast<double>(profile.dim()));
    report.cells.resize(config.sample_count * nz);

    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        FProjection unused;
        const SampledMatrix h = options.break_structure ? broken_sample(profile, clean_fs, config, s, unused)
                                                        : sample_hermitian(profile, config, s);
        const EigenData ed = eigen(h, false);
        for (std::size_t k = 0; k < nz; ++k) {
            IdentityCell& c = report.cells[s * nz + k];
            c.sample_index = s;
            c.point_index = k;
            c.energy = z_grid[k].energy();
            c.eta = z_grid[k].eta();

            const cplx z = z_grid[k].z();
            const ResolventSlice slice = resolvent(h, z_grid[k], true);
            const Eigen::MatrixXcd& g = *slice.full;

            c.herglotz = (slice.diag.imag().array() > 0.0).all();
            const Eigen::VectorXd ward_lhs = g.rowwise().squaredNorm();
            const Eigen::VectorXd ward_rhs = slice.diag.imag() / z.imag();
            c.ward = ((ward_lhs - ward_rhs).array().abs() / ward_rhs.array().abs()).maxCoeff();
            const cplx spectral = spectral_trace(ed.eigenvalues, z);
            c.trace_consistency = std::abs(slice.trace_normalized - spectral) / std::abs(spectral);

            if (!report.has_f) {
                c.f_diag = c.balancing = c.f_v = c.f_w = kNaN;
                continue;
            }
            const SceTerms t = sce_terms(profile.entries(), slice.diag, m_sc(z));
            const double diag_norm = slice.diag.norm();
            const double v_scale = t.v.norm() * sqrt_dim;
            c.f_diag = c.balancing = c.f_v = c.f_w = 0.0;
            for (const auto& f : fs) {
                c.f_diag = std::max(c.f_diag, f_inner(f, slice.diag) / diag_norm);
                c.balancing = std::max(c.balancing, block_balancing(f, slice.diag));
                if (v_scale > 0.0) {
                    c.f_v = std::max(c.f_v, f_inner(f, t.v) / v_scale);
                    c.f_w = std::max(c.f_w, f_inner(f, t.w) / v_scale);
                }
            }
        }
    });

    for (const auto& c : report.cells) {
        report.herglotz = report.herglotz && c.herglotz;
        report.max_ward = std::max(report.max_ward, c.ward);
        report.max_trace_consistency = std::max(report.max_trace_consistency, c.trace_consistency);
        if (report.has_f) {
            report.max_f_diag = std::max(report.max_f_diag, c.f_diag);
            report.max_balancing = std::max(report.max_balancing, c.balancing);
            report.max_f_v = std::max(report.max_f_v, c.f_v);
            report.max_f_w = std::max(report.max_f_w, c.f_w);
        }
    }

    if (options.negative_control) {
        report.control_run = true;
        report.control_residual = negative_control(profile, clean_fs, config, z_grid);
        report.control_detected = report.control_residual > options.control_threshold;
    }
    return report;
}

}  // namespace locallaw
