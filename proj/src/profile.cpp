#include "locallaw/profile.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "locallaw/kernels.hpp"

namespace locallaw {

namespace {

Eigen::VectorXd row_sums(const Eigen::MatrixXd& m) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m.rows());
    const auto n = static_cast<std::size_t>(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        kernels::add_scaled(std::span<const double>(m.col(j).data(), n), 1.0,
                            std::span<double>(acc.data(), n));
    }
    return acc;
}

}  // namespace

VarianceProfile::VarianceProfile(Eigen::MatrixXd entries, double m_bound, std::optional<double> gap)
    : entries_(std::move(entries)), m_bound_(m_bound), gap_(gap) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("VarianceProfile: entries must be a nonempty square matrix");
    }
    if (!entries_.allFinite()) throw std::invalid_argument("VarianceProfile: non-finite entry");
    if (!(m_bound_ > 0.0) || !std::isfinite(m_bound_)) {
        throw std::invalid_argument("VarianceProfile: M must be positive and finite");
    }
}

VarianceProfile VarianceProfile::with_gap(std::optional<double> gap) const {
    return VarianceProfile(entries_, m_bound_, gap);
}

BipartiteFactor::BipartiteFactor(Eigen::MatrixXd entries, double tol) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("BipartiteFactor: factor must be a nonempty square matrix");
    }
    if (!entries_.allFinite()) throw std::invalid_argument("BipartiteFactor: non-finite entry");
    if (entries_.minCoeff() < 0.0) throw std::invalid_argument("BipartiteFactor: negative entry");
    const Eigen::VectorXd rows = entries_.rowwise().sum();
    const Eigen::VectorXd cols = entries_.colwise().sum().transpose();
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
        if (std::abs(rows(i) - 1.0) > tol) {
            throw std::invalid_argument("BipartiteFactor: row " + std::to_string(i) + " sums to " +
                                        std::to_string(rows(i)));
        }
        if (std::abs(cols(i) - 1.0) > tol) {
            throw std::invalid_argument("BipartiteFactor: column " + std::to_string(i) + " sums to " +
                                        std::to_string(cols(i)));
        }
    }
    m_bound_ = 1.0 / entries_.maxCoeff();
}

VarianceProfile build_bipartite_profile(const BipartiteFactor& factor) {
    const auto d = static_cast<Eigen::Index>(factor.dim());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    s.block(0, d, d, d) = factor.entries().transpose();
    s.block(d, 0, d, d) = factor.entries();
    return VarianceProfile(std::move(s), factor.m_bound());
}

VarianceProfile build_band_profile(std::size_t n, std::size_t bandwidth) {
    if (n == 0 || bandwidth < 1 || bandwidth > n) {
        throw std::invalid_argument("build_band_profile: need 1 <= bandwidth <= n");
    }
    const std::size_t width = 2 * bandwidth + 1;
    const auto nn = static_cast<Eigen::Index>(n);
    if (width > n) {
        return VarianceProfile(Eigen::MatrixXd::Constant(nn, nn, 1.0 / static_cast<double>(n)),
                               static_cast<double>(n));
    }
    const double value = 1.0 / static_cast<double>(width);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nn, nn);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t diff = i > j ? i - j : j - i;
            if (std::min(diff, n - diff) <= bandwidth) {
                s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            }
        }
    }
    return VarianceProfile(std::move(s), static_cast<double>(width));
}

BipartiteFactor flat_bipartite_factor(std::size_t d) {
    if (d == 0) throw std::invalid_argument("flat_bipartite_factor: d must be positive");
    const auto dd = static_cast<Eigen::Index>(d);
    return BipartiteFactor(Eigen::MatrixXd::Constant(dd, dd, 1.0 / static_cast<double>(d)));
}

BipartiteFactor band_bipartite_factor(std::size_t d, std::size_t bandwidth) {
    if (d == 0 || bandwidth < 1 || bandwidth > d) {
        throw std::invalid_argument("band_bipartite_factor: need 1 <= bandwidth <= d");
    }
    const std::size_t width = std::min(2 * bandwidth + 1, d);
    const double value = 1.0 / static_cast<double>(width);
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dd, dd);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < width; ++k) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + k) % d)) = value;
        }
    }
    return BipartiteFactor(std::move(a));
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

AssumptionReport validate_assumptions(const VarianceProfile& profile, const AssumptionOptions& options) {
    const Eigen::MatrixXd& s = profile.entries();
    const double n = static_cast<double>(profile.dim());
    const double tol = options.tol;

    AssumptionReport report;
    report.dim = profile.dim();
    report.m_bound = profile.m_bound();

    report.max_asymmetry = (s - s.transpose()).cwiseAbs().maxCoeff();
    report.symmetric = report.max_asymmetry <= tol;

    report.max_entry = s.maxCoeff();
    report.min_entry = s.minCoeff();
    report.a1_entry_bound = report.min_entry >= 0.0 && report.max_entry <= (1.0 + tol) / profile.m_bound();
    report.m_in_range = std::pow(n, options.delta) <= profile.m_bound() * (1.0 + tol) &&
                        profile.m_bound() <= n * (1.0 + tol);

    const Eigen::VectorXd sums = row_sums(s);
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
        const double dev = std::abs(sums(i) - 1.0);
        report.max_row_deviation = std::max(report.max_row_deviation, dev);
        if (dev > tol) report.bad_rows.push_back(static_cast<std::size_t>(i));
    }
    report.a2_row_sums = report.bad_rows.empty();

    try {
        // The lower triangle defines the operator; asymmetry is reported above.
        const Eigen::VectorXd ev = symmetric_eigenvalues(s);
        report.eigensolver_ok = true;
        report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    } catch (const std::exception& e) {
        report.eigensolver_error = e.what();
        return report;
    }

    bool out_of_range = false;
    for (double lambda : report.eigenvalues) {
        const double a = std::abs(lambda);
        if (std::abs(lambda - 1.0) <= tol) {
            ++report.plus_one_multiplicity;
        } else if (std::abs(lambda + 1.0) <= tol) {
            ++report.minus_one_multiplicity;
        } else if (a > 1.0) {
            out_of_range = true;
        } else {
            report.rho = std::max(report.rho.value_or(0.0), a);
        }
    }
    report.plus_one_present = report.plus_one_multiplicity > 0;
    report.minus_one_present = report.minus_one_multiplicity > 0;
    report.a3_spectrum = !out_of_range && report.plus_one_present &&
                         (!report.rho || *report.rho <= options.rho_ceiling);
    return report;
}

}  // namespace locallaw
