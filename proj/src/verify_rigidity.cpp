#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "locallaw/parallel.hpp"
#include "locallaw/verify.hpp"

namespace locallaw {

double RigidityEntry::ratio() const { return std::abs(eigenvalue - quantile) / bound; }

bool RigidityReport::passed() const {
    return !entries.empty() && flagged_fraction <= max_flagged;
}

RigidityReport check_rigidity(const VarianceProfile& profile, const EnsembleConfig& config,
                              const RigidityOptions& options) {
    config.validate();
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("check_rigidity: epsilon must be positive");
    const std::size_t n = profile.dim();
    const double nd = static_cast<double>(n);
    const double m = profile.m_bound();

    RigidityReport report;
    report.dim = n;
    report.m_bound = m;
    report.epsilon = options.epsilon;
    report.max_flagged = options.max_flagged;
    report.slack = std::pow(options.domination_n.value_or(nd), options.slack_exponent);

    // Bulk: alpha_hat = min(alpha, n + 1 - alpha) >= n M^{-1+eps}.
    const double threshold = nd * std::pow(m, -1.0 + options.epsilon);
    const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(threshold)));
    if (2 * first > n + 1) return report;  // empty bulk
    report.bulk_first = first;
    report.bulk_last = n + 1 - first;

    const std::size_t bulk = report.bulk_last - report.bulk_first + 1;
    std::vector<double> quantile(bulk);
    std::vector<double> bound(bulk);
    for (std::size_t k = 0; k < bulk; ++k) {
        const std::size_t alpha = report.bulk_first + k;
        const double alpha_hat = static_cast<double>(std::min(alpha, n + 1 - alpha));
        quantile[k] = semicircle_quantile(alpha, n);
        bound[k] = std::cbrt(nd / alpha_hat) / m;
    }

    report.entries.resize(config.sample_count * bulk);
    std::vector<double> medians(config.sample_count, 0.0);
    parallel_for(config.sample_count, options.threads, [&](std::size_t s) {
        const EigenData ed = eigen(sample_hermitian(profile, config, s), false);
        const Eigen::VectorXd& ev = ed.eigenvalues;
        medians[s] = n % 2 == 1 ? ev(static_cast<Eigen::Index>(n / 2))
                                : 0.5 * (ev(static_cast<Eigen::Index>(n / 2 - 1)) + ev(static_cast<Eigen::Index>(n / 2)));
        for (std::size_t k = 0; k < bulk; ++k) {
            const std::size_t alpha = report.bulk_first + k;
            report.entries[s * bulk + k] =
                RigidityEntry{s, alpha, ev(static_cast<Eigen::Index>(alpha - 1)), quantile[k], bound[k]};
        }
    });

    for (const auto& e : report.entries) {
        const double r = e.ratio();
        report.worst_ratio = std::max(report.worst_ratio, r);
        if (r > report.slack) ++report.flagged;
    }
    report.flagged_fraction = static_cast<double>(report.flagged) / static_cast<double>(report.entries.size());
    for (double med : medians) report.median_eigenvalue_max = std::max(report.median_eigenvalue_max, std::abs(med));
    return report;
}

}  // namespace locallaw
