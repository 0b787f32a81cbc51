#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "locallaw/verify.hpp"

namespace locallaw {

double DominationSummary::at(double epsilon) const {
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (std::abs(epsilons[k] - epsilon) < 1e-12) return exceedance[k];
    }
    throw std::invalid_argument("DominationSummary: epsilon " + std::to_string(epsilon) + " not evaluated");
}

DominationSummary estimate_domination(const std::vector<double>& observed, const std::vector<double>& bound,
                                      double dim, const std::vector<double>& epsilons) {
    if (observed.size() != bound.size()) throw std::invalid_argument("estimate_domination: length mismatch");
    if (observed.empty()) throw std::invalid_argument("estimate_domination: empty input");
    if (!(dim >= 2.0)) throw std::invalid_argument("estimate_domination: dim must be >= 2");

    DominationSummary out;
    out.epsilons = epsilons;
    out.exceedance.assign(epsilons.size(), 0.0);
    out.exponent = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> over(epsilons.size(), 0);
    const double log_dim = std::log(dim);
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (!(bound[k] > 0.0)) throw std::invalid_argument("estimate_domination: bounds must be positive");
        if (!std::isfinite(observed[k])) continue;
        ++out.count;
        const double ratio = observed[k] / bound[k];
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (ratio > 0.0) out.exponent = std::max(out.exponent, std::log(ratio) / log_dim);
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            if (observed[k] > std::pow(dim, epsilons[e]) * bound[k]) ++over[e];
        }
    }
    if (out.count > 0) {
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            out.exceedance[e] = static_cast<double>(over[e]) / static_cast<double>(out.count);
        }
    }
    return out;
}

}  // namespace locallaw
