#pragma once

// Dense text matrix format shared by profiles and sample dumps:
//
//   # optional comment lines
//   dim M rho
//   s_11 s_12 ... s_1dim
//   ...
//
// Values are written with 17 significant digits so that reading a written
// file reproduces every double bit for bit. rho is "nan" when uncertified.

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "locallaw/profile.hpp"

namespace locallaw {

struct SampledMatrix;

/// Shortest-safe decimal form of x with 17 significant digits.
std::string format_double(double x);

void write_profile(std::ostream& out, const VarianceProfile& profile);
VarianceProfile read_profile(std::istream& in);

void save_profile(const std::filesystem::path& path, const VarianceProfile& profile);
/// Throws std::runtime_error on I/O or parse failure.
VarianceProfile load_profile(const std::filesystem::path& path);

/// Writes `comments` as '#' lines, then the real part in profile layout; for
/// complex samples a "# imag" line and the imaginary part follow.
void write_sample(std::ostream& out, const SampledMatrix& sample, double m_bound,
                  const std::vector<std::string>& comments);

}  // namespace locallaw
