#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "locallaw/ensemble.hpp"
#include "locallaw/matrix_io.hpp"

using namespace locallaw;

TEST_CASE("profile text round trip is bit exact") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 12);
        Eigen::MatrixXd s(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) s(i, j) = u(rng) * std::pow(10.0, static_cast<double>(rng() % 30) - 15.0);
        const std::optional<double> gap = trial % 2 ? std::optional<double>(u(rng)) : std::nullopt;
        const VarianceProfile p(s, 1.0 + u(rng) * 100.0, gap);
        std::stringstream buf;
        write_profile(buf, p);
        const VarianceProfile q = read_profile(buf);
        CHECK(q.m_bound() == p.m_bound());
        CHECK(q.gap() == p.gap());
        CHECK((q.entries().array() == p.entries().array()).all());
    }
}

TEST_CASE("format_double") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("malformed profiles are rejected") {
    std::istringstream missing_row("# comment\n2 2 nan\n0 1\n");
    CHECK_THROWS(read_profile(missing_row));
    std::istringstream junk("2 2 nan\n0 1\n1 x\n");
    CHECK_THROWS(read_profile(junk));
    std::istringstream no_header("");
    CHECK_THROWS(read_profile(no_header));
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.txt"), std::runtime_error);
}

TEST_CASE("save and load through a file") {
    const auto path = std::filesystem::temp_directory_path() / "locallaw_io_roundtrip.txt";
    Eigen::MatrixXd s(2, 2);
    s << 0, 1, 1, 0;
    save_profile(path, VarianceProfile(s, 1.0));
    const auto p = load_profile(path);
    CHECK(p.dim() == 2);
    CHECK(p(0, 1) == 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("sample dump carries comments and both parts") {
    const auto profile = build_band_profile(3, 3);
    EnsembleConfig config;
    config.distribution = Distribution::complex_gaussian;
    config.symmetry = SymmetryClass::hermitian;
    const auto h = sample_hermitian(profile, config, 0);
    std::ostringstream out;
    write_sample(out, h, 3.0, {"seed 0"});
    const std::string text = out.str();
    CHECK(text.rfind("# seed 0\n", 0) == 0);
    CHECK(text.find("# imag\n") != std::string::npos);
    std::istringstream in(text.substr(0, text.find("# imag")));
    const auto re = read_profile(in);
    CHECK((re.entries().array() == h.re.array()).all());
}
