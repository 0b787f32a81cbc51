#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "locallaw/config.hpp"
#include "locallaw/experiment.hpp"

namespace fs = std::filesystem;
using namespace locallaw;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "locallaw_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "config.ini";
    std::ofstream(path) << body;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Run {
    int code = -1;
    std::string output;
};

Run run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "stdout.txt";
    const std::string cmd = std::string(LOCALLAW_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

const std::string kData = LOCALLAW_TEST_DATA;

const char* kFlat64 = R"([experiment]
seed = 9
[profile]
kind = flat-bipartite
dim = 64
)";

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(R"([experiment]
name = t
seed = 17
threads = 3
[profile]
kind = band-primitive
dim = 100
bandwidth = 7
[ensemble]
distribution = complex-gaussian
symmetry = hermitian
samples = 5
[grid]
eta_min = 0.05
eta_points = 2
e_points = 3
outside_points = 2.5:0.1
w_points = 0:0.1 1:0.2
[verify]
epsilons = 0.1 0.25
decision_epsilon = 0.25
gamma = 0.2
domination_n = 512
)");
    const auto c = parse_config(in);
    CHECK(c.name == "t");
    CHECK(c.ensemble.master_seed == 17);
    CHECK(c.threads == 3);
    CHECK(c.local_law.threads == 3);
    CHECK(c.profile.kind == ProfileKind::band_primitive);
    CHECK(c.profile.bandwidth == 7);
    CHECK(c.ensemble.sample_count == 5);
    CHECK(c.grid.eta_min == 0.05);
    CHECK(c.grid.outside_points.size() == 1);
    CHECK(c.grid.w_points.size() == 2);
    CHECK(c.local_law.epsilons == std::vector<double>{0.1, 0.25});
    CHECK(c.sce.gamma == 0.2);
    CHECK(c.rigidity.domination_n == 512.0);
    const auto grid = local_law_grid(c, 15.0);
    CHECK(grid.size() == 6);
    CHECK(grid.front().eta() == doctest::Approx(0.05));
    CHECK(grid.back().eta() == doctest::Approx(1.0));
    CHECK(grid.back().energy() == doctest::Approx(2.2));
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("[profile]\nkind = flat-bipartite\ndim = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\nkind = flat-bipartite\ndim = 8\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\ndim = 8\n[verify]\ngamma = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\ndim = 8\n[grid]\ne_points = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\ndim = eight\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\ndim = 8\n[verify]\nepsilons = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[profile]\nkind = file\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("config hash tracks results-relevant fields only") {
    std::istringstream a(kFlat64), b(kFlat64);
    auto c1 = parse_config(a);
    auto c2 = parse_config(b);
    CHECK(c1.hash() == c2.hash());
    c2.set_threads(4);
    c2.output_dir = "elsewhere";
    CHECK(c1.hash() == c2.hash());
    c2.set_seed(10);
    CHECK(c1.hash() != c2.hash());
    CHECK(c1.hash().size() == 16);
}

TEST_CASE("automatic w grid respects the hard-edge domain") {
    std::istringstream in(kFlat64);
    const auto c = parse_config(in);
    const auto w = w_grid(c, 64.0);
    CHECK(w.size() == 11);
    CHECK(w.front() == cplx(0.0, std::pow(64.0, -0.7)));
    for (const auto& x : w) CHECK(in_mp_domain(x, {0.3, 64.0}));
}

TEST_CASE("check-profile exit codes") {
    const auto dir = scratch("check");
    auto r = run_cli("check-profile --config " + write_config(dir, kFlat64).string() + " --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "assumptions.json"));

    const auto broken = write_config(dir, "[profile]\nkind = file\nfile = " + kData + "/broken_row.txt\n");
    r = run_cli("check-profile --config " + broken.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 1);
    CHECK(r.output.find("rows 5") != std::string::npos);
    CHECK(slurp(dir / "assumptions.json").find("\"bad_rows\": [\n    5\n  ]") != std::string::npos);

    const auto missing = write_config(dir, "[profile]\nkind = file\nfile = /nonexistent/profile.txt\n");
    r = run_cli("check-profile --config " + missing.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 2);
    r = run_cli("check-profile --config " + (dir / "absent.ini").string(), dir);
    CHECK(r.code == 2);
    r = run_cli("frobnicate", dir);
    CHECK(r.code == 2);
}

TEST_CASE("decompose reports block counts") {
    const auto dir = scratch("decompose");
    auto r = run_cli("decompose --config " +
                         write_config(dir, "[profile]\nkind = file\nfile = " + kData + "/shuffled_two_block.txt\n").string() +
                         " --out " + dir.string(),
                     dir);
    CHECK(r.code == 0);
    CHECK(r.output.find("p = 1, q = 1") != std::string::npos);
    const std::string json = slurp(dir / "decomposition.json");
    CHECK(json.find("\"p\": 1") != std::string::npos);
    CHECK(json.find("\"q\": 1") != std::string::npos);

    r = run_cli("decompose --config " +
                    write_config(dir, "[profile]\nkind = file\nfile = " + kData + "/swap2.txt\n").string() + " --out " +
                    dir.string(),
                dir);
    CHECK(r.code == 0);
    CHECK(r.output.find("p = 1, q = 0") != std::string::npos);

    r = run_cli("decompose --config " +
                    write_config(dir, "[profile]\nkind = band-primitive\ndim = 12\nbandwidth = 12\n").string() +
                    " --out " + dir.string(),
                dir);
    CHECK(r.code == 0);
    CHECK(r.output.find("p = 0, q = 1") != std::string::npos);
}

TEST_CASE("verify identities: pass, designed failure, determinism") {
    const auto dir = scratch("verify");
    const std::string body = std::string(kFlat64) + "[ensemble]\nsamples = 3\n[grid]\ne_points = 5\neta_points = 2\n";
    const auto config = write_config(dir, body);
    auto r = run_cli("verify --suite identities --config " + config.string() + " --out " + (dir / "a").string(), dir);
    CHECK(r.code == 0);
    const std::string json = slurp(dir / "a" / "identities.json");
    CHECK(json.find("\"config_hash\"") != std::string::npos);
    CHECK(json.find("\"version\"") != std::string::npos);

    r = run_cli("verify --suite identities --threads 2 --config " + config.string() + " --out " + (dir / "b").string(), dir);
    CHECK(r.code == 0);
    for (const char* name : {"identities.csv", "identities.json", "summary.json"}) {
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }

    r = run_cli("verify --suite identities --seed 99 --config " + config.string() + " --out " + (dir / "c").string(), dir);
    CHECK(r.code == 0);
    CHECK(slurp(dir / "a" / "identities.csv") != slurp(dir / "c" / "identities.csv"));

    const auto negative = write_config(dir, body + "[verify]\nbreak_structure = true\n");
    r = run_cli("verify --suite identities --config " + negative.string() + " --out " + (dir / "d").string(), dir);
    CHECK(r.code == 1);

    r = run_cli("verify --suite nosuch --config " + config.string(), dir);
    CHECK(r.code == 2);

}

TEST_CASE("verify with an invalid grid is an infrastructure failure") {
    const auto dir = scratch("grid");
    const auto config = write_config(dir, std::string(kFlat64) + "[grid]\neta_min = 0.00001\n");
    const auto r = run_cli("verify --suite local-law --config " + config.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.output.find("outside D(gamma)") != std::string::npos);
}
