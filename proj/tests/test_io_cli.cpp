#include "slogit/io.hpp"

#include "common.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace slogit;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "slogit_io_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SLOGIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string cli_stderr(const std::string& args) {
    const fs::path errfile = test_dir() / "stderr.txt";
    const std::string cmd = std::string(SLOGIT_CLI_PATH) + " " + args +
                            " >/dev/null 2>" + errfile.string();
    (void)std::system(cmd.c_str());
    return read_file(errfile);
}

} // namespace

TEST_CASE("format_double is round-trip exact") {
    for (double v : {0.0, 1.0, -0.25, 1.0 / 3.0, 1e-300, 1.7976931348623157e308,
                     0.1 + 0.2, 4.9e-324}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("dataset CSV round trip is identical") {
    Vector truth{1.0, -0.5, 0.25};
    const Dataset d = testutil::random_dataset(17, 3, 5, &truth);
    const fs::path p = test_dir() / "roundtrip.csv";
    write_dataset_csv(p.string(), d);
    const Dataset back = read_dataset_csv(p.string());
    REQUIRE(back.n() == d.n());
    REQUIRE(back.p() == d.p());
    REQUIRE(back.has_f0());
    for (std::size_t i = 0; i < d.n(); ++i) {
        CHECK(back.y[i] == d.y[i]);
        CHECK((*back.f0)[i] == (*d.f0)[i]);
        for (std::size_t j = 0; j < d.p(); ++j) CHECK(back.X(i, j) == d.X(i, j));
    }
}

TEST_CASE("dataset CSV errors carry line numbers") {
    const fs::path p = test_dir() / "bad.csv";

    write_file(p, "y,x1,x2\n1,0.5\n");
    CHECK_THROWS_WITH_AS((void)read_dataset_csv(p.string()),
                         doctest::Contains("line 2"), ParseError);

    write_file(p, "y,x1\n1,0.5\n0,0.1\n2,0.3\n");
    CHECK_THROWS_WITH_AS((void)read_dataset_csv(p.string()),
                         doctest::Contains("line 4"), ParseError);

    write_file(p, "x1,y\n1,0.5\n");
    CHECK_THROWS_AS((void)read_dataset_csv(p.string()), ParseError);

    write_file(p, "y,x1\n1,abc\n");
    CHECK_THROWS_WITH_AS((void)read_dataset_csv(p.string()),
                         doctest::Contains("line 2"), ParseError);
}

TEST_CASE("groups JSON parsing and partition errors") {
    const fs::path p = test_dir() / "groups.json";
    write_file(p, "[[1,2],[3,4]]");
    const GroupStructure g = read_groups_json(p.string(), 4);
    CHECK(g.num_groups() == 2);
    CHECK(g.group(0)[0] == 0); // 1-based file, 0-based in memory

    write_file(p, "[[1,2],[2,3,4]]");
    CHECK_THROWS_WITH_AS((void)read_groups_json(p.string(), 4),
                         doctest::Contains("column 2"), ParseError);
    write_file(p, "[[1,2]]");
    CHECK_THROWS_WITH_AS((void)read_groups_json(p.string(), 3),
                         doctest::Contains("not covered"), ParseError);
    write_file(p, "[[0,1]]");
    CHECK_THROWS_AS((void)read_groups_json(p.string(), 2), ParseError);
    write_file(p, "{\"a\":1}");
    CHECK_THROWS_AS((void)read_groups_json(p.string(), 2), ParseError);
}

TEST_CASE("weights CSV round trip") {
    PenaltyWeights w{{0.25, 1.0, 3.5}, WeightMode::coefficient};
    const fs::path p = test_dir() / "weights.csv";
    atomic_write(p.string(), weights_to_csv(w, 42));
    const std::string content = read_file(p.string());
    CHECK(content.find("# seed=42") == 0);
    const Vector back = read_weights_csv(p.string());
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == w.values[i]);
}

TEST_CASE("fit result JSON is well-formed") {
    FitResult fit;
    fit.beta = {0.0, 1.25};
    fit.r = 0.5;
    fit.converged = true;
    fit.iterations = 7;
    fit.objective = 0.625;
    fit.kkt_residual = 1e-9;
    fit.active = {1};
    const auto j = nlohmann::json::parse(fit_result_to_json(fit, WeightMode::coefficient, 9));
    CHECK(j["seed"] == 9);
    CHECK(j["mode"] == "lasso");
    CHECK(j["active"][0] == 2); // 1-based in files
    CHECK(j["beta"][1] == 1.25);
}

TEST_CASE("cli: toy fit, input errors, exit codes") {
    const fs::path dir = test_dir();
    write_file(dir / "toy.csv", "y,x1,x2\n1,1,0\n0,0,1\n");
    CHECK(run_cli("fit --data " + (dir / "toy.csv").string() + " --r 1e9 --out " +
                  (dir / "fit.json").string()) == 0);
    const auto j = nlohmann::json::parse(read_file(dir / "fit.json"));
    CHECK(j["converged"] == true);
    CHECK(j["beta"][0] == 0.0);
    CHECK(j["beta"][1] == 0.0);

    write_file(dir / "bady.csv", "y,x1,x2\n1,1,0\n2,0,1\n");
    CHECK(run_cli("fit --data " + (dir / "bady.csv").string() + " --r 1.0") == 1);
    const std::string err =
        cli_stderr("fit --data " + (dir / "bady.csv").string() + " --r 1.0");
    CHECK(err.find("line 3") != std::string::npos);

    write_file(dir / "overlap.json", "[[1,2],[2]]");
    CHECK(run_cli("fit --data " + (dir / "toy.csv").string() + " --groups " +
                  (dir / "overlap.json").string() + " --r 1.0") == 1);

    CHECK(run_cli("fit --data " + (dir / "missing.csv").string() + " --r 1.0") == 1);
}

TEST_CASE("cli: non-convergence exits 2") {
    // 1 outer iteration cannot reach tol on this instance
    Vector truth{2.0, -1.0, 1.0};
    const Dataset d = testutil::random_dataset(50, 3, 3, &truth);
    const fs::path p = test_dir() / "nc.csv";
    write_dataset_csv(p.string(), d);
    CHECK(run_cli("fit --data " + p.string() + " --r 0.001 --max-iter 1 --out " +
                  (test_dir() / "nc.json").string()) == 2);
}

TEST_CASE("cli: seeded commands are byte-identical across runs") {
    const fs::path dir = test_dir();
    const std::string base = "simulate --mode lasso --n 30 --p 4 --replicates 2 "
                             "--count 3 --methods unweighted,bernstein --seed 11 ";
    CHECK(run_cli(base + "--out-prefix " + (dir / "s1").string()) == 0);
    CHECK(run_cli(base + "--out-prefix " + (dir / "s2").string()) == 0);
    CHECK(read_file(dir / "s1_rows.csv") == read_file(dir / "s2_rows.csv"));
    CHECK(read_file(dir / "s1_agg.csv") == read_file(dir / "s2_agg.csv"));
    CHECK(!read_file(dir / "s1_rows.csv").empty());

    const std::string oc = "oracle-check --mode lasso --n 40 --p 5 --replicates 3 "
                           "--seed 5 ";
    CHECK(run_cli(oc + "--out-prefix " + (dir / "o1").string()) == 0);
    CHECK(run_cli(oc + "--out-prefix " + (dir / "o2").string()) == 0);
    CHECK(read_file(dir / "o1.csv") == read_file(dir / "o2.csv"));
    CHECK(read_file(dir / "o1_summary.json") == read_file(dir / "o2_summary.json"));
}

TEST_CASE("cli: config JSON overrides flags and rejects unknown keys") {
    const fs::path dir = test_dir();
    write_file(dir / "toy2.csv", "y,x1,x2\n1,1,0\n0,0,1\n1,0.5,0.5\n");
    write_file(dir / "cfg.json", "{\"r\": 1e9, \"out\": \"" +
                                     (dir / "cfg_fit.json").string() + "\"}");
    // flag says r tiny, config overrides to huge: all-zero fit proves override
    CHECK(run_cli("fit --data " + (dir / "toy2.csv").string() + " --r 1e-6 --config " +
                  (dir / "cfg.json").string()) == 0);
    const auto j = nlohmann::json::parse(read_file(dir / "cfg_fit.json"));
    CHECK(j["r"] == 1e9);
    CHECK(j["beta"][0] == 0.0);

    write_file(dir / "badcfg.json", "{\"nope\": 1}");
    CHECK(run_cli("fit --data " + (dir / "toy2.csv").string() + " --r 1.0 --config " +
                  (dir / "badcfg.json").string()) == 1);
}
