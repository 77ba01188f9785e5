// End-to-end checks of the command line tool. The binary path comes from
// the COVCPD_BIN environment variable (set by ctest).

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "covcpd/datagen.hpp"
#include "covcpd/eval.hpp"
#include "covcpd/harness.hpp"
#include "covcpd/io.hpp"
#include "covcpd/wbsip.hpp"

using namespace covcpd;

namespace {

std::string bin_path() {
    const char* env = std::getenv("COVCPD_BIN");
    REQUIRE_MESSAGE(env != nullptr, "COVCPD_BIN must point at the covcpd binary");
    return env;
}

int run_cmd(const std::string& args) {
    const int status = std::system((bin_path() + " " + args).c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("covcpd_cli_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("detect on a seeded single-change fixture") {
    TempDir dir;
    const auto csv = dir.path / "data.csv";
    const auto out = dir.path / "out.json";

    // 400x2, I -> 4I at 200
    SymMat base = SymMat::identity(2);
    SymMat alt = SymMat::identity(2);
    alt *= 4.0;
    const SegmentModel model(400, {200}, {base, alt});
    const ObservationMatrix x = gen_series({model, NoiseFamily::gaussian, 2718});
    save_matrix_csv(csv, x);

    // documented fixture parameters: oracle-range threshold and margins
    const OracleWbsipParams op = oracle_wbsip_params(model);
    std::ostringstream cmd;
    cmd << "detect " << csv << " --algo wbsip --intervals 200 --seed 5 --tau " << op.tau
        << " --delta " << op.delta << " --max-interval-len " << op.max_interval_len
        << " --out " << out;
    REQUIRE(run_cmd(cmd.str()) == 0);

    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["change_points"].size() == 1);
    const std::int64_t cp = j["change_points"][0].get<std::int64_t>();

    // verify against the exhaustive reference on the same split series
    const SplitSeries sp = split_series(x);
    const IntervalSet intervals =
        draw_intervals(sp.x.n(), 200, 5, op.max_interval_len);
    WbsipParams params;
    params.tau = op.tau;
    params.delta = op.delta;
    params.max_interval_len = op.max_interval_len;
    const DetectionResult ref = wbsip_detect(sp.x, sp.w, intervals, params);
    REQUIRE(ref.change_points.size() == 1);
    CHECK(cp == 2 * ref.change_points[0]);
    CHECK(std::abs(cp - 200) <= 120);  // pilot-frozen regression bound
    CHECK(j["params_used"].contains("intervals"));
}

TEST_CASE("detect with a huge threshold reports no change points") {
    TempDir dir;
    const auto csv = dir.path / "data.csv";
    SymMat eye = SymMat::identity(2);
    SymMat two = eye;
    two *= 2.0;
    const SegmentModel model(100, {50}, {eye, two});
    save_matrix_csv(csv, gen_series({model, NoiseFamily::gaussian, 1}));
    const auto out = dir.path / "out.json";
    REQUIRE(run_cmd("detect " + csv.string() + " --algo bsop --tau 1e18 --out " +
                    out.string()) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["change_points"].empty());
}

TEST_CASE("empty input exits with code 2") {
    TempDir dir;
    const auto csv = dir.path / "empty.csv";
    std::ofstream(csv).close();
    CHECK(run_cmd("detect " + csv.string() + " --out /dev/null 2>/dev/null") == 2);
}

TEST_CASE("bad parameters exit nonzero") {
    TempDir dir;
    const auto csv = dir.path / "data.csv";
    std::ofstream(csv) << "1,2\n3,4\n5,6\n7,8\n";
    CHECK(run_cmd("detect " + csv.string() + " --algo wbsip --tau -3 --out /dev/null 2>/dev/null") != 0);
}

TEST_CASE("rate sweep CSV schema and replay round trip") {
    TempDir dir;
    const auto out = dir.path / "rate.csv";
    REQUIRE(run_cmd("rate-sweep --grid-n 200 --grid-p 2 --grid-delta 66 --grid-kappa 3 "
                    "--grid-intervals 80 --trials 2 --seed 21 --oracle-params --out " +
                    out.string()) == 0);
    std::ifstream in(out);
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header ==
          "n,p,delta,kappa,sigma2,M,trial,seed,k_true,k_est,matched_error,hausdorff,"
          "runtime_ms,error");
    CHECK(!row1.empty());
    CHECK(!row2.empty());

    // replay trial 1 from its seed column and compare the metric fields
    std::stringstream ss(row2);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    REQUIRE(f.size() >= 13);
    const auto rep = dir.path / "replay.csv";
    REQUIRE(run_cmd("replay --scenario rate --n 200 --p 2 --spacing 66 --kappa 3 "
                    "--sigma2 1 --intervals 80 --trial " + f[6] + " --seed " + f[7] +
                    " --oracle-params --out " + rep.string()) == 0);
    std::ifstream rin(rep);
    std::string rheader, rrow;
    std::getline(rin, rheader);
    std::getline(rin, rrow);
    std::stringstream rs(rrow);
    std::vector<std::string> g;
    while (std::getline(rs, field, ',')) g.push_back(field);
    REQUIRE(g.size() >= 13);
    // all columns but runtime_ms (index 12) must match
    for (std::size_t i = 0; i < 12; ++i) CHECK(f[i] == g[i]);
}

TEST_CASE("interval coverage output") {
    TempDir dir;
    const auto out = dir.path / "cov.csv";
    REQUIRE(run_cmd("interval-coverage --n 600 --spacing 150 --k-changes 3 "
                    "--grid-m 0 --grid-m 400 --trials 100 --seed 4 --out " +
                    out.string()) == 0);
    std::ifstream in(out);
    std::string header, r0, r1;
    std::getline(in, header);
    std::getline(in, r0);
    std::getline(in, r1);
    CHECK(header == "n,delta,K,M,trials,seed,frequency,bound");
    CHECK(r0.find("600,150,3,0,100,4,0,") == 0);
}

TEST_CASE("config file settings are applied and the command line wins") {
    TempDir dir;
    const auto cfg = dir.path / "cfg.ini";
    std::ofstream(cfg) << "[rate-sweep]\n"
                          "grid-n = 200\n"
                          "grid-p = 2\n"
                          "grid-delta = 66\n"
                          "grid-kappa = 3\n"
                          "grid-intervals = 60\n"
                          "trials = 3\n"
                          "seed = 12\n"
                          "oracle-params = true\n";
    const auto out = dir.path / "out.csv";
    REQUIRE(run_cmd("--config " + cfg.string() + " rate-sweep --out " + out.string()) == 0);
    {
        std::ifstream in(out);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 4);  // header + 3 trials from the config
    }
    REQUIRE(run_cmd("--config " + cfg.string() + " rate-sweep --trials 1 --out " +
                    out.string()) == 0);
    {
        std::ifstream in(out);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 2);  // command line overrides the config
    }
}

TEST_CASE("phase sweep emits normalized_error") {
    TempDir dir;
    const auto out = dir.path / "phase.csv";
    REQUIRE(run_cmd("phase-sweep --n 300 --grid-p 3 --grid-r 30 --trials 2 --seed 8 "
                    "--algo oracle --out " + out.string()) == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "n,p,delta,kappa,sigma2,M,trial,seed,k_true,k_est,matched_error,hausdorff,"
          "normalized_error,runtime_ms,error");
}
