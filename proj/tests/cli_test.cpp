#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "unipark/cli/config.hpp"
#include "unipark/cli/runner.hpp"

namespace unipark::cli {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

const fs::path kScenarioDir = UNIPARK_SCENARIO_DIR;

std::vector<Scenario> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenarios(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("unipark_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

int run_quiet(std::string_view sub, const fs::path& config, const fs::path& out,
              std::optional<double> t_max = std::nullopt, std::string* log = nullptr) {
  RunOptions opts;
  opts.config = config;
  opts.out_dir = out;
  opts.t_max = t_max;
  opts.quiet = true;
  std::ostringstream os;
  const int code = run(sub, opts, os);
  if (log) *log = os.str();
  return code;
}

const char* kExample1 = R"(
[example1]
controller = optimal
penalty = Quadratic
eps1 = 1
eps2 = 1
ic_polar = 1, -pi/2, -pi/2
dt = 1e-3
t_max = 1
)";

TEST(ParseNumber, LiteralsAndPiExpressions) {
  EXPECT_EQ(parse_number("0.25"), 0.25);
  EXPECT_EQ(parse_number(" 1e-3 "), 1e-3);
  EXPECT_EQ(parse_number("pi"), kPi);
  EXPECT_EQ(parse_number("-pi/2"), -kPi / 2);
  EXPECT_EQ(parse_number("3*pi/4"), 3 * kPi / 4);
  EXPECT_EQ(parse_number("+2"), 2.0);
  for (const char* bad : {"", "abc", "pi pi", "1/0", "2*", "--1", "1e999"}) {
    EXPECT_THROW(parse_number(bad), ConfigError) << bad;
  }
}

TEST(ParseScenarios, DefaultsAndOverrides) {
  const auto s = parse(R"(
[defaults]
dt = 2e-3
t_max = 10
penalty = HyperbolicCosine
ic_cartesian = 0, 1, 0; 1, 0, pi/2

[a]
eps1 = 2

[b]
dt = 1e-3
penalty1 = Quadratic
controller = continuous
ic_polar = 1, -pi/2, -pi/2
require_convergence = true
)");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].name, "a");
  EXPECT_EQ(s[0].sim.dt, 2e-3);
  EXPECT_EQ(s[0].sim.t_max, 10);
  EXPECT_EQ(s[0].eps1, 2);
  EXPECT_EQ(s[0].eps2, 1);
  EXPECT_EQ(s[0].penalty1, BuiltinPenalty::kHyperbolicCosine);
  EXPECT_EQ(s[0].controller, ControllerKind::kOptimal);
  ASSERT_EQ(s[0].ics.size(), 2u);
  EXPECT_NEAR(s[0].ics[0].xi.delta, -kPi / 2, 1e-15);
  EXPECT_NEAR(s[0].ics[0].xi.gamma, -kPi / 2, 1e-15);
  EXPECT_EQ(s[0].ics[1].label, "1, 0, pi/2");
  EXPECT_FALSE(s[0].require_convergence);

  EXPECT_EQ(s[1].sim.dt, 1e-3);
  EXPECT_EQ(s[1].penalty1, BuiltinPenalty::kQuadratic);
  EXPECT_EQ(s[1].penalty2, BuiltinPenalty::kHyperbolicCosine);
  EXPECT_EQ(s[1].controller, ControllerKind::kContinuous);
  ASSERT_EQ(s[1].ics.size(), 1u);
  EXPECT_EQ(s[1].ics[0].xi.rho, 1.0);
  EXPECT_TRUE(s[1].require_convergence);

  const auto runs = expand_runs(s);
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].name, "a_1");
  EXPECT_EQ(runs[1].name, "a_2");
  EXPECT_EQ(runs[2].name, "b");
}

TEST(ParseScenarios, SaturationAndAdaptiveKeys) {
  const auto s = parse(R"(
[bounded]
penalty = RelayApprox
controller = continuous
sigma = 0.2
v_bar = 2
ic_polar = 1, 0, 0

[adapt]
controller = adaptive
b1 = 0.5
mu2 = 1
eps1_hat0 = -0.5
ic_polar = 1, 0, 0
)");
  ASSERT_TRUE(s[0].saturation.has_value());
  EXPECT_EQ(s[0].saturation->v_bar, 2);
  EXPECT_EQ(s[0].saturation->omega_bar, 1);
  EXPECT_EQ(s[0].saturation->sigma, 0.2);
  const auto cfg = controller_config(s[0]);
  EXPECT_NE(dynamic_cast<const TabulatedPenalty*>(cfg.penalty1.get()), nullptr);
  EXPECT_NEAR(cfg.eps1(PolarStated{1.8, 0, 0}), 1.0, 1e-15);  // v_bar / (sigma + rho)

  EXPECT_TRUE(s[1].adaptive());
  EXPECT_EQ(s[1].slip.b1, 0.5);
  EXPECT_EQ(s[1].slip.b2, 1.0);
  const auto a = adaptive_state(s[1]);
  EXPECT_EQ(a.eps1_hat, -0.5);
  EXPECT_EQ(a.mu1, 0.5);
  EXPECT_EQ(a.mu2, 1.0);
  EXPECT_THROW(controller_config(s[1]), std::invalid_argument);
}

TEST(ParseScenarios, Errors) {
  const std::map<std::string, std::string> cases = {
      {"unknown penalty", "[a]\npenalty = Huber\nic_polar = 1, 0, 0\n"},
      {"sigma missing", "[a]\npenalty = LogCosine\nic_polar = 1, 0, 0\n"},
      {"sigma missing relay", "[a]\npenalty2 = RelayApprox\nic_polar = 1, 0, 0\n"},
      {"limits without sigma", "[a]\nv_bar = 1\nic_polar = 1, 0, 0\n"},
      {"negative dt", "[a]\ndt = -1e-3\nic_polar = 1, 0, 0\n"},
      {"unknown key", "[a]\nepsilon = 1\nic_polar = 1, 0, 0\n"},
      {"origin", "[a]\nic_cartesian = 0, 0, 1\n"},
      {"nonpositive rho", "[a]\nic_polar = 0, 0, 0\n"},
      {"short ic", "[a]\nic_polar = 1, 0\n"},
      {"both ics", "[a]\nic_polar = 1, 0, 0\nic_cartesian = 1, 0, 0\n"},
      {"no ic", "[a]\npenalty = Quadratic\n"},
      {"zero gain", "[a]\neps1 = 0\nic_polar = 1, 0, 0\n"},
      {"bad controller", "[a]\ncontroller = lqr\nic_polar = 1, 0, 0\n"},
      {"bad kappa", "[a]\nkappa = 1, -2\nic_polar = 1, 0, 0\n"},
      {"bad bool", "[a]\nrequire_convergence = maybe\nic_polar = 1, 0, 0\n"},
      {"normalization", "[a]\nnormalization = log\nic_polar = 1, 0, 0\n"},
      {"top-level key", "dt = 1\n[a]\nic_polar = 1, 0, 0\n"},
      {"no scenarios", "[defaults]\ndt = 1e-3\n"},
      {"duplicate section", "[a]\nic_polar = 1, 0, 0\n[a]\nic_polar = 1, 0, 0\n"},
  };
  for (const auto& [label, text] : cases) {
    EXPECT_THROW(parse(text), ConfigError) << label;
  }
  // bounded penalty is fine when the saturation block is present
  EXPECT_NO_THROW(parse("[a]\npenalty = LogCosine\nsigma = 0.1\nic_polar = 1, 0, 0\n"));
}

TEST(Csv, FormatRoundTrips) {
  for (double x : {0.1, -7.950999333853338710, 1e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(Csv, SettlingTime) {
  Trajectory traj;
  for (double r : {1.0, 0.5, 0.01, 0.03, 0.015, 0.001}) {
    TrajectorySample s;
    s.t = static_cast<double>(traj.samples.size());
    s.xi = PolarStated{r, 0, 0};
    traj.samples.push_back(s);
  }
  EXPECT_EQ(settling_time(traj), 4.0);
  traj.samples.back().xi.rho = 0.5;
  EXPECT_FALSE(settling_time(traj).has_value());
}

TEST(Run, SimulateWritesTrajectoryAndSummary) {
  TempDir dir;
  const auto config = dir.write("ex1.ini", kExample1);
  ASSERT_EQ(run_quiet("simulate", config, dir.path() / "out"), kExitOk);

  const auto rows = read_csv(dir.path() / "out" / "example1.csv");
  ASSERT_EQ(rows.size(), 1002u);  // header + 1001 samples
  std::istringstream header_text(slurp(dir.path() / "out" / "example1.csv"));
  std::string header;
  std::getline(header_text, header);
  EXPECT_EQ(header, kTrajectoryHeader);
  ASSERT_EQ(rows[1].size(), 15u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_NEAR(std::stod(rows[1][7]), -7.950999333853338710, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][8]), -4.404219909268704922, 1e-12);
  EXPECT_EQ(rows[1][13], "");
  EXPECT_EQ(rows[1][14], "");
  EXPECT_NEAR(std::stod(rows.back()[0]), 1.0, 1e-12);

  const auto summary = read_csv(dir.path() / "out" / "summary.csv");
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[1][0], "example1");
  EXPECT_EQ(summary[1][1], "horizon");
  EXPECT_NEAR(std::stod(summary[1][3]), 7.950999333853338710, 1e-12);
  EXPECT_EQ(summary[1][5], "");  // not settled within one second
}

TEST(Run, OutputIsDeterministic) {
  TempDir dir;
  const auto config = dir.write("fan.ini", slurp(kScenarioDir / "fan.ini"));
  ASSERT_EQ(run_quiet("sweep", config, dir.path() / "a", 3.0), kExitOk);
  ASSERT_EQ(run_quiet("sweep", config, dir.path() / "b", 3.0), kExitOk);
  ASSERT_EQ(run_quiet("simulate", config, dir.path() / "c", 3.0), kExitOk);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir.path() / "a")) {
    const auto name = entry.path().filename();
    const auto a = slurp(entry.path());
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir.path() / "b" / name)) << name;
    EXPECT_EQ(a, slurp(dir.path() / "c" / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 6);  // five runs and the summary
}

TEST(Run, ProbeArgminAtUnitScale) {
  TempDir dir;
  ASSERT_EQ(run_quiet("probe", kScenarioDir / "probe.ini", dir.path(), 20.0), kExitOk);
  const auto rows = read_csv(dir.path() / "probe_probe.csv");
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"kappa", "J", "converged", "argmin"}));
  int argmin_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][3] == "1") {
      ++argmin_rows;
      EXPECT_EQ(rows[i][0], "1");
    }
  }
  EXPECT_EQ(argmin_rows, 1);
}

TEST(Run, AdaptivePeaksBelowBaseline) {
  TempDir dir;
  ASSERT_EQ(run_quiet("adaptive", kScenarioDir / "adaptive.ini", dir.path()), kExitOk);
  std::map<std::string, std::pair<double, double>> peaks;
  for (const auto& row : read_csv(dir.path() / "summary.csv")) {
    if (row[0] == "name") continue;
    peaks[row[0]] = {std::stod(row[3]), std::stod(row[4])};
  }
  ASSERT_EQ(peaks.size(), 3u);
  const auto base = peaks.at("baseline");
  for (const char* name : {"adaptive_mu05", "adaptive_mu1"}) {
    EXPECT_LT(peaks.at(name).first, base.first) << name;
    EXPECT_LT(peaks.at(name).second, base.second) << name;
  }
  const auto bound = read_csv(dir.path() / "adaptive.csv");
  ASSERT_EQ(bound.size(), 3u);
  EXPECT_EQ(bound[1][5], "true");
  EXPECT_EQ(bound[2][5], "true");
  EXPECT_EQ(read_csv(dir.path() / "adaptive_mu1.csv")[1][13], "0");
}

TEST(Run, CompareTabulatesReductions) {
  TempDir dir;
  const auto config = dir.write("cmp.ini", R"(
[defaults]
ic_cartesian = 0, 1, 0; 1, 0, 0
t_max = 2

[quadratic]
penalty = Quadratic

[cosh]
penalty = HyperbolicCosine
)");
  ASSERT_EQ(run_quiet("compare", config, dir.path()), kExitOk);
  const auto rows = read_csv(dir.path() / "compare.csv");
  ASSERT_EQ(rows.size(), 5u);
  // labels are quoted, so every data row splits into 7 cells
  EXPECT_EQ(rows[1][3], "quadratic_1");
  EXPECT_EQ(std::stod(rows[1].back()), 1.0);
  EXPECT_EQ(rows[2][3], "cosh_1");
  EXPECT_GT(std::stod(rows[2].back()), 2.5);  // 7.951 / 2.770

  const auto mismatched = dir.write("bad.ini", "[a]\nic_polar = 1, 0, 0\n[b]\nic_polar = 1, 0, 0; 2, 0, 0\n");
  EXPECT_EQ(run_quiet("compare", mismatched, dir.path()), kExitConfig);
}

TEST(Run, ExitCodes) {
  TempDir dir;
  const auto ok = dir.write("ok.ini", kExample1);
  std::string log;
  EXPECT_EQ(run_quiet("nonsense", ok, dir.path()), kExitConfig);
  EXPECT_EQ(run_quiet("simulate", dir.path() / "missing.ini", dir.path()), kExitConfig);
  EXPECT_EQ(run_quiet("adaptive", ok, dir.path()), kExitConfig);
  EXPECT_EQ(run_quiet("probe", ok, dir.path()), kExitConfig);
  EXPECT_EQ(run_quiet("compare", ok, dir.path()), kExitConfig);

  const auto bad = dir.write("bad.ini", "[a]\npenalty = LogCosine\nic_polar = 1, 0, 0\n");
  EXPECT_EQ(run_quiet("simulate", bad, dir.path(), std::nullopt, &log), kExitConfig);
  EXPECT_NE(log.find("sigma missing"), std::string::npos) << log;

  RunOptions opts;
  opts.config = ok;
  opts.out_dir = dir.path();
  opts.dt = -1e-3;
  std::ostringstream sink;
  EXPECT_EQ(run("simulate", opts, sink), kExitConfig);

  const auto strict = dir.write("strict.ini", std::string(kExample1) + "require_convergence = true\n");
  EXPECT_EQ(run_quiet("simulate", strict, dir.path(), std::nullopt, &log), kExitNotConverged);
  EXPECT_NE(log.find("did not converge"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "example1.csv"));

  // a near-origin start converges at once, so the same requirement passes
  const auto near = dir.write("near.ini",
                              "[n]\nic_polar = 1e-4, 0, 0\nrequire_convergence = true\n");
  EXPECT_EQ(run_quiet("simulate", near, dir.path()), kExitOk);
}

TEST(Run, PenaltyTables) {
  TempDir dir;
  ASSERT_EQ(run_quiet("penalty-table", {}, dir.path()), kExitOk);
  for (const char* name : {"Quadratic", "HyperbolicCosine", "LogCosine", "RelayApprox"}) {
    const auto rows = read_csv(dir.path() / ("penalty_" + std::string(name) + ".csv"));
    ASSERT_EQ(rows.size(), 402u) << name;
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "eta", "eta_prime", "inv_eta_prime", "lf"}));
  }
  const auto quad = read_csv(dir.path() / "penalty_Quadratic.csv");
  EXPECT_EQ(quad.back()[0], "3");
  EXPECT_EQ(std::stod(quad.back()[1]), 4.5);
  const auto logcos = read_csv(dir.path() / "penalty_LogCosine.csv");
  EXPECT_EQ(logcos.back()[1], "inf");  // beyond pi/2
}

}  // namespace
}  // namespace unipark::cli
