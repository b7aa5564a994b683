#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "micky/config.hpp"
#include "micky/experiment.hpp"

using namespace micky;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "/base");
}

bool check_passed(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c.passed;
  }
  FAIL("missing check " << name);
  return false;
}

}  // namespace

TEST_CASE("defaults") {
  const ExperimentConfig c = parse("");
  CHECK(c.workload == WorkloadKind::Segmentation);
  CHECK(c.agents == 8);
  CHECK(c.blocks == 40);
  CHECK(c.iterations == 1000);
  CHECK(c.tau == 0.5);
  CHECK(c.segmentation.sigma == 0.1);
  CHECK(c.segmentation.lambda == 1.0);
  CHECK(c.segmentation.noise == 0.05);
  CHECK(c.update_from_average);
  CHECK(c.min_block_probability == 1e-3);
  CHECK(c.snapshot_rounds() == std::vector<std::size_t>{0, 100, 200, 300, 400, 500, 600, 1000});
}

TEST_CASE("parsing every section") {
  const ExperimentConfig c = parse(R"(
[workload]
kind = synthetic-cut
[synthetic]
elements = 6
seed = 9
[segmentation]
image = img/x.pgm
connectivity = 8
grid_rows = 2
grid_cols = 2
[graph]
agents = 4
file = g.txt
weights = sinkhorn
[engine]
iterations = 50
stepsize = constant
step_scale = 0.25
threads = 3
update_from_average = false
[output]
dir = out
snapshots = 0, 10, 80
oracle = no
)");
  CHECK(c.workload == WorkloadKind::SyntheticCut);
  CHECK(c.synthetic.elements == 6);
  CHECK(c.workload_seed == 9);
  CHECK(c.resolve(*c.image) == std::filesystem::path("/base/img/x.pgm"));
  CHECK(c.segmentation.connectivity == Connectivity::Eight);
  CHECK(c.layout->rows == 2);
  CHECK(c.weights == WeightScheme::Sinkhorn);
  CHECK(c.stepsize.kind == StepsizeSchedule::Kind::Constant);
  CHECK(*c.stepsize.scale == 0.25);
  CHECK(c.threads == 3);
  CHECK_FALSE(c.update_from_average);
  CHECK_FALSE(c.oracle);
  CHECK(c.snapshot_rounds() == std::vector<std::size_t>{0, 10});
  CHECK(c.resolve("/abs/path") == std::filesystem::path("/abs/path"));
}

TEST_CASE("malformed configurations are rejected with the key name") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("[engine]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(message("[nowhere]\nx = 1\n").find("nowhere") != std::string::npos);
  CHECK(message("[engine]\niterations = ten\n").find("engine.iterations") != std::string::npos);
  CHECK(message("[engine]\niterations = -3\n").find("engine.iterations") != std::string::npos);
  CHECK(message("[engine]\ntau = 2\n").find("tau") != std::string::npos);
  CHECK(message("[graph]\nweights = magic\n").find("graph.weights") != std::string::npos);
  CHECK(message("[segmentation]\ngrid_rows = 2\n").find("grid_cols") != std::string::npos);
  CHECK(message("[output]\noracle = maybe\n").find("output.oracle") != std::string::npos);
  CHECK_THROWS(load_config("/nonexistent/config.ini"));
}

TEST_CASE("bundled configurations parse and validate") {
  for (const char* name : {"desk.ini", "disk64.ini", "synthetic.ini"}) {
    CAPTURE(name);
    const ExperimentConfig c = load_config(std::filesystem::path(MICKY_CONFIG_DIR) / name);
    const ValidationReport r = validate(c);
    std::ostringstream out;
    print_report(out, r);
    CAPTURE(out.str());
    CHECK(r.ok());
  }
}

TEST_CASE("validation failures name the violated condition") {
  ExperimentConfig c;
  SUBCASE("square summability") {
    c.stepsize.exponent = 0.4;
    const ValidationReport r = validate(c);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(check_passed(r, "stepsize conditions"));
    CHECK(check_passed(r, "double stochasticity"));
  }
  SUBCASE("row stochastic weights") {
    const auto dir = std::filesystem::temp_directory_path() / "micky_validate_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream g(dir / "g.txt");
      g << "3\n1 2\n2 1\n2 3\n3 2\n";
      std::ofstream w(dir / "w.csv");
      w << "0.5,0.5,0\n0.25,0.5,0.25\n0,0.6,0.4\n";
    }
    c.agents = 3;
    c.graph_file = dir / "g.txt";
    c.weights = WeightScheme::File;
    c.weights_file = dir / "w.csv";
    const ValidationReport r = validate(c);
    CHECK(check_passed(r, "strong connectivity"));
    CHECK_FALSE(check_passed(r, "double stochasticity"));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("disconnected graph") {
    const auto dir = std::filesystem::temp_directory_path() / "micky_validate_test2";
    std::filesystem::create_directories(dir);
    {
      std::ofstream g(dir / "g.txt");
      g << "4\n1 2\n2 1\n3 4\n4 3\n";
    }
    c.agents = 4;
    c.graph_file = dir / "g.txt";
    CHECK_FALSE(check_passed(validate(c), "strong connectivity"));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("block floor") {
    c.min_block_probability = 0.05;
    CHECK_FALSE(check_passed(validate(c), "block probability floor"));
  }
  SUBCASE("missing image") {
    c.image = "/nonexistent/picture.pgm";
    const ValidationReport r = validate(c);
    CHECK_FALSE(check_passed(r, "configuration"));
    CHECK(r.checks[0].messages[0].find("/nonexistent/picture.pgm") != std::string::npos);
  }
  SUBCASE("constant stepsize warns but passes") {
    c.stepsize.kind = StepsizeSchedule::Kind::Constant;
    c.stepsize.scale = 0.1;
    const ValidationReport r = validate(c);
    CHECK(r.ok());
    CHECK(r.warnings.size() == 1);
  }
}

TEST_CASE("run outputs") {
  ExperimentConfig c = load_config(std::filesystem::path(MICKY_CONFIG_DIR) / "desk.ini");
  c.iterations = 120;
  c.snapshots = std::vector<std::size_t>{0, 60, 120};
  const auto out = std::filesystem::temp_directory_path() / "micky_outputs_test";
  std::filesystem::remove_all(out);
  const Experiment e = prepare(c);
  const RunTrace t = run(make_run_config(e));
  write_run_outputs(e, t, out);

  for (const char* f : {"trace.csv", "cost_error.csv", "summary.txt", "solution_agent_1.pgm",
                        "solution_agent_4.pgm", "snapshot_agent_2_k60.pgm",
                        "solution_agent_3_k120.pgm"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(out / f));
  }
  for (const auto& entry : std::filesystem::directory_iterator(out)) {
    if (entry.path().extension() == ".pgm") CHECK(load_pgm(entry.path()).size() == 64);
  }

  // Trace rows: one per agent per recorded round, plus the header.
  std::ifstream trace(out / "trace.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(trace, line);) ++lines;
  CHECK(lines == 1 + 4 * t.recorded_rounds.size());

  // The reported final cost error equals the one recomputed from the masks.
  const SumFunction total(e.functions);
  for (AgentId i = 0; i < 4; ++i) {
    const GrayImage mask = load_pgm(out / ("solution_agent_" + std::to_string(i + 1) + ".pgm"));
    Subset X(mask.size());
    for (Element p = 0; p < mask.size(); ++p) {
      if (mask.pixels[p] == 0.0) X.insert(p);
    }
    const double recomputed = std::abs(total.eval(X) - *e.optimal_value);
    CHECK(*t.rows[t.rows.size() - 4 + i].cost_error == recomputed);
  }
  std::filesystem::remove_all(out);
}

TEST_CASE("mask comparisons") {
  const Subset a = Subset::from_mask(4, 0b0011);
  const Subset b = Subset::from_mask(4, 0b0110);
  CHECK(mask_agreement(a, b) == 0.5);
  CHECK(intersection_over_union(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(intersection_over_union(Subset(3), Subset(3)) == 1.0);
}
