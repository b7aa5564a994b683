#include "micky/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace micky {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

GrayImage load_image(const ExperimentConfig& config) {
  if (config.image) return load_pgm(config.resolve(*config.image));
  return make_disk_fixture(config.fixture);
}

GridLayout resolve_layout(const ExperimentConfig& config) {
  if (!config.layout) return GridLayout::for_agents(config.agents);
  if (config.layout->agents() != config.agents) {
    throw std::runtime_error("segmentation grid " + std::to_string(config.layout->rows) + "x" +
                             std::to_string(config.layout->cols) + " does not match " +
                             std::to_string(config.agents) + " agents");
  }
  return *config.layout;
}

// Pixels labelled object: the complement of the minimizing set, which collects
// the pixels paying the background penalty.
GrayImage object_mask(const Subset& X, std::size_t width, std::size_t height) {
  Subset object = Subset::full(X.ground_size());
  for (Element p : X.members()) object.erase(p);
  return mask_from_set(object, width, height);
}

}  // namespace

Digraph build_graph(const ExperimentConfig& config) {
  Digraph g;
  if (config.graph_file) {
    auto in = open_input(config.resolve(*config.graph_file), "graph file");
    g = read_edge_list(in);
    if (g.size() != config.agents) {
      throw std::runtime_error("graph file has " + std::to_string(g.size()) + " nodes but " +
                               std::to_string(config.agents) + " agents are configured");
    }
  } else {
    g = erdos_renyi_strongly_connected(config.agents, config.edge_probability, config.graph_seed);
  }
  return config.symmetrize ? symmetrize(g) : g;
}

WeightMatrix build_weights(const ExperimentConfig& config, const Digraph& graph) {
  switch (config.weights) {
    case WeightScheme::Metropolis:
      return metropolis_weights(graph);
    case WeightScheme::Sinkhorn:
      return sinkhorn_weights(graph, config.sinkhorn_tolerance, config.sinkhorn_iterations);
    case WeightScheme::File: {
      if (!config.weights_file) throw std::runtime_error("graph.weights = file needs graph.weights_file");
      auto in = open_input(config.resolve(*config.weights_file), "weights file");
      return read_weights_csv(in);
    }
  }
  throw std::logic_error("unknown weight scheme");
}

Experiment prepare(const ExperimentConfig& config) {
  Experiment e;
  e.config = config;
  if (config.workload == WorkloadKind::Segmentation) {
    e.image = load_image(config);
    e.layout = resolve_layout(config);
    const PixelPartition tiles =
        partition_image(e.image->width, e.image->height, *e.layout, config.overlap);
    e.instance = build_cut_instance(*e.image, tiles, config.segmentation, config.noise_seed);
    e.functions = local_cut_functions(*e.instance);
    e.ground_size = e.instance->num_pixels();
  } else {
    SyntheticCutParams params = config.synthetic;
    params.agents = config.agents;
    e.functions = synthetic_cut_problem(params, config.workload_seed);
    e.ground_size = params.elements;
  }
  if (config.blocks == 0 || config.blocks > e.ground_size) {
    throw std::runtime_error("engine.blocks must lie in 1.." + std::to_string(e.ground_size));
  }
  e.partition = BlockPartition::uniform(e.ground_size, config.blocks);
  e.graph = build_graph(config);
  e.weights = build_weights(config, e.graph);

  if (config.oracle) {
    if (e.instance) {
      MinCut cut = max_flow_min_cut(build_flow_network(*e.instance));
      e.optimal_value = cut.cut_value - normalization_constant(*e.instance);
      e.optimal_set = cut.source_side;
      e.min_cut = std::move(cut);
    } else if (e.ground_size <= kMaxBruteForce) {
      const Minimizer m = brute_force_min(SumFunction(e.functions));
      e.optimal_value = m.value;
      e.optimal_set = m.set;
    }
  }
  return e;
}

RunConfig make_run_config(const Experiment& e) {
  const ExperimentConfig& c = e.config;
  RunConfig rc;
  rc.functions = e.functions;
  rc.graph = e.graph;
  rc.weights = e.weights;
  rc.partition = e.partition;
  rc.iterations = c.iterations;
  rc.tau = c.tau;
  rc.seed = c.seed;
  rc.stepsize = c.stepsize;
  rc.min_block_probability = c.min_block_probability;
  rc.metric_every = c.metric_every;
  rc.snapshot_rounds = c.snapshot_rounds();
  rc.update_from_average = c.update_from_average;
  rc.optimal_value = e.optimal_value;
  rc.threads = c.threads;
  return rc;
}

void write_summary(std::ostream& out, const Experiment& e, const RunTrace& trace) {
  const std::size_t last = trace.recorded_rounds.size() - 1;
  out << "workload: "
      << (e.config.workload == WorkloadKind::Segmentation ? "segmentation" : "synthetic-cut")
      << '\n';
  out << "agents: " << trace.num_agents << '\n';
  out << "ground set size: " << e.ground_size << '\n';
  out << "blocks: " << e.partition.num_blocks() << '\n';
  out << "iterations: " << e.config.iterations << '\n';
  out << "tau: " << fmt(e.config.tau) << '\n';
  out << "seed: " << e.config.seed << '\n';
  if (e.optimal_value) {
    out << "oracle cost: " << fmt(*e.optimal_value) << '\n';
  } else {
    out << "oracle cost: disabled\n";
  }
  if (e.min_cut) out << "oracle min-cut value: " << fmt(e.min_cut->cut_value) << '\n';
  out << "\nfinal cost per agent (sum of private functions at the thresholded estimate)\n";
  out << "agent,final_cost,cost_error\n";
  for (AgentId i = 0; i < trace.num_agents; ++i) {
    const TraceRow& row = trace.at(last, i);
    out << i + 1 << ',' << fmt(row.set_value) << ','
        << (row.cost_error ? fmt(*row.cost_error) : std::string()) << '\n';
  }
  if (!e.optimal_value) return;
  out << "\ncost error trace\n";
  out << "round";
  for (AgentId i = 0; i < trace.num_agents; ++i) out << ",agent_" << i + 1;
  out << '\n';
  for (std::size_t r = 0; r < trace.recorded_rounds.size(); ++r) {
    out << trace.recorded_rounds[r];
    for (AgentId i = 0; i < trace.num_agents; ++i) out << ',' << fmt(*trace.at(r, i).cost_error);
    out << '\n';
  }
}

void write_run_outputs(const Experiment& e, const RunTrace& trace,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "trace.csv");
    write_trace_csv(out, trace);
  }
  {
    auto out = open_output(out_dir / "cost_error.csv");
    out << "round,agent,set_value,cost_error\n";
    for (std::size_t r = 0; r < trace.recorded_rounds.size(); ++r) {
      for (AgentId i = 0; i < trace.num_agents; ++i) {
        const TraceRow& row = trace.at(r, i);
        out << row.round << ',' << i + 1 << ',' << fmt(row.set_value) << ','
            << (row.cost_error ? fmt(*row.cost_error) : std::string()) << '\n';
      }
    }
  }
  {
    auto out = open_output(out_dir / "summary.txt");
    write_summary(out, e, trace);
  }

  if (e.instance) {
    const std::size_t w = e.instance->width;
    const std::size_t h = e.instance->height;
    for (const Snapshot& snap : trace.snapshots) {
      for (AgentId i = 0; i < snap.x.size(); ++i) {
        const std::string tag = "agent_" + std::to_string(i + 1) + "_k" + std::to_string(snap.round);
        GrayImage continuous(w, h);
        continuous.pixels = snap.x[i];
        save_pgm(continuous, out_dir / ("snapshot_" + tag + ".pgm"));
        save_pgm(object_mask(threshold(snap.x[i], e.config.tau), w, h),
                 out_dir / ("solution_" + tag + ".pgm"));
      }
    }
    for (AgentId i = 0; i < trace.final_sets.size(); ++i) {
      save_pgm(object_mask(trace.final_sets[i], w, h),
               out_dir / ("solution_agent_" + std::to_string(i + 1) + ".pgm"));
    }
    if (e.config.dump_instance) {
      for (AgentId i = 0; i < e.instance->agents.size(); ++i) {
        auto unary = open_output(out_dir / ("unary_agent_" + std::to_string(i + 1) + ".csv"));
        write_unary_csv(unary, *e.instance, i);
        auto edges = open_output(out_dir / ("edges_agent_" + std::to_string(i + 1) + ".csv"));
        write_edges_csv(edges, *e.instance, i);
      }
    }
  } else {
    auto out = open_output(out_dir / "solution.csv");
    out << "agent,members,cost\n";
    SumFunction total(e.functions);
    for (AgentId i = 0; i < trace.final_sets.size(); ++i) {
      out << i + 1 << ',';
      bool first = true;
      for (Element m : trace.final_sets[i].members()) {
        out << (first ? "" : " ") << m + 1;
        first = false;
      }
      out << ',' << fmt(total.eval(trace.final_sets[i])) << '\n';
    }
  }
  if (e.config.dump_instance) {
    auto graph = open_output(out_dir / "graph.txt");
    write_edge_list(graph, e.graph);
    auto weights = open_output(out_dir / "weights.csv");
    write_weights_csv(weights, e.weights);
  }
}

void write_oracle_outputs(const Experiment& e, const std::filesystem::path& out_dir) {
  if (!e.instance) throw std::runtime_error("oracle: needs a segmentation workload");
  if (!e.min_cut) throw std::runtime_error("oracle: disabled in the configuration");
  std::filesystem::create_directories(out_dir);
  save_pgm(object_mask(e.min_cut->source_side, e.instance->width, e.instance->height),
           out_dir / "oracle_mask.pgm");
  auto out = open_output(out_dir / "oracle.txt");
  out << "min-cut value: " << fmt(e.min_cut->cut_value) << '\n';
  out << "flow value: " << fmt(e.min_cut->flow_value) << '\n';
  out << "normalization: " << fmt(normalization_constant(*e.instance)) << '\n';
  out << "optimal cost: " << fmt(*e.optimal_value) << '\n';
  out << "augmenting paths: " << e.min_cut->augmentations << '\n';
  out << "object pixels: " << e.ground_size - e.min_cut->source_side.size() << '\n';
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate(const ExperimentConfig& config) {
  ValidationReport report;
  // Checks are referred to by index: the vector grows as checks are added.
  auto add = [&](std::string name) {
    report.checks.push_back({std::move(name), true, {}});
    return report.checks.size() - 1;
  };
  auto fail = [&](std::size_t c, std::string msg) {
    report.checks[c].passed = false;
    report.checks[c].messages.push_back(std::move(msg));
  };

  const std::size_t setup = add("configuration");
  std::size_t ground = 0;
  try {
    if (config.workload == WorkloadKind::Segmentation) {
      const GrayImage image = load_image(config);
      ground = image.size();
      resolve_layout(config);
      if (image.width == 0 || image.height == 0) fail(setup, "image is empty");
    } else {
      ground = config.synthetic.elements;
      if (ground == 0) fail(setup, "synthetic.elements must be positive");
    }
    if (config.blocks == 0 || (ground && config.blocks > ground)) {
      fail(setup, "engine.blocks = " + std::to_string(config.blocks) + " outside 1.." +
                      std::to_string(ground));
    }
  } catch (const std::exception& ex) {
    fail(setup, ex.what());
  }

  const std::size_t conn = add("strong connectivity");
  const std::size_t weights = add("double stochasticity");
  try {
    const Digraph g = build_graph(config);
    if (!is_strongly_connected(g)) fail(conn, "communication graph is not strongly connected");
    try {
      const WeightMatrix w = build_weights(config, g);
      const StochasticReport r = check_doubly_stochastic_report(w, g, w.min_positive());
      for (const auto& v : r.violations) fail(weights, v);
    } catch (const std::exception& ex) {
      fail(weights, ex.what());
    }
  } catch (const std::exception& ex) {
    fail(conn, ex.what());
    fail(weights, "not checked: no graph");
  }

  const std::size_t steps = add("stepsize conditions");
  StepsizeSchedule schedule;
  schedule.kind = config.stepsize.kind;
  schedule.scale = config.stepsize.scale.value_or(1.0);
  schedule.exponent = config.stepsize.exponent;
  if (!config.stepsize.scale && !(config.stepsize.auto_multiplier > 0.0)) {
    fail(steps, "engine.step_multiplier must be positive");
  }
  try {
    schedule.validate();
  } catch (const std::exception& ex) {
    fail(steps, ex.what());
  }
  if (schedule.kind == StepsizeSchedule::Kind::Constant) {
    report.warnings.push_back(
        "constant stepsize: steps are not square summable, convergence holds only up to a "
        "neighborhood of the optimum");
  }

  const std::size_t floor = add("block probability floor");
  if (!(config.min_block_probability > 0.0)) {
    fail(floor, "engine.min_block_probability must be positive");
  } else if (config.blocks > 0 &&
             1.0 / static_cast<double>(config.blocks) < config.min_block_probability) {
    fail(floor, "uniform block probability 1/" + std::to_string(config.blocks) +
                    " is below the floor " + fmt(config.min_block_probability));
  }
  return report;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
    for (const auto& m : c.messages) out << "  " << m << '\n';
  }
  for (const auto& w : report.warnings) out << "WARN " << w << '\n';
  out << (report.ok() ? "valid\n" : "invalid\n");
}

double mask_agreement(const Subset& a, const Subset& b) {
  if (a.ground_size() != b.ground_size()) throw std::invalid_argument("mask sizes differ");
  if (a.ground_size() == 0) return 1.0;
  std::size_t same = 0;
  for (Element p = 0; p < a.ground_size(); ++p) same += a.contains(p) == b.contains(p);
  return static_cast<double>(same) / static_cast<double>(a.ground_size());
}

double intersection_over_union(const Subset& a, const Subset& b) {
  if (a.ground_size() != b.ground_size()) throw std::invalid_argument("mask sizes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (Element p = 0; p < a.ground_size(); ++p) {
    inter += a.contains(p) && b.contains(p);
    uni += a.contains(p) || b.contains(p);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace micky
