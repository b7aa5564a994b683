#include "micky/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace micky {

namespace pt = boost::property_tree;

std::vector<std::size_t> ExperimentConfig::snapshot_rounds() const {
  std::vector<std::size_t> rounds =
      snapshots ? *snapshots : std::vector<std::size_t>{0, 100, 200, 300, 400, 500, 600};
  if (!snapshots) rounds.push_back(iterations);
  std::erase_if(rounds, [&](std::size_t k) { return k > iterations; });
  std::sort(rounds.begin(), rounds.end());
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  return rounds;
}

std::filesystem::path ExperimentConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"workload", {"kind"}},
      {"synthetic",
       {"elements", "edge_probability", "pair_scale", "unary_scale", "seed"}},
      {"segmentation",
       {"image", "fixture_size", "fixture_foreground", "fixture_background", "fixture_radius",
        "sigma", "lambda", "foreground_mean", "background_mean", "spread", "probability_floor",
        "connectivity", "noise", "noise_seed", "grid_rows", "grid_cols", "overlap"}},
      {"graph",
       {"agents", "file", "edge_probability", "seed", "symmetrize", "weights", "weights_file",
        "sinkhorn_tolerance", "sinkhorn_iterations"}},
      {"engine",
       {"iterations", "tau", "seed", "blocks", "stepsize", "step_scale", "step_exponent",
        "step_multiplier", "step_samples", "update_from_average", "min_block_probability",
        "metric_every", "threads"}},
      {"output", {"dir", "snapshots", "oracle", "dump_instance"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

  template <class T>
  void get(const std::string& section, const std::string& key, T& out) const {
    const auto v = raw(section, key);
    if (!v) return;
    out = convert<T>(section + "." + key, *v);
  }

  template <class T>
  static T convert(const std::string& name, const std::string& text) {
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
      if (text == "false" || text == "0" || text == "no" || text == "off") return false;
      throw std::runtime_error("config: " + name + " expects a boolean, got '" + text + "'");
    } else if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else {
      std::istringstream in(text);
      T value{};
      if constexpr (std::is_unsigned_v<T>) {
        if (!text.empty() && text.front() == '-') {
          throw std::runtime_error("config: " + name + " must be nonnegative, got '" + text + "'");
        }
      }
      if (!(in >> value) || !(in >> std::ws).eof()) {
        throw std::runtime_error("config: " + name + " has invalid value '" + text + "'");
      }
      return value;
    }
  }

 private:
  const pt::ptree& tree_;
};

std::vector<std::size_t> parse_rounds(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    out.push_back(Reader::convert<std::size_t>("output.snapshots", item));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw std::runtime_error("config: key '" + section + "' outside a section");
      throw std::runtime_error("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw std::runtime_error("config: unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  Reader r(tree);
  ExperimentConfig c;
  c.base_dir = base_dir;

  if (const auto kind = r.raw("workload", "kind")) {
    if (*kind == "segmentation") {
      c.workload = WorkloadKind::Segmentation;
    } else if (*kind == "synthetic-cut") {
      c.workload = WorkloadKind::SyntheticCut;
    } else {
      throw std::runtime_error("config: workload.kind must be segmentation or synthetic-cut");
    }
  }

  r.get("synthetic", "elements", c.synthetic.elements);
  r.get("synthetic", "edge_probability", c.synthetic.edge_probability);
  r.get("synthetic", "pair_scale", c.synthetic.pair_scale);
  r.get("synthetic", "unary_scale", c.synthetic.unary_scale);
  r.get("synthetic", "seed", c.workload_seed);

  if (const auto img = r.raw("segmentation", "image")) c.image = std::filesystem::path(*img);
  r.get("segmentation", "fixture_size", c.fixture.size);
  r.get("segmentation", "fixture_foreground", c.fixture.foreground);
  r.get("segmentation", "fixture_background", c.fixture.background);
  r.get("segmentation", "fixture_radius", c.fixture.radius_fraction);
  r.get("segmentation", "sigma", c.segmentation.sigma);
  r.get("segmentation", "lambda", c.segmentation.lambda);
  r.get("segmentation", "foreground_mean", c.segmentation.model.foreground_mean);
  r.get("segmentation", "background_mean", c.segmentation.model.background_mean);
  r.get("segmentation", "spread", c.segmentation.model.spread);
  r.get("segmentation", "probability_floor", c.segmentation.model.floor);
  if (const auto conn = r.raw("segmentation", "connectivity")) {
    if (*conn == "4") {
      c.segmentation.connectivity = Connectivity::Four;
    } else if (*conn == "8") {
      c.segmentation.connectivity = Connectivity::Eight;
    } else {
      throw std::runtime_error("config: segmentation.connectivity must be 4 or 8");
    }
  }
  r.get("segmentation", "noise", c.segmentation.noise);
  r.get("segmentation", "noise_seed", c.noise_seed);
  {
    std::size_t rows = 0;
    std::size_t cols = 0;
    r.get("segmentation", "grid_rows", rows);
    r.get("segmentation", "grid_cols", cols);
    if ((rows == 0) != (cols == 0)) {
      throw std::runtime_error("config: set both segmentation.grid_rows and grid_cols");
    }
    if (rows) c.layout = GridLayout{rows, cols};
  }
  r.get("segmentation", "overlap", c.overlap);

  r.get("graph", "agents", c.agents);
  if (const auto f = r.raw("graph", "file")) c.graph_file = std::filesystem::path(*f);
  r.get("graph", "edge_probability", c.edge_probability);
  r.get("graph", "seed", c.graph_seed);
  r.get("graph", "symmetrize", c.symmetrize);
  if (const auto w = r.raw("graph", "weights")) {
    if (*w == "metropolis") {
      c.weights = WeightScheme::Metropolis;
    } else if (*w == "sinkhorn") {
      c.weights = WeightScheme::Sinkhorn;
    } else if (*w == "file") {
      c.weights = WeightScheme::File;
    } else {
      throw std::runtime_error("config: graph.weights must be metropolis, sinkhorn or file");
    }
  }
  if (const auto f = r.raw("graph", "weights_file")) c.weights_file = std::filesystem::path(*f);
  r.get("graph", "sinkhorn_tolerance", c.sinkhorn_tolerance);
  r.get("graph", "sinkhorn_iterations", c.sinkhorn_iterations);

  r.get("engine", "iterations", c.iterations);
  r.get("engine", "tau", c.tau);
  r.get("engine", "seed", c.seed);
  r.get("engine", "blocks", c.blocks);
  if (const auto kind = r.raw("engine", "stepsize")) {
    if (*kind == "diminishing") {
      c.stepsize.kind = StepsizeSchedule::Kind::Diminishing;
    } else if (*kind == "constant") {
      c.stepsize.kind = StepsizeSchedule::Kind::Constant;
    } else {
      throw std::runtime_error("config: engine.stepsize must be diminishing or constant");
    }
  }
  if (const auto scale = r.raw("engine", "step_scale"); scale && *scale != "auto") {
    c.stepsize.scale = Reader::convert<double>("engine.step_scale", *scale);
  }
  r.get("engine", "step_exponent", c.stepsize.exponent);
  r.get("engine", "step_multiplier", c.stepsize.auto_multiplier);
  r.get("engine", "step_samples", c.stepsize.auto_samples);
  r.get("engine", "update_from_average", c.update_from_average);
  r.get("engine", "min_block_probability", c.min_block_probability);
  r.get("engine", "metric_every", c.metric_every);
  r.get("engine", "threads", c.threads);

  if (const auto dir = r.raw("output", "dir")) c.out_dir = std::filesystem::path(*dir);
  if (const auto snaps = r.raw("output", "snapshots")) c.snapshots = parse_rounds(*snaps);
  r.get("output", "oracle", c.oracle);
  r.get("output", "dump_instance", c.dump_instance);

  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw std::runtime_error("config: engine.tau must lie in [0, 1]");
  if (c.agents == 0) throw std::runtime_error("config: graph.agents must be positive");
  if (c.threads == 0) throw std::runtime_error("config: engine.threads must be positive");
  if (c.metric_every == 0) throw std::runtime_error("config: engine.metric_every must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace micky
