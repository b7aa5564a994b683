#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>

#include "micky/experiment.hpp"
#include "micky/kernels.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

micky::ExperimentConfig load(const Overrides& o) {
  micky::ExperimentConfig c = micky::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) {
    if (*o.threads == 0) throw std::runtime_error("--threads must be positive");
    c.threads = *o.threads;
  }
  if (o.out) {
    c.out_dir = *o.out;
  } else {
    c.out_dir = c.resolve(c.out_dir);
  }
  return c;
}

int cmd_run(const Overrides& o) {
  const micky::ExperimentConfig config = load(o);
  const micky::Experiment experiment = micky::prepare(config);
  const micky::RunTrace trace = micky::run(micky::make_run_config(experiment));
  micky::write_run_outputs(experiment, trace, config.out_dir);
  const auto& last = trace.rows.end() - static_cast<std::ptrdiff_t>(trace.num_agents);
  double worst = 0.0;
  for (auto it = last; it != trace.rows.end(); ++it) {
    if (it->cost_error) worst = std::max(worst, *it->cost_error);
  }
  std::cout << "wrote " << config.out_dir.string() << " (" << trace.rows.size()
            << " trace rows, kernels " << micky::kernels::name(micky::kernels::active().variant)
            << ")\n";
  if (experiment.optimal_value) std::cout << "final max cost error " << worst << '\n';
  return 0;
}

int cmd_oracle(const Overrides& o) {
  micky::ExperimentConfig config = load(o);
  if (config.workload != micky::WorkloadKind::Segmentation) {
    throw std::runtime_error("oracle needs a segmentation workload");
  }
  config.oracle = true;
  const micky::Experiment experiment = micky::prepare(config);
  micky::write_oracle_outputs(experiment, config.out_dir);
  std::cout << "min-cut value " << experiment.min_cut->cut_value << ", optimal cost "
            << *experiment.optimal_value << '\n';
  return 0;
}

int cmd_validate(const Overrides& o) {
  const micky::ValidationReport report = micky::validate(load(o));
  micky::print_report(std::cout, report);
  return report.ok() ? 0 : 1;
}

int cmd_fixture(const micky::DiskFixture& params, const std::string& out, bool binary) {
  const std::filesystem::path path = out;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  micky::save_pgm(micky::make_disk_fixture(params), path,
                  binary ? micky::PgmFormat::Binary : micky::PgmFormat::Plain);
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed block-greedy submodular minimization simulator"};
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment configuration file")->required();
    sub->add_option("--seed", o.seed, "Override engine.seed");
    sub->add_option("--out", o.out, "Override output directory");
    sub->add_option("--threads", o.threads, "Worker threads per round");
  };
  CLI::App* run = app.add_subcommand("run", "Run the simulator and write trace, masks and summary");
  add_common(run);
  CLI::App* oracle = app.add_subcommand("oracle", "Solve the aggregated instance by max-flow");
  add_common(oracle);
  CLI::App* validate = app.add_subcommand("validate", "Check graph, weights, stepsize and blocks");
  add_common(validate);

  micky::DiskFixture fixture;
  std::string fixture_out = "disk.pgm";
  bool binary = false;
  CLI::App* fix = app.add_subcommand("fixture", "Write the synthetic disk image");
  fix->add_option("--out", fixture_out, "Output PGM path");
  fix->add_option("--size", fixture.size, "Side length in pixels")->check(CLI::PositiveNumber);
  fix->add_option("--foreground", fixture.foreground, "Disk intensity")->check(CLI::Range(0.0, 1.0));
  fix->add_option("--background", fixture.background, "Field intensity")->check(CLI::Range(0.0, 1.0));
  fix->add_option("--radius", fixture.radius_fraction, "Radius as a fraction of the side");
  fix->add_flag("--binary", binary, "Write P5 instead of P2");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(o);
    if (*oracle) return cmd_oracle(o);
    if (*validate) return cmd_validate(o);
    return cmd_fixture(fixture, fixture_out, binary);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
}
