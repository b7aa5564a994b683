#pragma once

// Synchronous-round simulator for the distributed block-greedy method.
//
// Every round, each agent (a) folds the block messages received from its
// in-neighbors into its copies of their estimates, (b) averages those copies
// with its consensus weights, (c) draws one block, (d) evaluates that block of
// a greedy subgradient of its private function at the average, (e) takes a
// projected step on that block only and (f) broadcasts the new block values.
// Messages produced in round k are delivered at the start of round k + 1.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "micky/submodular.hpp"
#include "micky/topology.hpp"

namespace micky {

struct StepsizeSchedule {
  enum class Kind { Diminishing, Constant };

  Kind kind = Kind::Diminishing;
  double scale = 1.0;     // c
  double exponent = 1.0;  // gamma, diminishing only

  static StepsizeSchedule diminishing(double scale, double exponent);
  static StepsizeSchedule constant(double scale);

  // c / (k + 1)^gamma, or c.
  double at(std::size_t k) const;

  // Rejects c <= 0 and, for diminishing schedules, gamma outside (0.5, 1].
  void validate() const;
  // Sum of steps diverges, sum of squares converges, non-increasing.
  bool summable_squares() const { return kind == Kind::Diminishing && exponent > 0.5; }
};

double stepsize(const StepsizeSchedule& schedule, std::size_t k);

struct StepsizeConfig {
  StepsizeSchedule::Kind kind = StepsizeSchedule::Kind::Diminishing;
  // Explicit c; when empty each agent uses multiplier / G, G being the largest
  // subgradient entry seen over a few random points.
  std::optional<double> scale;
  double exponent = 1.0;
  double auto_multiplier = 1.0;
  std::size_t auto_samples = 4;
  // Optional per-agent schedules; overrides everything above when non-empty.
  std::vector<StepsizeSchedule> per_agent;
};

struct RoundMessage {
  AgentId sender = 0;
  std::size_t block = 0;
  std::vector<double> values;
  std::size_t round = 0;
};

struct RunConfig {
  std::vector<SetFunctionPtr> functions;  // one private function per agent
  SetFunctionPtr objective;               // global F for metrics; defaults to the sum
  Digraph graph;
  WeightMatrix weights;
  BlockPartition partition;
  std::size_t iterations = 1000;
  double tau = 0.5;
  std::uint64_t seed = 1;
  StepsizeConfig stepsize;
  // Empty: uniform. One entry: shared by every agent. N entries: per agent.
  std::vector<DenseVector> block_probabilities;
  double min_block_probability = 1e-3;
  std::size_t metric_every = 10;
  std::vector<std::size_t> snapshot_rounds;
  // Take the projected step from the averaged point instead of the agent's own
  // estimate on the drawn block.
  bool update_from_average = true;
  std::optional<double> optimal_value;  // enables cost errors in the trace
  std::size_t threads = 1;
  std::function<void(const RoundMessage&)> on_message;
};

struct AgentState {
  struct Copy {
    AgentId from;
    DenseVector values;
  };

  AgentId id = 0;
  DenseVector x;
  std::vector<Copy> copies;  // in-neighbors and the agent itself, ascending
  std::size_t step_count = 0;
  std::mt19937_64 rng;
  StepsizeSchedule schedule;
  DenseVector block_cdf;
  std::optional<std::size_t> last_block;
};

struct TraceRow {
  std::size_t round = 0;
  AgentId agent = 0;
  double consensus_error = 0.0;
  double f_value = 0.0;
  double f_best = 0.0;
  std::optional<std::size_t> block;  // block drawn in the round that produced this state
  double set_value = 0.0;            // F of the thresholded estimate
  std::optional<double> cost_error;  // |set_value - optimal_value|
};

struct Snapshot {
  std::size_t round = 0;
  std::vector<DenseVector> x;
};

struct RunTrace {
  std::size_t num_agents = 0;
  std::vector<std::size_t> recorded_rounds;
  std::vector<TraceRow> rows;  // recorded_rounds.size() * num_agents, round-major
  std::vector<Snapshot> snapshots;
  std::vector<DenseVector> final_x;
  std::vector<Subset> final_sets;
  std::vector<StepsizeSchedule> schedules;

  const TraceRow& at(std::size_t record, AgentId agent) const {
    return rows.at(record * num_agents + agent);
  }
};

class Engine {
 public:
  // Validates the configuration and draws the initial estimates.
  explicit Engine(RunConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const RunConfig& config() const { return config_; }
  std::size_t round() const { return round_; }
  std::size_t num_agents() const { return agents_.size(); }
  const std::vector<AgentState>& agents() const { return agents_; }
  const std::vector<DenseVector>& last_averages() const { return averages_; }

  // Runs one synchronous round and returns the messages it produced.
  std::vector<RoundMessage> step();

  DenseVector mean_estimate() const;
  std::vector<double> consensus_errors() const;
  // x_j|i == x_j exactly for every stored copy.
  bool copies_faithful() const;

 private:
  class Pool;

  void deliver(AgentState& agent) const;
  RoundMessage update(AgentState& agent, DenseVector& average);

  RunConfig config_;
  std::vector<AgentState> agents_;
  std::vector<std::optional<RoundMessage>> inbox_;  // indexed by sender
  std::vector<DenseVector> averages_;
  std::size_t round_ = 0;
  std::unique_ptr<Pool> pool_;
};

// Euclidean distance of every estimate to their average.
std::vector<double> consensus_error(std::span<const DenseVector> estimates);

RunTrace run(const RunConfig& config);

// Writes `round,agent,consensus_err,f_value,f_best,block_selected` with 1-based
// agent and block ids; block_selected is empty at round 0.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

struct AveragedTrace {
  std::size_t num_seeds = 0;
  std::vector<std::size_t> rounds;
  std::vector<std::vector<double>> consensus_error;  // [record][agent]
  std::vector<std::vector<double>> f_best;           // [record][agent]
  std::vector<double> max_consensus_error;           // mean over seeds of max over agents
};

// Seed s = 0 reuses config.seed; later replicates use derived seeds.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate);

AveragedTrace expected_metrics(const RunConfig& config, std::size_t num_seeds);

}  // namespace micky
