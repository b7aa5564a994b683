#include "micky/engine.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "micky/kernels.hpp"
#include "micky/random.hpp"

namespace micky {

StepsizeSchedule StepsizeSchedule::diminishing(double scale, double exponent) {
  return {Kind::Diminishing, scale, exponent};
}

StepsizeSchedule StepsizeSchedule::constant(double scale) { return {Kind::Constant, scale, 0.0}; }

double StepsizeSchedule::at(std::size_t k) const {
  if (kind == Kind::Constant) return scale;
  return scale / std::pow(static_cast<double>(k) + 1.0, exponent);
}

void StepsizeSchedule::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("stepsize scale must be positive, got " + std::to_string(scale));
  }
  if (kind == Kind::Diminishing && !(exponent > 0.5 && exponent <= 1.0)) {
    throw std::invalid_argument("diminishing stepsize exponent must lie in (0.5, 1], got " +
                                std::to_string(exponent));
  }
}

double stepsize(const StepsizeSchedule& schedule, std::size_t k) { return schedule.at(k); }

// Static round-robin split of agent indices over persistent workers. The
// calling thread acts as worker 0.
class Engine::Pool {
 public:
  explicit Pool(std::size_t threads) : threads_(std::max<std::size_t>(threads, 1)) {
    for (std::size_t t = 1; t < threads_; ++t) workers_.emplace_back([this, t] { loop(t); });
  }

  ~Pool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
  }

  void run(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (threads_ == 1) {
      for (std::size_t i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      task_ = &fn;
      count_ = count;
      pending_ = threads_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();
    work(0);
    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void work(std::size_t t) {
    try {
      for (std::size_t i = t; i < count_; i += threads_) (*task_)(i);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void loop(std::size_t t) {
    std::size_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      work(t);
      {
        std::lock_guard lock(mutex_);
        --pending_;
      }
      done_.notify_one();
    }
  }

  std::size_t threads_;
  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t count_ = 0;
  std::size_t pending_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

namespace {

double sampled_subgradient_bound(const SetFunction& f, std::uint64_t seed, AgentId id,
                                 std::size_t samples) {
  std::mt19937_64 rng = make_stream(seed, id, StreamTag::StepScale);
  DenseVector y(f.ground_size());
  double bound = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : y) v = uniform01(rng);
    for (double g : full_greedy_subgradient(f, y)) bound = std::max(bound, std::abs(g));
  }
  return bound;
}

DenseVector cumulative(const DenseVector& probs, std::size_t num_blocks, double floor) {
  if (probs.size() != num_blocks) {
    throw std::invalid_argument("block probabilities: expected " + std::to_string(num_blocks) +
                                " entries, got " + std::to_string(probs.size()));
  }
  DenseVector cdf(num_blocks);
  double total = 0.0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    if (!(probs[b] >= floor)) {
      throw std::invalid_argument("block probability " + std::to_string(probs[b]) +
                                  " below the floor " + std::to_string(floor));
    }
    total += probs[b];
    cdf[b] = total;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("block probabilities sum to " + std::to_string(total));
  }
  return cdf;
}

std::size_t draw_block(std::mt19937_64& rng, const DenseVector& cdf) {
  const double u = uniform01(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

Engine::Engine(RunConfig config) : config_(std::move(config)) {
  const std::size_t num_agents = config_.functions.size();
  if (num_agents == 0) throw std::invalid_argument("run config: no agents");
  if (config_.graph.size() != num_agents) {
    throw std::invalid_argument("run config: graph has " + std::to_string(config_.graph.size()) +
                                " nodes for " + std::to_string(num_agents) + " agents");
  }
  const std::size_t n = config_.partition.ground_size();
  if (n == 0) throw std::invalid_argument("run config: missing block partition");
  for (const auto& f : config_.functions) {
    if (!f || f->ground_size() != n) {
      throw std::invalid_argument("run config: function ground set does not match the partition");
    }
  }
  if (!config_.objective) config_.objective = std::make_shared<SumFunction>(config_.functions);
  if (config_.objective->ground_size() != n) {
    throw std::invalid_argument("run config: objective ground set does not match");
  }
  if (!(config_.tau >= 0.0 && config_.tau <= 1.0)) {
    throw std::invalid_argument("run config: tau must lie in [0, 1]");
  }
  if (config_.metric_every == 0) throw std::invalid_argument("run config: metric cadence is zero");
  const StochasticReport report = check_doubly_stochastic_report(
      config_.weights, config_.graph, std::max(config_.weights.min_positive(), 0.0));
  if (!report.ok()) {
    std::string msg = "run config: weight matrix is not admissible";
    for (const auto& v : report.violations) msg += "; " + v;
    throw std::invalid_argument(msg);
  }
  if (!(config_.min_block_probability > 0.0)) {
    throw std::invalid_argument("run config: block probability floor must be positive");
  }

  const std::size_t num_blocks = config_.partition.num_blocks();
  const auto& probs = config_.block_probabilities;
  if (!probs.empty() && probs.size() != 1 && probs.size() != num_agents) {
    throw std::invalid_argument("run config: block probabilities must be empty, shared or per agent");
  }
  const auto& sc = config_.stepsize;
  if (!sc.per_agent.empty() && sc.per_agent.size() != num_agents) {
    throw std::invalid_argument("run config: per-agent stepsizes must list every agent");
  }

  agents_.resize(num_agents);
  for (AgentId i = 0; i < num_agents; ++i) {
    AgentState& a = agents_[i];
    a.id = i;
    a.rng = make_stream(config_.seed, i, StreamTag::Agent);
    a.x.resize(n);
    for (double& v : a.x) v = uniform01(a.rng);

    if (!sc.per_agent.empty()) {
      a.schedule = sc.per_agent[i];
    } else {
      double scale = 0.0;
      if (sc.scale) {
        scale = *sc.scale;
      } else {
        const double bound =
            sampled_subgradient_bound(*config_.functions[i], config_.seed, i, sc.auto_samples);
        scale = bound > 0.0 ? sc.auto_multiplier / bound : sc.auto_multiplier;
      }
      a.schedule = sc.kind == StepsizeSchedule::Kind::Constant
                       ? StepsizeSchedule::constant(scale)
                       : StepsizeSchedule::diminishing(scale, sc.exponent);
    }
    a.schedule.validate();

    if (probs.empty()) {
      const double uniform = 1.0 / static_cast<double>(num_blocks);
      if (uniform < config_.min_block_probability) {
        throw std::invalid_argument("run config: uniform block probability 1/" +
                                    std::to_string(num_blocks) + " is below the floor " +
                                    std::to_string(config_.min_block_probability));
      }
      a.block_cdf = cumulative(DenseVector(num_blocks, uniform), num_blocks, uniform);
    } else {
      a.block_cdf = cumulative(probs.size() == 1 ? probs[0] : probs[i], num_blocks,
                               config_.min_block_probability);
    }
  }
  // Initial full share: every copy starts as the sender's true x^0.
  for (AgentId i = 0; i < num_agents; ++i) {
    std::vector<AgentId> sources = config_.graph.in_neighbors(i);
    sources.push_back(i);
    std::sort(sources.begin(), sources.end());
    for (AgentId j : sources) agents_[i].copies.push_back({j, agents_[j].x});
  }
  inbox_.resize(num_agents);
  averages_.assign(num_agents, DenseVector(n, 0.0));
  pool_ = std::make_unique<Pool>(config_.threads);
}

Engine::~Engine() = default;

void Engine::deliver(AgentState& agent) const {
  for (auto& copy : agent.copies) {
    const auto& msg = inbox_[copy.from];
    if (!msg) continue;
    const auto block = config_.partition.block(msg->block);
    for (std::size_t k = 0; k < block.size(); ++k) copy.values[block[k]] = msg->values[k];
  }
}

RoundMessage Engine::update(AgentState& agent, DenseVector& average) {
  std::fill(average.begin(), average.end(), 0.0);
  for (const auto& copy : agent.copies) {
    kernels::accumulate(average, config_.weights.at(agent.id, copy.from), copy.values);
  }

  const std::size_t b = draw_block(agent.rng, agent.block_cdf);
  const auto block = config_.partition.block(b);
  const DenseVector grad = block_greedy(*config_.functions[agent.id], average, block);

  DenseVector base(block.size());
  const DenseVector& from = config_.update_from_average ? average : agent.x;
  for (std::size_t k = 0; k < block.size(); ++k) base[k] = from[block[k]];
  DenseVector next(block.size());
  kernels::project_step(next, base, agent.schedule.at(agent.step_count), grad);
  for (std::size_t k = 0; k < block.size(); ++k) agent.x[block[k]] = next[k];

  ++agent.step_count;
  agent.last_block = b;
  return RoundMessage{agent.id, b, std::move(next), round_};
}

std::vector<RoundMessage> Engine::step() {
  const std::size_t num_agents = agents_.size();
  pool_->run(num_agents, [&](std::size_t i) { deliver(agents_[i]); });
  if (!copies_faithful()) {
    throw std::logic_error("copy fidelity violated at round " + std::to_string(round_));
  }
  std::vector<RoundMessage> out(num_agents);
  pool_->run(num_agents, [&](std::size_t i) { out[i] = update(agents_[i], averages_[i]); });
  for (AgentId i = 0; i < num_agents; ++i) {
    inbox_[i] = out[i];
    if (config_.on_message) config_.on_message(out[i]);
  }
  ++round_;
  return out;
}

DenseVector Engine::mean_estimate() const {
  DenseVector mean(config_.partition.ground_size(), 0.0);
  const double w = 1.0 / static_cast<double>(agents_.size());
  for (const auto& a : agents_) kernels::accumulate(mean, w, a.x);
  return mean;
}

std::vector<double> Engine::consensus_errors() const {
  std::vector<DenseVector> xs;
  xs.reserve(agents_.size());
  for (const auto& a : agents_) xs.push_back(a.x);
  return consensus_error(xs);
}

bool Engine::copies_faithful() const {
  // Copies mirror the sender's state as of the last delivery, i.e. the state
  // before this round's local updates.
  for (const auto& a : agents_) {
    for (const auto& copy : a.copies) {
      if (copy.values != agents_[copy.from].x) return false;
    }
  }
  return true;
}

std::vector<double> consensus_error(std::span<const DenseVector> estimates) {
  if (estimates.empty()) return {};
  DenseVector mean(estimates.front().size(), 0.0);
  const double w = 1.0 / static_cast<double>(estimates.size());
  for (const auto& x : estimates) kernels::accumulate(mean, w, x);
  std::vector<double> err;
  err.reserve(estimates.size());
  for (const auto& x : estimates) err.push_back(std::sqrt(kernels::squared_distance(x, mean)));
  return err;
}

RunTrace run(const RunConfig& config) {
  Engine engine(config);
  const RunConfig& cfg = engine.config();
  const std::size_t num_agents = engine.num_agents();
  RunTrace trace;
  trace.num_agents = num_agents;
  for (const auto& a : engine.agents()) trace.schedules.push_back(a.schedule);

  std::vector<double> best(num_agents, std::numeric_limits<double>::infinity());
  auto record = [&] {
    const std::size_t k = engine.round();
    const std::vector<double> errors = engine.consensus_errors();
    std::vector<TraceRow> rows(num_agents);
    for (AgentId i = 0; i < num_agents; ++i) {
      const DenseVector& x = engine.agents()[i].x;
      for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::logic_error("estimate left the unit box at round " + std::to_string(k));
        }
      }
      TraceRow& row = rows[i];
      row.round = k;
      row.agent = i;
      row.consensus_error = errors[i];
      row.f_value = cfg.objective->lovasz(x);
      best[i] = std::min(best[i], row.f_value);
      row.f_best = best[i];
      row.block = engine.agents()[i].last_block;
      row.set_value = cfg.objective->eval(threshold(x, cfg.tau));
      if (cfg.optimal_value) row.cost_error = std::abs(row.set_value - *cfg.optimal_value);
    }
    trace.recorded_rounds.push_back(k);
    trace.rows.insert(trace.rows.end(), rows.begin(), rows.end());
    if (std::find(cfg.snapshot_rounds.begin(), cfg.snapshot_rounds.end(), k) !=
        cfg.snapshot_rounds.end()) {
      Snapshot snap{k, {}};
      for (const auto& a : engine.agents()) snap.x.push_back(a.x);
      trace.snapshots.push_back(std::move(snap));
    }
  };

  record();
  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    engine.step();
    if (k % cfg.metric_every == 0 || k == cfg.iterations) {
      record();
    } else if (std::find(cfg.snapshot_rounds.begin(), cfg.snapshot_rounds.end(), k) !=
               cfg.snapshot_rounds.end()) {
      Snapshot snap{k, {}};
      for (const auto& a : engine.agents()) snap.x.push_back(a.x);
      trace.snapshots.push_back(std::move(snap));
    }
  }
  for (const auto& a : engine.agents()) {
    trace.final_x.push_back(a.x);
    trace.final_sets.push_back(threshold(a.x, cfg.tau));
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "round,agent,consensus_err,f_value,f_best,block_selected\n";
  char buf[160];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,", r.round, r.agent + 1,
                  r.consensus_error, r.f_value, r.f_best);
    out << buf;
    if (r.block) out << *r.block + 1;
    out << '\n';
  }
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) {
  return replicate == 0 ? seed : derive_seed(seed, replicate, StreamTag::Replicate);
}

AveragedTrace expected_metrics(const RunConfig& config, std::size_t num_seeds) {
  if (num_seeds == 0) throw std::invalid_argument("expected_metrics: need at least one seed");
  AveragedTrace avg;
  avg.num_seeds = num_seeds;
  for (std::size_t s = 0; s < num_seeds; ++s) {
    RunConfig cfg = config;
    cfg.seed = replicate_seed(config.seed, s);
    const RunTrace trace = run(cfg);
    if (s == 0) {
      avg.rounds = trace.recorded_rounds;
      avg.consensus_error.assign(avg.rounds.size(), std::vector<double>(trace.num_agents, 0.0));
      avg.f_best = avg.consensus_error;
      avg.max_consensus_error.assign(avg.rounds.size(), 0.0);
    }
    for (std::size_t r = 0; r < avg.rounds.size(); ++r) {
      double worst = 0.0;
      for (AgentId i = 0; i < trace.num_agents; ++i) {
        const TraceRow& row = trace.at(r, i);
        avg.consensus_error[r][i] += row.consensus_error;
        avg.f_best[r][i] += row.f_best;
        worst = std::max(worst, row.consensus_error);
      }
      avg.max_consensus_error[r] += worst;
    }
  }
  const double inv = 1.0 / static_cast<double>(num_seeds);
  for (std::size_t r = 0; r < avg.rounds.size(); ++r) {
    for (auto& v : avg.consensus_error[r]) v *= inv;
    for (auto& v : avg.f_best[r]) v *= inv;
    avg.max_consensus_error[r] *= inv;
  }
  return avg;
}

}  // namespace micky
