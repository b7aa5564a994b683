// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "micky/experiment.hpp"
#include "micky/random.hpp"
#include "micky/synthetic.hpp"

using namespace micky;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = check();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string format(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::shared_ptr<const CutFunction> random_cut(std::mt19937_64& rng, std::size_t max_n) {
  const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_n));
  return random_cut_function(n, 0.2 + 0.6 * uniform01(rng), 1.0, 2.0, rng);
}

DenseVector random_point(std::mt19937_64& rng, std::size_t n) {
  DenseVector y(n);
  for (double& v : y) v = uniform01(rng);
  // Occasional ties exercise the index tie-break.
  if (n > 1 && uniform01(rng) < 0.3) y[n - 1] = y[0];
  return y;
}

ExperimentConfig synthetic_suite(std::size_t replicate) {
  ExperimentConfig c = load_config(MICKY_CONFIG_DIR "/synthetic.ini");
  c.workload_seed = replicate_seed(c.workload_seed, replicate);
  c.graph_seed = replicate_seed(c.graph_seed, replicate);
  c.seed = replicate_seed(c.seed, replicate);
  return c;
}

struct SuiteRun {
  Experiment experiment;
  RunTrace trace;
};

const std::vector<SuiteRun>& suite_runs() {
  static const std::vector<SuiteRun> runs = [] {
    std::vector<SuiteRun> out;
    for (std::size_t s = 0; s < 20; ++s) {
      Experiment e = prepare(synthetic_suite(s));
      RunTrace t = run(make_run_config(e));
      out.push_back({std::move(e), std::move(t)});
    }
    return out;
  }();
  return runs;
}

struct DiskRun {
  Experiment experiment;
  RunTrace trace;
  double seconds = 0.0;
  std::size_t messages = 0;
  std::size_t oversized = 0;
  std::size_t mismatched = 0;
  std::size_t largest = 0;
};

const DiskRun& disk_run() {
  static const DiskRun result = [] {
    DiskRun r;
    const auto t0 = Clock::now();
    r.experiment = prepare(load_config(MICKY_CONFIG_DIR "/disk64.ini"));
    RunConfig rc = make_run_config(r.experiment);
    const std::size_t limit = (r.experiment.ground_size + 39) / 40 + 1;
    const BlockPartition& blocks = r.experiment.partition;
    rc.on_message = [&r, limit, &blocks](const RoundMessage& m) {
      ++r.messages;
      r.largest = std::max(r.largest, m.values.size());
      if (m.values.size() > limit) ++r.oversized;
      if (m.values.size() != blocks.block(m.block).size()) ++r.mismatched;
    };
    r.trace = run(rc);
    r.seconds = seconds_since(t0);
    return r;
  }();
  return result;
}

std::string trace_text(RunConfig rc, std::size_t threads) {
  rc.threads = threads;
  std::ostringstream out;
  write_trace_csv(out, run(rc));
  return out.str();
}

}  // namespace

int main() {
  report(1, "block greedy equals full greedy", [] {
    std::mt19937_64 rng = make_stream(101, 0, StreamTag::Workload);
    double worst = 0.0;
    std::size_t pairs = 0;
    for (; pairs < 1500; ++pairs) {
      const auto F = random_cut(rng, 12);
      const DenseVector y = random_point(rng, F->ground_size());
      const DenseVector full = full_greedy_subgradient(*F, y);
      for (Element l = 0; l < F->ground_size(); ++l) {
        const Element block[] = {l};
        worst = std::max(worst, std::abs(block_greedy(*F, y, block)[0] - full[l]));
      }
    }
    return Outcome{worst <= 1e-12, format("%.0f pairs, max |diff| %.3g", double(pairs), worst)};
  });

  report(2, "greedy subgradients lie in the base polyhedron", [] {
    std::mt19937_64 rng = make_stream(102, 0, StreamTag::Workload);
    std::size_t bad = 0;
    const std::size_t count = 300;
    for (std::size_t t = 0; t < count; ++t) {
      const auto F = random_cut(rng, 10);
      const DenseVector w = full_greedy_subgradient(*F, random_point(rng, F->ground_size()));
      bad += !in_base_polyhedron(*F, w);
    }
    return Outcome{bad == 0, format("%.0f instances, %.0f outside", double(count), double(bad))};
  });

  report(3, "Lovasz extension matches F on indicators and the greedy bound", [] {
    std::mt19937_64 rng = make_stream(103, 0, StreamTag::Workload);
    std::size_t mismatched = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < 100; ++t) {
      const auto F = random_cut(rng, 10);
      const std::size_t n = F->ground_size();
      SumFunction generic({F, std::make_shared<ModularFunction>(random_point(rng, n))});
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        const Subset X = Subset::from_mask(n, bits);
        const DenseVector ind = X.indicator();
        mismatched += F->lovasz(ind) != F->eval(X);
        mismatched += lovasz_extension(generic, ind) != generic.eval(X);
      }
      for (int r = 0; r < 10; ++r) {
        const DenseVector y = random_point(rng, n);
        const DenseVector w = full_greedy_subgradient(*F, y);
        double wy = 0.0;
        for (std::size_t l = 0; l < n; ++l) wy += w[l] * y[l];
        worst = std::max(worst, std::abs(wy - F->lovasz(y)));
      }
    }
    return Outcome{mismatched == 0 && worst <= 1e-9,
                   format("%.0f indicator mismatches, max |w.y - f(y)| %.3g", double(mismatched),
                          worst)};
  });

  report(4, "local segmentation functions are submodular", [] {
    std::size_t bad = 0;
    std::size_t functions = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const CutInstance inst = random_segmentation_instance(400 + seed, 16);
      for (const auto& F : local_cut_functions(inst)) {
        ++functions;
        bad += !is_submodular(*F);
      }
    }
    return Outcome{bad == 0, format("%.0f functions, %.0f violations", double(functions), double(bad))};
  });

  report(5, "synthetic suite reaches the brute-force minimum", [] {
    const auto t0 = Clock::now();
    std::size_t good = 0;
    for (const SuiteRun& r : suite_runs()) {
      const SumFunction total(r.experiment.functions);
      const double best = *r.experiment.optimal_value;
      bool ok = true;
      for (const Subset& X : r.trace.final_sets) {
        ok = ok && std::abs(total.eval(X) - best) <= 1e-6 && X == r.trace.final_sets.front();
      }
      good += ok;
    }
    const double secs = seconds_since(t0);
    return Outcome{good >= 18 && secs < 120.0,
                   format("%.0f of 20 seeds optimal with identical sets, %.1fs", double(good), secs)};
  });

  report(6, "consensus error decays on the synthetic suite", [] {
    double at50 = 0.0;
    double at2000 = 0.0;
    for (const SuiteRun& r : suite_runs()) {
      const auto& rounds = r.trace.recorded_rounds;
      auto max_error = [&](std::size_t k) {
        const auto it = std::find(rounds.begin(), rounds.end(), k);
        if (it == rounds.end()) throw std::runtime_error("round not recorded");
        const std::size_t rec = static_cast<std::size_t>(it - rounds.begin());
        double m = 0.0;
        for (AgentId i = 0; i < r.trace.num_agents; ++i) {
          m = std::max(m, r.trace.at(rec, i).consensus_error);
        }
        return m;
      };
      at50 += max_error(50) / 20.0;
      at2000 += max_error(2000) / 20.0;
    }
    return Outcome{at2000 <= 0.2 * at50 && at2000 <= 0.05,
                   format("mean max error %.4g at k=50, %.4g at k=2000", at50, at2000)};
  });

  report(7, "f_best monotone and copies faithful every recorded round", [] {
    // Copy fidelity is asserted inside every engine round; a violation throws.
    std::size_t violations = 0;
    std::size_t checked = 0;
    auto scan = [&](const RunTrace& t) {
      for (AgentId i = 0; i < t.num_agents; ++i) {
        for (std::size_t r = 0; r < t.recorded_rounds.size(); ++r) {
          const TraceRow& row = t.at(r, i);
          ++checked;
          if (row.f_best > row.f_value) ++violations;
          if (r > 0 && row.f_best > t.at(r - 1, i).f_best) ++violations;
        }
      }
    };
    for (const SuiteRun& r : suite_runs()) scan(r.trace);
    scan(disk_run().trace);
    return Outcome{violations == 0,
                   format("%.0f rows checked, %.0f violations", double(checked), double(violations))};
  });

  report(8, "max-flow oracle agrees with brute force", [] {
    double worst = 0.0;
    const std::size_t count = 80;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
      const CutInstance inst = random_segmentation_instance(800 + seed, 14);
      const MinCut cut = max_flow_min_cut(build_flow_network(inst));
      const Minimizer m = brute_force_min(SumFunction(local_cut_functions(inst)));
      worst = std::max(worst, std::abs(cut.cut_value - (m.value + normalization_constant(inst))));
    }
    return Outcome{worst <= 1e-9, format("%.0f instances, max |diff| %.3g", double(count), worst)};
  });

  report(9, "64x64 segmentation run converges and agents agree", [] {
    const DiskRun& r = disk_run();
    const RunTrace& t = r.trace;
    const std::size_t last = t.recorded_rounds.size() - 1;
    if (t.recorded_rounds.back() != 1000) throw std::runtime_error("final round not recorded");
    double worst_ratio = 0.0;
    for (AgentId i = 0; i < t.num_agents; ++i) {
      const double e0 = *t.at(0, i).cost_error;
      const double eK = *t.at(last, i).cost_error;
      worst_ratio = std::max(worst_ratio, e0 > 0.0 ? eK / e0 : (eK > 0.0 ? 1.0 : 0.0));
    }
    double agreement = 1.0;
    for (AgentId i = 0; i < t.num_agents; ++i) {
      for (AgentId j = i + 1; j < t.num_agents; ++j) {
        agreement = std::min(agreement, mask_agreement(t.final_sets[i], t.final_sets[j]));
      }
    }
    return Outcome{r.seconds < 600.0 && worst_ratio <= 0.2 && agreement >= 0.95,
                   format("worst final/initial cost error %.4f, min pairwise agreement %.4f, %.1fs",
                          worst_ratio, agreement, r.seconds)};
  });

  report(10, "trace is identical across runs and thread counts", [] {
    const Experiment e = prepare(load_config(MICKY_CONFIG_DIR "/disk64.ini"));
    const RunConfig rc = make_run_config(e);
    const std::string a = trace_text(rc, 1);
    const std::string b = trace_text(rc, 1);
    const std::string c = trace_text(rc, 8);
    std::string detail = format("%.0f bytes", double(a.size()));
    detail += a == b ? ", repeat identical" : ", repeat differs";
    detail += a == c ? ", 8 threads identical" : ", 8 threads differ";
    return Outcome{a == b && a == c && !a.empty(), detail};
  });

  report(11, "every message carries a single block", [] {
    const DiskRun& r = disk_run();
    const std::size_t expected = r.trace.num_agents * r.experiment.config.iterations;
    return Outcome{r.oversized == 0 && r.mismatched == 0 && r.messages == expected &&
                       r.largest < r.experiment.ground_size,
                   format("%.0f messages, largest %.0f values, %.0f oversized", double(r.messages),
                          double(r.largest), double(r.oversized + r.mismatched))};
  });

  std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
