// Pipeline drivers: wire the analysis modules to CSV/JSON report files.
#include "pcosync/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pcosync/coupling_dynamics.hpp"
#include "pcosync/errors.hpp"
#include "pcosync/jam_analysis.hpp"
#include "pcosync/network_sim.hpp"
#include "pcosync/rng.hpp"
#include "pcosync/secrecy.hpp"
#include "pcosync/sync_distribution.hpp"

namespace pcosync {
namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kSaltKeyrateRow = 0x6b65797261746531ULL;
constexpr std::uint64_t kSaltJamSession = 0x6a616d7365737331ULL;
constexpr int kJamBuckets = 20;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_resolved_config(const ExperimentConfig& cfg,
                           const std::filesystem::path& dir) {
  write_text_file(dir / "config.json", config_to_json(cfg));
}

DynamicsMaps build_dynamics(const ExperimentConfig& cfg, const PhaseFunction& pf) {
  DynamicsOptions opts;
  opts.bisect_tol = cfg.fixed_point_tol;
  opts.extremum_grid = cfg.extremum_grid;
  return DynamicsMaps(pf, cfg.epsilon, opts);
}

CouplingConfig coupling_config(const ExperimentConfig& cfg) {
  CouplingConfig ccfg;
  ccfg.n = cfg.n;
  ccfg.epsilon = cfg.epsilon;
  ccfg.rho = cfg.rho;
  ccfg.delays = cfg.delays;
  ccfg.cycle_cap = cfg.cycle_cap;
  return ccfg;
}

std::function<std::unique_ptr<JammerStrategy>()> jammer_factory(
    const std::string& kind, const DynamicsMaps* dm, int grid_points) {
  if (kind == "none") return {};
  if (kind == "uniform-random") {
    return [] { return std::make_unique<UniformRandomJammer>(); };
  }
  if (kind == "adversarial-grid") {
    return [dm, grid_points] {
      return std::make_unique<AdversarialGridJammer>(*dm, grid_points);
    };
  }
  throw ConfigError("jammer.kind: unknown strategy \"" + kind + "\"");
}

// ---- analyze ----------------------------------------------------------

void analyze_impl(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const PhaseFunction pf = make_phase_function(cfg);
  const DynamicsMaps dm = build_dynamics(cfg, pf);
  const PulseCountDistribution dist = pulse_count_distribution(dm, cfg.boundary_tol);
  const EntropyResult er = entropy(dist);
  const EntropyBounds eb = entropy_bounds(dm);

  json dynamics;
  dynamics["epsilon"] = cfg.epsilon;
  dynamics["delta"] = dm.delta();
  dynamics["h_inv_delta"] = dm.h_inv_delta();
  dynamics["min_post_pulse_diff"] = dm.min_post_pulse_diff();
  dynamics["tau_star"] = dm.tau_star();
  dynamics["lambda0"] = dm.lambda0();
  dynamics["lambda1"] = dm.lambda1();
  dynamics["lambda2"] = dm.lambda2();
  write_text_file(dir / "dynamics.json", dynamics.dump(2) + "\n");

  std::string csv = "i,tau_lower,tau_upper,probability\n";
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    csv += std::to_string(i + 1);
    csv += ',';
    csv += fmt17(dist.tau_lower[i + 1]);
    csv += ',';
    csv += fmt17(dist.tau_upper[i + 1]);
    csv += ',';
    csv += fmt17(dist.probs[i]);
    csv += '\n';
  }
  write_text_file(dir / "distribution.csv", csv);

  json ent;
  ent["entropy_bits"] = er.bits;
  ent["tail_bound_bits"] = er.tail_bound_bits;
  ent["tail_mass"] = dist.tail_mass;
  ent["lower_bound_bits"] = eb.lower_bits;
  ent["upper_bound_bits"] = eb.upper_bits;
  ent["terms"] = dist.probs.size();
  write_text_file(dir / "entropy.json", ent.dump(2) + "\n");
}

// ---- simulate ---------------------------------------------------------

void simulate_impl(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const PhaseFunction pf = make_phase_function(cfg);
  const CouplingConfig ccfg = coupling_config(cfg);

  // The dynamics maps are needed both for the analytic comparison and for the
  // adversarial strategy; construct them only when required so tabulated
  // functions that fail the expansion guards can still be simulated.
  std::optional<DynamicsMaps> dm;
  const bool want_analytic = cfg.n == 2 && cfg.jammer == "none";
  if (want_analytic || cfg.jammer == "adversarial-grid") {
    dm.emplace(build_dynamics(cfg, pf));
  }

  const auto factory =
      jammer_factory(cfg.jammer, dm ? &*dm : nullptr, cfg.jam_grid_points);
  const EmpiricalDistribution emp =
      monte_carlo_distribution(pf, ccfg, static_cast<std::uint64_t>(cfg.trials),
                               cfg.seed, cfg.workers, factory);

  std::string csv = "m,count,frequency\n";
  const double inv_trials = 1.0 / static_cast<double>(emp.trials);
  for (std::size_t m = 1; m < emp.count_by_cycle.size(); ++m) {
    if (emp.count_by_cycle[m] == 0) continue;
    csv += std::to_string(m);
    csv += ',';
    csv += std::to_string(emp.count_by_cycle[m]);
    csv += ',';
    csv += fmt17(static_cast<double>(emp.count_by_cycle[m]) * inv_trials);
    csv += '\n';
  }
  write_text_file(dir / "empirical_pmf.csv", csv);

  json gap;
  gap["trials"] = emp.trials;
  gap["max_pairwise_gap"] = emp.max_pairwise_gap;
  gap["sync_failures"] = emp.failures;
  if (want_analytic) {
    const PulseCountDistribution dist =
        pulse_count_distribution(*dm, cfg.boundary_tol);
    double tv = 0;
    for (std::size_t m = 1; m < emp.count_by_cycle.size(); ++m) {
      const double analytic =
          m - 1 < dist.probs.size() ? dist.probs[m - 1] : 0.0;
      const double empirical =
          static_cast<double>(emp.count_by_cycle[m]) * inv_trials;
      tv += std::abs(empirical - analytic);
    }
    // Sessions beyond the cap versus the unresolved analytic core.
    tv += static_cast<double>(emp.failures) * inv_trials + dist.tail_mass;
    gap["tv_distance"] = 0.5 * tv;
  } else {
    gap["tv_distance"] = nullptr;
  }
  write_text_file(dir / "lemma1_gap.json", gap.dump(2) + "\n");
}

// ---- keyrate ----------------------------------------------------------

void keyrate_impl(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const PhaseFunction pf = make_phase_function(cfg);
  const DynamicsMaps dm = build_dynamics(cfg, pf);
  const PulseCountDistribution dist = pulse_count_distribution(dm, cfg.boundary_tol);

  std::string csv = "p,m_tilde,exact_bits,bound_bits,mc_bits,mc_stderr\n";
  std::uint64_t row = 0;
  for (double p : cfg.p_grid) {
    for (int mt = 1; mt <= cfg.m_tilde; ++mt) {
      const std::vector<double> tdist = truncated_session_distribution(dist, mt);
      const double exact = conditional_entropy_exact(tdist, p);
      const double bound =
          key_rate_lower_bound(dm.lambda1(), dm.lambda2(), p, mt);
      if (bound > exact + 1e-9) {
        throw ConvergenceError("key-rate bound " + fmt17(bound) +
                               " exceeds exact equivocation " + fmt17(exact) +
                               " at p = " + fmt17(p) +
                               ", m_tilde = " + std::to_string(mt));
      }
      csv += fmt17(p);
      csv += ',';
      csv += std::to_string(mt);
      csv += ',';
      csv += fmt17(exact);
      csv += ',';
      csv += fmt17(bound);
      if (cfg.mc_trials > 0) {
        const std::uint64_t row_seed =
            derive_stream(cfg.seed, kSaltKeyrateRow, row).next_u64();
        const McEntropyEstimate est = conditional_entropy_mc(
            tdist, p, static_cast<std::uint64_t>(cfg.mc_trials), row_seed,
            cfg.workers);
        csv += ',';
        csv += fmt17(est.bits);
        csv += ',';
        csv += fmt17(est.std_error);
      } else {
        csv += ",,";
      }
      csv += '\n';
      ++row;
    }
  }
  write_text_file(dir / "keyrate.csv", csv);
}

// ---- jam --------------------------------------------------------------

struct JamBucket {
  std::uint64_t sessions = 0;
  std::uint64_t synced = 0;
  std::uint64_t cycle_sum = 0;  // completed cycles, cap for failures
};

using JamTally = std::array<JamBucket, kJamBuckets>;

// Two-node sessions with initial difference drawn uniformly; tallies sync
// outcomes into fixed difference buckets. Chunked identically for any worker
// count; integer tallies make the merge exact.
JamTally jam_strategy_tally(const PhaseFunction& pf, const CouplingConfig& ccfg,
                            const ExperimentConfig& cfg, const DynamicsMaps& dm,
                            std::uint64_t strategy_index,
                            const std::string& kind) {
  const auto trials = static_cast<std::uint64_t>(cfg.jam_trials);
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(cfg.workers, trials));
  const auto factory = jammer_factory(kind, &dm, cfg.jam_grid_points);

  std::vector<JamTally> partial(static_cast<std::size_t>(workers));
  auto run_chunk = [&](int w, std::uint64_t lo, std::uint64_t hi) {
    std::unique_ptr<JammerStrategy> strategy;
    if (factory) strategy = factory();
    JamTally& tally = partial[static_cast<std::size_t>(w)];
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 stream = derive_stream(cfg.seed, kSaltJamSession, i, strategy_index);
      const double tau = stream.uniform01();
      const std::uint64_t session_seed = stream.next_u64();
      const std::array<double, 2> phases{0.0, tau};
      const SessionTrace trace =
          simulate_session(pf, ccfg, phases, strategy.get(), session_seed);
      const auto bucket = std::min<std::size_t>(
          kJamBuckets - 1, static_cast<std::size_t>(tau * kJamBuckets));
      JamBucket& b = tally[bucket];
      b.sessions += 1;
      if (trace.sync_cycle) {
        b.synced += 1;
        b.cycle_sum += static_cast<std::uint64_t>(*trace.sync_cycle);
      } else {
        b.cycle_sum += static_cast<std::uint64_t>(ccfg.cycle_cap);
      }
    }
  };

  const std::uint64_t chunk = trials / static_cast<std::uint64_t>(workers);
  const std::uint64_t rem = trials % static_cast<std::uint64_t>(workers);
  std::vector<std::thread> threads;
  std::uint64_t next = 0;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t lo = next;
    const std::uint64_t hi =
        lo + chunk + (static_cast<std::uint64_t>(w) < rem ? 1 : 0);
    next = hi;
    threads.emplace_back(run_chunk, w, lo, hi);
  }
  for (std::thread& t : threads) t.join();

  JamTally total{};
  for (const JamTally& tally : partial) {
    for (int b = 0; b < kJamBuckets; ++b) {
      total[b].sessions += tally[b].sessions;
      total[b].synced += tally[b].synced;
      total[b].cycle_sum += tally[b].cycle_sum;
    }
  }
  return total;
}

void jam_impl(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  if (cfg.n != 2) throw ConfigError("n: the jam pipeline analyzes two-node sessions");
  const PhaseFunction pf = make_phase_function(cfg);
  const DynamicsMaps dm = build_dynamics(cfg, pf);
  const CouplingConfig ccfg = coupling_config(cfg);

  const JamFixedPoints fps =
      jam_fixed_points(dm, dm.lambda0(), cfg.fixed_point_tol);
  json region;
  region["lambda0"] = dm.lambda0();
  region["delta"] = dm.delta();
  region["r_at_lambda0_delta"] =
      dm.return_map(dm.lambda0() * dm.delta(), MapMode::clamped);
  region["hypothesis_holds"] = fps.exists;
  if (fps.exists) {
    const SafeRegion sr = safe_region(dm, cfg.fixed_point_tol);
    region["window_lo"] = sr.window_lo;
    region["window_hi"] = sr.window_hi;
    region["sync_probability_bound"] = sr.sync_probability_bound;
    region["note"] = nullptr;
  } else {
    region["window_lo"] = nullptr;
    region["window_hi"] = nullptr;
    region["sync_probability_bound"] = nullptr;
    region["note"] = fps.note;
  }
  write_text_file(dir / "jam_region.json", region.dump(2) + "\n");

  const std::array<std::string, 3> kinds{"none", "uniform-random",
                                         "adversarial-grid"};
  std::string csv =
      "strategy,bucket_lo,bucket_hi,sessions,synced,failures,mean_cycles\n";
  for (std::uint64_t k = 0; k < kinds.size(); ++k) {
    const JamTally tally = jam_strategy_tally(pf, ccfg, cfg, dm, k, kinds[k]);
    for (int b = 0; b < kJamBuckets; ++b) {
      const JamBucket& bb = tally[static_cast<std::size_t>(b)];
      csv += kinds[k];
      csv += ',';
      csv += fmt17(static_cast<double>(b) / kJamBuckets);
      csv += ',';
      csv += fmt17(static_cast<double>(b + 1) / kJamBuckets);
      csv += ',';
      csv += std::to_string(bb.sessions);
      csv += ',';
      csv += std::to_string(bb.synced);
      csv += ',';
      csv += std::to_string(bb.sessions - bb.synced);
      csv += ',';
      csv += fmt17(bb.sessions == 0
                       ? 0.0
                       : static_cast<double>(bb.cycle_sum) /
                             static_cast<double>(bb.sessions));
      csv += '\n';
    }
  }
  write_text_file(dir / "jam_sim.csv", csv);
}

}  // namespace

void run_analyze(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const auto dir = prepare_out_dir(cfg);
  analyze_impl(cfg, dir);
  write_resolved_config(cfg, dir);
}

void run_simulate(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const auto dir = prepare_out_dir(cfg);
  simulate_impl(cfg, dir);
  write_resolved_config(cfg, dir);
}

void run_keyrate(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const auto dir = prepare_out_dir(cfg);
  keyrate_impl(cfg, dir);
  write_resolved_config(cfg, dir);
}

void run_jam(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const auto dir = prepare_out_dir(cfg);
  jam_impl(cfg, dir);
  write_resolved_config(cfg, dir);
}

}  // namespace pcosync
