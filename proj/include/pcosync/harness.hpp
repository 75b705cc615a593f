// Command drivers behind the CLI: each runs one pipeline from a validated
// configuration and writes CSV/JSON reports plus the resolved config into the
// output directory. Identical config + seed gives byte-identical files at any
// worker count.
#pragma once

#include "pcosync/config.hpp"

namespace pcosync {

// Closed-form dynamics, the cycle-count distribution, and the entropy
// sandwich: dynamics.json, distribution.csv, entropy.json, config.json.
void run_analyze(const ExperimentConfig& cfg);

// Monte-Carlo sessions with the configured jammer: empirical_pmf.csv,
// lemma1_gap.json (pairwise-count gap, sync failures, and for two-node
// no-jam runs the total-variation distance to the analytic pmf), config.json.
void run_simulate(const ExperimentConfig& cfg);

// Equivocation table over the (p, m_tilde) grid: keyrate.csv with exact,
// bound, and optional Monte-Carlo columns, config.json. Throws if any row's
// bound exceeds the exact value.
void run_keyrate(const ExperimentConfig& cfg);

// Jammer resilience: jam_region.json (repeller-survival hypothesis, safe
// window, sync-probability bound) and jam_sim.csv (two-node session outcomes
// for each strategy, bucketed by initial difference), config.json.
void run_jam(const ExperimentConfig& cfg);

}  // namespace pcosync
