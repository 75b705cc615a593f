// Command-line driver: analyze | simulate | keyrate | jam.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pcosync/config.hpp"
#include "pcosync/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
};

void attach_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON experiment configuration file");
  sub->add_option("--out", f.out_dir, "output directory (overrides config)");
  sub->add_option("--seed", f.seed, "master RNG seed (overrides config)");
  sub->add_option("--workers", f.workers, "worker thread count (overrides config)");
}

pcosync::ExperimentConfig resolve(const CLI::App* sub, const CommonFlags& f) {
  pcosync::ExperimentConfig cfg = f.config_path.empty()
                                      ? pcosync::ExperimentConfig{}
                                      : pcosync::load_config_file(f.config_path);
  if (sub->count("--out") > 0) cfg.out_dir = f.out_dir;
  if (sub->count("--seed") > 0) cfg.seed = f.seed;
  if (sub->count("--workers") > 0) cfg.workers = f.workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse-coupled oscillator synchronization and secrecy toolkit"};
  app.require_subcommand(1);
  CommonFlags flags;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "closed-form dynamics, cycle-count distribution, entropy bounds");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo network sessions and the empirical distribution");
  CLI::App* keyrate = app.add_subcommand(
      "keyrate", "equivocation and key-rate table over the (p, m_tilde) grid");
  CLI::App* jam = app.add_subcommand(
      "jam", "jammer-perturbed fixed points, safe region, and jammed sessions");
  for (CLI::App* sub : {analyze, simulate, keyrate, jam}) attach_common(sub, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      pcosync::run_analyze(resolve(analyze, flags));
    } else if (simulate->parsed()) {
      pcosync::run_simulate(resolve(simulate, flags));
    } else if (keyrate->parsed()) {
      pcosync::run_keyrate(resolve(keyrate, flags));
    } else if (jam->parsed()) {
      pcosync::run_jam(resolve(jam, flags));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
