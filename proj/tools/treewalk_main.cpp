#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "treewalk/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "experiment configuration (JSON)")
      ->required();
  sub->add_option("--out", args.out, "output directory for report + artifacts")
      ->required();
  sub->add_option("--threads", [&args](const CLI::results_t& r) {
        int value = 0;
        if (!CLI::detail::lexical_cast(r.front(), value)) return false;
        args.threads = value;
        return true;
      },
      "worker threads (overrides the config)");
  sub->add_option("--seed", [&args](const CLI::results_t& r) {
        std::uint64_t value = 0;
        if (!CLI::detail::lexical_cast(r.front(), value)) return false;
        args.seed = value;
        return true;
      },
      "base seed (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic quantum walks on the degree-3 tree: "
               "identity, spectrum, Mourre and wave-operator experiments"};
  app.require_subcommand(1);

  struct SubSpec {
    treewalk::ExperimentKind kind;
    const char* description;
  };
  const SubSpec specs[] = {
      {treewalk::ExperimentKind::kIdentityCheck,
       "exact commutator/identification identities and weight bounds"},
      {treewalk::ExperimentKind::kSpectrum,
       "moments, smoothed spectral density, partial sums and point-spectrum scan"},
      {treewalk::ExperimentKind::kMourre,
       "filtered commutator Rayleigh quotients (positivity estimates)"},
      {treewalk::ExperimentKind::kWave,
       "wave-operator convergence, duality and completeness checks"},
      {treewalk::ExperimentKind::kFullReport, "all experiment families in one report"},
  };

  CommonArgs args[std::size(specs)];
  CLI::App* subs[std::size(specs)];
  for (std::size_t i = 0; i < std::size(specs); ++i) {
    subs[i] = app.add_subcommand(treewalk::to_string(specs[i].kind), specs[i].description);
    attach_common(subs[i], args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < std::size(specs); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return treewalk::run_experiment_to_directory(specs[i].kind, args[i].config, args[i].out,
                                                   args[i].threads, args[i].seed);
    } catch (const treewalk::ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    } catch (const treewalk::CapacityError& e) {
      std::fprintf(stderr, "capacity error: %s\n", e.what());
      return 3;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
