#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyadica/cli.hpp"
#include "dyadica/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::string out;
  bool strict = false;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed (overrides the config)");
  sub->add_option("--level", o.level, "grid level L (overrides levels)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_flag("--strict", o.strict, "fail on stability checks too");
  sub->add_option("--threads", o.threads, "worker threads (same as DYADICA_THREADS)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dyadica;
  CLI::App app{"Dyadic harmonic analysis experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options opts;
  for (Suite s : {Suite::haar_verify, Suite::represent, Suite::weights, Suite::norms, Suite::decompose,
                  Suite::commutator, Suite::bloom, Suite::all}) {
    add_common(app.add_subcommand(to_string(s), std::string("run the ") + to_string(s) + " suite"), opts);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    ExperimentConfig config;
    if (!opts.config.empty()) {
      config = load_config(opts.config);
    } else {
      config.seed = 1;
    }
    config.suite = suite_from_string(name);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.level) config.levels = {*opts.level};
    if (!opts.out.empty()) config.output_dir = opts.out;
    if (opts.strict) config.strict = true;
    if (opts.threads) ::setenv("DYADICA_THREADS", std::to_string(*opts.threads).c_str(), 1);
    validate_config(config);

    const int status = run_suite(config);
    std::printf("%s: %s (report in %s)\n", name.c_str(), status == 0 ? "pass" : "FAIL", config.output_dir.c_str());
    return status;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
