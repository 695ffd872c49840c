// lyaplab: command-line front end for the Lyapunov exponent experiments.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <lyap/lyap.hpp>

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 0;
};

int run(const std::string& kind, const Options& o, CLI::App& app) {
  lyap::ExperimentConfig cfg = lyap::load_config(o.config);
  if (app.get_option("--seed")->count() > 0) {
    cfg.seed = o.seed;
    cfg.seed_given = true;
  }
  std::string format = !o.format.empty() ? o.format : (!cfg.format.empty() ? cfg.format : "csv");
  if (format != "csv" && format != "json") throw lyap::ConfigError("format must be csv or json");
  unsigned threads = o.threads;
  if (threads == 0)
    if (const char* env = std::getenv("LYAPLAB_THREADS")) threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (threads > 0) lyap::set_threads(threads);

  const lyap::Report report = lyap::run_experiment(lyap::parse_kind(kind), cfg);
  const lyap::Format f = format == "json" ? lyap::Format::json : lyap::Format::csv;
  const std::string out = !o.out.empty() ? o.out : cfg.out;
  if (out.empty() || out == "-") std::cout << lyap::render_report(report, f);
  else lyap::emit_report(report, f, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov exponent experiments for random 2x2 matrix cocycles"};
  app.set_version_flag("--version", std::string(lyap::version));
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "experiment configuration (JSON)")->required();
  app.add_option("--seed", o.seed, "master seed (overrides the config)");
  app.add_option("--out", o.out, "output file ('-' for stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  const char* kinds[][2] = {
      {"estimate", "extremal exponents by Monte Carlo (plus exact or enumeration rows when available)"},
      {"stationary", "stationary measure by transfer-operator iteration"},
      {"oseledets", "Oseledets direction convergence along a perturbation sweep"},
      {"sweep", "exponent continuity sweep"},
      {"jitter", "support jitter sweep"},
      {"holder", "Holder norms of the discontinuity construction"},
      {"kifer", "Kifer family exponents"}};
  for (const auto& k : kinds) app.add_subcommand(k[0], k[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o, app);
  } catch (const lyap::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const lyap::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const lyap::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
