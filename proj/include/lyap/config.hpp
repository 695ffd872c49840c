#pragma once

// Experiment configuration files (JSON, schema version 1) and the dispatcher
// shared by the command-line tool and the tests. The schema is documented in
// README.md.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"

namespace lyap {

inline constexpr int config_schema = 1;

enum class ExperimentKind { estimate, stationary, oseledets, sweep, jitter, holder, kifer };

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "estimate") return ExperimentKind::estimate;
  if (s == "stationary") return ExperimentKind::stationary;
  if (s == "oseledets") return ExperimentKind::oseledets;
  if (s == "sweep") return ExperimentKind::sweep;
  if (s == "jitter") return ExperimentKind::jitter;
  if (s == "holder") return ExperimentKind::holder;
  if (s == "kifer") return ExperimentKind::kifer;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

struct ConstructionParams {
  double sigma = 2.0;
  int k = 1;
  std::array<double, 2> weights{0.7, 0.3};
};

struct ExperimentConfig {
  std::optional<FiniteCocycle> cocycle;
  std::optional<WindowCocycle> window;
  std::optional<ConstructionParams> construction;
  std::optional<PerturbationSpec> perturbation;

  std::uint64_t seed = 0;
  bool seed_given = false;
  McBudget budget;
  std::size_t particle_budget = 10'000;
  std::size_t max_iters = 512;
  double tol = 1e-3;
  std::size_t depth = 200;
  std::size_t n_points = 2000;
  double eps = 0.2;
  std::size_t enumeration_n = 0;
  std::vector<double> gammas{0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> deltas{0.1, 0.05, 0.01};
  std::vector<double> split{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<int> ks{1, 2, 3, 4};
  double holder_r = 0.5;
  double kifer_sigma = 2.0;
  std::vector<double> p1_values{1.0, 0.99, 0.5};
  std::vector<std::uint64_t> steps_list{1'000, 100'000};
  std::string out;
  std::string format;
};

namespace detail {
using nlohmann::json;

inline Complex parse_entry(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("matrix entry must be [re, im] or a number");
}

inline Mat2C parse_matrix(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("matrix must list four entries a, b, c, d (row-major)");
  return {parse_entry(j[0]), parse_entry(j[1]), parse_entry(j[2]), parse_entry(j[3])};
}

inline std::vector<Mat2C> parse_matrices(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a list of matrices");
  std::vector<Mat2C> out;
  for (const auto& m : j) out.push_back(parse_matrix(m));
  return out;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T positive(T v, const char* key) {
  if (!(v > T{0})) throw ConfigError(std::string("'") + key + "' must be positive");
  return v;
}
}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::get_or;
  using detail::positive;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  const int schema = get_or<int>(j, "schema", config_schema);
  if (schema != config_schema) throw ConfigError("unsupported schema version " + std::to_string(schema));

  ExperimentConfig c;
  try {
    if (j.contains("cocycle")) {
      const auto& cj = j.at("cocycle");
      const auto weights = cj.at("weights").get<std::vector<double>>();
      if (cj.contains("window")) {
        const auto& wj = cj.at("window");
        c.window.emplace(WindowTable(weights.size(), wj.at("radius").get<std::size_t>(),
                                     detail::parse_matrices(wj.at("table"))),
                         weights);
      } else {
        c.cocycle.emplace(detail::parse_matrices(cj.at("matrices")), weights);
      }
    }
    if (j.contains("construction")) {
      const auto& cj = j.at("construction");
      ConstructionParams p;
      p.sigma = get_or(cj, "sigma", p.sigma);
      p.k = get_or(cj, "k", p.k);
      if (cj.contains("weights")) {
        const auto w = cj.at("weights").get<std::vector<double>>();
        if (w.size() != 2) throw ConfigError("construction weights must have two entries");
        p.weights = {w[0], w[1]};
      }
      c.construction = p;
    }
    if (j.contains("perturbation")) {
      const auto& pj = j.at("perturbation");
      PerturbationSpec p;
      if (pj.contains("matrices")) p.matrix_directions = detail::parse_matrices(pj.at("matrices"));
      if (pj.contains("weights")) p.weight_direction = pj.at("weights").get<std::vector<double>>();
      c.perturbation = p;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed cocycle section: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("seed")) {
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.seed_given = true;
  }
  c.budget.n_steps = positive(get_or(j, "n_steps", c.budget.n_steps), "n_steps");
  c.budget.n_trials = positive(get_or(j, "n_trials", c.budget.n_trials), "n_trials");
  c.particle_budget = positive(get_or(j, "particle_budget", c.particle_budget), "particle_budget");
  c.max_iters = positive(get_or(j, "max_iters", c.max_iters), "max_iters");
  c.tol = positive(get_or(j, "tol", c.tol), "tol");
  c.depth = positive(get_or(j, "depth", c.depth), "depth");
  c.n_points = positive(get_or(j, "n_points", c.n_points), "n_points");
  c.eps = positive(get_or(j, "eps", c.eps), "eps");
  c.enumeration_n = get_or(j, "enumeration_n", c.enumeration_n);
  c.gammas = get_or(j, "gammas", c.gammas);
  c.deltas = get_or(j, "deltas", c.deltas);
  c.split = get_or(j, "split", c.split);
  c.ks = get_or(j, "ks", c.ks);
  c.holder_r = positive(get_or(j, "r", c.holder_r), "r");
  c.kifer_sigma = get_or(j, "kifer_sigma", c.kifer_sigma);
  c.p1_values = get_or(j, "p1_values", c.p1_values);
  c.steps_list = get_or(j, "steps_list", c.steps_list);
  c.out = get_or<std::string>(j, "out", "");
  c.format = get_or<std::string>(j, "format", "");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read configuration " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("configuration is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

namespace detail {
inline const FiniteCocycle& need_cocycle(const ExperimentConfig& c, const char* kind) {
  if (!c.cocycle) throw ConfigError(std::string(kind) + " needs a finite 'cocycle' section");
  return *c.cocycle;
}

inline HolderConstruction need_construction(const ExperimentConfig& c) {
  const ConstructionParams p = c.construction.value_or(ConstructionParams{});
  try {
    return build_construction(p.sigma, p.k, p.weights);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

inline PerturbationSpec perturbation_for(const ExperimentConfig& c, const FiniteCocycle& base) {
  return c.perturbation.value_or(PerturbationSpec::default_for(base.size()));
}
}  // namespace detail

// Runs one experiment. The seed must be present (in the file or passed by the
// caller); there is no wall-clock seeding.
inline Report run_experiment(ExperimentKind kind, const ExperimentConfig& c) {
  if (!c.seed_given) throw ConfigError("a seed is required (config key 'seed' or --seed)");
  Report r;
  switch (kind) {
    case ExperimentKind::estimate:
      if (c.window) r = estimate_report(*c.window, c.budget, c.seed);
      else r = estimate_report(detail::need_cocycle(c, "estimate"), c.budget, c.seed, c.enumeration_n);
      break;
    case ExperimentKind::stationary: {
      const auto& a = detail::need_cocycle(c, "stationary");
      const StationarySolution s =
          solve_stationary(a, StationaryOptions{c.particle_budget, c.max_iters, c.tol, c.seed});
      require_converged(s);
      std::ostringstream prov;
      prov << "lyaplab " << version << " seed=" << c.seed << " budget=" << c.particle_budget
           << " max_iters=" << c.max_iters << " tol=" << detail::format_double(c.tol)
           << " dictionary=v" << dictionary_version;
      r = measure_report(s, prov.str());
      r.metadata.push_back({"furstenberg_integral", detail::format_double(furstenberg_integral(a, s.measure))});
      break;
    }
    case ExperimentKind::oseledets: {
      const auto& a = detail::need_cocycle(c, "oseledets");
      r = oseledets_report(a, detail::perturbation_for(c, a), c.gammas, c.eps, c.depth, c.n_points, c.seed);
      break;
    }
    case ExperimentKind::sweep: {
      const auto& a = detail::need_cocycle(c, "sweep");
      r = to_report(run_continuity_sweep(a, detail::perturbation_for(c, a), c.gammas, c.budget, c.seed), "sweep");
      break;
    }
    case ExperimentKind::jitter:
      r = to_report(run_support_jitter(detail::need_cocycle(c, "jitter"), c.deltas, c.split, c.budget, c.seed),
                    "jitter");
      break;
    case ExperimentKind::holder: {
      const ConstructionParams p = c.construction.value_or(ConstructionParams{});
      r = holder_report(p.sigma, c.ks, c.holder_r, p.weights);
      const HolderConstruction hc = detail::need_construction(c);
      const PathSample path = [&] {
        PathSample ps;
        ps.symbols.assign(hc.radius(), 0);
        ps.symbols.insert(ps.symbols.end(), hc.cylinder_word().begin(), hc.cylinder_word().end());
        ps.symbols.insert(ps.symbols.end(), hc.radius(), 0);
        return ps;
      }();
      const SwapCheck swap = verify_subspace_swap(hc, path, hc.radius());
      r.metadata.push_back({"swap_k", std::to_string(hc.k())});
      r.metadata.push_back({"swap_passed", swap.all_passed() ? "true" : "false"});
      r.metadata.push_back({"swap_max_angle_error", detail::format_double(swap.max_error())});
      break;
    }
    case ExperimentKind::kifer:
      r = kifer_report(c.kifer_sigma, c.p1_values, c.steps_list, c.budget.n_trials, c.seed);
      break;
  }
  r.metadata.insert(r.metadata.begin(), {{"version", version},
                                         {"seed", std::to_string(c.seed)},
                                         {"n_steps", std::to_string(c.budget.n_steps)},
                                         {"n_trials", std::to_string(c.budget.n_trials)}});
  return r;
}

}  // namespace lyap
