#pragma once

// Experiment drivers (continuity sweeps, support jitter, Kifer, Holder and
// Oseledets reports) and bit-stable CSV/JSON report emission.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cocycle.hpp"
#include "exponents.hpp"
#include "holder.hpp"
#include "oseledets.hpp"
#include "stationary.hpp"

namespace lyap {

inline constexpr const char* version = "1.0.0";

using Cell = std::variant<double, std::int64_t, std::string>;

struct Report {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  // Comment lines written before the CSV header (measure dumps only).
  std::vector<std::string> preamble;
};

enum class Format { csv, json };

namespace detail {
inline std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_double(*d) : "null";
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return json_string(std::get<std::string>(c));
}
}  // namespace detail

// Doubles use %.17g, columns keep their declared order and every line ends
// in '\n', so identical inputs give identical bytes.
inline std::string render_report(const Report& r, Format f) {
  std::string out;
  if (f == Format::csv) {
    for (const auto& line : r.preamble) out += "# " + line + "\n";
    for (std::size_t j = 0; j < r.columns.size(); ++j) out += (j ? "," : "") + detail::csv_escape(r.columns[j]);
    out += "\n";
    for (const auto& row : r.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + detail::csv_cell(row[j]);
      out += "\n";
    }
    return out;
  }
  out += "{\n  \"kind\": " + detail::json_string(r.kind) + ",\n  \"metadata\": {";
  for (std::size_t j = 0; j < r.metadata.size(); ++j)
    out += (j ? ", " : "") + detail::json_string(r.metadata[j].first) + ": " + detail::json_string(r.metadata[j].second);
  out += "},\n  \"columns\": [";
  for (std::size_t j = 0; j < r.columns.size(); ++j) out += (j ? ", " : "") + detail::json_string(r.columns[j]);
  out += "],\n  \"rows\": [";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    out += i ? ",\n    [" : "\n    [";
    for (std::size_t j = 0; j < r.rows[i].size(); ++j) out += (j ? ", " : "") + detail::json_cell(r.rows[i][j]);
    out += "]";
  }
  out += r.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

inline void emit_report(const Report& r, Format f, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const std::string text = render_report(r, f);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("write failed for " + path);
}

struct McBudget {
  std::uint64_t n_steps = 100'000;
  std::uint64_t n_trials = 64;
};

// Matrix and/or weight directions of a perturbation family. Empty matrix
// directions leave the matrices alone; an empty weight direction leaves the
// weights alone.
struct PerturbationSpec {
  std::vector<Mat2C> matrix_directions;
  std::vector<double> weight_direction;

  static PerturbationSpec default_for(std::size_t m) { return {default_perturbation_directions(m), {}}; }

  FiniteCocycle apply(const FiniteCocycle& base, double gamma) const {
    std::vector<Mat2C> dirs = matrix_directions;
    if (dirs.empty()) dirs.assign(base.size(), Mat2C::zero());
    return perturb(base, gamma, dirs, weight_direction);
  }
};

struct SweepRow {
  double parameter = 0.0;  // gamma or delta
  ExponentEstimate estimate;
  double matrix_distance = 0.0;
  double weight_distance = 0.0;
  std::size_t atoms = 0;
};

// Rows in sweep order (descending parameter, base row last).
struct SweepResult {
  std::string parameter_name;
  std::vector<SweepRow> rows;
};

namespace detail {
inline std::vector<double> descending_with_zero(std::span<const double> values, const char* who) {
  std::vector<double> v(values.begin(), values.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) throw InvalidParams(std::string(who) + ": parameters must be nonnegative");
    if (i > 0 && !(v[i] < v[i - 1])) throw InvalidParams(std::string(who) + ": parameters must be strictly descending");
  }
  if (v.empty() || v.back() != 0.0) v.push_back(0.0);
  return v;
}
}  // namespace detail

// lambda_+- along the family gamma -> spec.apply(base, gamma). Every row uses
// the same seed, so the base row (gamma = 0, appended if absent) reproduces
// estimate_extremal_mc(base, ...) exactly and differences between rows are
// free of path noise.
inline SweepResult run_continuity_sweep(const FiniteCocycle& base, const PerturbationSpec& spec,
                                        std::span<const double> gammas, const McBudget& budget, std::uint64_t seed) {
  SweepResult out{"gamma", {}};
  for (double g : detail::descending_with_zero(gammas, "run_continuity_sweep")) {
    const FiniteCocycle a = g == 0.0 ? base : spec.apply(base, g);
    out.rows.push_back({g, estimate_extremal_mc(a, budget.n_steps, budget.n_trials, seed), cocycle_distance(a, base),
                        weight_distance(a.weights(), base.weights()), a.size()});
  }
  return out;
}

// Atom i becomes the cluster A_i + delta U_j, j < split.size(), with weights
// p_i split[j]. U_j is the rotation by 2 pi j / s + pi/4 (operator norm 1), so
// every new atom sits at distance exactly delta from its parent.
inline FiniteCocycle jitter_support(const FiniteCocycle& base, double delta, std::span<const double> split) {
  if (!(delta >= 0.0)) throw InvalidParams("jitter: delta must be nonnegative");
  detail::check_weights(split, "jitter split");
  std::vector<Mat2C> mats;
  std::vector<double> w;
  const double s = static_cast<double>(split.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = 0; j < split.size(); ++j) {
      Mat2C m = base.matrix(i);
      if (delta > 0.0) m = m + delta * Mat2C::rotation(2.0 * std::numbers::pi * static_cast<double>(j) / s + std::numbers::pi / 4.0);
      if (m.is_singular()) throw PerturbationLeavesGL("jittered atom is singular");
      mats.push_back(m);
      w.push_back(base.weight(i) * split[j]);
    }
  // Renormalize the rounding of the products p_i split_j.
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return {std::move(mats), std::move(w)};
}

inline SweepResult run_support_jitter(const FiniteCocycle& base, std::span<const double> deltas,
                                      std::span<const double> split, const McBudget& budget, std::uint64_t seed) {
  SweepResult out{"delta", {}};
  for (double d : detail::descending_with_zero(deltas, "run_support_jitter")) {
    const FiniteCocycle a = jitter_support(base, d, split);
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      dist = std::max(dist, operator_norm(a.matrix(i) - base.matrix(i / split.size())));
    out.rows.push_back({d, estimate_extremal_mc(a, budget.n_steps, budget.n_trials, seed), dist, 0.0, a.size()});
  }
  return out;
}

inline Report to_report(const SweepResult& s, const std::string& kind) {
  Report r;
  r.kind = kind;
  r.columns = {s.parameter_name, "lambda_plus", "stderr_plus", "lambda_minus", "stderr_minus",
               "matrix_distance", "weight_distance", "atoms", "n_steps", "n_trials"};
  for (const auto& row : s.rows)
    r.rows.push_back({row.parameter, row.estimate.lambda_plus, row.estimate.stderr_plus, row.estimate.lambda_minus,
                      row.estimate.stderr_minus, row.matrix_distance, row.weight_distance,
                      static_cast<std::int64_t>(row.atoms), static_cast<std::int64_t>(row.estimate.n_steps),
                      static_cast<std::int64_t>(row.estimate.n_trials)});
  return r;
}

inline std::vector<Cell> estimate_row(const ExponentEstimate& e) {
  return {std::string(to_string(e.method)), e.lambda_plus, e.stderr_plus, e.lambda_minus, e.stderr_minus,
          static_cast<std::int64_t>(e.n_steps), static_cast<std::int64_t>(e.n_trials)};
}

inline const std::vector<std::string>& estimate_columns() {
  static const std::vector<std::string> c{"method", "lambda_plus", "stderr_plus", "lambda_minus",
                                          "stderr_minus", "n_steps", "n_trials"};
  return c;
}

// True when every atom of positive weight is diagonal.
inline bool is_diagonal(const FiniteCocycle& a, double tol = 1e-12) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Mat2C& m = a.matrix(i);
    if (a.weight(i) > 0.0 && (std::abs(m.b) > tol || std::abs(m.c) > tol)) return false;
  }
  return true;
}

// Monte-Carlo row, plus the exact row for diagonal cocycles and the
// enumeration bound c_n (lambda columns hold c_n) when enumeration_n > 0.
inline Report estimate_report(const FiniteCocycle& a, const McBudget& budget, std::uint64_t seed,
                              std::size_t enumeration_n = 0) {
  Report r;
  r.kind = "estimate";
  r.columns = estimate_columns();
  r.rows.push_back(estimate_row(estimate_extremal_mc(a, budget.n_steps, budget.n_trials, seed)));
  if (is_diagonal(a)) r.rows.push_back(estimate_row(exact_diagonal(a)));
  if (enumeration_n > 0) {
    ExponentEstimate e;
    e.method = Method::enumeration_bound;
    e.lambda_plus = enumeration_upper_bound(a, enumeration_n);
    e.lambda_minus = std::nan("");
    e.n_steps = enumeration_n;
    r.rows.push_back(estimate_row(e));
  }
  return r;
}

inline Report estimate_report(const WindowCocycle& w, const McBudget& budget, std::uint64_t seed) {
  Report r;
  r.kind = "estimate";
  r.columns = estimate_columns();
  r.rows.push_back(estimate_row(estimate_extremal_mc(w, budget.n_steps, budget.n_trials, seed)));
  return r;
}

// Kifer family over p1 and a list of path lengths; exact where the support is
// diagonal (p1 = 1).
inline Report kifer_report(double sigma, std::span<const double> p1_values, std::span<const std::uint64_t> steps,
                           std::uint64_t n_trials, std::uint64_t seed) {
  Report r;
  r.kind = "kifer";
  r.columns = {"p1", "n_steps", "method", "lambda_plus", "stderr_plus", "lambda_minus", "stderr_minus"};
  for (double p1 : p1_values) {
    const FiniteCocycle a = kifer_family(sigma, p1);
    for (std::uint64_t n : steps) {
      const ExponentEstimate e = is_diagonal(a) ? exact_diagonal(a) : estimate_extremal_mc(a, n, n_trials, seed);
      r.rows.push_back({p1, static_cast<std::int64_t>(n), std::string(to_string(e.method)), e.lambda_plus,
                        e.stderr_plus, e.lambda_minus, e.stderr_minus});
    }
  }
  return r;
}

// Rows (k, r, sup_term, quotient_term, total, bound) for ||B_n - A||_r.
inline Report holder_report(double sigma, std::span<const int> ks, double r_exp, std::array<double, 2> weights) {
  Report rep;
  rep.kind = "holder";
  rep.columns = {"k", "r", "sup_term", "quotient_term", "total", "bound"};
  const ShiftMetricParams params(r_exp);
  for (int k : ks) {
    const HolderNorm h = construction_holder_norm(build_construction(sigma, k, weights), params);
    rep.rows.push_back({static_cast<std::int64_t>(k), r_exp, h.sup_term, h.quotient_term, h.total(),
                        holder_bound(sigma, r_exp, k)});
  }
  rep.metadata.push_back({"discontinuity_regime", params.discontinuity_regime(sigma) ? "true" : "false"});
  return rep;
}

// Angle-convergence fractions between base and spec.apply(base, gamma).
inline Report oseledets_report(const FiniteCocycle& base, const PerturbationSpec& spec,
                               std::span<const double> gammas, double eps, std::size_t depth,
                               std::size_t n_points, std::uint64_t seed) {
  Report r;
  r.kind = "oseledets";
  r.columns = {"gamma", "fraction", "n_used", "n_excluded", "depth", "eps"};
  for (double g : gammas) {
    const AngleExperimentResult x = angle_convergence_experiment(base, spec.apply(base, g), eps, depth, n_points, seed);
    r.rows.push_back({g, x.fraction, static_cast<std::int64_t>(x.n_used), static_cast<std::int64_t>(x.n_excluded),
                      static_cast<std::int64_t>(x.depth), x.eps});
  }
  return r;
}

// Measure dump: rows (z1_re, z1_im, z2_re, z2_im, weight) after a preamble
// carrying the residual and provenance.
inline Report measure_report(const StationarySolution& s, const std::string& provenance) {
  Report r;
  r.kind = "stationary";
  r.preamble = {"lyaplab measure dump v1", "residual " + detail::format_double(s.residual),
                "cesaro_residual " + detail::format_double(s.cesaro_residual),
                "iterations " + std::to_string(s.iterations), "converged " + std::string(s.converged ? "true" : "false"),
                "provenance " + provenance};
  r.metadata = {{"residual", detail::format_double(s.residual)},
                {"cesaro_residual", detail::format_double(s.cesaro_residual)},
                {"iterations", std::to_string(s.iterations)},
                {"converged", s.converged ? "true" : "false"},
                {"provenance", provenance}};
  r.columns = {"z1_re", "z1_im", "z2_re", "z2_im", "weight"};
  for (const auto& p : s.measure.particles())
    r.rows.push_back({p.point.z1().real(), p.point.z1().imag(), p.point.z2().real(), p.point.z2().imag(), p.weight});
  return r;
}

}  // namespace lyap
