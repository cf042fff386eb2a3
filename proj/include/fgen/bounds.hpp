#pragma once
// =============================================================================
// bounds.hpp
//
// Generalization-bound evaluators over SupersampleStatistics.  Every bound is
// a per-row quantity averaged over the n rows; disintegrated bounds place the
// expectation over supersample draws outside the square root, averaging the
// per-draw plug-in terms before the row average.
//
// Bound families:
//   mi family      cmi_oracle, cmi_fastrate, cmi_var, cmi_tv (pooled KL
//                  information), dis_mi_oracle, dis_chi2_oracle,
//                  baseline_ldcmi (disintegrated KL / chi2)
//   realizable     cmi_realizable_4i, cmi_realizable_log2 (precondition:
//                  every observed G sample nonnegative)
//   sh/js family   sh_oracle, sh_var, sh_worst, js_oracle (disintegrated
//                  squared-Hellinger / Jensen-Shannon information)
//   unbounded      unbounded_mi, unbounded_markov (grid search over the
//                  truncation level C, the tail split q, and the Hoelder pair
//                  (alpha, beta))
//
// The bounded families require |dL| <= 1, enforced from the declared
// loss_kind or loss_range, never from the observed samples.  tv_term enters
// in the dual (unhalved) total-variation convention, matching the derivation
// of the tv and sh_var bounds.
//
// per_joint_proof_invariants checks, on a single joint, the scalar
// inequalities the bound proofs reduce to; they are theorems for every
// exact-uniform joint supported in [-1, 1].
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgen/divergence.hpp"
#include "fgen/errors.hpp"
#include "fgen/supersample.hpp"

namespace fgen {

// =============================================================================
// Names and grids
// =============================================================================

enum class BoundName {
  cmi_oracle,
  cmi_fastrate,
  cmi_var,
  cmi_tv,
  cmi_realizable_4i,
  cmi_realizable_log2,
  dis_mi_oracle,
  dis_chi2_oracle,
  sh_oracle,
  sh_var,
  sh_worst,
  js_oracle,
  unbounded_mi,
  unbounded_markov,
  baseline_ldcmi,
};

inline const std::vector<BoundName>& all_bound_names() {
  static const std::vector<BoundName> names = {
      BoundName::cmi_oracle,      BoundName::cmi_fastrate,       BoundName::cmi_var,
      BoundName::cmi_tv,          BoundName::cmi_realizable_4i,  BoundName::cmi_realizable_log2,
      BoundName::dis_mi_oracle,   BoundName::dis_chi2_oracle,    BoundName::sh_oracle,
      BoundName::sh_var,          BoundName::sh_worst,           BoundName::js_oracle,
      BoundName::unbounded_mi,    BoundName::unbounded_markov,   BoundName::baseline_ldcmi,
  };
  return names;
}

inline std::string to_string(BoundName name) {
  switch (name) {
    case BoundName::cmi_oracle: return "cmi_oracle";
    case BoundName::cmi_fastrate: return "cmi_fastrate";
    case BoundName::cmi_var: return "cmi_var";
    case BoundName::cmi_tv: return "cmi_tv";
    case BoundName::cmi_realizable_4i: return "cmi_realizable_4i";
    case BoundName::cmi_realizable_log2: return "cmi_realizable_log2";
    case BoundName::dis_mi_oracle: return "dis_mi_oracle";
    case BoundName::dis_chi2_oracle: return "dis_chi2_oracle";
    case BoundName::sh_oracle: return "sh_oracle";
    case BoundName::sh_var: return "sh_var";
    case BoundName::sh_worst: return "sh_worst";
    case BoundName::js_oracle: return "js_oracle";
    case BoundName::unbounded_mi: return "unbounded_mi";
    case BoundName::unbounded_markov: return "unbounded_markov";
    case BoundName::baseline_ldcmi: return "baseline_ldcmi";
  }
  return "unknown";
}

inline BoundName bound_name_from_string(const std::string& name) {
  for (BoundName b : all_bound_names()) {
    if (to_string(b) == name) return b;
  }
  throw ValidationError("bound name: unknown \"" + name + "\"");
}

/// Search grids for the unbounded bounds.  The observed max |dL| is appended
/// to c_grid at evaluation time; alpha = 1 pairs with beta = infinity and the
/// essential supremum ||dL||_inf.
struct UnboundedGrids {
  std::vector<double> c_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> q_grid = {1.0, 1.5, 2.0, 4.0};
  std::vector<double> alpha_grid = {1.0, 1.25, 1.5, 2.0};

  void validate() const {
    if (c_grid.empty()) throw ValidationError("c_grid: must be non-empty");
    if (q_grid.empty()) throw ValidationError("q_grid: must be non-empty");
    if (alpha_grid.empty()) throw ValidationError("alpha_grid: must be non-empty");
    for (double c : c_grid) {
      if (!(c >= 0.0)) throw ValidationError("c_grid: entries must be >= 0");
    }
    for (double q : q_grid) {
      if (!(q >= 1.0)) throw ValidationError("q_grid: entries must be >= 1");
    }
    for (double a : alpha_grid) {
      if (!(a >= 1.0)) throw ValidationError("alpha_grid: entries must be >= 1");
    }
  }
};

/// Hoelder conjugate: 1/alpha + 1/beta = 1; alpha = 1 maps to beta = inf.
inline double holder_beta(double alpha) {
  return alpha == 1.0 ? kInf : alpha / (alpha - 1.0);
}

/// Statistics configuration covering everything the full bound set consumes:
/// pooled KL and phi_alpha information, disintegrated KL/chi2/SH/JS, the
/// truncation grid (with the observed max |dL|), and every Lp order the
/// unbounded grids can request.
inline StatisticsConfig statistics_config_for_bounds(const SupersampleLossTensor& tensor,
                                                     const UnboundedGrids& grids, const Quantizer& quantizer) {
  grids.validate();
  StatisticsConfig config;
  config.quantizer = quantizer;

  double max_abs_dl = 0.0;
  const DeltaG dg = delta_and_g(tensor);
  for (double dl : dg.delta) max_abs_dl = std::max(max_abs_dl, std::abs(dl));

  config.c_grid = grids.c_grid;
  config.c_grid.push_back(max_abs_dl);
  std::sort(config.c_grid.begin(), config.c_grid.end());
  config.c_grid.erase(std::unique(config.c_grid.begin(), config.c_grid.end()), config.c_grid.end());

  config.p_list = {1.0, 2.0};
  for (double alpha : grids.alpha_grid) {
    const double beta = holder_beta(alpha);
    config.p_list.push_back(beta);
    for (double q : grids.q_grid) {
      config.p_list.push_back(beta == kInf ? kInf : q * beta);
    }
  }
  std::sort(config.p_list.begin(), config.p_list.end());
  config.p_list.erase(std::unique(config.p_list.begin(), config.p_list.end()), config.p_list.end());

  config.pooled_kinds = {DivergenceKind::kl()};
  for (double alpha : grids.alpha_grid) config.pooled_kinds.push_back(DivergenceKind::phi_alpha(alpha));
  config.disintegrated_kinds = {DivergenceKind::kl(), DivergenceKind::chi2(),
                                DivergenceKind::squared_hellinger(), DivergenceKind::jensen_shannon()};
  return config;
}

// =============================================================================
// Results
// =============================================================================

/// Grid choice behind one per-row unbounded value.
struct ChosenParams {
  double c = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
};

struct BoundResult {
  BoundName name = BoundName::cmi_oracle;
  double value = 0.0;                       ///< (1/n) sum of per_row
  std::vector<double> per_row;
  std::vector<ChosenParams> chosen_params;  ///< unbounded bounds only, per row
  std::vector<std::string> notes;
};

struct BoundReport {
  std::map<std::string, BoundResult> results;  ///< keyed by bound name
  GenErrorEstimate gen_error;
  std::string settings;  ///< echo of the estimator settings
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

/// The bounded families require |dL| <= 1, guaranteed by the declared kind or
/// range, never inferred from the observed samples.
inline void require_unit_loss_difference(const SupersampleStatistics& stats, BoundName name) {
  switch (stats.loss_kind) {
    case LossKind::zero_one:
    case LossKind::bounded_unit:
      return;
    case LossKind::general:
      if (stats.loss_range && stats.loss_range->second - stats.loss_range->first <= 1.0) return;
      throw ValidationError(to_string(name) +
                            ": loss differences may exceed [-1, 1] for this loss_kind; use the unbounded family");
  }
}

inline const FInformationEstimate& require_finfo(const SupersampleStatistics& stats, const DivergenceKind& kind,
                                                 EstimationMode mode, BoundName name) {
  if (!stats.has_finfo(kind, mode)) {
    throw ValidationError(to_string(name) + ": statistics lack the (" + to_string(kind) + ", " +
                          to_string(mode) + ") information estimate");
  }
  return stats.finfo_at(kind, mode);
}

inline const std::vector<double>& require_keyed(const std::map<double, std::vector<double>>& m, double key,
                                                const char* what, BoundName name) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw ValidationError(to_string(name) + ": statistics lack " + what + " at " + std::to_string(key) +
                          "; recompute with a matching grid");
  }
  return it->second;
}

inline BoundResult make_result(BoundName name, std::vector<double> per_row) {
  BoundResult r;
  r.name = name;
  r.per_row = std::move(per_row);
  r.value = mean_of(r.per_row);
  return r;
}

/// Mean over draws of f(cell) at a fixed row, cells flattened draw*n + row.
template <typename F>
double draw_average(int k1, int n, int row, F&& f) {
  double sum = 0.0;
  for (int d = 0; d < k1; ++d) sum += f(static_cast<std::size_t>(d) * n + row);
  return sum / static_cast<double>(k1);
}

}  // namespace detail

// =============================================================================
// KL family
// =============================================================================

inline BoundResult bound_mi_family(const SupersampleStatistics& stats, BoundName name) {
  detail::require_unit_loss_difference(stats, name);
  std::vector<double> per_row(stats.n, 0.0);
  switch (name) {
    case BoundName::cmi_oracle: {
      const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = std::sqrt(2.0 * (stats.e_dl2[i] + std::abs(stats.e_g[i])) * kl.values[i]);
      }
      break;
    }
    case BoundName::cmi_fastrate: {
      const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = 2.0 * kl.values[i] + std::sqrt(2.0 * stats.e_dl2[i] * kl.values[i]);
      }
      break;
    }
    case BoundName::cmi_var: {
      const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = 2.0 * kl.values[i] + 2.0 * std::sqrt(2.0 * stats.var_lplus[i] * kl.values[i]);
      }
      break;
    }
    case BoundName::cmi_tv: {
      const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = std::sqrt(2.0 * stats.e_dl2[i] * kl.values[i]) +
                     std::sqrt(2.0 * stats.tv_term[i] * kl.values[i]);
      }
      break;
    }
    case BoundName::dis_mi_oracle:
    case BoundName::dis_chi2_oracle: {
      const DivergenceKind kind =
          name == BoundName::dis_mi_oracle ? DivergenceKind::kl() : DivergenceKind::chi2();
      const auto& info = detail::require_finfo(stats, kind, EstimationMode::disintegrated, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = detail::draw_average(stats.k1, stats.n, i, [&](std::size_t c) {
          return std::sqrt(2.0 * (stats.cell_e_dl2[c] + std::abs(stats.cell_e_g[c])) * info.values[c]);
        });
      }
      break;
    }
    case BoundName::baseline_ldcmi: {
      const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::disintegrated, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = detail::draw_average(stats.k1, stats.n, i,
                                          [&](std::size_t c) { return std::sqrt(2.0 * kl.values[c]); });
      }
      break;
    }
    default:
      throw ValidationError("bound_mi_family: " + to_string(name) + " is not in the KL family");
  }
  return detail::make_result(name, std::move(per_row));
}

// =============================================================================
// Realizable forms
// =============================================================================

inline BoundResult bound_realizable(const SupersampleStatistics& stats, BoundName name) {
  if (name != BoundName::cmi_realizable_4i && name != BoundName::cmi_realizable_log2) {
    throw ValidationError("bound_realizable: " + to_string(name) + " is not a realizable form");
  }
  detail::require_unit_loss_difference(stats, name);
  for (int i = 0; i < stats.n; ++i) {
    if (stats.min_g[i] < 0.0) {
      throw ValidationError(to_string(name) + ": realizable precondition violated at row " + std::to_string(i) +
                            " (observed G sample " + std::to_string(stats.min_g[i]) + " < 0)");
    }
  }
  const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);
  std::vector<double> per_row(stats.n, 0.0);
  for (int i = 0; i < stats.n; ++i) {
    per_row[i] = name == BoundName::cmi_realizable_4i ? 4.0 * kl.values[i] : kl.values[i] / kLn2;
  }
  BoundResult r = detail::make_result(name, std::move(per_row));
  r.notes.push_back("precondition verified: every observed G sample is nonnegative");
  return r;
}

// =============================================================================
// SH / JS family
// =============================================================================

inline BoundResult bound_sh_js(const SupersampleStatistics& stats, BoundName name) {
  detail::require_unit_loss_difference(stats, name);
  std::vector<double> per_row(stats.n, 0.0);
  switch (name) {
    case BoundName::sh_oracle: {
      const auto& sh = detail::require_finfo(stats, DivergenceKind::squared_hellinger(),
                                             EstimationMode::disintegrated, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = detail::draw_average(stats.k1, stats.n, i, [&](std::size_t c) {
          return std::sqrt((4.0 * stats.cell_e_dl2[c] + 2.0 * std::abs(stats.cell_e_g[c])) * sh.values[c]);
        });
      }
      break;
    }
    case BoundName::sh_var:
    case BoundName::sh_worst: {
      if (stats.cell_tv_term.empty()) {
        throw ValidationError(to_string(name) + ": statistics lack the per-cell tv term");
      }
      const auto& sh = detail::require_finfo(stats, DivergenceKind::squared_hellinger(),
                                             EstimationMode::disintegrated, name);
      const bool worst = name == BoundName::sh_worst;
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = detail::draw_average(stats.k1, stats.n, i, [&](std::size_t c) {
          const double dl2 = worst ? 1.0 : stats.cell_e_dl2[c];
          return std::sqrt((4.0 * dl2 + 2.0 * stats.cell_tv_term[c]) * sh.values[c]);
        });
      }
      break;
    }
    case BoundName::js_oracle: {
      const auto& js = detail::require_finfo(stats, DivergenceKind::jensen_shannon(),
                                             EstimationMode::disintegrated, name);
      for (int i = 0; i < stats.n; ++i) {
        per_row[i] = 2.0 * detail::draw_average(stats.k1, stats.n, i, [&](std::size_t c) {
                       return std::sqrt((4.0 * stats.cell_e_dl2[c] + std::abs(stats.cell_e_g[c])) * js.values[c]);
                     });
      }
      break;
    }
    default:
      throw ValidationError("bound_sh_js: " + to_string(name) + " is not in the SH/JS family");
  }
  return detail::make_result(name, std::move(per_row));
}

// =============================================================================
// Unbounded family
// =============================================================================

inline BoundResult bound_unbounded(const SupersampleStatistics& stats, BoundName name,
                                   const UnboundedGrids& grids = {}) {
  if (name != BoundName::unbounded_mi && name != BoundName::unbounded_markov) {
    throw ValidationError("bound_unbounded: " + to_string(name) + " is not an unbounded form");
  }
  grids.validate();
  const auto& kl = detail::require_finfo(stats, DivergenceKind::kl(), EstimationMode::pooled, name);

  std::vector<double> c_grid = grids.c_grid;
  c_grid.push_back(stats.global_max_abs_dl);
  std::sort(c_grid.begin(), c_grid.end());
  c_grid.erase(std::unique(c_grid.begin(), c_grid.end()), c_grid.end());

  BoundResult r;
  r.name = name;
  r.per_row.assign(stats.n, 0.0);
  r.chosen_params.resize(stats.n);

  for (int i = 0; i < stats.n; ++i) {
    double best = kInf;
    ChosenParams best_params;
    for (double alpha : grids.alpha_grid) {
      const double beta = holder_beta(alpha);
      const auto& phi =
          detail::require_finfo(stats, DivergenceKind::phi_alpha(alpha), EstimationMode::pooled, name);
      if (!std::isfinite(phi.values[i])) continue;
      const double info_root = std::pow(phi.values[i], 1.0 / alpha);
      for (double q : grids.q_grid) {
        const double qbeta = beta == kInf ? kInf : q * beta;
        const double norm_qbeta = detail::require_keyed(stats.lp_norms, qbeta, "the Lp norm", name)[i];
        if (!std::isfinite(norm_qbeta)) continue;
        const double gamma = beta == kInf ? 0.0 : (q - 1.0) / (q * beta);

        if (name == BoundName::unbounded_mi) {
          for (double c : c_grid) {
            const double trunc_dl2 = detail::require_keyed(stats.trunc_dl2, c, "truncated moments", name)[i];
            const double trunc_g = detail::require_keyed(stats.trunc_g, c, "truncated moments", name)[i];
            const double tail = detail::require_keyed(stats.tail_prob, c, "tail probabilities", name)[i];
            const double zeta1 = std::sqrt(2.0 * (trunc_dl2 + c * std::abs(trunc_g)));
            // 0^0 = 1: a zero tail with exponent 0 still keeps the norm factor
            const double tail_pow = gamma == 0.0 ? 1.0 : std::pow(tail, gamma);
            const double zeta2 = tail_pow * norm_qbeta;
            const double cand = zeta1 * std::sqrt(kl.values[i]) + zeta2 * info_root;
            if (cand < best) {
              best = cand;
              best_params = ChosenParams{c, q, alpha, beta, gamma, zeta1, zeta2};
            }
          }
        } else {
          double cand;
          if (gamma == 0.0) {
            // the gamma -> 0 limit: ||dL||_beta (= ||dL||_{q beta} at q = 1) times the information root
            cand = norm_qbeta * info_root;
          } else {
            const double norm_1 = detail::require_keyed(stats.lp_norms, 1.0, "the L1 norm", name)[i];
            const double prefactor = std::pow(gamma, 1.0 / (gamma + 1.0)) + std::pow(gamma, -gamma / (gamma + 1.0));
            cand = prefactor * std::pow(std::sqrt(2.0 * kl.values[i]), gamma / (gamma + 1.0)) *
                   std::pow(std::pow(norm_1, gamma) * norm_qbeta * info_root, 1.0 / (gamma + 1.0));
          }
          if (cand < best) {
            best = cand;
            best_params = ChosenParams{0.0, q, alpha, beta, gamma, 0.0, 0.0};
          }
        }
      }
    }
    if (!std::isfinite(best)) {
      r.notes.push_back("row " + std::to_string(i) + ": all grid candidates are infinite");
    }
    r.per_row[i] = best;
    r.chosen_params[i] = best_params;
  }
  r.value = detail::mean_of(r.per_row);
  return r;
}

// =============================================================================
// Dispatch and reports
// =============================================================================

inline BoundResult evaluate_bound(const SupersampleStatistics& stats, BoundName name,
                                  const UnboundedGrids& grids = {}) {
  switch (name) {
    case BoundName::cmi_oracle:
    case BoundName::cmi_fastrate:
    case BoundName::cmi_var:
    case BoundName::cmi_tv:
    case BoundName::dis_mi_oracle:
    case BoundName::dis_chi2_oracle:
    case BoundName::baseline_ldcmi:
      return bound_mi_family(stats, name);
    case BoundName::cmi_realizable_4i:
    case BoundName::cmi_realizable_log2:
      return bound_realizable(stats, name);
    case BoundName::sh_oracle:
    case BoundName::sh_var:
    case BoundName::sh_worst:
    case BoundName::js_oracle:
      return bound_sh_js(stats, name);
    case BoundName::unbounded_mi:
    case BoundName::unbounded_markov:
      return bound_unbounded(stats, name, grids);
  }
  throw ValidationError("evaluate_bound: unknown bound");
}

/// Evaluates every requested bound; a bound whose preconditions fail is still
/// present in the report, carrying a failure note and an infinite value.
inline BoundReport evaluate_bounds(const SupersampleStatistics& stats, const GenErrorEstimate& gen_error,
                                   const std::vector<BoundName>& names, const UnboundedGrids& grids = {}) {
  BoundReport report;
  report.gen_error = gen_error;
  for (BoundName name : names) {
    try {
      report.results.emplace(to_string(name), evaluate_bound(stats, name, grids));
    } catch (const std::exception& e) {
      BoundResult failed;
      failed.name = name;
      failed.value = kInf;
      failed.notes.push_back(std::string("failed: ") + e.what());
      report.results.emplace(to_string(name), std::move(failed));
    }
  }
  return report;
}

inline nlohmann::json to_json(const BoundResult& r) {
  nlohmann::json j;
  j["name"] = to_string(r.name);
  j["value"] = r.value;
  j["per_row"] = r.per_row;
  j["notes"] = r.notes;
  if (!r.chosen_params.empty()) {
    nlohmann::json params = nlohmann::json::array();
    for (const ChosenParams& p : r.chosen_params) {
      params.push_back({{"c", p.c},
                        {"q", p.q},
                        {"alpha", p.alpha},
                        {"beta", p.beta},
                        {"gamma", p.gamma},
                        {"zeta1", p.zeta1},
                        {"zeta2", p.zeta2}});
    }
    j["chosen_params"] = std::move(params);
  }
  return j;
}

inline nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j;
  j["gen_error"] = {{"mean", report.gen_error.mean}, {"std_err", report.gen_error.std_err}};
  j["settings"] = report.settings;
  nlohmann::json results = nlohmann::json::object();
  for (const auto& [name, result] : report.results) results[name] = to_json(result);
  j["results"] = std::move(results);
  return j;
}

// =============================================================================
// Per-joint proof invariants
// =============================================================================

/// Scalar inequalities the bound proofs reduce to, checked on one
/// exact-uniform joint with support in [-1, 1]:
///
///   kl_quadratic  E[G]^2           <= 2 (|E[G]| + E[G^2]) I_KL
///   sh_key        |E[G]|           <= sqrt((2 |E[G]| + 4 E[G^2]) I_H2)
///   js_key        E[G]             <= sqrt((4 |E[G]| + 16 E[G^2]) I_JS)
///   truncated_kl  |E[G 1{|dL|<=C}]| <= sqrt(2 (C |E[G 1]| + E[G^2 1]) I_KL)
///                 for each C in the truncation grid, with the full I_KL
struct ProofInvariantReport {
  bool kl_quadratic = false;
  bool sh_key = false;
  bool js_key = false;
  bool truncated_kl = false;
  std::vector<std::pair<double, bool>> truncated_by_c;

  bool all() const { return kl_quadratic && sh_key && js_key && truncated_kl; }
};

inline ProofInvariantReport per_joint_proof_invariants(const JointLossMaskDistribution& joint,
                                                       const std::vector<double>& c_grid = {0.25, 0.5, 1.0}) {
  joint.validate();
  constexpr double kTol = 1e-9;
  const double e_g = joint.mean_g();
  const double e_g2 = joint.mean_dl2();
  const double i_kl = f_information(joint, DivergenceKind::kl());
  const double i_sh = f_information(joint, DivergenceKind::squared_hellinger());
  const double i_js = f_information(joint, DivergenceKind::jensen_shannon());

  ProofInvariantReport r;
  r.kl_quadratic = e_g * e_g <= 2.0 * (std::abs(e_g) + e_g2) * i_kl + kTol;
  r.sh_key = std::abs(e_g) <= std::sqrt((2.0 * std::abs(e_g) + 4.0 * e_g2) * i_sh) + kTol;
  r.js_key = e_g <= std::sqrt((4.0 * std::abs(e_g) + 16.0 * e_g2) * i_js) + kTol;

  r.truncated_kl = true;
  for (double c : c_grid) {
    double trunc_g = 0.0, trunc_g2 = 0.0;
    for (std::size_t v = 0; v < joint.support.size(); ++v) {
      if (std::abs(joint.support[v]) > c) continue;
      trunc_g += joint.support[v] * (joint.probs[0][v] - joint.probs[1][v]);
      trunc_g2 += joint.support[v] * joint.support[v] * (joint.probs[0][v] + joint.probs[1][v]);
    }
    const bool ok =
        std::abs(trunc_g) <= std::sqrt(2.0 * (c * std::abs(trunc_g) + trunc_g2) * i_kl) + kTol;
    r.truncated_by_c.emplace_back(c, ok);
    r.truncated_kl = r.truncated_kl && ok;
  }
  return r;
}

}  // namespace fgen
