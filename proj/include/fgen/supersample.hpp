#pragma once
// =============================================================================
// supersample.hpp
//
// The supersample data model: a loss tensor over k1 supersample draws, k2
// Bernoulli mask draws per supersample, and n rows, where each (draw, mask,
// row) cell records the pair of column losses (L_{i,0}, L_{i,1}) and the mask
// bit U_i.  From this tensor we derive the loss differences dL = L_1 - L_0,
// the signed differences G = (-1)^U dL (test loss minus train loss), the
// empirical generalization error, plug-in f-information estimates of the
// (dL, U) channel, and the moment statistics consumed by the bound evaluators.
//
// Estimation modes:
//   pooled        one joint per row, built from all k1*k2 (dL, U) pairs.
//   disintegrated one joint per (draw, row) cell, built from the k2 pairs of
//                 that draw.  An empty U-stratum inside a cell is a hard
//                 error naming the cell; strata below 10 samples produce a
//                 warning string but still estimate.
//
// All plug-in joints use the exact-uniform U marginal (1/2, 1/2); the mask
// law is known by construction, so only the conditionals are estimated.
//
// Determinism: every aggregation below runs in ascending (draw, row) index
// order, so repeated runs produce bit-identical statistics.  Per-row and
// per-cell estimation is independent and safe to parallelize externally as
// long as the caller preserves that reduction order.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fgen/distribution.hpp"
#include "fgen/divergence.hpp"
#include "fgen/errors.hpp"

namespace fgen {

// =============================================================================
// Loss tensor
// =============================================================================

/// Declared range of the loss values stored in a tensor.  zero_one restricts
/// losses to exactly {0, 1}; bounded_unit to [0, 1]; general to the optional
/// declared loss_range when present (losses are nonnegative in every kind).
enum class LossKind { zero_one, bounded_unit, general };

inline std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::zero_one: return "zero_one";
    case LossKind::bounded_unit: return "bounded_unit";
    case LossKind::general: return "general";
  }
  return "unknown";
}

inline LossKind loss_kind_from_string(const std::string& name) {
  if (name == "zero_one") return LossKind::zero_one;
  if (name == "bounded_unit") return LossKind::bounded_unit;
  if (name == "general") return LossKind::general;
  throw ValidationError("loss_kind: expected \"zero_one\", \"bounded_unit\", or \"general\", got \"" + name + "\"");
}

/// Loss tensor over [k1][k2][n][2] losses and [k1][k2][n] mask bits, stored
/// flat in row-major order.  Column 0 holds L_{i,0}, column 1 holds L_{i,1};
/// mask bit u means column u is the training column at that cell.
struct SupersampleLossTensor {
  int k1 = 0;  ///< supersample draws
  int k2 = 0;  ///< mask draws per supersample
  int n = 0;   ///< rows per draw
  LossKind loss_kind = LossKind::bounded_unit;
  std::optional<std::pair<double, double>> loss_range;  ///< general kind only
  std::vector<double> losses;       ///< flat [k1][k2][n][2]
  std::vector<std::uint8_t> masks;  ///< flat [k1][k2][n]

  std::size_t loss_index(int d, int m, int i, int col) const {
    return ((static_cast<std::size_t>(d) * k2 + m) * n + i) * 2 + col;
  }
  std::size_t mask_index(int d, int m, int i) const {
    return (static_cast<std::size_t>(d) * k2 + m) * n + i;
  }

  double loss(int d, int m, int i, int col) const { return losses[loss_index(d, m, i, col)]; }
  double& loss_at(int d, int m, int i, int col) { return losses[loss_index(d, m, i, col)]; }
  std::uint8_t mask(int d, int m, int i) const { return masks[mask_index(d, m, i)]; }
  std::uint8_t& mask_at(int d, int m, int i) { return masks[mask_index(d, m, i)]; }

  std::size_t replicate_count() const { return static_cast<std::size_t>(k1) * k2; }

  /// All-zero tensor of the given shape (masks 0, losses 0).
  static SupersampleLossTensor zeros(int k1, int k2, int n, LossKind kind) {
    SupersampleLossTensor t;
    t.k1 = k1;
    t.k2 = k2;
    t.n = n;
    t.loss_kind = kind;
    t.losses.assign(static_cast<std::size_t>(k1) * k2 * n * 2, 0.0);
    t.masks.assign(static_cast<std::size_t>(k1) * k2 * n, 0);
    return t;
  }

  /// Throws ValidationError naming the first offending field (with indices).
  void validate() const {
    if (k1 < 1) throw ValidationError("k1: must be a positive integer, got " + std::to_string(k1));
    if (k2 < 1) throw ValidationError("k2: must be a positive integer, got " + std::to_string(k2));
    if (n < 1) throw ValidationError("n: must be a positive integer, got " + std::to_string(n));
    const std::size_t cells = static_cast<std::size_t>(k1) * k2 * n;
    if (losses.size() != cells * 2) {
      throw ValidationError("losses: expected " + std::to_string(cells * 2) + " entries for shape [" +
                            std::to_string(k1) + "][" + std::to_string(k2) + "][" + std::to_string(n) +
                            "][2], got " + std::to_string(losses.size()));
    }
    if (masks.size() != cells) {
      throw ValidationError("masks: expected " + std::to_string(cells) + " entries, got " +
                            std::to_string(masks.size()));
    }
    if (loss_range) {
      if (loss_kind != LossKind::general) {
        throw ValidationError("loss_range: only allowed with loss_kind \"general\"");
      }
      if (!std::isfinite(loss_range->first) || !std::isfinite(loss_range->second) ||
          !(loss_range->first < loss_range->second)) {
        throw ValidationError("loss_range: expected finite [lo, hi] with lo < hi");
      }
    }
    for (int d = 0; d < k1; ++d) {
      for (int m = 0; m < k2; ++m) {
        for (int i = 0; i < n; ++i) {
          for (int col = 0; col < 2; ++col) {
            const double v = loss(d, m, i, col);
            const std::string where = "losses[" + std::to_string(d) + "][" + std::to_string(m) + "][" +
                                      std::to_string(i) + "][" + std::to_string(col) + "]";
            if (!std::isfinite(v)) throw ValidationError(where + ": loss must be finite");
            if (v < 0.0) throw ValidationError(where + " = " + std::to_string(v) + ": loss must be nonnegative");
            switch (loss_kind) {
              case LossKind::zero_one:
                if (v != 0.0 && v != 1.0) {
                  throw ValidationError(where + " = " + std::to_string(v) + ": zero_one losses must be exactly 0 or 1");
                }
                break;
              case LossKind::bounded_unit:
                if (v > 1.0) {
                  throw ValidationError(where + " = " + std::to_string(v) + ": bounded_unit losses must lie in [0, 1]");
                }
                break;
              case LossKind::general:
                if (loss_range && (v < loss_range->first || v > loss_range->second)) {
                  throw ValidationError(where + " = " + std::to_string(v) + ": loss outside declared loss_range");
                }
                break;
            }
          }
          const std::uint8_t u = mask(d, m, i);
          if (u != 0 && u != 1) {
            throw ValidationError("masks[" + std::to_string(d) + "][" + std::to_string(m) + "][" +
                                  std::to_string(i) + "] = " + std::to_string(static_cast<int>(u)) +
                                  ": mask must be 0 or 1");
          }
        }
      }
    }
  }
};

// =============================================================================
// Tensor file format
// =============================================================================
// {"version":1, "n":int, "k1":int, "k2":int,
//  "loss_kind":"zero_one"|"bounded_unit"|"general",
//  "loss_range":[lo,hi] (optional),
//  "losses":[k1][k2][n][2] numbers, "masks":[k1][k2][n] 0/1}

inline nlohmann::json tensor_to_json(const SupersampleLossTensor& t) {
  nlohmann::json j;
  j["version"] = 1;
  j["n"] = t.n;
  j["k1"] = t.k1;
  j["k2"] = t.k2;
  j["loss_kind"] = to_string(t.loss_kind);
  if (t.loss_range) j["loss_range"] = {t.loss_range->first, t.loss_range->second};
  nlohmann::json losses = nlohmann::json::array();
  for (int d = 0; d < t.k1; ++d) {
    nlohmann::json per_draw = nlohmann::json::array();
    for (int m = 0; m < t.k2; ++m) {
      nlohmann::json per_mask = nlohmann::json::array();
      for (int i = 0; i < t.n; ++i) {
        per_mask.push_back({t.loss(d, m, i, 0), t.loss(d, m, i, 1)});
      }
      per_draw.push_back(std::move(per_mask));
    }
    losses.push_back(std::move(per_draw));
  }
  j["losses"] = std::move(losses);
  nlohmann::json masks = nlohmann::json::array();
  for (int d = 0; d < t.k1; ++d) {
    nlohmann::json per_draw = nlohmann::json::array();
    for (int m = 0; m < t.k2; ++m) {
      nlohmann::json per_mask = nlohmann::json::array();
      for (int i = 0; i < t.n; ++i) per_mask.push_back(static_cast<int>(t.mask(d, m, i)));
      per_draw.push_back(std::move(per_mask));
    }
    masks.push_back(std::move(per_draw));
  }
  j["masks"] = std::move(masks);
  return j;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string(name) + ": missing required field");
  return *it;
}

inline int require_positive_int(const nlohmann::json& j, const char* name) {
  const nlohmann::json& v = require_field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string(name) + ": expected a positive integer");
  }
  return v.get<int>();
}

/// Checks that `arr` is an array of length `len`; `path` names the field.
inline void require_array(const nlohmann::json& arr, std::size_t len, const std::string& path) {
  if (!arr.is_array()) throw ValidationError(path + ": expected an array");
  if (arr.size() != len) {
    throw ValidationError(path + ": expected length " + std::to_string(len) + ", got " + std::to_string(arr.size()));
  }
}

}  // namespace detail

inline SupersampleLossTensor tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("tensor: expected a JSON object");
  const nlohmann::json& version = detail::require_field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ValidationError("version: expected 1");
  }
  SupersampleLossTensor t;
  t.n = detail::require_positive_int(j, "n");
  t.k1 = detail::require_positive_int(j, "k1");
  t.k2 = detail::require_positive_int(j, "k2");
  const nlohmann::json& kind = detail::require_field(j, "loss_kind");
  if (!kind.is_string()) throw ValidationError("loss_kind: expected a string");
  t.loss_kind = loss_kind_from_string(kind.get<std::string>());
  if (auto it = j.find("loss_range"); it != j.end()) {
    detail::require_array(*it, 2, "loss_range");
    if (!(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw ValidationError("loss_range: expected two numbers");
    }
    t.loss_range = std::make_pair((*it)[0].get<double>(), (*it)[1].get<double>());
  }

  const nlohmann::json& losses = detail::require_field(j, "losses");
  detail::require_array(losses, t.k1, "losses");
  t.losses.reserve(static_cast<std::size_t>(t.k1) * t.k2 * t.n * 2);
  for (int d = 0; d < t.k1; ++d) {
    const std::string dpath = "losses[" + std::to_string(d) + "]";
    detail::require_array(losses[d], t.k2, dpath);
    for (int m = 0; m < t.k2; ++m) {
      const std::string mpath = dpath + "[" + std::to_string(m) + "]";
      detail::require_array(losses[d][m], t.n, mpath);
      for (int i = 0; i < t.n; ++i) {
        const std::string ipath = mpath + "[" + std::to_string(i) + "]";
        detail::require_array(losses[d][m][i], 2, ipath);
        for (int col = 0; col < 2; ++col) {
          const nlohmann::json& v = losses[d][m][i][col];
          if (!v.is_number()) throw ValidationError(ipath + "[" + std::to_string(col) + "]: expected a number");
          t.losses.push_back(v.get<double>());
        }
      }
    }
  }

  const nlohmann::json& masks = detail::require_field(j, "masks");
  detail::require_array(masks, t.k1, "masks");
  t.masks.reserve(static_cast<std::size_t>(t.k1) * t.k2 * t.n);
  for (int d = 0; d < t.k1; ++d) {
    const std::string dpath = "masks[" + std::to_string(d) + "]";
    detail::require_array(masks[d], t.k2, dpath);
    for (int m = 0; m < t.k2; ++m) {
      const std::string mpath = dpath + "[" + std::to_string(m) + "]";
      detail::require_array(masks[d][m], t.n, mpath);
      for (int i = 0; i < t.n; ++i) {
        const nlohmann::json& v = masks[d][m][i];
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          throw ValidationError(mpath + "[" + std::to_string(i) + "]: expected mask bit 0 or 1");
        }
        t.masks.push_back(static_cast<std::uint8_t>(v.get<int>()));
      }
    }
  }

  t.validate();
  return t;
}

inline SupersampleLossTensor load_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return tensor_from_json(j);
}

inline void save_tensor(const std::string& path, const SupersampleLossTensor& t) {
  t.validate();
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << tensor_to_json(t).dump(2) << "\n";
}

// =============================================================================
// Loss differences and signed differences
// =============================================================================

/// dL = L_1 - L_0 and G = (-1)^U dL per (draw, mask, row) cell, stored flat in
/// the same [k1][k2][n] layout as the tensor's masks.
struct DeltaG {
  int k1 = 0, k2 = 0, n = 0;
  std::vector<double> delta;  ///< flat [k1][k2][n]
  std::vector<double> g;      ///< flat [k1][k2][n]

  std::size_t index(int d, int m, int i) const {
    return (static_cast<std::size_t>(d) * k2 + m) * n + i;
  }
};

/// G is the testing loss minus the training loss: mask u marks column u as
/// the training column, so G = L_{1-u} - L_u = (-1)^u (L_1 - L_0).
inline DeltaG delta_and_g(const SupersampleLossTensor& t) {
  t.validate();
  DeltaG out;
  out.k1 = t.k1;
  out.k2 = t.k2;
  out.n = t.n;
  const std::size_t cells = t.replicate_count() * t.n;
  out.delta.resize(cells);
  out.g.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double dl = t.losses[2 * c + 1] - t.losses[2 * c];
    out.delta[c] = dl;
    out.g[c] = t.masks[c] ? -dl : dl;
  }
  return out;
}

// =============================================================================
// Empirical generalization error
// =============================================================================

struct GenErrorEstimate {
  double mean = 0.0;
  double std_err = 0.0;  ///< sample sd of replicate averages / sqrt(k1 k2)
};

/// Averages (1/n) sum_i G_i per (draw, mask) replicate, then reports the mean
/// and standard error over the k1*k2 replicates.  Rows within one replicate
/// share a trained model, so the replicate averages are the exchangeable unit.
inline GenErrorEstimate empirical_gen_error(const SupersampleLossTensor& t) {
  const DeltaG dg = delta_and_g(t);
  const std::size_t reps = t.replicate_count();
  std::vector<double> rep_means(reps, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    double sum = 0.0;
    for (int i = 0; i < t.n; ++i) sum += dg.g[r * t.n + i];
    rep_means[r] = sum / t.n;
  }
  GenErrorEstimate out;
  for (double v : rep_means) out.mean += v;
  out.mean /= static_cast<double>(reps);
  if (reps > 1) {
    double ss = 0.0;
    for (double v : rep_means) ss += (v - out.mean) * (v - out.mean);
    out.std_err = std::sqrt(ss / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps));
  }
  return out;
}

// =============================================================================
// f-information estimation
// =============================================================================

enum class EstimationMode { pooled, disintegrated };

inline std::string to_string(EstimationMode mode) {
  return mode == EstimationMode::pooled ? "pooled" : "disintegrated";
}

/// Plug-in f-information estimates: one value per row (pooled) or per
/// (draw, row) cell flattened as draw*n + row (disintegrated).
struct FInformationEstimate {
  DivergenceKind kind = DivergenceKind::kl();
  EstimationMode mode = EstimationMode::pooled;
  std::vector<double> values;
  std::vector<int> sample_counts;  ///< k1*k2 (pooled) or k2 (disintegrated)
  Quantizer quantizer = Quantizer::exact_zero_one();
  std::vector<std::string> warnings;
};

namespace detail {

/// Tracks strata that fall below the warning threshold and condenses them
/// into a single warning string instead of one line per cell.
struct SmallStratumLog {
  static constexpr int kWarnThreshold = 10;
  int count = 0;
  std::string first;

  void note(const std::string& where, int u, std::size_t size) {
    if (size >= kWarnThreshold) return;
    if (count == 0) {
      first = where + ": stratum u=" + std::to_string(u) + " has " + std::to_string(size) + " samples";
    }
    ++count;
  }
  void flush(std::vector<std::string>& warnings) const {
    if (count == 0) return;
    std::string msg = std::to_string(count) + " stratum(s) below " + std::to_string(kWarnThreshold) +
                      " samples (first: " + first + "); estimates may be noisy";
    warnings.push_back(std::move(msg));
  }
};

/// Builds the plug-in joint for one pooled row or one disintegrated cell.
/// `draw` < 0 selects pooled mode (all draws contribute).  Throws
/// NumericalError naming the cell when a stratum is empty.
inline JointLossMaskDistribution build_joint(const SupersampleLossTensor& t, const DeltaG& dg, int draw,
                                             int row, const Quantizer& quantizer, SmallStratumLog& log) {
  std::vector<double> stratum0, stratum1;
  const int d_lo = draw < 0 ? 0 : draw;
  const int d_hi = draw < 0 ? t.k1 : draw + 1;
  for (int d = d_lo; d < d_hi; ++d) {
    for (int m = 0; m < t.k2; ++m) {
      const std::size_t c = dg.index(d, m, row);
      (t.masks[c] ? stratum1 : stratum0).push_back(dg.delta[c]);
    }
  }
  const std::string where = draw < 0 ? "pooled row " + std::to_string(row)
                                     : "cell (draw " + std::to_string(draw) + ", row " + std::to_string(row) + ")";
  for (int u = 0; u < 2; ++u) {
    const std::size_t size = (u == 0 ? stratum0 : stratum1).size();
    if (size == 0) {
      throw NumericalError(where + ": stratum u=" + std::to_string(u) +
                           " is empty; the conditional law cannot be estimated");
    }
    log.note(where, u, size);
  }
  return joint_from_stratified_samples(stratum0, stratum1, quantizer, /*exact_uniform=*/true);
}

}  // namespace detail

inline FInformationEstimate estimate_f_information(const SupersampleLossTensor& t, const DivergenceKind& kind,
                                                   EstimationMode mode, const Quantizer& quantizer) {
  const DeltaG dg = delta_and_g(t);
  FInformationEstimate out;
  out.kind = kind;
  out.mode = mode;
  out.quantizer = quantizer;
  detail::SmallStratumLog log;
  if (mode == EstimationMode::pooled) {
    out.values.reserve(t.n);
    for (int i = 0; i < t.n; ++i) {
      const JointLossMaskDistribution joint = detail::build_joint(t, dg, -1, i, quantizer, log);
      out.values.push_back(f_information(joint, kind));
    }
    out.sample_counts.assign(t.n, t.k1 * t.k2);
  } else {
    out.values.reserve(static_cast<std::size_t>(t.k1) * t.n);
    for (int d = 0; d < t.k1; ++d) {
      for (int i = 0; i < t.n; ++i) {
        const JointLossMaskDistribution joint = detail::build_joint(t, dg, d, i, quantizer, log);
        out.values.push_back(f_information(joint, kind));
      }
    }
    out.sample_counts.assign(static_cast<std::size_t>(t.k1) * t.n, t.k2);
  }
  log.flush(out.warnings);
  return out;
}

inline nlohmann::json to_json(const FInformationEstimate& e) {
  nlohmann::json j;
  j["kind"] = to_string(e.kind);
  j["mode"] = to_string(e.mode);
  j["values"] = e.values;
  j["sample_counts"] = e.sample_counts;
  j["warnings"] = e.warnings;
  return j;
}

// =============================================================================
// Statistics
// =============================================================================

/// Key for the statistics finfo map: which divergence, estimated how.
struct FinfoKey {
  DivergenceKind kind;
  EstimationMode mode = EstimationMode::pooled;

  friend bool operator<(const FinfoKey& a, const FinfoKey& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return static_cast<int>(a.mode) < static_cast<int>(b.mode);
  }
  friend bool operator==(const FinfoKey& a, const FinfoKey& b) = default;
};

/// Which moments and f-information estimates compute_statistics produces.
/// tv_term and the pooled moments are always computed; disintegrated cell
/// joints (and cell_tv_term) are built only when disintegrated_kinds is
/// non-empty, since building them fails on tensors with an empty cell
/// stratum.
struct StatisticsConfig {
  std::vector<double> c_grid;  ///< truncation levels for tail/truncated moments
  std::vector<double> p_list;  ///< Lp norm orders; kInf selects max |dL|
  Quantizer quantizer = Quantizer::exact_zero_one();
  std::vector<DivergenceKind> pooled_kinds = {DivergenceKind::kl()};
  std::vector<DivergenceKind> disintegrated_kinds = {DivergenceKind::kl()};
};

/// Plug-in moments and f-information estimates of a loss tensor.
///
/// Pooled fields are per row (length n) over all k1*k2 samples of that row;
/// cell_* fields are per (draw, row) flattened as draw*n + row over the k2
/// samples of that cell.  tv_term is the total-variation affinity term
/// E_U[ sum_v |P(dL=v|U) - P(dL=v)| ] in the dual (unhalved) convention the
/// bound derivations use; it equals the phi_1-information of the same
/// estimated joint, twice the halved total-variation information.
struct SupersampleStatistics {
  int n = 0, k1 = 0, k2 = 0;
  LossKind loss_kind = LossKind::bounded_unit;
  std::optional<std::pair<double, double>> loss_range;  ///< echoed from the tensor

  // pooled per-row moments
  std::vector<double> e_g;         ///< E[G]
  std::vector<double> e_dl2;       ///< E[dL^2]
  std::vector<double> var_lplus;   ///< Var(L_{i,0}), the single-loss variance
  std::vector<double> tv_term;     ///< E_U[TV] in the unhalved convention
  std::vector<double> min_g;       ///< min over samples of G (realizable check)
  std::vector<double> max_abs_dl;  ///< max over samples of |dL|
  double global_max_abs_dl = 0.0;

  // pooled per-row maps keyed by order / truncation level
  std::map<double, std::vector<double>> lp_norms;   ///< p -> ||dL||_p per row
  std::map<double, std::vector<double>> tail_prob;  ///< C -> P(|dL| > C) per row
  std::map<double, std::vector<double>> trunc_dl2;  ///< C -> E[dL^2 1{|dL|<=C}] per row
  std::map<double, std::vector<double>> trunc_g;    ///< C -> E[G 1{|dL|<=C}] per row

  // disintegrated per-cell moments, flattened draw*n + row
  std::vector<double> cell_e_g;
  std::vector<double> cell_e_dl2;
  std::vector<double> cell_tv_term;

  std::map<FinfoKey, FInformationEstimate> finfo;
  std::vector<std::string> warnings;

  const FInformationEstimate& finfo_at(const DivergenceKind& kind, EstimationMode mode) const {
    auto it = finfo.find(FinfoKey{kind, mode});
    if (it == finfo.end()) {
      throw std::out_of_range("finfo: no estimate for (" + to_string(kind) + ", " + to_string(mode) + ")");
    }
    return it->second;
  }
  bool has_finfo(const DivergenceKind& kind, EstimationMode mode) const {
    return finfo.count(FinfoKey{kind, mode}) > 0;
  }
};

inline SupersampleStatistics compute_statistics(const SupersampleLossTensor& t, const StatisticsConfig& config) {
  const DeltaG dg = delta_and_g(t);
  const std::size_t reps = t.replicate_count();

  SupersampleStatistics s;
  s.n = t.n;
  s.k1 = t.k1;
  s.k2 = t.k2;
  s.loss_kind = t.loss_kind;
  s.loss_range = t.loss_range;
  s.e_g.assign(t.n, 0.0);
  s.e_dl2.assign(t.n, 0.0);
  s.var_lplus.assign(t.n, 0.0);
  s.min_g.assign(t.n, kInf);
  s.max_abs_dl.assign(t.n, 0.0);
  for (double p : config.p_list) s.lp_norms[p].assign(t.n, 0.0);
  for (double c : config.c_grid) {
    s.tail_prob[c].assign(t.n, 0.0);
    s.trunc_dl2[c].assign(t.n, 0.0);
    s.trunc_g[c].assign(t.n, 0.0);
  }

  // Pooled per-row moments; all loops ascend in (draw, mask) order.
  for (int i = 0; i < t.n; ++i) {
    double sum_g = 0.0, sum_dl2 = 0.0, sum_l0 = 0.0, sum_l0_sq = 0.0;
    for (int d = 0; d < t.k1; ++d) {
      for (int m = 0; m < t.k2; ++m) {
        const std::size_t c = dg.index(d, m, i);
        const double dl = dg.delta[c];
        const double g = dg.g[c];
        const double l0 = t.losses[2 * c];
        sum_g += g;
        sum_dl2 += dl * dl;
        sum_l0 += l0;
        sum_l0_sq += l0 * l0;
        s.min_g[i] = std::min(s.min_g[i], g);
        s.max_abs_dl[i] = std::max(s.max_abs_dl[i], std::abs(dl));
        for (double p : config.p_list) {
          if (p != kInf) s.lp_norms[p][i] += std::pow(std::abs(dl), p);
        }
        for (double cgrid : config.c_grid) {
          if (std::abs(dl) > cgrid) {
            s.tail_prob[cgrid][i] += 1.0;
          } else {
            s.trunc_dl2[cgrid][i] += dl * dl;
            s.trunc_g[cgrid][i] += g;
          }
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(reps);
    s.e_g[i] = sum_g * inv;
    s.e_dl2[i] = sum_dl2 * inv;
    const double mean_l0 = sum_l0 * inv;
    // plug-in (population) variance; clamp tiny negative rounding to 0
    s.var_lplus[i] = std::max(0.0, sum_l0_sq * inv - mean_l0 * mean_l0);
    s.global_max_abs_dl = std::max(s.global_max_abs_dl, s.max_abs_dl[i]);
    for (double p : config.p_list) {
      if (p == kInf) {
        s.lp_norms[p][i] = s.max_abs_dl[i];
      } else {
        s.lp_norms[p][i] = std::pow(s.lp_norms[p][i] * inv, 1.0 / p);
      }
    }
    for (double cgrid : config.c_grid) {
      s.tail_prob[cgrid][i] *= inv;
      s.trunc_dl2[cgrid][i] *= inv;
      s.trunc_g[cgrid][i] *= inv;
    }
  }

  // Per-cell moments over the k2 samples of each (draw, row).
  s.cell_e_g.assign(static_cast<std::size_t>(t.k1) * t.n, 0.0);
  s.cell_e_dl2.assign(static_cast<std::size_t>(t.k1) * t.n, 0.0);
  for (int d = 0; d < t.k1; ++d) {
    for (int i = 0; i < t.n; ++i) {
      double sum_g = 0.0, sum_dl2 = 0.0;
      for (int m = 0; m < t.k2; ++m) {
        const std::size_t c = dg.index(d, m, i);
        sum_g += dg.g[c];
        sum_dl2 += dg.delta[c] * dg.delta[c];
      }
      s.cell_e_g[static_cast<std::size_t>(d) * t.n + i] = sum_g / t.k2;
      s.cell_e_dl2[static_cast<std::size_t>(d) * t.n + i] = sum_dl2 / t.k2;
    }
  }

  // Pooled joints: tv_term always, plus every requested pooled kind from the
  // same joint, as the bound derivations require.
  detail::SmallStratumLog log;
  const DivergenceKind phi1 = DivergenceKind::phi_alpha(1.0);
  s.tv_term.assign(t.n, 0.0);
  for (const DivergenceKind& kind : config.pooled_kinds) {
    FInformationEstimate est;
    est.kind = kind;
    est.mode = EstimationMode::pooled;
    est.quantizer = config.quantizer;
    est.sample_counts.assign(t.n, t.k1 * t.k2);
    est.values.assign(t.n, 0.0);
    s.finfo.emplace(FinfoKey{kind, EstimationMode::pooled}, std::move(est));
  }
  for (int i = 0; i < t.n; ++i) {
    const JointLossMaskDistribution joint = detail::build_joint(t, dg, -1, i, config.quantizer, log);
    s.tv_term[i] = f_information(joint, phi1);
    for (const DivergenceKind& kind : config.pooled_kinds) {
      s.finfo.at(FinfoKey{kind, EstimationMode::pooled}).values[i] = f_information(joint, kind);
    }
  }

  if (!config.disintegrated_kinds.empty()) {
    const std::size_t cells = static_cast<std::size_t>(t.k1) * t.n;
    s.cell_tv_term.assign(cells, 0.0);
    for (const DivergenceKind& kind : config.disintegrated_kinds) {
      FInformationEstimate est;
      est.kind = kind;
      est.mode = EstimationMode::disintegrated;
      est.quantizer = config.quantizer;
      est.sample_counts.assign(cells, t.k2);
      est.values.assign(cells, 0.0);
      s.finfo.emplace(FinfoKey{kind, EstimationMode::disintegrated}, std::move(est));
    }
    for (int d = 0; d < t.k1; ++d) {
      for (int i = 0; i < t.n; ++i) {
        const JointLossMaskDistribution joint = detail::build_joint(t, dg, d, i, config.quantizer, log);
        const std::size_t c = static_cast<std::size_t>(d) * t.n + i;
        s.cell_tv_term[c] = f_information(joint, phi1);
        for (const DivergenceKind& kind : config.disintegrated_kinds) {
          s.finfo.at(FinfoKey{kind, EstimationMode::disintegrated}).values[c] = f_information(joint, kind);
        }
      }
    }
  }
  log.flush(s.warnings);
  return s;
}

}  // namespace fgen
