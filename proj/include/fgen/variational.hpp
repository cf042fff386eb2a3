/**
 * variational.hpp — Variational lower bounds on f-information by
 * one-dimensional concave maximization, the polynomial inequality
 * predicates used in the proofs, and the coin-betting log-wealth.
 *
 * The objective sup_t E[phi*^{-1}(t (-1)^U dl)] never exceeds I_phi of the
 * same joint; the optimizer is a 2049-point coarse grid plus golden-section
 * refinement, which is derivative-free and robust when the supremum sits at
 * a clamped endpoint of the admissible t-interval.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "fgen/divergence.hpp"

namespace fgen {

struct VariationalResult {
    double value = 0.0;     // nats; <= I_phi(joint) always
    double argmax_t = 0.0;  // inside the clamped admissible interval
    int evaluations = 0;    // objective evaluations spent
    double clamp_epsilon = 0.0;
};

namespace detail {

inline constexpr double kClampEpsilon = 1e-9;
inline constexpr int kCoarseGridPoints = 2049;
inline constexpr double kRefineWidth = 1e-12;

/** Largest admissible |t| * B per kind; open endpoints retreat by epsilon. */
inline double t_range_limit(const DivergenceKind& kind) {
    switch (kind.tag) {
        case Divergence::kl: return 1.0 - kClampEpsilon;                 // z in (-1, inf)
        case Divergence::chi2: return 1.0;                               // z in [-1, inf)
        case Divergence::squared_hellinger: return 1.0 - kClampEpsilon;  // z in (-1, inf)
        case Divergence::jensen_shannon: return kLn2 - kClampEpsilon;    // z in (-ln2, inf)
        default: break;
    }
    throw std::invalid_argument("no conjugate pair for " + to_string(kind));
}

/** Golden-section maximization of a unimodal f over [lo, hi]. */
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double width, double& best_x, int& evaluations) {
    constexpr double inv_phi = 0.6180339887498948482;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    evaluations += 2;
    while (hi - lo > width) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        ++evaluations;
    }
    best_x = 0.5 * (lo + hi);
    ++evaluations;
    return f(best_x);
}

inline VariationalResult maximize_objective(const JointLossMaskDistribution& joint,
                                            const DivergenceKind& kind, double b) {
    VariationalResult result;
    result.clamp_epsilon = kClampEpsilon;
    if (b == 0.0) return result; // objective identically phi*^{-1}(0) = 0

    const auto pair = conjugate_pair(kind);
    const bool closed_domain = pair.z_lo_closed;
    const double z_lo = pair.z_lo;
    // Atoms with |support| <= b only; callers pass b = max |dl| on the
    // included atoms, so t * dl stays inside the inverse domain.
    auto objective = [&](double t) {
        double total = 0.0;
        for (std::size_t v = 0; v < joint.size(); ++v) {
            double dl = joint.support[v];
            if (std::abs(dl) > b) continue;
            for (int u = 0; u < 2; ++u) {
                double p = joint.probs[u][v];
                if (p == 0.0) continue;
                double z = (u == 0 ? t : -t) * dl;
                // Closed-endpoint kinds may land one ulp below z_lo.
                if (closed_domain && z < z_lo) z = z_lo;
                total += p * pair.inverse(z);
            }
        }
        return total;
    };

    const double t_max = t_range_limit(kind) / b;
    const int points = kCoarseGridPoints;
    double best_val = -kInf;
    int best_i = 0;
    for (int i = 0; i < points; ++i) {
        double t = -t_max + 2.0 * t_max * i / (points - 1);
        double val = objective(t);
        ++result.evaluations;
        if (val > best_val) {
            best_val = val;
            best_i = i;
        }
    }
    double step = 2.0 * t_max / (points - 1);
    double lo = std::max(-t_max, -t_max + (best_i - 1) * step);
    double hi = std::min(t_max, -t_max + (best_i + 1) * step);
    double refined_t = 0.0;
    double refined = golden_section_max(objective, lo, hi, kRefineWidth, refined_t,
                                        result.evaluations);
    if (refined >= best_val) {
        result.value = refined;
        result.argmax_t = refined_t;
    } else {
        result.value = best_val;
        result.argmax_t = -t_max + best_i * step;
    }
    return result;
}

} // namespace detail

/**
 * sup_t E[phi*^{-1}(t (-1)^U dl)] over the admissible t-interval
 * |t| * max|dl| <= t_range_limit(kind). A lower bound on I_phi(joint).
 */
inline VariationalResult variational_lower_bound(const JointLossMaskDistribution& joint,
                                                 const DivergenceKind& kind) {
    joint.validate();
    double b = joint.max_abs_dl();
    if (!std::isfinite(b)) throw std::invalid_argument("support must be finite");
    return detail::maximize_objective(joint, kind, b);
}

/**
 * Truncated variant: the objective keeps only atoms with |dl| <= c (the
 * excluded ones contribute phi*^{-1}(0) = 0) and the admissible interval
 * uses the truncated radius max{|dl| : |dl| <= c}. Still <= I_phi(joint).
 */
inline VariationalResult truncated_lower_bound(const JointLossMaskDistribution& joint,
                                               const DivergenceKind& kind, double c) {
    joint.validate();
    if (!(c >= 0.0)) throw std::invalid_argument("truncation level c must be >= 0");
    double b = 0.0;
    for (double v : joint.support)
        if (std::abs(v) <= c) b = std::max(b, std::abs(v));
    return detail::maximize_objective(joint, kind, b);
}

// =========================================================================
// Inequality predicates
// =========================================================================

enum class InequalityId { kl_poly, sh_poly, js_poly, log2_linear, coin_poly };

/**
 * Scalar inequalities the bound proofs rest on, as testable predicates:
 *
 *   kl_poly:     ln(1+x)      >= x - a x^2   a >= 1/2, x in [1/(2a)-1, 1-1/(2a)]
 *   sh_poly:     x/(1+x)      >= x - a x^2   a >= 1,   x in [1/a-1, 1-1/a]
 *   js_poly:     ln(2-e^{-x}) >= x - a x^2   a >= 4,   x in [-1/2, 1/2]
 *   log2_linear: ln(1+x)      >= x ln 2                x in [0, 1]
 *   coin_poly:   ln(1+x)      >= x - x^2               x >= -0.68
 *
 * Out-of-domain (a, x) throws std::domain_error; an in-domain false return
 * would mean the inequality itself failed (it never should).
 */
inline bool check_inequality(InequalityId id, double a, double x) {
    constexpr double tol = 1e-12;
    switch (id) {
        case InequalityId::kl_poly: {
            if (!(a >= 0.5)) throw std::domain_error("kl_poly requires a >= 1/2");
            double r = 0.5 / a;
            if (!(x >= r - 1.0 && x <= 1.0 - r))
                throw std::domain_error("kl_poly requires x in [1/(2a)-1, 1-1/(2a)]");
            return std::log1p(x) >= x - a * x * x - tol;
        }
        case InequalityId::sh_poly: {
            if (!(a >= 1.0)) throw std::domain_error("sh_poly requires a >= 1");
            double r = 1.0 / a;
            if (!(x >= r - 1.0 && x <= 1.0 - r))
                throw std::domain_error("sh_poly requires x in [1/a-1, 1-1/a]");
            return x / (1.0 + x) >= x - a * x * x - tol;
        }
        case InequalityId::js_poly: {
            if (!(a >= 4.0)) throw std::domain_error("js_poly requires a >= 4");
            if (!(x >= -0.5 && x <= 0.5))
                throw std::domain_error("js_poly requires x in [-1/2, 1/2]");
            return std::log(2.0 - std::exp(-x)) >= x - a * x * x - tol;
        }
        case InequalityId::log2_linear: {
            if (!(x >= 0.0 && x <= 1.0))
                throw std::domain_error("log2_linear requires x in [0, 1]");
            return std::log1p(x) >= x * kLn2 - tol;
        }
        case InequalityId::coin_poly: {
            if (!(x >= -0.68)) throw std::domain_error("coin_poly requires x >= -0.68");
            return std::log1p(x) >= x - x * x - tol;
        }
    }
    throw std::invalid_argument("unknown inequality id");
}

// =========================================================================
// Coin betting
// =========================================================================

/**
 * Log-wealth of the fixed-fraction strategy: sum of ln(1 + t s_i o_i).
 * Outcomes live in [-1, 1], signs in {-1, +1}, the fraction t in [0, 1).
 */
inline double coin_betting_log_wealth(const std::vector<double>& outcomes,
                                      const std::vector<double>& signs, double t) {
    if (outcomes.size() != signs.size())
        throw std::invalid_argument("outcomes and signs must have equal length");
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("fraction t must be in [0, 1)");
    double log_wealth = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!(std::abs(outcomes[i]) <= 1.0))
            throw std::invalid_argument("outcomes must lie in [-1, 1]");
        if (signs[i] != 1.0 && signs[i] != -1.0)
            throw std::invalid_argument("signs must be -1 or +1");
        double factor = 1.0 + t * signs[i] * outcomes[i];
        if (!(factor > 0.0)) throw std::domain_error("wealth factor <= 0");
        log_wealth += std::log(factor);
    }
    return log_wealth;
}

} // namespace fgen
