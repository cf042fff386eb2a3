/**
 * divergence.hpp — Closed-form f-divergences on finite discrete
 * distributions, and the conjugate machinery behind the variational bounds.
 *
 * Conventions, fixed across the library:
 *   - natural logarithms; every information quantity is in nats.
 *   - total_variation = (1/2) sum |p - q|, so phi_alpha(1) = 2 * TV.
 *   - jensen_shannon = KL(p||m) + KL(q||m) with m = (p+q)/2, i.e. the
 *     unhalved sum convention (twice the halved-weights JSD).
 *   - +infinity is a first-class return value, never an exception: callers
 *     branch on it (grid searches skip infinite candidates).
 *
 * The conjugate pairs (phi*, phi*^{-1}) exist for the four kinds used by
 * the variational lower bound: kl, chi2, squared_hellinger, jensen_shannon.
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "fgen/distribution.hpp"

namespace fgen {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.6931471805599453094172321;

enum class Divergence {
    kl,
    chi2,
    squared_hellinger,
    jensen_shannon,
    total_variation,
    jeffreys,
    phi_alpha,
};

/** Divergence selector; alpha is meaningful for phi_alpha only (kept 0 otherwise
 *  so selectors compare as plain pairs). */
struct DivergenceKind {
    Divergence tag = Divergence::kl;
    double alpha = 0.0;

    static DivergenceKind kl() { return {Divergence::kl, 0.0}; }
    static DivergenceKind chi2() { return {Divergence::chi2, 0.0}; }
    static DivergenceKind squared_hellinger() { return {Divergence::squared_hellinger, 0.0}; }
    static DivergenceKind jensen_shannon() { return {Divergence::jensen_shannon, 0.0}; }
    static DivergenceKind total_variation() { return {Divergence::total_variation, 0.0}; }
    static DivergenceKind jeffreys() { return {Divergence::jeffreys, 0.0}; }
    static DivergenceKind phi_alpha(double alpha) {
        if (!(std::isfinite(alpha) && alpha >= 1.0))
            throw std::invalid_argument("phi_alpha requires finite alpha >= 1");
        return {Divergence::phi_alpha, alpha};
    }

    bool operator==(const DivergenceKind&) const = default;
    auto operator<=>(const DivergenceKind&) const = default;
};

inline std::string to_string(const DivergenceKind& kind) {
    switch (kind.tag) {
        case Divergence::kl: return "kl";
        case Divergence::chi2: return "chi2";
        case Divergence::squared_hellinger: return "sh";
        case Divergence::jensen_shannon: return "js";
        case Divergence::total_variation: return "tv";
        case Divergence::jeffreys: return "jeffreys";
        case Divergence::phi_alpha: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "phi_alpha(%g)", kind.alpha);
            return buf;
        }
    }
    return "?";
}

namespace detail {

/** One KL atom p ln(p/q) with the 0 ln 0 = 0 convention. */
inline double kl_atom(double p, double q) {
    if (p == 0.0) return 0.0;
    if (q == 0.0) return kInf;
    return p * std::log(p / q);
}

/**
 * D_phi between two mass vectors on a shared index set. The core of both
 * divergence() and f_information(); masses need not be sorted, only aligned.
 */
inline double divergence_masses(const std::vector<double>& p, const std::vector<double>& q,
                                const DivergenceKind& kind) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i], qi = q[i];
        double term = 0.0;
        switch (kind.tag) {
            case Divergence::kl:
                term = kl_atom(pi, qi);
                break;
            case Divergence::chi2:
                if (qi == 0.0)
                    term = (pi == 0.0) ? 0.0 : kInf;
                else
                    term = (pi - qi) * (pi - qi) / qi;
                break;
            case Divergence::squared_hellinger: {
                double s = std::sqrt(pi) - std::sqrt(qi);
                term = s * s;
                break;
            }
            case Divergence::jensen_shannon: {
                double m = 0.5 * (pi + qi);
                term = kl_atom(pi, m) + kl_atom(qi, m); // finite: m = 0 only if p = q = 0
                break;
            }
            case Divergence::total_variation:
                term = 0.5 * std::abs(pi - qi);
                break;
            case Divergence::jeffreys:
                term = kl_atom(pi, qi) + kl_atom(qi, pi);
                break;
            case Divergence::phi_alpha:
                if (qi == 0.0) {
                    // q -> 0 limit of q |p/q - 1|^alpha: p at alpha = 1, diverges above.
                    term = (pi == 0.0) ? 0.0 : (kind.alpha == 1.0 ? pi : kInf);
                } else {
                    term = qi * std::pow(std::abs(pi / qi - 1.0), kind.alpha);
                }
                break;
        }
        if (term == kInf) return kInf;
        total += term;
    }
    // D_phi >= 0 is a theorem; near-identical inputs can leave a tiny
    // negative rounding residue that would poison downstream square roots
    return total < 0.0 ? 0.0 : total;
}

/**
 * Align two distributions on the union of their supports. Shared atoms must
 * be bitwise-equal doubles, which holds for values produced by the same
 * quantizer.
 */
inline void merge_support(const DiscreteDistribution& p, const DiscreteDistribution& q,
                          std::vector<double>& support, std::vector<double>& pm,
                          std::vector<double>& qm) {
    support.clear();
    pm.clear();
    qm.clear();
    std::size_t i = 0, j = 0;
    while (i < p.size() || j < q.size()) {
        if (j >= q.size() || (i < p.size() && p.support[i] < q.support[j])) {
            support.push_back(p.support[i]);
            pm.push_back(p.probs[i]);
            qm.push_back(0.0);
            ++i;
        } else if (i >= p.size() || q.support[j] < p.support[i]) {
            support.push_back(q.support[j]);
            pm.push_back(0.0);
            qm.push_back(q.probs[j]);
            ++j;
        } else {
            support.push_back(p.support[i]);
            pm.push_back(p.probs[i]);
            qm.push_back(q.probs[j]);
            ++i;
            ++j;
        }
    }
}

} // namespace detail

/** D_phi(p || q); +inf when p charges an atom q does not (kl, chi2, jeffreys,
 *  phi_alpha above 1). */
inline double divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                         const DivergenceKind& kind) {
    p.validate();
    q.validate();
    std::vector<double> support, pm, qm;
    detail::merge_support(p, q, support, pm, qm);
    return detail::divergence_masses(pm, qm, kind);
}

/**
 * f-information of a (loss difference, mask) joint: D_phi between the joint
 * and the product of its marginals, over the 2m cells.
 */
inline double f_information(const JointLossMaskDistribution& joint, const DivergenceKind& kind) {
    const auto um = joint.u_marginal();
    const auto dl = joint.dl_marginal();
    std::vector<double> p, q;
    p.reserve(2 * joint.size());
    q.reserve(2 * joint.size());
    for (int u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < joint.size(); ++v) {
            p.push_back(joint.probs[u][v]);
            q.push_back(um[u] * dl.probs[v]);
        }
    return detail::divergence_masses(p, q, kind);
}

/**
 * The TV dual form evaluated at its maximizer f* = sign(p - q): returns
 * (1/2) |E_p[f*] - E_q[f*]|, which equals total variation exactly.
 */
inline double tv_dual_check(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    p.validate();
    q.validate();
    std::vector<double> support, pm, qm;
    detail::merge_support(p, q, support, pm, qm);
    double gap = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        double s = (pm[i] > qm[i]) ? 1.0 : (pm[i] < qm[i] ? -1.0 : 0.0);
        gap += s * (pm[i] - qm[i]);
    }
    return 0.5 * std::abs(gap);
}

// =========================================================================
// Conjugate pairs
// =========================================================================

/**
 * (phi*, phi*^{-1}) for the four variational kinds, with the inverse's
 * admissible z-interval. phi*^{-1}(0) = 0 for all four, which is what makes
 * the truncated objective well-defined (excluded atoms contribute zero).
 *
 *   kl:  phi*(y) = e^y - 1            phi*^{-1}(z) = ln(1+z)        z in (-1, inf)
 *   chi2: phi*(y) = y^2/4 + y (y>=-2)  phi*^{-1}(z) = 2(sqrt(z+1)-1) z in [-1, inf)
 *   sh:  phi*(y) = y/(1-y)   (y<1)    phi*^{-1}(z) = z/(1+z)        z in (-1, inf)
 *   js:  phi*(y) = -ln(2-e^y) (y<ln2) phi*^{-1}(z) = ln(2-e^{-z})   z in (-ln2, inf)
 */
struct ConjugatePair {
    Divergence tag;
    double z_lo;       // lower endpoint of the inverse domain
    bool z_lo_closed;  // whether z_lo itself is admissible

    double star(double y) const {
        switch (tag) {
            case Divergence::kl: return std::expm1(y);
            case Divergence::chi2:
                if (y < -2.0) throw std::domain_error("chi2 phi* restricted to y >= -2");
                return 0.25 * y * y + y;
            case Divergence::squared_hellinger:
                if (y >= 1.0) throw std::domain_error("squared_hellinger phi* requires y < 1");
                return y / (1.0 - y);
            case Divergence::jensen_shannon:
                if (y >= kLn2) throw std::domain_error("jensen_shannon phi* requires y < ln 2");
                return -std::log(2.0 - std::exp(y));
            default: break;
        }
        throw std::invalid_argument("kind has no conjugate pair");
    }

    double inverse(double z) const {
        if (z < z_lo || (z == z_lo && !z_lo_closed))
            throw std::domain_error("z outside the inverse domain");
        switch (tag) {
            case Divergence::kl: return std::log1p(z);
            case Divergence::chi2: return 2.0 * (std::sqrt(z + 1.0) - 1.0);
            case Divergence::squared_hellinger: return z / (1.0 + z);
            case Divergence::jensen_shannon: return std::log(2.0 - std::exp(-z));
            default: break;
        }
        throw std::invalid_argument("kind has no conjugate pair");
    }
};

inline ConjugatePair conjugate_pair(const DivergenceKind& kind) {
    switch (kind.tag) {
        case Divergence::kl: return {Divergence::kl, -1.0, false};
        case Divergence::chi2: return {Divergence::chi2, -1.0, true};
        case Divergence::squared_hellinger: return {Divergence::squared_hellinger, -1.0, false};
        case Divergence::jensen_shannon: return {Divergence::jensen_shannon, -kLn2, false};
        default:
            throw std::invalid_argument("no conjugate pair for " + to_string(kind));
    }
}

inline double conjugate_inverse(const DivergenceKind& kind, double z) {
    return conjugate_pair(kind).inverse(z);
}

} // namespace fgen
