/**
 * distribution.hpp — Finite discrete distributions and their estimation.
 *
 * DiscreteDistribution is the atom of all divergence computation: a sorted
 * finite support with probability weights. Continuous-valued loss
 * differences enter through a Quantizer; zero-one losses use the exact
 * {-1, 0, 1} quantizer and incur no quantization error.
 *
 * JointLossMaskDistribution is the joint law of (loss difference, mask bit).
 * When built with the exact-uniform flag the mask marginal is fixed at
 * (1/2, 1/2) rather than estimated: the mask is uniform by construction, so
 * plugging in the known marginal removes estimator bias from the product
 * measure and keeps the joint absolutely continuous w.r.t. it (KL stays
 * finite).
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgen/errors.hpp"

namespace fgen {

inline constexpr double kMassTolerance = 1e-12;

// =========================================================================
// DiscreteDistribution
// =========================================================================

struct DiscreteDistribution {
    std::vector<double> support; // strictly increasing, finite
    std::vector<double> probs;   // nonneg, sums to 1 within kMassTolerance

    std::size_t size() const { return support.size(); }

    /** Throws ValidationError naming the offending field. */
    void validate() const {
        if (support.empty()) throw ValidationError("support: empty");
        if (support.size() != probs.size())
            throw ValidationError("probs: length differs from support");
        double total = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (!std::isfinite(support[i]))
                throw ValidationError("support: non-finite value at index " + std::to_string(i));
            if (i > 0 && !(support[i - 1] < support[i]))
                throw ValidationError("support: not strictly increasing at index " + std::to_string(i));
            if (!(probs[i] >= 0.0))
                throw ValidationError("probs: negative value at index " + std::to_string(i));
            total += probs[i];
        }
        if (std::abs(total - 1.0) > kMassTolerance)
            throw ValidationError("probs: total mass " + std::to_string(total) + " not 1");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * probs[i];
        return m;
    }
};

// =========================================================================
// Quantizer
// =========================================================================

/**
 * Maps real loss differences onto a finite support.
 *
 * exact_zero_one: values must already lie in {-1, 0, 1} (within 1e-12) and
 * are snapped; the identity map for zero-one losses. uniform_bins: values
 * map to the midpoint of their bin over [lo, hi]; out-of-range values fall
 * into the nearest edge bin. Midpoints re-quantize to themselves, so
 * quantization is idempotent.
 */
struct Quantizer {
    enum class Kind { exact_zero_one, uniform_bins };

    Kind kind = Kind::exact_zero_one;
    int bin_count = 0;    // uniform_bins only, >= 2
    double lo = 0.0;      // uniform_bins only, lo < hi
    double hi = 0.0;

    static Quantizer exact_zero_one() { return Quantizer{}; }

    static Quantizer uniform_bins(int bins, double lo, double hi) {
        if (bins < 2) throw ValidationError("bin_count: must be >= 2");
        if (!(lo < hi)) throw ValidationError("range: lo must be < hi");
        return Quantizer{Kind::uniform_bins, bins, lo, hi};
    }

    double apply(double v) const {
        if (!std::isfinite(v)) throw ValidationError("values: non-finite value");
        if (kind == Kind::exact_zero_one) {
            for (double atom : {-1.0, 0.0, 1.0})
                if (std::abs(v - atom) <= 1e-12) return atom;
            throw ValidationError("values: " + std::to_string(v) +
                                  " not in {-1, 0, 1} under exact_zero_one");
        }
        double width = (hi - lo) / bin_count;
        int bin = static_cast<int>(std::floor((v - lo) / width));
        bin = std::clamp(bin, 0, bin_count - 1);
        return lo + (bin + 0.5) * width;
    }
};

// =========================================================================
// Estimation
// =========================================================================

/** Plug-in empirical distribution of quantized values. */
inline DiscreteDistribution from_samples(const std::vector<double>& values,
                                         const Quantizer& quantizer) {
    if (values.empty()) throw ValidationError("values: empty");
    std::map<double, double> mass; // sorted support for free
    const double w = 1.0 / static_cast<double>(values.size());
    for (double v : values) mass[quantizer.apply(v)] += w;
    DiscreteDistribution d;
    d.support.reserve(mass.size());
    d.probs.reserve(mass.size());
    for (const auto& [v, p] : mass) {
        d.support.push_back(v);
        d.probs.push_back(p);
    }
    return d;
}

// =========================================================================
// JointLossMaskDistribution
// =========================================================================

/**
 * Joint law of (loss difference, mask). probs[u][v] = P(dl = support[v], U = u).
 * The per-mask sign convention lives downstream: G = (-1)^U * dl.
 */
struct JointLossMaskDistribution {
    std::vector<double> support;
    std::array<std::vector<double>, 2> probs;
    bool exact_uniform = true;

    std::size_t size() const { return support.size(); }

    void validate() const {
        if (support.empty()) throw ValidationError("support: empty");
        std::array<double, 2> stratum_mass = {0.0, 0.0};
        for (int u = 0; u < 2; ++u) {
            if (probs[u].size() != support.size())
                throw ValidationError("probs: stratum " + std::to_string(u) +
                                      " length differs from support");
            for (std::size_t v = 0; v < support.size(); ++v) {
                if (!(probs[u][v] >= 0.0))
                    throw ValidationError("probs: negative entry at [" + std::to_string(u) +
                                          "][" + std::to_string(v) + "]");
                stratum_mass[u] += probs[u][v];
            }
        }
        for (std::size_t v = 1; v < support.size(); ++v)
            if (!(support[v - 1] < support[v]))
                throw ValidationError("support: not strictly increasing at index " + std::to_string(v));
        double total = stratum_mass[0] + stratum_mass[1];
        if (std::abs(total - 1.0) > kMassTolerance)
            throw ValidationError("probs: total mass " + std::to_string(total) + " not 1");
        if (exact_uniform)
            for (int u = 0; u < 2; ++u)
                if (std::abs(stratum_mass[u] - 0.5) > kMassTolerance)
                    throw ValidationError("probs: stratum " + std::to_string(u) +
                                          " mass not 1/2 under exact_uniform");
    }

    std::array<double, 2> u_marginal() const {
        if (exact_uniform) return {0.5, 0.5};
        std::array<double, 2> m = {0.0, 0.0};
        for (int u = 0; u < 2; ++u)
            for (double p : probs[u]) m[u] += p;
        return m;
    }

    DiscreteDistribution dl_marginal() const {
        DiscreteDistribution d;
        d.support = support;
        d.probs.resize(support.size());
        for (std::size_t v = 0; v < support.size(); ++v)
            d.probs[v] = probs[0][v] + probs[1][v];
        return d;
    }

    /** Conditional law of dl given U = u. */
    DiscreteDistribution stratum_conditional(int u) const {
        double m = 0.0;
        for (double p : probs[u]) m += p;
        if (m <= 0.0)
            throw ValidationError("probs: stratum " + std::to_string(u) + " has zero mass");
        DiscreteDistribution d;
        d.support = support;
        d.probs.resize(support.size());
        for (std::size_t v = 0; v < support.size(); ++v) d.probs[v] = probs[u][v] / m;
        return d;
    }

    /** E[G] with G = (-1)^U * dl. */
    double mean_g() const {
        double m = 0.0;
        for (std::size_t v = 0; v < support.size(); ++v)
            m += support[v] * (probs[0][v] - probs[1][v]);
        return m;
    }

    /** E[G^2] = E[dl^2]. */
    double mean_dl2() const {
        double m = 0.0;
        for (std::size_t v = 0; v < support.size(); ++v)
            m += support[v] * support[v] * (probs[0][v] + probs[1][v]);
        return m;
    }

    double max_abs_dl() const {
        double b = 0.0;
        for (double v : support) b = std::max(b, std::abs(v));
        return b;
    }
};

/**
 * Stratified plug-in estimate of the joint from per-mask samples.
 *
 * With exact_uniform (the default), probs[u][v] = 1/2 * freq(v | stratum u);
 * otherwise strata are weighted by their sample counts.
 */
inline JointLossMaskDistribution joint_from_stratified_samples(
    const std::vector<double>& dl_given_u0, const std::vector<double>& dl_given_u1,
    const Quantizer& quantizer, bool exact_uniform = true) {
    if (dl_given_u0.empty()) throw ValidationError("dl_given_u0: empty stratum");
    if (dl_given_u1.empty()) throw ValidationError("dl_given_u1: empty stratum");

    std::array<const std::vector<double>*, 2> strata = {&dl_given_u0, &dl_given_u1};
    std::array<std::map<double, double>, 2> mass;
    const double n0 = static_cast<double>(dl_given_u0.size());
    const double n1 = static_cast<double>(dl_given_u1.size());
    for (int u = 0; u < 2; ++u) {
        double w = exact_uniform ? 0.5 / static_cast<double>(strata[u]->size())
                                 : 1.0 / (n0 + n1);
        for (double v : *strata[u]) mass[u][quantizer.apply(v)] += w;
    }

    std::map<double, std::size_t> index;
    for (int u = 0; u < 2; ++u)
        for (const auto& [v, p] : mass[u]) index.emplace(v, 0);
    JointLossMaskDistribution joint;
    joint.exact_uniform = exact_uniform;
    joint.support.reserve(index.size());
    for (auto& [v, idx] : index) {
        idx = joint.support.size();
        joint.support.push_back(v);
    }
    for (int u = 0; u < 2; ++u) {
        joint.probs[u].assign(joint.support.size(), 0.0);
        for (const auto& [v, p] : mass[u]) joint.probs[u][index[v]] = p;
    }
    return joint;
}

// =========================================================================
// File format
// =========================================================================

inline nlohmann::json to_json(const DiscreteDistribution& d) {
    return nlohmann::json{{"support", d.support}, {"probs", d.probs}};
}

inline DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
    DiscreteDistribution d;
    if (!j.is_object()) throw ValidationError("distribution: not an object");
    if (!j.contains("support") || !j["support"].is_array())
        throw ValidationError("support: missing or not an array");
    if (!j.contains("probs") || !j["probs"].is_array())
        throw ValidationError("probs: missing or not an array");
    for (const auto& v : j["support"]) {
        if (!v.is_number()) throw ValidationError("support: non-numeric entry");
        d.support.push_back(v.get<double>());
    }
    for (const auto& v : j["probs"]) {
        if (!v.is_number()) throw ValidationError("probs: non-numeric entry");
        d.probs.push_back(v.get<double>());
    }
    d.validate();
    return d;
}

inline DiscreteDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("file: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("file: " + path + " is not valid JSON: " + e.what());
    }
    return distribution_from_json(j);
}

inline void save_distribution(const DiscreteDistribution& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("file: cannot open " + path + " for writing");
    out << to_json(d).dump(2) << "\n";
}

} // namespace fgen
