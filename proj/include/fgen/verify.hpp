#pragma once
// =============================================================================
// verify.hpp
//
// Randomized self-verification suites over the divergence, variational, and
// bound machinery.  Each suite draws its own cases from a deterministic
// stream, so a (trials, seed) pair fully determines the outcome, and a
// reported failure names the first offending case precisely enough to replay
// it.
//
// Suites:
//   inequality_lemmas       the scalar inequalities behind the bound proofs,
//                           sampled across their admissible (a, x) domains
//   variational_consistency sup_t objective <= direct f-information, plus the
//                           deterministic-channel KL reach
//   divergence_orderings    pairwise orderings and exact identities between
//                           divergence kinds
//   data_processing         divergences never increase under coarsening
//   proof_invariants        per-joint scalar inequalities on random joints
//   capacity_ceilings       information ceilings on estimated joints
//
// All suites are pure functions of their arguments; run_verification fans a
// single trial count out to every suite.
// =============================================================================

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgen/bounds.hpp"
#include "fgen/distribution.hpp"
#include "fgen/divergence.hpp"
#include "fgen/rng.hpp"
#include "fgen/variational.hpp"

namespace fgen {

// =============================================================================
// Results
// =============================================================================

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure; // empty while clean

  bool passed() const { return failures == 0; }

  void record(bool ok, const std::string& describe_failure) {
    ++checks;
    if (ok) return;
    ++failures;
    if (first_failure.empty()) first_failure = describe_failure;
  }
};

struct VerifyReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;

  bool all_passed() const {
    for (const SuiteResult& s : suites)
      if (!s.passed()) return false;
    return true;
  }
};

namespace detail {

inline constexpr std::uint64_t kStreamInequality = 0x5eedB001;
inline constexpr std::uint64_t kStreamVariational = 0x5eedB002;
inline constexpr std::uint64_t kStreamOrderings = 0x5eedB003;
inline constexpr std::uint64_t kStreamCoarsening = 0x5eedB004;
inline constexpr std::uint64_t kStreamProofInvariants = 0x5eedB005;
inline constexpr std::uint64_t kStreamCapacity = 0x5eedB006;

inline std::string fmt_case(const char* label, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: a=%.17g, x=%.17g", label, a, b);
  return buf;
}

/// m distinct, strictly increasing support points chosen from a fixed tick
/// grid over [-1, 1]; distinctness is structural, not a float accident.
inline std::vector<double> random_support(Rng& rng, std::size_t m) {
  constexpr std::size_t kTicks = 64;
  std::array<std::size_t, kTicks> ticks{};
  for (std::size_t i = 0; i < kTicks; ++i) ticks[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(kTicks - i));
    std::swap(ticks[i], ticks[j]);
  }
  std::vector<double> support(ticks.begin(), ticks.begin() + m);
  std::sort(support.begin(), support.end());
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = -1.0 + 2.0 * static_cast<double>(support[i]) / (kTicks - 1);
  return out;
}

/// Random masses summing to `total`; each entry is zeroed with probability
/// 0.25 (at least one survivor), so zero-mass atoms and the infinities they
/// induce are exercised.
inline std::vector<double> random_masses(Rng& rng, std::size_t m, double total) {
  std::vector<double> mass(m);
  double sum = 0.0;
  for (double& w : mass) {
    w = rng.bernoulli(0.25) ? 0.0 : rng.uniform(0.05, 1.0);
    sum += w;
  }
  if (sum == 0.0) {
    mass[rng.below(m)] = 1.0;
    sum = 1.0;
  }
  for (double& w : mass) w *= total / sum;
  return mass;
}

inline DiscreteDistribution random_distribution(Rng& rng, const std::vector<double>& support) {
  DiscreteDistribution d;
  d.support = support;
  d.probs = random_masses(rng, support.size(), 1.0);
  return d;
}

/// Exact-uniform joint on a shared support of size 2..max_support.
inline JointLossMaskDistribution random_joint(Rng& rng, std::size_t max_support = 8) {
  const std::size_t m = 2 + rng.below(max_support - 1);
  JointLossMaskDistribution joint;
  joint.support = random_support(rng, m);
  joint.probs[0] = random_masses(rng, m, 0.5);
  joint.probs[1] = random_masses(rng, m, 0.5);
  joint.exact_uniform = true;
  return joint;
}

/// G = +1 always: dl = +1 under U = 0 and -1 under U = 1.
inline JointLossMaskDistribution deterministic_channel() {
  JointLossMaskDistribution joint;
  joint.support = {-1.0, 1.0};
  joint.probs[0] = {0.0, 0.5};
  joint.probs[1] = {0.5, 0.0};
  joint.exact_uniform = true;
  return joint;
}

/// Equal treats two infinities of the same sign as equal; otherwise |lhs -
/// rhs| <= tol.
inline bool close_or_both_infinite(double lhs, double rhs, double tol) {
  if (std::isinf(lhs) || std::isinf(rhs)) return lhs == rhs;
  return std::abs(lhs - rhs) <= tol;
}

} // namespace detail

// =============================================================================
// Suites
// =============================================================================

/// Each proof-level scalar inequality holds on `trials` random in-domain
/// (a, x) pairs.  check_inequality carries the 1e-12 slack; an in-domain
/// false return is a genuine counterexample.
inline SuiteResult verify_inequality_lemmas(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"inequality_lemmas"};
  Rng rng = Rng::stream(seed, {detail::kStreamInequality});
  for (std::size_t t = 0; t < trials; ++t) {
    {
      const double a = rng.uniform(0.5, 8.0);
      const double x = rng.uniform(0.5 / a - 1.0, 1.0 - 0.5 / a);
      suite.record(check_inequality(InequalityId::kl_poly, a, x),
                   detail::fmt_case("kl_poly", a, x));
    }
    {
      const double a = rng.uniform(1.0, 8.0);
      const double x = rng.uniform(1.0 / a - 1.0, 1.0 - 1.0 / a);
      suite.record(check_inequality(InequalityId::sh_poly, a, x),
                   detail::fmt_case("sh_poly", a, x));
    }
    {
      const double a = rng.uniform(4.0, 12.0);
      const double x = rng.uniform(-0.5, 0.5);
      suite.record(check_inequality(InequalityId::js_poly, a, x),
                   detail::fmt_case("js_poly", a, x));
    }
    {
      const double x = rng.uniform(0.0, 1.0);
      suite.record(check_inequality(InequalityId::log2_linear, 0.0, x),
                   detail::fmt_case("log2_linear", 0.0, x));
    }
    {
      const double x = rng.uniform(-0.68, 10.0);
      suite.record(check_inequality(InequalityId::coin_poly, 0.0, x),
                   detail::fmt_case("coin_poly", 0.0, x));
    }
  }
  return suite;
}

/// The maximized variational objective never exceeds the direct
/// f-information (tol 1e-9) on random joints, for every conjugate kind; on
/// the deterministic channel the KL lower bound reaches ln 2 - 1e-6.
inline SuiteResult verify_variational_consistency(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"variational_consistency"};
  {
    const VariationalResult reach =
        variational_lower_bound(detail::deterministic_channel(), DivergenceKind::kl());
    char buf[160];
    std::snprintf(buf, sizeof buf, "deterministic channel: kl lower bound %.17g < ln 2 - 1e-6",
                  reach.value);
    suite.record(reach.value >= kLn2 - 1e-6, buf);
  }
  const std::array<DivergenceKind, 4> kinds = {
      DivergenceKind::kl(), DivergenceKind::chi2(), DivergenceKind::squared_hellinger(),
      DivergenceKind::jensen_shannon()};
  Rng rng = Rng::stream(seed, {detail::kStreamVariational});
  for (std::size_t t = 0; t < trials; ++t) {
    const JointLossMaskDistribution joint = detail::random_joint(rng);
    for (const DivergenceKind& kind : kinds) {
      const double direct = f_information(joint, kind);
      const double lower = variational_lower_bound(joint, kind).value;
      char buf[160];
      std::snprintf(buf, sizeof buf, "trial %zu: %s lower bound %.17g > information %.17g",
                    t, to_string(kind).c_str(), lower, direct);
      suite.record(lower <= direct + 1e-9, buf);
    }
  }
  return suite;
}

/// Pairwise orderings and exact identities on random distribution pairs
/// sharing a support: kl <= chi2, sh <= phi_1, tv <= sqrt(kl / 2),
/// js <= 2 ln 2, js <= jeffreys / 2, phi_1 = 2 tv, phi_2 = chi2.
inline SuiteResult verify_divergence_orderings(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"divergence_orderings"};
  Rng rng = Rng::stream(seed, {detail::kStreamOrderings});
  constexpr double kTol = 1e-9;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t m = 2 + rng.below(7);
    const std::vector<double> support = detail::random_support(rng, m);
    const DiscreteDistribution p = detail::random_distribution(rng, support);
    const DiscreteDistribution q = detail::random_distribution(rng, support);

    const double kl = divergence(p, q, DivergenceKind::kl());
    const double chi2 = divergence(p, q, DivergenceKind::chi2());
    const double sh = divergence(p, q, DivergenceKind::squared_hellinger());
    const double js = divergence(p, q, DivergenceKind::jensen_shannon());
    const double tv = divergence(p, q, DivergenceKind::total_variation());
    const double jeffreys = divergence(p, q, DivergenceKind::jeffreys());
    const double phi1 = divergence(p, q, DivergenceKind::phi_alpha(1.0));
    const double phi2 = divergence(p, q, DivergenceKind::phi_alpha(2.0));

    const auto describe = [t](const char* what) {
      return "trial " + std::to_string(t) + ": " + what;
    };
    suite.record(kl <= chi2 + kTol, describe("kl > chi2"));
    suite.record(sh <= phi1 + kTol, describe("sh > phi_1"));
    suite.record(tv <= std::sqrt(kl / 2.0) + kTol, describe("tv > sqrt(kl / 2)"));
    suite.record(js <= 2.0 * kLn2 + kTol, describe("js > 2 ln 2"));
    suite.record(js <= 0.5 * jeffreys + kTol, describe("js > jeffreys / 2"));
    suite.record(detail::close_or_both_infinite(phi1, 2.0 * tv, 1e-12),
                 describe("phi_1 != 2 tv"));
    suite.record(detail::close_or_both_infinite(phi2, chi2, kTol), describe("phi_2 != chi2"));
  }
  return suite;
}

/// Coarsening the support (any map onto fewer atoms) never increases a
/// divergence, for each of the six named kinds (tol 1e-9).
inline SuiteResult verify_data_processing(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"data_processing"};
  Rng rng = Rng::stream(seed, {detail::kStreamCoarsening});
  const std::array<DivergenceKind, 6> kinds = {
      DivergenceKind::kl(),           DivergenceKind::chi2(),
      DivergenceKind::squared_hellinger(), DivergenceKind::jensen_shannon(),
      DivergenceKind::total_variation(),   DivergenceKind::jeffreys()};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t m = 3 + rng.below(6);
    const std::vector<double> support = detail::random_support(rng, m);
    const DiscreteDistribution p = detail::random_distribution(rng, support);
    const DiscreteDistribution q = detail::random_distribution(rng, support);

    const std::size_t cells = 1 + rng.below(m);
    std::vector<std::size_t> cell_of(m);
    for (std::size_t v = 0; v < m; ++v) cell_of[v] = rng.below(cells);

    DiscreteDistribution cp, cq;
    for (std::size_t c = 0; c < cells; ++c) cp.support.push_back(static_cast<double>(c));
    cq.support = cp.support;
    cp.probs.assign(cells, 0.0);
    cq.probs.assign(cells, 0.0);
    for (std::size_t v = 0; v < m; ++v) {
      cp.probs[cell_of[v]] += p.probs[v];
      cq.probs[cell_of[v]] += q.probs[v];
    }

    for (const DivergenceKind& kind : kinds) {
      const double fine = divergence(p, q, kind);
      const double coarse = divergence(cp, cq, kind);
      char buf[160];
      std::snprintf(buf, sizeof buf, "trial %zu: %s coarse %.17g > fine %.17g", t,
                    to_string(kind).c_str(), coarse, fine);
      suite.record(coarse <= fine + 1e-9, buf);
    }
  }
  return suite;
}

/// The per-joint scalar inequalities behind the bound proofs hold on random
/// exact-uniform joints (tol 1e-9, baked into the checker).
inline SuiteResult verify_proof_invariants(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"proof_invariants"};
  Rng rng = Rng::stream(seed, {detail::kStreamProofInvariants});
  for (std::size_t t = 0; t < trials; ++t) {
    const JointLossMaskDistribution joint = detail::random_joint(rng);
    const ProofInvariantReport report = per_joint_proof_invariants(joint);
    const auto describe = [t](const char* what) {
      return "trial " + std::to_string(t) + ": " + what;
    };
    suite.record(report.kl_quadratic, describe("kl quadratic inequality failed"));
    suite.record(report.sh_key, describe("sh key inequality failed"));
    suite.record(report.js_key, describe("js key inequality failed"));
    suite.record(report.truncated_kl, describe("truncated kl inequality failed"));
  }
  return suite;
}

/// Estimated exact-uniform joints respect the information ceilings: I_KL <=
/// ln 2, I_TV <= 1/2 (both tol 1e-9), and I_{phi_alpha} < 1 + 2^(alpha - 1)
/// strictly, for alpha in {1, 1.25, 1.5, 2}.
inline SuiteResult verify_capacity_ceilings(std::size_t trials, std::uint64_t seed) {
  SuiteResult suite{"capacity_ceilings"};
  Rng rng = Rng::stream(seed, {detail::kStreamCapacity});
  constexpr std::array<double, 4> kAlphas = {1.0, 1.25, 1.5, 2.0};
  for (std::size_t t = 0; t < trials; ++t) {
    // Odd trials estimate from zero-one samples, even trials from binned
    // reals, so both quantizers feed the ceiling checks.
    std::vector<double> dl0, dl1;
    Quantizer quantizer = Quantizer::exact_zero_one();
    if (t % 2 == 0) {
      quantizer = Quantizer::uniform_bins(2 + static_cast<int>(rng.below(8)), -1.0, 1.0);
      for (int u = 0; u < 2; ++u) {
        std::vector<double>& dl = u == 0 ? dl0 : dl1;
        const std::size_t count = 1 + rng.below(200);
        for (std::size_t s = 0; s < count; ++s) dl.push_back(rng.uniform(-1.0, 1.0));
      }
    } else {
      constexpr std::array<double, 3> kAtoms = {-1.0, 0.0, 1.0};
      for (int u = 0; u < 2; ++u) {
        std::vector<double>& dl = u == 0 ? dl0 : dl1;
        const std::size_t count = 1 + rng.below(200);
        for (std::size_t s = 0; s < count; ++s) dl.push_back(kAtoms[rng.below(3)]);
      }
    }
    const JointLossMaskDistribution joint =
        joint_from_stratified_samples(dl0, dl1, quantizer, true);

    const double i_kl = f_information(joint, DivergenceKind::kl());
    const double i_tv = f_information(joint, DivergenceKind::total_variation());
    char buf[160];
    std::snprintf(buf, sizeof buf, "trial %zu: I_KL %.17g > ln 2", t, i_kl);
    suite.record(i_kl <= kLn2 + 1e-9, buf);
    std::snprintf(buf, sizeof buf, "trial %zu: I_TV %.17g > 1/2", t, i_tv);
    suite.record(i_tv <= 0.5 + 1e-9, buf);
    for (double alpha : kAlphas) {
      const double i_phi = f_information(joint, DivergenceKind::phi_alpha(alpha));
      const double ceiling = 1.0 + std::pow(2.0, alpha - 1.0);
      std::snprintf(buf, sizeof buf, "trial %zu: I_phi(%g) %.17g >= %.17g", t, alpha, i_phi,
                    ceiling);
      suite.record(i_phi < ceiling, buf);
    }
  }
  return suite;
}

// =============================================================================
// Report assembly
// =============================================================================

inline VerifyReport run_verification(std::size_t trials, std::uint64_t seed) {
  VerifyReport report;
  report.trials = trials;
  report.seed = seed;
  report.suites.push_back(verify_inequality_lemmas(trials, seed));
  report.suites.push_back(verify_variational_consistency(trials, seed));
  report.suites.push_back(verify_divergence_orderings(trials, seed));
  report.suites.push_back(verify_data_processing(trials, seed));
  report.suites.push_back(verify_proof_invariants(trials, seed));
  report.suites.push_back(verify_capacity_ceilings(trials, seed));
  return report;
}

/// One JSON entry per suite, keyed by suite name.
inline nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const SuiteResult& s : report.suites) {
    nlohmann::json entry = {{"checks", s.checks},
                            {"failures", s.failures},
                            {"passed", s.passed()}};
    if (!s.first_failure.empty()) entry["first_failure"] = s.first_failure;
    j[s.name] = entry;
  }
  return j;
}

/// Fixed-width pass/fail table; failed suites append their first failing
/// case on an indented line.
inline std::string verify_table(const VerifyReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-26s %10s %10s  %s\n", "suite", "checks", "failures",
                "status");
  out += line;
  for (const SuiteResult& s : report.suites) {
    std::snprintf(line, sizeof line, "%-26s %10zu %10zu  %s\n", s.name.c_str(), s.checks,
                  s.failures, s.passed() ? "pass" : "FAIL");
    out += line;
    if (!s.first_failure.empty()) out += "    first failure: " + s.first_failure + "\n";
  }
  out += report.all_passed() ? "all suites passed\n" : "verification FAILED\n";
  return out;
}

} // namespace fgen
