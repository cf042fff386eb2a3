#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fgen/divergence.hpp"
#include "fgen/rng.hpp"

using namespace fgen;

namespace {

// Flat Dirichlet sample via normalized exponentials.
std::vector<double> random_simplex(Rng& rng, std::size_t m) {
    std::vector<double> w(m);
    double total = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - rng.next_double());
        total += x;
    }
    for (double& x : w) x /= total;
    return w;
}

DiscreteDistribution on_support(const std::vector<double>& support, std::vector<double> probs) {
    return DiscreteDistribution{support, std::move(probs)};
}

std::vector<double> make_support(std::size_t m) {
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = -1.0 + 2.0 * static_cast<double>(i) / (m > 1 ? m - 1 : 1);
    return s;
}

const DiscreteDistribution kP{{0.0, 1.0}, {0.75, 0.25}};
const DiscreteDistribution kQ{{0.0, 1.0}, {0.5, 0.5}};

} // namespace

TEST_CASE("identical distributions have zero divergence of every kind", "[divergence]") {
    DiscreteDistribution u{{-1.0, 0.0, 1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    for (auto kind : {DivergenceKind::kl(), DivergenceKind::chi2(),
                      DivergenceKind::squared_hellinger(), DivergenceKind::jensen_shannon(),
                      DivergenceKind::total_variation(), DivergenceKind::jeffreys(),
                      DivergenceKind::phi_alpha(1.0), DivergenceKind::phi_alpha(1.5),
                      DivergenceKind::phi_alpha(2.0)})
        REQUIRE(divergence(u, u, kind) == 0.0);
}

TEST_CASE("two-atom reference values", "[divergence]") {
    // Direct summation over the two atoms:
    //   KL  = 0.75 ln(1.5) + 0.25 ln(0.5)        = 0.1308120
    //   chi2 = 0.25^2/0.5 + 0.25^2/0.5           = 0.25
    //   SH  = (sqrt.75-sqrt.5)^2+(sqrt.25-sqrt.5)^2 = 0.0681483
    //   TV  = 0.5(0.25+0.25)                     = 0.25
    //   JS  = KL(p||m)+KL(q||m), m=(.625,.375)   = 0.0676442
    //   Jeffreys = KL both ways                  = 0.2746531
    REQUIRE(divergence(kP, kQ, DivergenceKind::kl()) == Catch::Approx(0.1308120).margin(5e-8));
    REQUIRE(divergence(kP, kQ, DivergenceKind::chi2()) == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(divergence(kP, kQ, DivergenceKind::squared_hellinger()) ==
            Catch::Approx(0.0681483).margin(5e-8));
    REQUIRE(divergence(kP, kQ, DivergenceKind::total_variation()) ==
            Catch::Approx(0.25).margin(1e-12));
    REQUIRE(divergence(kP, kQ, DivergenceKind::jensen_shannon()) ==
            Catch::Approx(0.0676442).margin(5e-8));
    REQUIRE(divergence(kP, kQ, DivergenceKind::jeffreys()) ==
            Catch::Approx(0.2746531).margin(5e-8));
    REQUIRE(divergence(kP, kQ, DivergenceKind::phi_alpha(1.0)) ==
            Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("infinity marker when p charges an atom q lacks", "[divergence]") {
    DiscreteDistribution p{{0.0, 1.0}, {0.5, 0.5}};
    DiscreteDistribution q{{0.0}, {1.0}};
    REQUIRE(divergence(p, q, DivergenceKind::kl()) == kInf);
    REQUIRE(divergence(p, q, DivergenceKind::chi2()) == kInf);
    REQUIRE(divergence(p, q, DivergenceKind::jeffreys()) == kInf);
    REQUIRE(divergence(p, q, DivergenceKind::phi_alpha(1.5)) == kInf);
    // alpha = 1 degrades to |p - q| and stays finite: 0.5 + 0.5 = 1... the
    // missing atom contributes p, the shared one |0.5 - 1.0|.
    REQUIRE(divergence(p, q, DivergenceKind::phi_alpha(1.0)) == Catch::Approx(1.0));
    // The reverse direction is finite for kl (q may vanish where p does).
    REQUIRE(std::isfinite(divergence(q, p, DivergenceKind::kl())));
    // JS and SH and TV are always finite.
    REQUIRE(std::isfinite(divergence(p, q, DivergenceKind::jensen_shannon())));
    REQUIRE(std::isfinite(divergence(p, q, DivergenceKind::squared_hellinger())));
    REQUIRE(std::isfinite(divergence(p, q, DivergenceKind::total_variation())));
}

TEST_CASE("tv dual form equals the direct formula", "[divergence]") {
    REQUIRE(tv_dual_check(kP, kP) == 0.0);
    REQUIRE(tv_dual_check(kP, kQ) == Catch::Approx(0.25).margin(1e-12));
    DiscreteDistribution a{{0.0}, {1.0}}, b{{1.0}, {1.0}};
    REQUIRE(tv_dual_check(a, b) == Catch::Approx(1.0).margin(1e-12));

    Rng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        auto support = make_support(2 + rng.below(7));
        auto p = on_support(support, random_simplex(rng, support.size()));
        auto q = on_support(support, random_simplex(rng, support.size()));
        REQUIRE(tv_dual_check(p, q) ==
                Catch::Approx(divergence(p, q, DivergenceKind::total_variation())).margin(1e-12));
    }
}

TEST_CASE("conjugate inverse reference points", "[divergence]") {
    REQUIRE(conjugate_inverse(DivergenceKind::kl(), 0.0) == 0.0);
    REQUIRE(conjugate_inverse(DivergenceKind::squared_hellinger(), 1.0) == Catch::Approx(0.5));
    REQUIRE(conjugate_inverse(DivergenceKind::jensen_shannon(), 0.0) == Catch::Approx(0.0));
    REQUIRE(conjugate_inverse(DivergenceKind::chi2(), -1.0) == Catch::Approx(-2.0));
    REQUIRE(conjugate_inverse(DivergenceKind::chi2(), 3.0) == Catch::Approx(2.0));
}

TEST_CASE("conjugate inverse domain enforcement", "[divergence]") {
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::kl(), -1.0), std::domain_error);
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::squared_hellinger(), -1.0),
                      std::domain_error);
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::jensen_shannon(), -kLn2),
                      std::domain_error);
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::chi2(), -1.0000001), std::domain_error);
    REQUIRE_NOTHROW(conjugate_inverse(DivergenceKind::chi2(), -1.0)); // closed endpoint
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::total_variation(), 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::jeffreys(), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(conjugate_inverse(DivergenceKind::phi_alpha(1.5), 0.0),
                      std::invalid_argument);
}

TEST_CASE("phi* and its inverse round trip on restricted domains", "[divergence][property]") {
    Rng rng(17);
    struct Range {
        DivergenceKind kind;
        double lo, hi;
    };
    // Restricted phi* domains: chi2 needs y >= -2, sh y < 1, js y < ln 2.
    const Range ranges[] = {
        {DivergenceKind::kl(), -6.0, 6.0},
        {DivergenceKind::chi2(), -2.0, 6.0},
        {DivergenceKind::squared_hellinger(), -6.0, 1.0 - 1e-6},
        {DivergenceKind::jensen_shannon(), -6.0, kLn2 - 1e-6},
    };
    for (const auto& r : ranges) {
        auto pair = conjugate_pair(r.kind);
        for (int i = 0; i < 1000; ++i) {
            double y = rng.uniform(r.lo, r.hi);
            REQUIRE(pair.inverse(pair.star(y)) == Catch::Approx(y).margin(1e-10));
        }
    }
}

TEST_CASE("divergence orderings on random pairs", "[divergence][property]") {
    Rng rng(222);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto support = make_support(2 + rng.below(7));
        auto p = on_support(support, random_simplex(rng, support.size()));
        auto q = on_support(support, random_simplex(rng, support.size()));

        double kl = divergence(p, q, DivergenceKind::kl());
        double chi2 = divergence(p, q, DivergenceKind::chi2());
        double sh = divergence(p, q, DivergenceKind::squared_hellinger());
        double tv = divergence(p, q, DivergenceKind::total_variation());
        double js = divergence(p, q, DivergenceKind::jensen_shannon());
        double jeff = divergence(p, q, DivergenceKind::jeffreys());
        double phi1 = divergence(p, q, DivergenceKind::phi_alpha(1.0));
        double phi2 = divergence(p, q, DivergenceKind::phi_alpha(2.0));

        for (double d : {kl, chi2, sh, tv, js, jeff, phi1, phi2}) REQUIRE(d >= 0.0);
        if (tv > 1e-9)
            for (double d : {kl, chi2, sh, js, jeff, phi1, phi2}) REQUIRE(d > 0.0);

        REQUIRE(kl <= chi2 + 1e-9);
        // The Hellinger/TV comparison holds against the unhalved sum
        // |p - q|_1 = phi_1 = 2 TV; against the halved TV it can fail (see
        // the regression case below).
        REQUIRE(sh <= phi1 + 1e-9);
        REQUIRE(tv <= std::sqrt(kl / 2.0) + 1e-9); // Pinsker
        REQUIRE(js <= 2.0 * kLn2 + 1e-9);
        REQUIRE(js <= 0.5 * jeff + 1e-9);
        REQUIRE(phi1 == Catch::Approx(2.0 * tv).margin(1e-12));
        REQUIRE(phi2 == Catch::Approx(chi2).margin(1e-9));
        ++checked;
    }
    REQUIRE(checked == 1000);
}

TEST_CASE("squared Hellinger can exceed the halved TV", "[divergence][regression]") {
    // Nearly-disjoint pair: H2 -> 2 while the halved TV tops out at 1. Only
    // the unhalved comparison H2 <= 2 TV is a theorem.
    DiscreteDistribution p{{0.0, 1.0}, {0.99, 0.01}};
    DiscreteDistribution q{{0.0, 1.0}, {0.01, 0.99}};
    double sh = divergence(p, q, DivergenceKind::squared_hellinger());
    double tv = divergence(p, q, DivergenceKind::total_variation());
    REQUIRE(sh > tv);
    REQUIRE(sh <= 2.0 * tv + 1e-9);
}

TEST_CASE("data processing under deterministic coarsening", "[divergence][property]") {
    Rng rng(555);
    const DivergenceKind kinds[] = {
        DivergenceKind::kl(),          DivergenceKind::chi2(),
        DivergenceKind::squared_hellinger(), DivergenceKind::jensen_shannon(),
        DivergenceKind::total_variation(),   DivergenceKind::jeffreys(),
        DivergenceKind::phi_alpha(1.25),     DivergenceKind::phi_alpha(1.5),
    };
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t m = 3 + rng.below(6);
        auto support = make_support(m);
        auto p = on_support(support, random_simplex(rng, m));
        auto q = on_support(support, random_simplex(rng, m));

        // Random surjection onto a smaller support; sum probabilities per image.
        std::size_t k = 2 + rng.below(m - 2 + 1);
        std::vector<std::size_t> img(m);
        for (auto& g : img) g = rng.below(k);
        auto gsupport = make_support(k);
        std::vector<double> gp(k, 0.0), gq(k, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            gp[img[i]] += p.probs[i];
            gq[img[i]] += q.probs[i];
        }
        auto cp = on_support(gsupport, gp);
        auto cq = on_support(gsupport, gq);

        for (const auto& kind : kinds) {
            double before = divergence(p, q, kind);
            double after = divergence(cp, cq, kind);
            if (before == kInf) continue; // infinite upper bound is vacuous
            REQUIRE(after <= before + 1e-9);
        }
    }
}

TEST_CASE("f-information of canonical channels", "[divergence]") {
    // Deterministic channel: dl = +1 iff U = 0, so G is identically +1.
    JointLossMaskDistribution det;
    det.support = {-1.0, 1.0};
    det.probs[0] = {0.0, 0.5};
    det.probs[1] = {0.5, 0.0};
    det.validate();
    REQUIRE(f_information(det, DivergenceKind::kl()) == Catch::Approx(kLn2).margin(1e-12));
    REQUIRE(f_information(det, DivergenceKind::total_variation()) ==
            Catch::Approx(0.5).margin(1e-12));
    REQUIRE(f_information(det, DivergenceKind::chi2()) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(f_information(det, DivergenceKind::squared_hellinger()) ==
            Catch::Approx(2.0 - std::sqrt(2.0)).margin(1e-12));
    // Four-cell midpoint computation: KL(P||M) = ln(4/3), KL(Q||M) = (1/2) ln(4/3).
    REQUIRE(f_information(det, DivergenceKind::jensen_shannon()) ==
            Catch::Approx(1.5 * std::log(4.0 / 3.0)).margin(1e-12));

    // Independent joint: zero information of every kind.
    JointLossMaskDistribution ind;
    ind.support = {-1.0, 0.0, 1.0};
    ind.probs[0] = {0.1, 0.25, 0.15};
    ind.probs[1] = {0.1, 0.25, 0.15};
    ind.validate();
    for (auto kind : {DivergenceKind::kl(), DivergenceKind::chi2(),
                      DivergenceKind::squared_hellinger(), DivergenceKind::jensen_shannon(),
                      DivergenceKind::total_variation(), DivergenceKind::phi_alpha(1.5)})
        REQUIRE(f_information(ind, kind) == Catch::Approx(0.0).margin(1e-12));

    // Interpolating channel: dl = 1 with probability 1/4 within U = 0,
    // dl = -1 with probability 1/4 within U = 1, else 0. I_KL = (1/4) ln 2.
    JointLossMaskDistribution bern;
    bern.support = {-1.0, 0.0, 1.0};
    bern.probs[0] = {0.0, 3.0 / 8, 1.0 / 8};
    bern.probs[1] = {1.0 / 8, 3.0 / 8, 0.0};
    bern.validate();
    REQUIRE(f_information(bern, DivergenceKind::kl()) ==
            Catch::Approx(0.25 * kLn2).margin(1e-12));
}

TEST_CASE("kind names", "[divergence]") {
    REQUIRE(to_string(DivergenceKind::kl()) == "kl");
    REQUIRE(to_string(DivergenceKind::squared_hellinger()) == "sh");
    REQUIRE(to_string(DivergenceKind::phi_alpha(1.5)) == "phi_alpha(1.5)");
    REQUIRE_THROWS_AS(DivergenceKind::phi_alpha(0.5), std::invalid_argument);
}
