#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "symnorm/combinatorics.hpp"
#include "symnorm/quadrature.hpp"

using namespace symnorm;

namespace {

// brute-force product-measure expectation of fn over all n^n tuples
template <typename F>
double product_expectation(const DoublyStochastic& ds, F&& fn) {
    const int n = ds.n;
    std::vector<int> tuple(n, 1);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) w *= ds.at(i, tuple[i] - 1);
        if (w > 0.0) acc += w * fn(tuple);
        int i = 0;
        for (; i < n; ++i) {
            if (tuple[i] < n) {
                ++tuple[i];
                break;
            }
            tuple[i] = 1;
        }
        if (i == n) break;
    }
    return acc;
}

double brute_H(const std::vector<int>& tuple, int n) {
    double h = 0.0;
    for (int r = 1; r <= n; ++r) {
        int cnt = 0;
        for (int v : tuple)
            if (v <= r) ++cnt;
        h = std::max(h, static_cast<double>(cnt) / r);
    }
    return h;
}

}  // namespace

TEST_CASE("doubly stochastic constructors and validation") {
    const auto id = DoublyStochastic::identity(3);
    CHECK(id.at(0, 0) == 1.0);
    CHECK(id.at(0, 1) == 0.0);
    CHECK(id.max_deviation() == 0.0);

    const auto un = DoublyStochastic::uniform(4);
    CHECK(un.at(2, 3) == doctest::Approx(0.25));
    CHECK_NOTHROW(un.validate());

    const auto pm = DoublyStochastic::permutation({2, 0, 1});
    CHECK(pm.at(0, 2) == 1.0);
    CHECK(pm.at(1, 0) == 1.0);
    CHECK_NOTHROW(pm.validate());
    CHECK_THROWS_AS(DoublyStochastic::permutation({0, 0, 1}), std::invalid_argument);

    CHECK_THROWS_AS(DoublyStochastic::checked(2, {1, 0, 0.5, 0.5}, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(DoublyStochastic::checked(2, {0.5, 0.5, 0.5}, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(DoublyStochastic::checked(2, {1.5, -0.5, -0.5, 1.5}, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("doubly stochastic json round trip") {
    Rng rng(1);
    const auto ds = random_doubly_stochastic(rng, 4);
    const auto back = DoublyStochastic::from_json(ds.to_json());
    REQUIRE(back.n == 4);
    for (std::size_t k = 0; k < ds.a.size(); ++k) CHECK(back.a[k] == ds.a[k]);
}

TEST_CASE("sinkhorn scales positive matrices") {
    Rng rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(6));
        std::vector<double> e(static_cast<std::size_t>(n) * n);
        for (double& v : e) v = rng.uniform(0.1, 1.0);
        const auto ds = sinkhorn(n, e, 1e-13);
        CHECK(ds.max_deviation() <= 1e-13);
    }
    // zero row can never be normalized
    CHECK_THROWS_AS(sinkhorn(2, {0, 0, 1, 1}, 1e-12, 50), std::invalid_argument);
    // support on a single off-diagonal pair converges only in the limit
    CHECK_THROWS_AS(sinkhorn(2, {1, 1, 1, 0}, 1e-15, 3), convergence_error);
}

TEST_CASE("sinkhorn convergence error carries the achieved deviation") {
    try {
        sinkhorn(2, {1, 1, 1, 0}, 1e-15, 3);
        FAIL("expected convergence_error");
    } catch (const convergence_error& e) {
        CHECK(e.achieved_deviation > 1e-15);
        CHECK(e.achieved_deviation < 1.0);
    }
}

TEST_CASE("birkhoff on exact cases") {
    const auto id = DoublyStochastic::identity(5);
    const auto dec = birkhoff_decompose(id);
    REQUIRE(dec.terms.size() == 1);
    CHECK(dec.terms[0].weight == doctest::Approx(1.0));
    for (int i = 0; i < 5; ++i) CHECK(dec.terms[0].perm[i] == i);

    // uniform 3x3 = average of 3 disjoint permutations
    const auto un = DoublyStochastic::uniform(3);
    const auto dec3 = birkhoff_decompose(un);
    CHECK(dec3.terms.size() == 3);
    CHECK(dec3.weight_sum() == doctest::Approx(1.0));
}

TEST_CASE("birkhoff reconstructs random sinkhorn matrices") {
    Rng rng(3);
    for (int rep = 0; rep < 15; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(7));
        const auto ds = random_doubly_stochastic(rng, n, 1e-13);
        const auto dec = birkhoff_decompose(ds);
        CHECK(static_cast<int>(dec.terms.size()) <= n * n - 2 * n + 2);
        CHECK(dec.weight_sum() == doctest::Approx(1.0).epsilon(1e-10));
        const auto rec = dec.reconstruct(n);
        for (std::size_t k = 0; k < ds.a.size(); ++k)
            CHECK(std::fabs(rec.a[k] - ds.a[k]) <= 1e-10);
        for (const auto& t : dec.terms) {
            CHECK(t.weight > 0.0);
            auto sorted = t.perm;
            std::sort(sorted.begin(), sorted.end());
            for (int i = 0; i < n; ++i) CHECK(sorted[i] == i);
        }
    }
}

TEST_CASE("birkhoff json round trip uses 1-based columns") {
    const auto dec = birkhoff_decompose(DoublyStochastic::permutation({1, 0}));
    const auto j = dec.to_json();
    CHECK(j["terms"][0]["perm"][0] == 2);  // 1-based in serialized form
    CHECK(j["terms"][0]["perm"][1] == 1);
    const auto back = BirkhoffDecomposition::from_json(j);
    CHECK(back.terms[0].perm == dec.terms[0].perm);  // 0-based in memory
}

TEST_CASE("level statistics") {
    const auto st = level_stat({1, 1, 3}, 3);
    CHECK(st.counts == std::vector<int>{2, 2, 3});
    CHECK(st.H == doctest::Approx(2.0));
    CHECK(st.reciprocals() == std::vector<double>{1.0, 1.0, 1.0 / 3});
    CHECK_THROWS_AS(level_stat({0, 1}, 2), std::domain_error);
    CHECK_THROWS_AS(level_stat({1, 3}, 2), std::domain_error);

    // H equals the weak-l1 norm of the reciprocals, exactly
    Rng rng(4);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(6));
        std::vector<int> tuple(n);
        for (int& v : tuple) v = 1 + static_cast<int>(rng.uniform_int(n));
        const auto s = level_stat(tuple, n);
        CHECK(s.H == eval_norm(NormSpec::weak_lp(1.0), s.reciprocals()));
    }
}

TEST_CASE("level pmf matches brute-force enumeration") {
    Rng rng(5);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(3));
        const auto ds = random_doubly_stochastic(rng, n, 1e-13);
        for (int r = 1; r <= n; ++r) {
            const auto pmf = level_pmf(ds, r);
            REQUIRE(pmf.size() == static_cast<std::size_t>(n) + 1);
            CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == doctest::Approx(1.0));
            for (int j = 0; j <= n; ++j) {
                const double brute = product_expectation(ds, [&](const std::vector<int>& t) {
                    int cnt = 0;
                    for (int v : t)
                        if (v <= r) ++cnt;
                    return cnt == j ? 1.0 : 0.0;
                });
                CHECK(pmf[j] == doctest::Approx(brute).epsilon(1e-10));
                CHECK(level_prob_exact(ds, r, j) == pmf[j]);
            }
        }
    }
}

TEST_CASE("permutation matrices have deterministic level counts") {
    Rng rng(6);
    for (int n : {2, 4, 7}) {
        const auto pm = DoublyStochastic::permutation(random_permutation(rng, n));
        for (int r = 1; r <= n; ++r) {
            const auto pmf = level_pmf(pm, r);
            for (int j = 0; j <= n; ++j) CHECK(pmf[j] == doctest::Approx(j == r ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("herz bound pinned values") {
    // n=4, r=2, j=1: the k=1 term C(2,1) C(2,0) (1/1)^1 (2/3)^3 = 2 * 8/27
    CHECK(herz_bound(4, 2, 1) == doctest::Approx(16.0 / 27.0));
    // j = r = n is the almost-sure corner
    CHECK(herz_bound(3, 3, 3) == 1.0);
    // diagonal j = r < n: the k=r term alone is C(r,r) (r/r)^r ((n-r-0)/(n-r))^{n-r} = 1
    for (int n = 2; n <= 10; ++n)
        for (int r = 1; r < n; ++r) CHECK(herz_bound(n, r, r) >= 1.0);
    CHECK_THROWS_AS(herz_bound(3, 2, 3), std::domain_error);  // j > r
    CHECK_THROWS_AS(herz_bound(3, 4, 1), std::domain_error);  // r > n
    CHECK_THROWS_AS(herz_bound(3, 2, 0), std::domain_error);  // j < 1
}

TEST_CASE("herz bound dominates exact probabilities on small matrices") {
    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(4));
        const auto ds = random_doubly_stochastic(rng, n, 1e-14);
        for (int r = 1; r <= n; ++r)
            for (int j = 1; j <= r; ++j) {
                if (j == n && r < n) continue;
                CHECK(level_prob_exact(ds, r, j) <= herz_bound(n, r, j) + 1e-12);
            }
    }
}

TEST_CASE("tail probabilities and the closed-form majorant") {
    Rng rng(8);
    const double e2 = std::exp(2.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(5));
        const auto ds = random_doubly_stochastic(rng, n, 1e-14);
        for (int r = 1; r < n; ++r)
            for (double t : {e2, 10.0, 20.0})
                CHECK(tail_prob(ds, r, t) <= tail_bound(r, t) + 1e-12);
    }
    // threshold above n gives the empty event
    CHECK(tail_prob(DoublyStochastic::uniform(3), 1, 4.0) == 0.0);
    CHECK_THROWS_AS(tail_bound(2, 2.0), std::domain_error);  // t < e^2
    // bound value itself: 2 (e^3/t)^{tr}
    CHECK(tail_bound(2, 10.0) ==
          doctest::Approx(2.0 * std::pow(std::exp(3.0) / 10.0, 20.0)));
}

TEST_CASE("exact level-sup moment: hand-checkable two by two") {
    // uniform 2x2: tuples (1,1) H=2, (1,2) H=1, (2,1) H=1, (2,2) H=1,
    // each with weight 1/4, so E[H] = (2+1+1+1)/4 = 5/4
    const auto un = DoublyStochastic::uniform(2);
    CHECK(exact_H_moment(un, 1.0) == doctest::Approx(1.25));
    // identity: tuple is (1,2) with probability 1... H = 1
    CHECK(exact_H_moment(DoublyStochastic::identity(2), 1.0) == doctest::Approx(1.0));
}

TEST_CASE("exact level-sup moments match brute force") {
    Rng rng(9);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(3));
        const auto ds = random_doubly_stochastic(rng, n, 1e-13);
        for (double p : {1.0, 2.0, 4.0}) {
            const double brute = std::pow(
                product_expectation(
                    ds, [&](const std::vector<int>& t) { return std::pow(brute_H(t, n), p); }),
                1.0 / p);
            CHECK(exact_H_moment(ds, p) == doctest::Approx(brute).epsilon(1e-12));
        }
        // shared-pass variant agrees with the single-exponent calls
        const auto both = exact_H_moments(ds, {1.0, 4.0});
        CHECK(both[0] == doctest::Approx(exact_H_moment(ds, 1.0)));
        CHECK(both[1] == doctest::Approx(exact_H_moment(ds, 4.0)));
    }
    CHECK_THROWS_AS(exact_H_moment(DoublyStochastic::uniform(9), 1.0), resource_error);
}

TEST_CASE("monte carlo level-sup moment is consistent and thread-invariant") {
    Rng rng(10);
    const auto ds = random_doubly_stochastic(rng, 5, 1e-13);
    const double exact = exact_H_moment(ds, 2.0);
    const auto a = mc_H_moment(ds, 2.0, 40000, 77, 1);
    const auto b = mc_H_moment(ds, 2.0, 40000, 77, 4);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    CHECK(std::fabs(a.estimate - exact) <= 4.0 * a.std_error);
}

TEST_CASE("binomial moment") {
    // n=2, p=2: h ~ Bin(2, 1/2), E h^2 = (0 + 2*1 + 4)/4 = 3/2
    CHECK(binom_moment(2, 2.0) == doctest::Approx(std::sqrt(1.5)));
    CHECK(binom_moment(1, 5.0) == doctest::Approx(1.0));  // h = 1 a.s.
    // log-domain evaluation stays finite far beyond naive factorial range
    CHECK(std::isfinite(binom_moment(320, 32.0)));
    CHECK(binom_moment(320, 32.0) > 1.0);
    CHECK_THROWS_AS(binom_moment(0, 1.0), std::domain_error);
}

TEST_CASE("adaptive quadrature on closed forms") {
    const double pi = std::acos(-1.0);
    CHECK(adaptive_simpson([](double t) { return std::sin(t); }, 0.0, pi) ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(adaptive_simpson([](double t) { return t * t; }, 0.0, 3.0) ==
          doctest::Approx(9.0).epsilon(1e-12));
    // spike away from the coarse grid still gets found by refinement
    const double spike = adaptive_simpson(
        [](double t) { return std::exp(-1e4 * (t - 0.3) * (t - 0.3)); }, 0.0, 1.0);
    CHECK(spike == doctest::Approx(std::sqrt(pi) / 100.0).epsilon(1e-6));

    CHECK(integrate_to_infinity([](double t) { return std::exp(-t); }, 0.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(integrate_to_infinity([](double t) { return std::exp(-t * t); }, 1.0, 2.0) ==
          doctest::Approx(0.13940279264033098).epsilon(1e-8));
}

TEST_CASE("integral growth bracket") {
    for (double a : {4.0, 8.0, 16.0, 32.0}) {
        const auto br = integral_growth_bracket(a, 1.0);
        CHECK(br.lower <= br.value);
        CHECK(br.value <= br.upper);
        CHECK(br.lower == doctest::Approx(std::exp(-2 * a - 1) *
                                          std::pow(a / (1 + std::log(a)), a + 1)));
        CHECK(br.upper ==
              doctest::Approx((a + 1) * std::pow(2 * a / (1 + std::log(a)), a)));
    }
    // preconditions: b >= 1 and a large enough relative to b
    CHECK_THROWS_AS(integral_growth_bracket(4.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(integral_growth_bracket(1.0, 1.0), std::domain_error);
}

TEST_CASE("integral decay bound covers both branches") {
    const double e1 = std::exp(1.0);
    {
        const auto ib = integral_decay_bound(1.0, 1.0, e1, 1.0);  // 2a <= rd
        CHECK(ib.branch_da);
        CHECK(ib.value <= ib.bound);
        CHECK(ib.bound == doctest::Approx(2.0 * std::exp(-e1) * e1));
    }
    {
        const auto ib = integral_decay_bound(8.0, 1.0, e1, 2.0);  // rd < 2a
        CHECK_FALSE(ib.branch_da);
        CHECK(ib.value <= ib.bound);
        CHECK(ib.bound ==
              doctest::Approx((2.0 / 2.0) * std::exp(-e1 * 2.0) * 2.0 * std::pow(8.0, 8.0)));
    }
    CHECK_THROWS_AS(integral_decay_bound(1.0, 1.0, 1.0, 1.0), std::domain_error);  // d < be
    CHECK_THROWS_AS(integral_decay_bound(0.0, 1.0, 3.0, 1.0), std::domain_error);  // a <= 0
}

TEST_CASE("rng streams") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform();
        CHECK(va == b.uniform());
        CHECK(va >= 0.0);
        CHECK(va < 1.0);
    }
    CHECK(a.uniform() != c.uniform());

    // per-index streams are reproducible and distinct
    Rng s1 = Rng::for_index(9, 4), s2 = Rng::for_index(9, 4), s3 = Rng::for_index(9, 5);
    CHECK(s1.next_u64() == s2.next_u64());
    CHECK(s1.next_u64() != s3.next_u64());

    Rng r(55);
    for (int i = 0; i < 1000; ++i) CHECK(r.uniform_int(7) < 7);
    bool seen[7] = {};
    for (int i = 0; i < 1000; ++i) seen[r.uniform_int(7)] = true;
    for (bool s : seen) CHECK(s);
}

TEST_CASE("random permutations are uniform enough and valid") {
    Rng rng(66);
    int first_pos_zero = 0;
    for (int rep = 0; rep < 3000; ++rep) {
        const auto p = random_permutation(rng, 4);
        auto sorted = p;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(sorted == std::vector<int>{0, 1, 2, 3});
        if (p[0] == 0) ++first_pos_zero;
    }
    // expectation 750, generous 5-sigma-ish window
    CHECK(first_pos_zero > 600);
    CHECK(first_pos_zero < 900);
}
