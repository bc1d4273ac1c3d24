#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "symnorm/norms.hpp"
#include "symnorm/rng.hpp"

using namespace symnorm;

namespace {

// x*_j = inf{ t : card{i : |x_i| > t} < j }, straight from the definition:
// scan candidate thresholds (the absolute values and 0) from below.
std::vector<double> rearrange_oracle(const std::vector<double>& x) {
    std::vector<double> cand;
    cand.push_back(0.0);
    for (double v : x) cand.push_back(std::fabs(v));
    std::sort(cand.begin(), cand.end());
    std::vector<double> out(x.size());
    for (std::size_t j = 1; j <= x.size(); ++j) {
        for (double t : cand) {
            std::size_t above = 0;
            for (double v : x)
                if (std::fabs(v) > t) ++above;
            if (above < j) {
                out[j - 1] = t;
                break;
            }
        }
    }
    return out;
}

std::vector<double> random_vector(Rng& rng, int n, double lo = -3.0, double hi = 3.0) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(lo, hi);
    return x;
}

std::vector<NormSpec> corpus() {
    auto specs = std::vector<NormSpec>{NormSpec::lp(1.0),          NormSpec::lp(2.0),
                                       NormSpec::lp(3.5),          NormSpec::sup(),
                                       NormSpec::weak_lp(1.0),     NormSpec::weak_lp(2.0),
                                       NormSpec::k_functional(2),  NormSpec::k_functional(5)};
    specs.push_back(NormSpec::lorentz(lorentz_weight_grid(2.0, 64), 1.0));
    specs.push_back(NormSpec::lorentz(lorentz_weight_grid(2.0, 64), 2.0));
    specs.push_back(NormSpec::lorentz(std::vector<double>(64, 1.0), NormSpec::kInf));
    specs.push_back(NormSpec::lorentz(lorentz_weight_grid(1.0, 64), NormSpec::kInf));
    specs.push_back(NormSpec::lorentz(lorentz_weight_grid(2.0, 64), 1.0, 0.5));
    return specs;
}

}  // namespace

TEST_CASE("rearrange basics") {
    CHECK(rearrange({3, 1, 2}) == std::vector<double>{3, 2, 1});
    CHECK(rearrange({-4, 0, 4}) == std::vector<double>{4, 4, 0});
    CHECK(rearrange({}).empty());
    CHECK_THROWS_AS(rearrange({1.0, std::nan("")}), std::domain_error);
    CHECK_THROWS_AS(rearrange({1.0, INFINITY}), std::domain_error);
}

TEST_CASE("rearrange matches the infimum definition") {
    Rng rng(20240401);
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = random_vector(rng, 10);
        const auto got = rearrange(x);
        const auto want = rearrange_oracle(x);
        for (std::size_t j = 0; j < x.size(); ++j) CHECK(got[j] == doctest::Approx(want[j]));
    }
}

TEST_CASE("eval_norm pinned values") {
    // k (1/k) = 1 for every k
    std::vector<double> harmonic;
    for (int k = 1; k <= 12; ++k) harmonic.push_back(1.0 / k);
    CHECK(eval_norm(NormSpec::weak_lp(1.0), harmonic) == 1.0);

    CHECK(eval_norm(NormSpec::k_functional(2), {3, 1, 2}) == 5.0);
    CHECK(eval_norm(NormSpec::lp(2.0), {3, 4}) == doctest::Approx(5.0));
    CHECK(eval_norm(NormSpec::sup(), {-7, 3}) == 7.0);
    CHECK(eval_norm(NormSpec::lp(1.0), {}) == 0.0);
    // top-k sum saturates at the vector length
    CHECK(eval_norm(NormSpec::k_functional(9), {1, 1}) == 2.0);
}

TEST_CASE("eval_norm parameter and input errors") {
    CHECK_THROWS_AS(eval_norm(NormSpec::lp(0.5), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::weak_lp(0.0), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::k_functional(0), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::lorentz({1, 1}, 1.0), {1, 1, 1}),
                    std::invalid_argument);  // weight shorter than x
    CHECK_THROWS_AS(eval_norm(NormSpec::lorentz({1, -1}, 1.0), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::lorentz({1, 1}, 0.5), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::lorentz({1, 1}, 1.0, 1.5), {1}), std::invalid_argument);
    CHECK_THROWS_AS(eval_norm(NormSpec::lp(2.0), {1.0, std::nan("")}), std::domain_error);
}

TEST_CASE("unit vectors") {
    for (const auto& spec : corpus()) {
        const double expect = spec.unit_value();
        CHECK(eval_norm(spec, {1.0}) == doctest::Approx(expect));
        CHECK(eval_norm(spec, {0.0, -1.0, 0.0}) == doctest::Approx(expect));
    }
    CHECK(NormSpec::lp(3.0).unit_value() == 1.0);
    CHECK(NormSpec::lorentz({2.0, 3.0}, 1.0).unit_value() == 2.0);
}

TEST_CASE("permutation and sign invariance is exact") {
    Rng rng(7);
    for (const auto& spec : corpus()) {
        for (int rep = 0; rep < 20; ++rep) {
            auto x = random_vector(rng, 9);
            const double base = eval_norm(spec, x);
            auto y = x;
            for (std::size_t i = y.size(); i > 1; --i)
                std::swap(y[i - 1], y[rng.uniform_int(i)]);
            for (double& v : y)
                if (rng.uniform() < 0.5) v = -v;
            CHECK(eval_norm(spec, y) == base);
        }
    }
}

TEST_CASE("triangle inequality on certified norms") {
    Rng rng(99);
    for (const auto& spec : corpus()) {
        if (spec.is_quasi()) continue;
        for (int rep = 0; rep < 30; ++rep) {
            const auto x = random_vector(rng, 8);
            const auto y = random_vector(rng, 8);
            auto s = x;
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += y[i];
            const double lhs = eval_norm(spec, s);
            const double rhs = eval_norm(spec, x) + eval_norm(spec, y);
            CHECK(lhs <= rhs + 1e-12 * std::max(1.0, rhs));
        }
    }
}

TEST_CASE("quasi-norm classification") {
    CHECK_FALSE(NormSpec::lp(1.0).is_quasi());
    CHECK_FALSE(NormSpec::sup().is_quasi());
    CHECK_FALSE(NormSpec::k_functional(3).is_quasi());
    CHECK(NormSpec::weak_lp(1.0).is_quasi());
    // constant weight with w = inf is a scaled sup norm
    CHECK_FALSE(NormSpec::lorentz({2, 2, 2}, NormSpec::kInf).is_quasi());
    CHECK(NormSpec::lorentz({1, 2, 3}, NormSpec::kInf).is_quasi());
    // f(k) = k^(1/s): ell_w weights f(k)^w / k decrease iff w <= s
    CHECK_FALSE(NormSpec::lorentz(lorentz_weight_grid(2.0, 8), 2.0).is_quasi());
    CHECK(NormSpec::lorentz(lorentz_weight_grid(2.0, 8), 3.0).is_quasi());
    CHECK(NormSpec::lorentz(lorentz_weight_grid(2.0, 8), 1.0, 0.5).is_quasi());
}

TEST_CASE("weak-l1 is genuinely quasi: a triangle violation exists") {
    // ||(1, 1/2)|| = ||(1/2, 1)|| = 1 but the sum (3/2, 3/2) has norm 3
    const std::vector<double> x{1, 1.0 / 2};
    const std::vector<double> y{1.0 / 2, 1};
    auto s = x;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += y[i];
    const auto spec = NormSpec::weak_lp(1.0);
    CHECK(eval_norm(spec, s) > eval_norm(spec, x) + eval_norm(spec, y) + 1e-9);
}

TEST_CASE("lorentz scale grid") {
    const auto f = lorentz_weight_grid(2.0, 4);
    REQUIRE(f.size() == 4);
    CHECK(f[0] == 1.0);
    CHECK(f[3] == doctest::Approx(2.0));
    CHECK_THROWS_AS(lorentz_weight_grid(0.0, 4), std::invalid_argument);

    // w = s reproduces the plain lp norm on sorted input:
    // (sum (k^{1/s} k^{-1/s} x*_k)^s)^{1/s} = ||x||_s
    const std::vector<double> x{0.9, 0.7, 0.2, 0.1};
    const auto spec = NormSpec::lorentz(lorentz_weight_grid(2.0, 4), 2.0);
    CHECK(eval_norm(spec, x) == doctest::Approx(eval_norm(NormSpec::lp(2.0), x)));
}

TEST_CASE("lorentz outer power q") {
    // q = 1/2 applies the base functional to |x|^2 and takes the square root
    const std::vector<double> x{0.81, 0.25};
    const auto base = NormSpec::lorentz({1.0, 1.0}, 1.0);
    const auto powd = NormSpec::lorentz({1.0, 1.0}, 1.0, 0.5);
    const std::vector<double> sq{x[0] * x[0], x[1] * x[1]};
    CHECK(eval_norm(powd, x) == doctest::Approx(std::sqrt(eval_norm(base, sq))));
}

TEST_CASE("abel pairing equals the inner product") {
    CHECK(abel_pairing({2, 1}, {1, 1}) == doctest::Approx(3.0));
    CHECK(abel_pairing({1, 0, 0}, {1, 0, 0}) == doctest::Approx(1.0));

    Rng rng(314);
    for (int rep = 0; rep < 40; ++rep) {
        auto x = random_vector(rng, 8, 0.0, 2.0);
        auto y = random_vector(rng, 8, 0.0, 2.0);
        std::sort(x.rbegin(), x.rend());
        std::sort(y.rbegin(), y.rend());
        double dot = 0.0;
        for (int i = 0; i < 8; ++i) dot += x[i] * y[i];
        CHECK(abel_pairing(x, y) == doctest::Approx(dot).epsilon(1e-12));
    }

    CHECK_THROWS_AS(abel_pairing({1, 2}, {1, 1}), std::domain_error);   // x increasing
    CHECK_THROWS_AS(abel_pairing({1, 1}, {0, 1}), std::domain_error);   // y increasing
    CHECK_THROWS_AS(abel_pairing({1, 1}, {1}), std::invalid_argument);  // length mismatch
}

TEST_CASE("hardy transform") {
    CHECK(hardy_transform({1, 1, 1}, 1.0) == std::vector<double>{1, 1, 1});
    const auto y = hardy_transform({1, 0}, 1.0);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(hardy_transform({1}, 0.0), std::invalid_argument);

    Rng rng(55);
    for (double q : {0.5, 1.0, 2.0}) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto x = random_vector(rng, 10);
            const auto xs = rearrange(x);
            const auto h = hardy_transform(x, q);
            REQUIRE(h.size() == xs.size());
            for (std::size_t i = 0; i < h.size(); ++i) {
                CHECK(h[i] >= xs[i] - 1e-12);  // running averages dominate
                if (i) CHECK(h[i] <= h[i - 1] + 1e-12);
            }
            // norm monotonicity under entrywise domination of rearrangements
            for (const auto& spec : corpus())
                CHECK(eval_norm(spec, x) <=
                      eval_norm(spec, h) + 1e-12 * std::max(1.0, eval_norm(spec, h)));
        }
    }
}

TEST_CASE("repetition profiles") {
    CHECK(RepetitionProfile{{2, 1}, {1, 1}}.expand() == std::vector<double>{2, 1});
    CHECK(RepetitionProfile{{2, 1}, {3, 0}}.expand() == std::vector<double>{2, 2, 2});
    CHECK(RepetitionProfile{{5, 4, 3}, {1, 1, 1}}.factor() == 2.0);
    CHECK(RepetitionProfile{{1}, {7}}.factor() == 14.0);

    CHECK_THROWS_AS((RepetitionProfile{{1, 2}, {1, 1}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RepetitionProfile{{1, -1}, {1, 1}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RepetitionProfile{{2, 1}, {1, -2}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RepetitionProfile{{2, 1}, {1}}.validate()), std::invalid_argument);

    Rng rng(808);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(6));
        RepetitionProfile prof;
        prof.base = random_vector(rng, n, 0.05, 2.0);
        std::sort(prof.base.rbegin(), prof.base.rend());
        prof.beta.resize(n);
        for (long& b : prof.beta) b = static_cast<long>(rng.uniform_int(5));
        if (std::accumulate(prof.beta.begin(), prof.beta.end(), 0L) == 0) prof.beta[0] = 1;

        // counting oracle for expand
        const auto y = prof.expand();
        for (int i = 0; i < n; ++i)
            CHECK(std::count(y.begin(), y.end(), prof.base[i]) >= prof.beta[i]);

        // loop oracle for the constant
        double sup = 1.0;
        long run = 0;
        for (int r = 0; r < n; ++r) {
            run += prof.beta[r];
            sup = std::max(sup, static_cast<double>(run) / (r + 1));
        }
        CHECK(prof.factor() == doctest::Approx(2.0 * sup));

        // the repetition inequality, for every corpus spec
        for (const auto& spec : corpus()) {
            const double lhs = eval_norm(spec, y);
            const double rhs = prof.factor() * eval_norm(spec, prof.base);
            CHECK(lhs <= rhs + 1e-12 * std::max(1.0, rhs));
        }
    }
}

TEST_CASE("weak-l1 equals the normalized level count on reciprocal tuples") {
    Rng rng(1234);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(7));
        std::vector<int> j(n);
        std::vector<double> y(n);
        for (int k = 0; k < n; ++k) {
            j[k] = 1 + static_cast<int>(rng.uniform_int(n));
            y[k] = 1.0 / j[k];
        }
        double h = 0.0;
        for (int r = 1; r <= n; ++r) {
            int cnt = 0;
            for (int k = 0; k < n; ++k)
                if (j[k] <= r) ++cnt;
            // cnt * (1/r) carries the same rounding as k * (1/j) on the
            // norm side; both maxima land on a common integer pair
            h = std::max(h, cnt * (1.0 / r));
        }
        CHECK(eval_norm(NormSpec::weak_lp(1.0), y) == h);
    }
}

TEST_CASE("norm spec json round trip") {
    for (const auto& spec : corpus()) {
        const auto j = spec.to_json();
        const auto back = NormSpec::from_json(j);
        CHECK(back.label() == spec.label());
        Rng rng(5);
        const auto x = random_vector(rng, 6);
        CHECK(eval_norm(back, x) == eval_norm(spec, x));
    }
    CHECK(NormSpec::from_json({{"family", "lp"}, {"p", 2.0}}).label() == "lp(2)");
    CHECK_THROWS_AS(NormSpec::from_json({{"family", "nope"}}), std::invalid_argument);
}
