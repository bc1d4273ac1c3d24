#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "symnorm/distributions.hpp"
#include "symnorm/errors.hpp"
#include "symnorm/rng.hpp"

namespace symnorm {

// Square matrix with non-negative entries whose rows and columns each sum
// to 1 within `tol` (checked at construction).  Row k is the law of the
// k-th coordinate of the product measure used throughout this module.
struct DoublyStochastic {
    int n = 0;
    std::vector<double> a;  // row-major, n*n

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    static DoublyStochastic checked(int n, std::vector<double> entries, double tol = 1e-9);
    static DoublyStochastic identity(int n);
    static DoublyStochastic uniform(int n);
    // perm[i] = 0-based column of the single 1 in row i
    static DoublyStochastic permutation(const std::vector<int>& perm);

    void validate(double tol = 1e-9) const;
    double max_deviation() const;  // worst |row or column sum - 1|

    nlohmann::json to_json() const;  // row-major nested arrays
    static DoublyStochastic from_json(const nlohmann::json& j, double tol = 1e-9);
};

// Alternating row/column normalization of a matrix with positive row and
// column sums.  Stops when every row and column sum is within `tol` of 1;
// throws convergence_error (carrying the achieved deviation) after
// `max_iter` full sweeps.
DoublyStochastic sinkhorn(int n, std::vector<double> entries, double tol = 1e-12,
                          int max_iter = 100000);

// Convex combination of permutation matrices.
struct BirkhoffDecomposition {
    struct Term {
        double weight;
        std::vector<int> perm;  // 0-based columns
    };
    std::vector<Term> terms;

    double weight_sum() const;
    DoublyStochastic reconstruct(int n) const;

    nlohmann::json to_json() const;  // columns serialized 1-based
    static BirkhoffDecomposition from_json(const nlohmann::json& j);
};

// Greedy peeling: repeatedly find a perfect matching on the support above
// `tol`, subtract the minimal matched entry, record the permutation.  Each
// step zeroes at least one entry, so at most n^2 - 2n + 2 terms appear and
// the weights sum to 1 up to n^2 * tol.
BirkhoffDecomposition birkhoff_decompose(const DoublyStochastic& ds, double tol = 1e-12);

// Level counts of a tuple j in {1..n}^n:
//   counts[r-1] = card{ i : j_i <= r },   H = max_r counts[r-1] / r.
// H coincides with the weak-l1 functional of the reciprocal vector
// (1/j_1, ..., 1/j_n).
struct LevelStatistic {
    std::vector<int> tuple;
    std::vector<int> counts;
    double H = 0.0;

    std::vector<double> reciprocals() const;
};

LevelStatistic level_stat(const std::vector<int>& tuple, int n);

// Exact law of the level count h_r under the product measure of `ds`:
// a sum of independent Bernoulli rows with q_i = sum of the first r entries
// of row i, evaluated by the O(n^2) convolution.  Returns the full pmf on
// {0, ..., n}.
std::vector<double> level_pmf(const DoublyStochastic& ds, int r);

// P(h_r = j) from level_pmf.
double level_prob_exact(const DoublyStochastic& ds, int r, int j);

// Majorant for P(h_r = j), valid for every doubly stochastic matrix:
// the binomial-mixture value attained at a permutation matrix,
//   sum_k C(r,k) C(n-r, j-k) (k/j)^j ((n-r-j+k)/(n-j))^(n-j),
// k ranging over max(0, j-(n-r)) .. min(j, r).  Requires 1 <= j <= r <= n
// with j < n; the degenerate corner j = r = n returns 1 (h_n = n a.s.).
double herz_bound(int n, int r, int j);

// P(h_r >= t*r), summed from the exact pmf.
double tail_prob(const DoublyStochastic& ds, int r, double t);

// 2 * (e^3 / t)^(t*r), the super-exponential tail majorant; requires t >= e^2.
double tail_bound(int r, double t);

// (E H^p)^(1/p) for H = sup_r h_r / r under the product measure, by exact
// enumeration of the n^n tuples.  Guarded at n <= max_n (7 by default,
// i.e. at most 823543 tuples); use mc_H_moment beyond that.
double exact_H_moment(const DoublyStochastic& ds, double p, int max_n = 7);

// One enumeration pass shared by several exponents.
std::vector<double> exact_H_moments(const DoublyStochastic& ds,
                                    const std::vector<double>& p_list, int max_n = 7);

// Monte Carlo counterpart; deterministic in (seed), independent of the
// thread count (fixed-size blocks reduced in index order).
McEstimate mc_H_moment(const DoublyStochastic& ds, double p,
                       std::size_t samples, std::uint64_t seed, int threads = 1);

// (E h^p)^(1/p) for h ~ Binomial(n, 1/n), computed in the log domain.
// Normalized by p / (1 + ln p) this stays bounded above and below --
// the family that shows the moment growth rate is attained.
double binom_moment(int n, double p);

// Certified bracket for G(a, b) = integral over [b, inf) of t^a (b/t)^t dt:
//   exp(-2a-1) (a / (1+ln a))^(a+1)  <=  G  <=  (a+1) (2a / (1+ln a))^a,
// requiring b >= 1 and a >= max(e^(e-1) b / 2, 4 b^2).  `value` comes from
// adaptive quadrature with a doubling horizon; the bracket is re-checked and
// numeric_error is thrown if the quadrature escapes it.
struct IntegralBracket {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

IntegralBracket integral_growth_bracket(double a, double b);

// Quadrature value and closed-form majorant for
//   D(a, b, d, r) = integral over [d, inf) of (b/t)^(t r) t^a dt
//                <= (2/r) e^(-d r) * { d^a          when 2a <= r d,
//                                      2 (2a/r)^a   when r d <= 2a },
// requiring b >= 1, a > 0, r > 0 and d >= b e.  `branch_da` records which
// branch of the majorant applied.
struct IntegralBound {
    double value = 0.0;
    double bound = 0.0;
    bool branch_da = true;
};

IntegralBound integral_decay_bound(double a, double b, double d, double r);

// Seeded matrix corpus.
std::vector<int> random_permutation(Rng& rng, int n);
DoublyStochastic random_doubly_stochastic(Rng& rng, int n, double tol = 1e-12);

}  // namespace symnorm
