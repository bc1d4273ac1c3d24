#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "symnorm/errors.hpp"
#include "symnorm/norms.hpp"
#include "symnorm/rng.hpp"

namespace symnorm {

// Finitely supported law given by atoms (value, prob).  Values may repeat
// and may be negative; probabilities are strictly positive and sum to 1.
struct DiscreteDistribution {
    struct Atom {
        double value;
        double prob;
    };
    std::vector<Atom> atoms;

    void validate() const;
    std::size_t support_size() const { return atoms.size(); }

    // (E |value|^p)^(1/p)
    double abs_moment(double p) const;

    nlohmann::json to_json() const;
    static DiscreteDistribution from_json(const nlohmann::json& j);
};

nlohmann::json distributions_to_json(const std::vector<DiscreteDistribution>& ds);
std::vector<DiscreteDistribution> distributions_from_json(const nlohmann::json& j);

// Right-continuous step function on [0, total_width) given by consecutive
// pieces laid left to right.  value_at(s) returns the piece containing s,
// taking the right piece at a breakpoint, and 0 at or beyond the total
// width — the inf-based quantile convention.
struct QuantileStep {
    struct Piece {
        double width;
        double value;
    };
    std::vector<Piece> pieces;

    double total_width() const;
    double value_at(double s) const;
    double sup_value() const;

    // exact piecewise integral of value^p over [a, b] (0^0 = 1)
    double integrate_pow(double a, double b, double p) const;

    // same pieces with an extra breakpoint inserted at s
    QuantileStep split_at(double s) const;

    // all breakpoints (cumulative positions), including 0 and total_width
    std::vector<double> breakpoints() const;
};

// Quantile function of |d|: pieces (prob, |value|) sorted by |value|
// non-increasing, i.e. the non-increasing rearrangement of the law of |d|.
QuantileStep quantile_of(const DiscreteDistribution& d);

// Quantile function of the equal-weight mixture of |d_1|, ..., |d_n|.
// This is the rearrangement h* of the disjoint sum h of independent copies
// placed on n consecutive intervals of length 1/n.
QuantileStep mixture_quantile(const std::vector<DiscreteDistribution>& ds);

// Rearrangement data of the disjoint sum of an independent family:
//   hstar       rearrangement of the disjoint sum on [0, 1]
//   block_avgs  s_j = n * integral of h* over [(j-1)/n, j/n], non-increasing
//   tail_p(p)   (n * integral of h*^p over [0, 1/n])^(1/p)
struct RearrangementProfile {
    int n = 0;
    QuantileStep hstar;
    std::vector<double> block_avgs;

    double tail_p(double p) const;
};

RearrangementProfile disjoint_profile(const std::vector<DiscreteDistribution>& ds);

// Decomposition f = f1 + f2 + f3 of each coordinate's quantile realization
// against the threshold b = h*(1/n):
//   f1 = f restricted to where it exceeds b,
//   f2 = (f - f1) restricted to [0, 1/n),
//   f3 = the rest (bounded by b, living on [1/n, 1)).
// All parts share aligned breakpoints with the input quantile.
struct ThreeSplit {
    double b = 0.0;
    std::vector<QuantileStep> quantiles;  // quantile_of(d_i), breakpoints aligned
    std::vector<QuantileStep> part1, part2, part3;
};

ThreeSplit split_three_parts(const std::vector<DiscreteDistribution>& ds);

// Walks the full product support of an independent family, calling
// fn(weight, values) for every outcome with nonzero weight.  Throws
// resource_error when the product support exceeds `guard` outcomes.
inline constexpr std::size_t kProductSupportGuard = 1000000;

void enumerate_product(const std::vector<DiscreteDistribution>& ds,
                       const std::function<void(double, const std::vector<double>&)>& fn,
                       std::size_t guard = kProductSupportGuard);

// (E max_i |f_i|^p)^(1/p) by exact product enumeration.
double sup_moment(const std::vector<DiscreteDistribution>& ds, double p);

// (E ||sum_i f_i e_i||_X^p)^(1/p) by exact product enumeration.
double exact_norm_moment(const std::vector<DiscreteDistribution>& ds,
                         const NormSpec& spec, double p);

// Monte Carlo counterpart of exact_norm_moment.  Returns estimate and a
// delta-method standard error.  Deterministic in (seed); thread count only
// changes scheduling, never the result (fixed-size blocks reduced in index
// order).
struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

McEstimate mc_norm_moment(const std::vector<DiscreteDistribution>& ds,
                          const NormSpec& spec, double p,
                          std::size_t samples, std::uint64_t seed, int threads = 1);

// Draws one outcome per coordinate by inverse CDF on the atom list.
std::vector<double> sample_family(const std::vector<DiscreteDistribution>& ds, Rng& rng);

// Seeded corpus families.
enum class DistFamily { bernoulli, uniform_k_point, geometric_truncated };

DistFamily dist_family_from_string(const std::string& name);
std::string to_string(DistFamily f);

DiscreteDistribution make_distribution(Rng& rng, DistFamily family, int max_atoms = 4);
std::vector<DiscreteDistribution> make_independent_family(Rng& rng, int n, DistFamily family,
                                                          int max_atoms = 4);

}  // namespace symnorm
