#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace symnorm {

// Non-increasing rearrangement: |x| sorted in non-increasing order.
// Every norm in this library is evaluated on the rearrangement, so all of
// them are invariant under permutations and sign flips by construction.
std::vector<double> rearrange(const std::vector<double>& x);

// Description of a rearrangement-invariant functional on finite sequences.
//
// Families:
//   lp            (sum |x_i|^p)^(1/p),                  p >= 1
//   weak_lp       sup_k k^(1/p) x*_k,                   p >= 1 (quasi-norm)
//   k_functional  sum of the k largest |x_i|,           k >= 1
//   sup           x*_1
//   lorentz       (sum_k (f(k) k^(-1/w) x*_k)^w)^(1/w)  with weight f > 0;
//                 w = infinity means sup_k f(k) x*_k.
//                 q in (0,1] applies the family to |x|^(1/q) and raises the
//                 result to the q-th power (quasi-norm when q < 1).
//
// Unit vectors map to 1 for lp/weak_lp/k_functional/sup and to f(1)^q for
// lorentz, so a lorentz spec is normalized exactly when f(1) == 1.
struct NormSpec {
    enum class Family { lp, weak_lp, k_functional, sup, lorentz };

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    Family family = Family::lp;
    double p = 1.0;                 // lp, weak_lp
    int k = 1;                      // k_functional
    std::vector<double> weight;     // lorentz f(1..m)
    double w = 1.0;                 // lorentz secondary exponent; may be inf
    double q = 1.0;                 // lorentz outer power

    static NormSpec lp(double p);
    static NormSpec weak_lp(double p);
    static NormSpec k_functional(int k);
    static NormSpec sup();
    static NormSpec lorentz(std::vector<double> weight, double w, double q = 1.0);

    // throws std::invalid_argument when parameters are outside the family domain
    void validate() const;

    // value on a unit coordinate vector
    double unit_value() const;

    // true when the triangle inequality is not certified for this spec:
    // weak_lp always; lorentz with q < 1; lorentz with w = inf and
    // non-constant weight; finite-w lorentz whose ell_w weights f(k)^w / k
    // increase somewhere.  Property tests skip triangle checks on these.
    bool is_quasi() const;

    std::string label() const;

    nlohmann::json to_json() const;
    static NormSpec from_json(const nlohmann::json& j);
};

// Evaluates the functional described by `spec` on x.  Empty x gives 0.
// Throws std::domain_error on non-finite input and std::invalid_argument
// when a lorentz weight is shorter than x.
double eval_norm(const NormSpec& spec, const std::vector<double>& x);

// Weight grid f(k) = k^(1/s) of length n, the classical lorentz scale.
std::vector<double> lorentz_weight_grid(double s, int n);

// Summation-by-parts evaluation of sum_k x_k y_k:
//   y_n * sum_{i<=n} x_i + sum_{k<n} (y_k - y_{k+1}) * sum_{i<=k} x_i.
// Both inputs must be non-increasing and nonnegative (domain_error otherwise);
// on that cone the result equals the plain dot product.
double abel_pairing(const std::vector<double>& x, const std::vector<double>& y);

// Level-q running averages of the rearrangement:
//   y_k = ((1/k) sum_{i<=k} (x*_i)^(1/q))^q,  q > 0.
// Dominates the rearrangement entrywise: y_k >= x*_k.
std::vector<double> hardy_transform(const std::vector<double>& x, double q);

// A positive non-increasing base sequence together with repetition counts.
// expand() lists base[i] exactly beta[i] times; factor() is the constant
//   2 max{1, sup_r (1/r) sum_{i<=r} beta_i}
// for which ||expand()|| <= factor() * ||base|| holds in every 1-symmetric
// norm.
struct RepetitionProfile {
    std::vector<double> base;  // non-increasing, positive
    std::vector<long> beta;    // repetition counts, >= 0

    void validate() const;
    // base[i] repeated beta[i] times
    std::vector<double> expand() const;
    // 2 max{1, sup_r (1/r) sum_{i<=r} beta_i}; for every symmetric norm,
    // ||expand()|| <= factor() * ||base||
    double factor() const;
};

}  // namespace symnorm
