#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "symnorm/combinatorics.hpp"
#include "symnorm/distributions.hpp"
#include "symnorm/norms.hpp"
#include "symnorm/rng.hpp"

namespace symnorm {

// Square coefficient matrix with the rearrangement machinery used by the
// permutation-average and diagonal-comparison checks.
struct MatrixInstance {
    int n = 0;
    std::vector<double> a;  // row-major

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    static MatrixInstance from_entries(int n, std::vector<double> entries);
    // alpha_ij = 1/j (columns 1..n), the reciprocal-column instance whose
    // induced row law is exactly uniform
    static MatrixInstance harmonic(int n);
    static MatrixInstance random(Rng& rng, int n, double lo = -1.0, double hi = 1.0);

    // |entries| sorted non-increasing, length n^2
    std::vector<double> rearrangement() const;
    // (alpha*_{(k-1)n+1})_{k=1..n}: every n-th value of the rearrangement
    std::vector<double> diag_sample() const;
    // (1/n) sum of the n largest |entries|
    double top_n_mean() const;

    nlohmann::json to_json() const;
    static MatrixInstance from_json(const nlohmann::json& j);
};

// Exact average over all n! permutations of sup_i |a_{pi(i), i}|, bracketed
// by [top_n_mean / 2, top_n_mean].  Guarded at n <= max_n.
struct KsResult {
    double average = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

KsResult ks_average(const MatrixInstance& alpha, int max_n = 8);

// Exact average over all n! permutations of sup_{i <= floor(n/k)} |x_{pi(i)}|,
// bracketed by [(1/4) m_k, 2 m_k] where m_k is the mean of the k largest
// |x_j|.  Requires 1 <= k <= n; guarded at n <= max_n.
struct KkResult {
    double average = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    int m = 0;  // floor(n/k)
};

KkResult kk_check(const std::vector<double>& x, int k, int max_n = 8);

// Compares the p-th moment of ||(alpha_{k, j_k})_k||_X over uniformly random
// column tuples (exact n^n enumeration, or Monte Carlo when mc is set)
// against the norm of the diagonal sample.
struct DiagonalComparison {
    double lhs = 0.0;         // (n^-n sum_tuples ||.||^p)^(1/p)
    double rhs = 0.0;         // ||diag_sample||_X
    double ratio = 0.0;       // lhs / rhs
    double normalized = 0.0;  // ratio * (1 + ln p) / p
    double std_error = 0.0;   // 0 in exact mode
};

DiagonalComparison diagonal_compare(const MatrixInstance& alpha, const NormSpec& spec,
                                    double p, bool mc = false, std::size_t samples = 20000,
                                    std::uint64_t seed = 1, int threads = 1, int max_n = 7);

// Row-wise value-band counts against the thresholds T_k = alpha*_{(k-1)n+1}
// (with T_{n+1} = 0):  mu_ik = (1/n) card{ j : T_{k+1} < |alpha_ij| <= T_k }.
// Doubly stochastic whenever the thresholds separate the rows cleanly;
// validated at `tol` (ties across a threshold can break the column sums,
// in which case validation throws).
DoublyStochastic induced_stochastic(const MatrixInstance& alpha, double tol = 1e-9);

// ---- campaign running and reports ----

struct RunConfig {
    std::string campaign;
    std::uint64_t seed = 1;
    int count = 100;
    int n = 5;  // instance sizes are drawn from 2..n
    std::vector<double> p_list{1.0, 2.0, 4.0, 8.0};
    std::vector<NormSpec> norms;  // empty: campaign default corpus
    std::string family = "all";   // "all" rotates the three generator families
    bool mc = false;
    std::size_t samples = 20000;
    int threads = 1;

    nlohmann::json to_json() const;  // resolved config embedded in artifacts
};

struct CampaignResult {
    std::string name;
    nlohmann::json config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // formatted cells
    std::vector<std::string> failures;           // descriptors of failed assertions
    std::vector<std::pair<std::string, double>> constants;  // empirical constants
    std::string markdown;  // optional digest (growth table)

    bool ok() const { return failures.empty(); }
};

// Verification campaigns.  Each runs `count` seeded instances (deterministic
// in cfg.seed, independent of cfg.threads) and asserts its inequality on
// every one, collecting empirical constants along the way.
CampaignResult run_verify_main(const RunConfig& cfg);
CampaignResult run_verify_geiss(const RunConfig& cfg);
CampaignResult run_verify_ks(const RunConfig& cfg);
CampaignResult run_verify_prop21(const RunConfig& cfg);
CampaignResult run_verify_comb(const RunConfig& cfg);
CampaignResult run_herz(const RunConfig& cfg);
CampaignResult run_tails(const RunConfig& cfg);
CampaignResult run_integrals(const RunConfig& cfg);
CampaignResult run_birkhoff(const RunConfig& cfg);
CampaignResult run_growth(const RunConfig& cfg);

// Default norm corpus used by the verification campaigns: l1, l2, sup,
// weak-l1 and the top-2 partial sum.
std::vector<NormSpec> default_norm_corpus();

// Lower constant of the two-sided moment comparison, 1 / (2 + 4 sqrt(2)).
double main_lower_constant();

// Upper bound for E[H] at p = 1: 2 + e^4.
double level_sup_mean_bound();

// Report-only tail-shape constant: smallest C with
// P(V > t D) <= C exp(-t ln t / C) over t in {2, 4, 8}, from the exact law
// of V given as (weight, value) pairs.  Returns 0 when every tail is empty.
double tail_shape_constant(const std::vector<std::pair<double, double>>& law, double scale);

}  // namespace symnorm
