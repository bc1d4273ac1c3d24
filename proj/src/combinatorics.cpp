#include "symnorm/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "symnorm/parallel.hpp"
#include "symnorm/quadrature.hpp"

namespace symnorm {

namespace {
double binom_coeff(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}
}  // namespace

DoublyStochastic DoublyStochastic::checked(int n, std::vector<double> entries, double tol) {
    if (n < 1 || entries.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("doubly stochastic: bad dimensions");
    DoublyStochastic ds;
    ds.n = n;
    ds.a = std::move(entries);
    ds.validate(tol);
    return ds;
}

DoublyStochastic DoublyStochastic::identity(int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    return permutation(perm);
}

DoublyStochastic DoublyStochastic::uniform(int n) {
    DoublyStochastic ds;
    ds.n = n;
    ds.a.assign(static_cast<std::size_t>(n) * n, 1.0 / n);
    return ds;
}

DoublyStochastic DoublyStochastic::permutation(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(n, false);
    for (int c : perm) {
        if (c < 0 || c >= n || seen[c]) throw std::invalid_argument("not a permutation");
        seen[c] = true;
    }
    DoublyStochastic ds;
    ds.n = n;
    ds.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) ds.at(i, perm[i]) = 1.0;
    return ds;
}

double DoublyStochastic::max_deviation() const {
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
        double rs = 0.0, cs = 0.0;
        for (int j = 0; j < n; ++j) {
            rs += at(i, j);
            cs += at(j, i);
        }
        dev = std::max({dev, std::fabs(rs - 1.0), std::fabs(cs - 1.0)});
    }
    return dev;
}

void DoublyStochastic::validate(double tol) const {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("doubly stochastic: bad dimensions");
    for (double v : a) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("doubly stochastic: entries must be non-negative");
    }
    const double dev = max_deviation();
    if (dev > tol)
        throw std::invalid_argument("doubly stochastic: row/column sums deviate by " +
                                    std::to_string(dev));
}

nlohmann::json DoublyStochastic::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < n; ++j) row.push_back(at(i, j));
        rows.push_back(row);
    }
    return rows;
}

DoublyStochastic DoublyStochastic::from_json(const nlohmann::json& j, double tol) {
    const int n = static_cast<int>(j.size());
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : j) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("doubly stochastic: matrix not square");
        for (const auto& v : row) entries.push_back(v.get<double>());
    }
    return checked(n, std::move(entries), tol);
}

DoublyStochastic sinkhorn(int n, std::vector<double> entries, double tol, int max_iter) {
    if (n < 1 || entries.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("sinkhorn: bad dimensions");
    for (double v : entries)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("sinkhorn: entries must be non-negative");

    auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    double dev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double rs = 0.0;
            for (int j = 0; j < n; ++j) rs += entries[idx(i, j)];
            if (!(rs > 0.0)) throw std::invalid_argument("sinkhorn: zero row sum");
            for (int j = 0; j < n; ++j) entries[idx(i, j)] /= rs;
        }
        for (int j = 0; j < n; ++j) {
            double cs = 0.0;
            for (int i = 0; i < n; ++i) cs += entries[idx(i, j)];
            if (!(cs > 0.0)) throw std::invalid_argument("sinkhorn: zero column sum");
            for (int i = 0; i < n; ++i) entries[idx(i, j)] /= cs;
        }
        dev = 0.0;
        for (int i = 0; i < n; ++i) {
            double rs = 0.0, cs = 0.0;
            for (int j = 0; j < n; ++j) {
                rs += entries[idx(i, j)];
                cs += entries[idx(j, i)];
            }
            dev = std::max({dev, std::fabs(rs - 1.0), std::fabs(cs - 1.0)});
        }
        if (dev <= tol) {
            DoublyStochastic ds;
            ds.n = n;
            ds.a = std::move(entries);
            return ds;
        }
    }
    throw convergence_error("sinkhorn: tolerance " + std::to_string(tol) + " not reached in " +
                                std::to_string(max_iter) + " sweeps (achieved " +
                                std::to_string(dev) + ")",
                            dev);
}

double BirkhoffDecomposition::weight_sum() const {
    double s = 0.0;
    for (const Term& t : terms) s += t.weight;
    return s;
}

DoublyStochastic BirkhoffDecomposition::reconstruct(int n) const {
    DoublyStochastic ds;
    ds.n = n;
    ds.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (const Term& t : terms) {
        if (static_cast<int>(t.perm.size()) != n)
            throw std::invalid_argument("birkhoff term has wrong dimension");
        for (int i = 0; i < n; ++i) ds.at(i, t.perm[i]) += t.weight;
    }
    return ds;
}

nlohmann::json BirkhoffDecomposition::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Term& t : terms) {
        nlohmann::json perm = nlohmann::json::array();
        for (int c : t.perm) perm.push_back(c + 1);  // columns 1-based in artifacts
        arr.push_back({{"weight", t.weight}, {"perm", perm}});
    }
    return nlohmann::json{{"terms", arr}};
}

BirkhoffDecomposition BirkhoffDecomposition::from_json(const nlohmann::json& j) {
    BirkhoffDecomposition out;
    for (const auto& t : j.at("terms")) {
        Term term;
        term.weight = t.at("weight").get<double>();
        for (const auto& c : t.at("perm")) term.perm.push_back(c.get<int>() - 1);
        out.terms.push_back(std::move(term));
    }
    return out;
}

namespace {
// Kuhn's augmenting-path matching on the support graph; rows and columns
// are scanned in index order, so the result is deterministic.
bool try_augment(int i, int n, const std::vector<char>& adj, std::vector<char>& seen,
                 std::vector<int>& match_col) {
    for (int j = 0; j < n; ++j) {
        if (!adj[static_cast<std::size_t>(i) * n + j] || seen[j]) continue;
        seen[j] = 1;
        if (match_col[j] < 0 || try_augment(match_col[j], n, adj, seen, match_col)) {
            match_col[j] = i;
            return true;
        }
    }
    return false;
}
}  // namespace

BirkhoffDecomposition birkhoff_decompose(const DoublyStochastic& ds, double tol) {
    const int n = ds.n;
    std::vector<double> a = ds.a;
    BirkhoffDecomposition out;

    const int max_terms = n * n + 1;  // loop guard; the real bound is n^2 - 2n + 2
    for (int step = 0; step < max_terms; ++step) {
        double rem = 0.0;
        for (double v : a) rem = std::max(rem, v);
        if (rem <= tol) return out;

        std::vector<char> adj(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) adj[k] = a[k] > tol ? 1 : 0;
        std::vector<int> match_col(n, -1);
        int matched = 0;
        for (int i = 0; i < n; ++i) {
            std::vector<char> seen(n, 0);
            if (try_augment(i, n, adj, seen, match_col)) ++matched;
        }
        if (matched < n)
            throw numeric_error("birkhoff: support lost a perfect matching at residual " +
                                std::to_string(rem));

        BirkhoffDecomposition::Term term;
        term.perm.assign(n, -1);
        for (int j = 0; j < n; ++j) term.perm[match_col[j]] = j;
        term.weight = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            term.weight = std::min(term.weight, a[static_cast<std::size_t>(i) * n + term.perm[i]]);
        for (int i = 0; i < n; ++i)
            a[static_cast<std::size_t>(i) * n + term.perm[i]] -= term.weight;
        out.terms.push_back(std::move(term));
    }
    throw numeric_error("birkhoff: term guard exceeded");
}

std::vector<double> LevelStatistic::reciprocals() const {
    std::vector<double> r(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) r[i] = 1.0 / tuple[i];
    return r;
}

LevelStatistic level_stat(const std::vector<int>& tuple, int n) {
    if (static_cast<int>(tuple.size()) != n)
        throw std::domain_error("level_stat: tuple length must equal n");
    for (int v : tuple)
        if (v < 1 || v > n) throw std::domain_error("level_stat: tuple entries must lie in 1..n");
    LevelStatistic st;
    st.tuple = tuple;
    st.counts.assign(n, 0);
    std::vector<int> occ(n + 1, 0);
    for (int v : tuple) ++occ[v];
    int run = 0;
    for (int r = 1; r <= n; ++r) {
        run += occ[r];
        st.counts[r - 1] = run;
        // run * (1/r), not run / r: the same rounding as k * (1/j) inside the
        // weak-l1 evaluation, so H equals that norm of the reciprocals
        // bit-for-bit (the two maxima are attained at a common integer pair)
        st.H = std::max(st.H, run * (1.0 / r));
    }
    return st;
}

std::vector<double> level_pmf(const DoublyStochastic& ds, int r) {
    const int n = ds.n;
    if (r < 1 || r > n) throw std::domain_error("level_pmf: r must lie in 1..n");
    std::vector<double> pmf(n + 1, 0.0);
    pmf[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        double q = 0.0;
        for (int s = 0; s < r; ++s) q += ds.at(i, s);
        q = std::clamp(q, 0.0, 1.0);
        for (int j = i + 1; j >= 1; --j) pmf[j] = pmf[j] * (1.0 - q) + pmf[j - 1] * q;
        pmf[0] *= (1.0 - q);
    }
    return pmf;
}

double level_prob_exact(const DoublyStochastic& ds, int r, int j) {
    if (j < 0 || j > ds.n) throw std::domain_error("level_prob_exact: j must lie in 0..n");
    return level_pmf(ds, r)[j];
}

double herz_bound(int n, int r, int j) {
    if (j == n && r == n) return 1.0;  // h_n = n almost surely
    if (!(1 <= j && j <= r && r <= n && j < n))
        throw std::domain_error("herz_bound requires 1 <= j <= r <= n with j < n");
    // value of the concave level-probability functional at a permutation
    // matrix, where it is maximal over the doubly stochastic polytope
    double s = 0.0;
    const int k_lo = std::max(0, j - (n - r)), k_hi = std::min(j, r);
    for (int k = k_lo; k <= k_hi; ++k) {
        const double frac1 = std::pow(static_cast<double>(k) / j, j);
        const double frac2 =
            std::pow(static_cast<double>(n - r - j + k) / (n - j), n - j);
        s += binom_coeff(r, k) * binom_coeff(n - r, j - k) * frac1 * frac2;
    }
    return s;
}

double tail_prob(const DoublyStochastic& ds, int r, double t) {
    if (!(t > 0.0)) throw std::domain_error("tail_prob requires t > 0");
    const std::vector<double> pmf = level_pmf(ds, r);
    const double lo = std::ceil(t * r);
    double s = 0.0;
    for (int j = ds.n; j >= 0 && j >= lo; --j) s += pmf[j];
    return s;
}

double tail_bound(int r, double t) {
    if (r < 1) throw std::domain_error("tail_bound requires r >= 1");
    if (!(t >= std::exp(2.0))) throw std::domain_error("tail_bound requires t >= e^2");
    return 2.0 * std::exp(t * r * (3.0 - std::log(t)));
}

namespace {
void enumerate_tuples(const DoublyStochastic& ds, int max_n,
                      const std::function<void(double, double)>& on_leaf) {
    const int n = ds.n;
    if (n > max_n)
        throw resource_error("exact level-sup moment: n^n enumeration guarded at n <= " +
                             std::to_string(max_n) + "; use the Monte Carlo mode");
    std::vector<int> occ(n + 1, 0);
    // columns ascend at every depth: a fixed leaf order shared by all exact
    // enumerations in the library
    std::function<void(int, double)> walk = [&](int depth, double w) {
        if (depth == n) {
            double H = 0.0;
            int run = 0;
            for (int r = 1; r <= n; ++r) {
                run += occ[r];
                H = std::max(H, run * (1.0 / r));  // rounding matches level_stat
            }
            on_leaf(w, H);
            return;
        }
        for (int j = 1; j <= n; ++j) {
            const double wj = w * ds.at(depth, j - 1);
            if (wj == 0.0) continue;
            ++occ[j];
            walk(depth + 1, wj);
            --occ[j];
        }
    };
    walk(0, 1.0);
}
}  // namespace

std::vector<double> exact_H_moments(const DoublyStochastic& ds,
                                    const std::vector<double>& p_list, int max_n) {
    std::vector<double> sums(p_list.size(), 0.0);
    enumerate_tuples(ds, max_n, [&](double w, double H) {
        for (std::size_t t = 0; t < p_list.size(); ++t) sums[t] += w * std::pow(H, p_list[t]);
    });
    std::vector<double> out(p_list.size());
    for (std::size_t t = 0; t < p_list.size(); ++t) out[t] = std::pow(sums[t], 1.0 / p_list[t]);
    return out;
}

double exact_H_moment(const DoublyStochastic& ds, double p, int max_n) {
    return exact_H_moments(ds, {p}, max_n)[0];
}

namespace {
constexpr std::size_t kMcBlock = 4096;
}

McEstimate mc_H_moment(const DoublyStochastic& ds, double p,
                       std::size_t samples, std::uint64_t seed, int threads) {
    if (samples == 0) throw std::invalid_argument("mc_H_moment requires samples > 0");
    const int n = ds.n;
    const std::size_t nblocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<double> bsum(nblocks, 0.0), bsumsq(nblocks, 0.0);
    for_each_block(nblocks, threads, [&](std::size_t b) {
        const std::size_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
        double s = 0.0, s2 = 0.0;
        std::vector<int> occ(n + 1);
        for (std::size_t it = lo; it < hi; ++it) {
            Rng rng = Rng::for_index(seed, it);
            std::fill(occ.begin(), occ.end(), 0);
            for (int i = 0; i < n; ++i) {
                const double u = rng.uniform();
                double cum = 0.0;
                int pick = n;
                for (int j = 1; j <= n; ++j) {
                    cum += ds.at(i, j - 1);
                    if (u < cum) {
                        pick = j;
                        break;
                    }
                }
                ++occ[pick];
            }
            double H = 0.0;
            int run = 0;
            for (int r = 1; r <= n; ++r) {
                run += occ[r];
                H = std::max(H, run * (1.0 / r));  // rounding matches level_stat
            }
            const double hp = std::pow(H, p);
            s += hp;
            s2 += hp * hp;
        }
        bsum[b] = s;
        bsumsq[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {  // index order
        s += bsum[b];
        s2 += bsumsq[b];
    }
    const double nn = static_cast<double>(samples);
    const double mean = s / nn;
    const double var = std::max(0.0, s2 / nn - mean * mean) / nn;
    McEstimate out;
    out.samples = samples;
    out.estimate = std::pow(mean, 1.0 / p);
    out.std_error = (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * std::sqrt(var);
    return out;
}

double binom_moment(int n, double p) {
    if (n < 1 || !(p >= 1.0)) throw std::domain_error("binom_moment requires n >= 1, p >= 1");
    if (n == 1) return 1.0;
    const double lp = -std::log(static_cast<double>(n));
    const double lq = std::log1p(-1.0 / n);
    const double lgn = std::lgamma(n + 1.0);
    // log-domain Poisson-binomial terms; k = 0 contributes nothing
    std::vector<double> lt(n);
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        lt[k - 1] = lgn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp +
                    (n - k) * lq + p * std::log(static_cast<double>(k));
        m = std::max(m, lt[k - 1]);
    }
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += std::exp(lt[k - 1] - m);
    return std::exp((m + std::log(s)) / p);
}

IntegralBracket integral_growth_bracket(double a, double b) {
    if (!(b >= 1.0)) throw std::domain_error("integral_growth_bracket requires b >= 1");
    const double a_min = std::max(std::exp(std::exp(1.0) - 1.0) * b / 2.0, 4.0 * b * b);
    if (!(a >= a_min))
        throw std::domain_error("integral_growth_bracket requires a >= max(e^(e-1) b/2, 4 b^2)");

    const double lb = std::log(b);
    auto f = [a, lb](double t) { return std::exp(a * std::log(t) + t * (lb - std::log(t))); };
    // integrand peaks where a/t = ln(t/b) + 1, hence before t = a
    const double horizon = std::max(2.0 * a, std::exp(2.0) * b);

    IntegralBracket out;
    out.value = integrate_to_infinity(f, b, horizon);
    const double la = 1.0 + std::log(a);
    out.lower = std::exp(-2.0 * a - 1.0) * std::pow(a / la, a + 1.0);
    out.upper = (a + 1.0) * std::pow(2.0 * a / la, a);
    if (!(out.lower <= out.value && out.value <= out.upper))
        throw numeric_error("integral_growth_bracket: quadrature escaped the certified bracket");
    return out;
}

IntegralBound integral_decay_bound(double a, double b, double d, double r) {
    if (!(b >= 1.0) || !(a > 0.0) || !(r > 0.0))
        throw std::domain_error("integral_decay_bound requires b >= 1, a > 0, r > 0");
    if (!(d >= b * std::exp(1.0) * (1.0 - 1e-15)))
        throw std::domain_error("integral_decay_bound requires d >= b e");

    const double lb = std::log(b);
    auto f = [a, lb, r](double t) {
        return std::exp(t * r * (lb - std::log(t)) + a * std::log(t));
    };
    // critical point satisfies a/t = r ln(t/b) + r, hence t <= a/r
    const double horizon = std::max(2.0 * d, 2.0 * (a / r + 1.0));

    IntegralBound out;
    out.value = integrate_to_infinity(f, d, horizon);
    out.branch_da = 2.0 * a <= r * d;
    const double body = out.branch_da ? std::pow(d, a) : 2.0 * std::pow(2.0 * a / r, a);
    out.bound = (2.0 / r) * std::exp(-d * r) * body;
    if (!(out.value <= out.bound))
        throw numeric_error("integral_decay_bound: quadrature exceeded the certified bound");
    return out;
}

std::vector<int> random_permutation(Rng& rng, int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

DoublyStochastic random_doubly_stochastic(Rng& rng, int n, double tol) {
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    for (double& v : entries) v = rng.uniform(0.1, 1.0);
    return sinkhorn(n, std::move(entries), tol);
}

}  // namespace symnorm
