#include "symnorm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symnorm/parallel.hpp"

namespace symnorm {

void DiscreteDistribution::validate() const {
    if (atoms.empty()) throw std::invalid_argument("distribution has no atoms");
    double s = 0.0;
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.value)) throw std::domain_error("atom value not finite");
        if (!(a.prob > 0.0) || !std::isfinite(a.prob))
            throw std::invalid_argument("atom probability must be positive");
        s += a.prob;
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw std::invalid_argument("atom probabilities sum to " + std::to_string(s));
}

double DiscreteDistribution::abs_moment(double p) const {
    validate();
    double s = 0.0;
    for (const Atom& a : atoms) s += a.prob * std::pow(std::fabs(a.value), p);
    return std::pow(s, 1.0 / p);
}

nlohmann::json DiscreteDistribution::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Atom& a : atoms) arr.push_back({a.value, a.prob});
    return nlohmann::json{{"atoms", arr}};
}

DiscreteDistribution DiscreteDistribution::from_json(const nlohmann::json& j) {
    DiscreteDistribution d;
    for (const auto& pair : j.at("atoms"))
        d.atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    d.validate();
    return d;
}

nlohmann::json distributions_to_json(const std::vector<DiscreteDistribution>& ds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : ds) arr.push_back(d.to_json());
    return arr;
}

std::vector<DiscreteDistribution> distributions_from_json(const nlohmann::json& j) {
    std::vector<DiscreteDistribution> ds;
    for (const auto& e : j) ds.push_back(DiscreteDistribution::from_json(e));
    return ds;
}

double QuantileStep::total_width() const {
    double w = 0.0;
    for (const Piece& p : pieces) w += p.width;
    return w;
}

double QuantileStep::value_at(double s) const {
    double pos = 0.0;
    for (const Piece& p : pieces) {
        pos += p.width;
        if (pos > s) return p.value;
    }
    return 0.0;
}

double QuantileStep::sup_value() const {
    double m = 0.0;
    for (const Piece& p : pieces) m = std::max(m, std::fabs(p.value));
    return m;
}

double QuantileStep::integrate_pow(double a, double b, double p) const {
    double pos = 0.0, s = 0.0;
    for (const Piece& pc : pieces) {
        const double lo = pos, hi = pos + pc.width;
        const double ov = std::min(hi, b) - std::max(lo, a);
        if (ov > 0.0) s += ov * (p == 1.0 ? pc.value : std::pow(pc.value, p));
        pos = hi;
    }
    // beyond the total width the function is 0; with the 0^0 = 1 convention
    // a p = 0 integrand still counts that measure
    if (p == 0.0 && b > pos) s += b - std::max(a, pos);
    return s;
}

QuantileStep QuantileStep::split_at(double s) const {
    QuantileStep out;
    double pos = 0.0;
    for (const Piece& pc : pieces) {
        const double hi = pos + pc.width;
        if (pos < s && s < hi) {
            out.pieces.push_back({s - pos, pc.value});
            out.pieces.push_back({hi - s, pc.value});
        } else {
            out.pieces.push_back(pc);
        }
        pos = hi;
    }
    return out;
}

std::vector<double> QuantileStep::breakpoints() const {
    std::vector<double> b{0.0};
    double pos = 0.0;
    for (const Piece& p : pieces) {
        pos += p.width;
        b.push_back(pos);
    }
    return b;
}

namespace {
// pieces sorted by value non-increasing, adjacent equal values merged
QuantileStep pack_sorted(std::vector<QuantileStep::Piece> raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    QuantileStep q;
    for (const auto& p : raw) {
        if (!q.pieces.empty() && q.pieces.back().value == p.value)
            q.pieces.back().width += p.width;
        else
            q.pieces.push_back(p);
    }
    return q;
}
}  // namespace

QuantileStep quantile_of(const DiscreteDistribution& d) {
    d.validate();
    std::vector<QuantileStep::Piece> raw;
    raw.reserve(d.atoms.size());
    for (const auto& a : d.atoms) raw.push_back({a.prob, std::fabs(a.value)});
    return pack_sorted(std::move(raw));
}

QuantileStep mixture_quantile(const std::vector<DiscreteDistribution>& ds) {
    if (ds.empty()) throw std::invalid_argument("empty family");
    const double n = static_cast<double>(ds.size());
    std::vector<QuantileStep::Piece> raw;
    for (const auto& d : ds) {
        d.validate();
        for (const auto& a : d.atoms) raw.push_back({a.prob / n, std::fabs(a.value)});
    }
    return pack_sorted(std::move(raw));
}

double RearrangementProfile::tail_p(double p) const {
    if (!(p >= 1.0)) throw std::invalid_argument("tail_p requires p >= 1");
    const double nn = static_cast<double>(n);
    return std::pow(nn * hstar.integrate_pow(0.0, 1.0 / nn, p), 1.0 / p);
}

RearrangementProfile disjoint_profile(const std::vector<DiscreteDistribution>& ds) {
    RearrangementProfile prof;
    prof.n = static_cast<int>(ds.size());
    prof.hstar = mixture_quantile(ds);
    const double n = static_cast<double>(prof.n);
    prof.block_avgs.resize(prof.n);
    for (int j = 1; j <= prof.n; ++j)
        prof.block_avgs[j - 1] = n * prof.hstar.integrate_pow((j - 1) / n, j / n, 1.0);
    return prof;
}

ThreeSplit split_three_parts(const std::vector<DiscreteDistribution>& ds) {
    if (ds.empty()) throw std::invalid_argument("empty family");
    const double n = static_cast<double>(ds.size());
    const double cut = 1.0 / n;

    ThreeSplit out;
    out.b = mixture_quantile(ds).value_at(cut);

    for (const auto& d : ds) {
        QuantileStep g = quantile_of(d).split_at(cut);
        QuantileStep p1 = g, p2 = g, p3 = g;
        double pos = 0.0;
        for (std::size_t i = 0; i < g.pieces.size(); ++i) {
            const double v = g.pieces[i].value;
            const bool above = v > out.b;
            const bool left = pos < cut;  // pieces are split at `cut`, so each lies on one side
            p1.pieces[i].value = above ? v : 0.0;
            p2.pieces[i].value = (!above && left) ? v : 0.0;
            p3.pieces[i].value = (!above && !left) ? v : 0.0;
            pos += g.pieces[i].width;
        }
        out.quantiles.push_back(std::move(g));
        out.part1.push_back(std::move(p1));
        out.part2.push_back(std::move(p2));
        out.part3.push_back(std::move(p3));
    }
    return out;
}

void enumerate_product(const std::vector<DiscreteDistribution>& ds,
                       const std::function<void(double, const std::vector<double>&)>& fn,
                       std::size_t guard) {
    if (ds.empty()) throw std::invalid_argument("empty family");
    std::size_t total = 1;
    for (const auto& d : ds) {
        d.validate();
        if (total > guard / std::max<std::size_t>(d.support_size(), 1))
            throw resource_error("product support exceeds " + std::to_string(guard) +
                                 " outcomes; use the Monte Carlo mode");
        total *= d.support_size();
    }
    const std::size_t n = ds.size();
    std::vector<double> vals(n);
    // depth-first walk in atom-index order keeps the visit sequence fixed
    std::function<void(std::size_t, double)> walk = [&](std::size_t i, double w) {
        if (i == n) {
            fn(w, vals);
            return;
        }
        for (const auto& a : ds[i].atoms) {
            const double wa = w * a.prob;
            if (wa == 0.0) continue;
            vals[i] = a.value;
            walk(i + 1, wa);
        }
    };
    walk(0, 1.0);
}

double sup_moment(const std::vector<DiscreteDistribution>& ds, double p) {
    double acc = 0.0;
    enumerate_product(ds, [&](double w, const std::vector<double>& vals) {
        double m = 0.0;
        for (double v : vals) m = std::max(m, std::fabs(v));
        acc += w * std::pow(m, p);
    });
    return std::pow(acc, 1.0 / p);
}

double exact_norm_moment(const std::vector<DiscreteDistribution>& ds,
                         const NormSpec& spec, double p) {
    double acc = 0.0;
    enumerate_product(ds, [&](double w, const std::vector<double>& vals) {
        acc += w * std::pow(eval_norm(spec, vals), p);
    });
    return std::pow(acc, 1.0 / p);
}

std::vector<double> sample_family(const std::vector<DiscreteDistribution>& ds, Rng& rng) {
    std::vector<double> vals(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double u = rng.uniform();
        double cum = 0.0;
        vals[i] = ds[i].atoms.back().value;
        for (const auto& a : ds[i].atoms) {
            cum += a.prob;
            if (u < cum) {
                vals[i] = a.value;
                break;
            }
        }
    }
    return vals;
}

namespace {
constexpr std::size_t kMcBlock = 4096;

struct McPartial {
    double sum = 0.0;
    double sumsq = 0.0;
};

McEstimate finish_mc(const std::vector<McPartial>& parts, std::size_t samples, double p) {
    double s = 0.0, s2 = 0.0;
    for (const auto& b : parts) {  // index order: independent of thread count
        s += b.sum;
        s2 += b.sumsq;
    }
    const double nn = static_cast<double>(samples);
    const double mean = s / nn;
    const double var = std::max(0.0, s2 / nn - mean * mean) / nn;
    McEstimate out;
    out.samples = samples;
    out.estimate = mean <= 0.0 ? 0.0 : std::pow(mean, 1.0 / p);
    out.std_error =
        mean <= 0.0 ? 0.0 : (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * std::sqrt(var);
    return out;
}
}  // namespace

McEstimate mc_norm_moment(const std::vector<DiscreteDistribution>& ds,
                          const NormSpec& spec, double p,
                          std::size_t samples, std::uint64_t seed, int threads) {
    if (samples == 0) throw std::invalid_argument("mc_norm_moment requires samples > 0");
    for (const auto& d : ds) d.validate();
    const std::size_t nblocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<McPartial> parts(nblocks);
    for_each_block(nblocks, threads, [&](std::size_t b) {
        const std::size_t lo = b * kMcBlock, hi = std::min(samples, lo + kMcBlock);
        McPartial acc;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = Rng::for_index(seed, i);
            const std::vector<double> vals = sample_family(ds, rng);
            const double v = std::pow(eval_norm(spec, vals), p);
            acc.sum += v;
            acc.sumsq += v * v;
        }
        parts[b] = acc;
    });
    return finish_mc(parts, samples, p);
}

DistFamily dist_family_from_string(const std::string& name) {
    if (name == "bernoulli") return DistFamily::bernoulli;
    if (name == "uniform-k-point") return DistFamily::uniform_k_point;
    if (name == "geometric-truncated") return DistFamily::geometric_truncated;
    throw std::invalid_argument("unknown distribution family: " + name);
}

std::string to_string(DistFamily f) {
    switch (f) {
        case DistFamily::bernoulli: return "bernoulli";
        case DistFamily::uniform_k_point: return "uniform-k-point";
        case DistFamily::geometric_truncated: return "geometric-truncated";
    }
    return "?";
}

DiscreteDistribution make_distribution(Rng& rng, DistFamily family, int max_atoms) {
    DiscreteDistribution d;
    switch (family) {
        case DistFamily::bernoulli: {
            const double q = rng.uniform(0.05, 0.95);
            d.atoms = {{1.0, q}, {0.0, 1.0 - q}};
            break;
        }
        case DistFamily::uniform_k_point: {
            const int k = 1 + static_cast<int>(rng.uniform_int(max_atoms));
            std::vector<double> vals(k), wts(k);
            double s = 0.0;
            for (int i = 0; i < k; ++i) vals[i] = rng.uniform(0.0, 2.0);
            for (int i = 0; i < k; ++i) {
                wts[i] = rng.uniform(0.05, 1.0);
                s += wts[i];
            }
            for (int i = 0; i < k; ++i) d.atoms.push_back({vals[i], wts[i] / s});
            break;
        }
        case DistFamily::geometric_truncated: {
            const int k = 2 + static_cast<int>(rng.uniform_int(std::max(1, max_atoms - 1)));
            const double rho = rng.uniform(0.3, 0.8);
            double s = 0.0, r = 1.0;
            std::vector<double> wts(k);
            for (int m = 0; m < k; ++m) {
                wts[m] = r;
                s += r;
                r *= rho;
            }
            for (int m = 0; m < k; ++m)
                d.atoms.push_back({std::ldexp(1.0, -m), wts[m] / s});
            break;
        }
    }
    d.validate();
    return d;
}

std::vector<DiscreteDistribution> make_independent_family(Rng& rng, int n, DistFamily family,
                                                          int max_atoms) {
    std::vector<DiscreteDistribution> ds;
    ds.reserve(n);
    for (int i = 0; i < n; ++i) ds.push_back(make_distribution(rng, family, max_atoms));
    return ds;
}

}  // namespace symnorm
