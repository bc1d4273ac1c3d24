#include "symnorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace symnorm {

namespace {
constexpr double kInf = NormSpec::kInf;

void require_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::domain_error("non-finite entry in input vector");
}
}  // namespace

std::vector<double> rearrange(const std::vector<double>& x) {
    require_finite(x);
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::fabs(x[i]);
    std::stable_sort(r.begin(), r.end(), std::greater<double>());
    return r;
}

NormSpec NormSpec::lp(double p) {
    NormSpec s;
    s.family = Family::lp;
    s.p = p;
    s.validate();
    return s;
}

NormSpec NormSpec::weak_lp(double p) {
    NormSpec s;
    s.family = Family::weak_lp;
    s.p = p;
    s.validate();
    return s;
}

NormSpec NormSpec::k_functional(int k) {
    NormSpec s;
    s.family = Family::k_functional;
    s.k = k;
    s.validate();
    return s;
}

NormSpec NormSpec::sup() {
    NormSpec s;
    s.family = Family::sup;
    return s;
}

NormSpec NormSpec::lorentz(std::vector<double> weight, double w, double q) {
    NormSpec s;
    s.family = Family::lorentz;
    s.weight = std::move(weight);
    s.w = w;
    s.q = q;
    s.validate();
    return s;
}

void NormSpec::validate() const {
    switch (family) {
        case Family::lp:
        case Family::weak_lp:
            if (!(p >= 1.0) || !std::isfinite(p))
                throw std::invalid_argument("lp/weak_lp requires finite p >= 1");
            break;
        case Family::k_functional:
            if (k < 1) throw std::invalid_argument("k_functional requires k >= 1");
            break;
        case Family::sup:
            break;
        case Family::lorentz:
            if (weight.empty()) throw std::invalid_argument("lorentz requires a nonempty weight");
            for (double f : weight)
                if (!(f > 0.0) || !std::isfinite(f))
                    throw std::invalid_argument("lorentz weight entries must be positive and finite");
            if (!(w >= 1.0))  // inf passes
                throw std::invalid_argument("lorentz requires w >= 1 (or infinity)");
            if (!(q > 0.0 && q <= 1.0))
                throw std::invalid_argument("lorentz requires q in (0, 1]");
            break;
    }
}

double NormSpec::unit_value() const {
    if (family == Family::lorentz) return std::pow(weight.at(0), q);
    return 1.0;
}

bool NormSpec::is_quasi() const {
    switch (family) {
        case Family::lp:
        case Family::k_functional:
        case Family::sup:
            return false;
        case Family::weak_lp:
            return true;
        case Family::lorentz: {
            if (q < 1.0) return true;
            if (w == kInf) {
                for (std::size_t i = 1; i < weight.size(); ++i)
                    if (weight[i] != weight[0]) return true;
                return false;
            }
            // ell_w with weights c_k = f(k)^w / k; a norm when c is non-increasing
            double prev = std::pow(weight[0], w);
            for (std::size_t i = 1; i < weight.size(); ++i) {
                double c = std::pow(weight[i], w) / static_cast<double>(i + 1);
                if (c > prev * (1.0 + 1e-15)) return true;
                prev = c;
            }
            return false;
        }
    }
    return true;
}

std::string NormSpec::label() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    switch (family) {
        case Family::lp: return "lp(" + num(p) + ")";
        case Family::weak_lp: return "weak_lp(" + num(p) + ")";
        case Family::k_functional: return "k_functional(" + std::to_string(k) + ")";
        case Family::sup: return "sup";
        case Family::lorentz: {
            std::string ws = (w == kInf) ? "inf" : num(w);
            std::string out = "lorentz(m=" + std::to_string(weight.size()) + ",w=" + ws;
            if (q != 1.0) out += ",q=" + num(q);
            return out + ")";
        }
    }
    return "?";
}

nlohmann::json NormSpec::to_json() const {
    nlohmann::json j;
    switch (family) {
        case Family::lp:
            j["family"] = "lp";
            j["p"] = p;
            break;
        case Family::weak_lp:
            j["family"] = "weak_lp";
            j["p"] = p;
            break;
        case Family::k_functional:
            j["family"] = "k_functional";
            j["k"] = k;
            break;
        case Family::sup:
            j["family"] = "sup";
            break;
        case Family::lorentz:
            j["family"] = "lorentz";
            j["weight"] = weight;
            if (w == kInf)
                j["w"] = "inf";
            else
                j["w"] = w;
            if (q != 1.0) j["q"] = q;
            break;
    }
    return j;
}

NormSpec NormSpec::from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "lp") return lp(j.at("p").get<double>());
    if (fam == "weak_lp") return weak_lp(j.at("p").get<double>());
    if (fam == "k_functional") return k_functional(j.at("k").get<int>());
    if (fam == "sup") return sup();
    if (fam == "lorentz") {
        double w = kInf;
        if (j.contains("w") && !j.at("w").is_string()) w = j.at("w").get<double>();
        double q = j.value("q", 1.0);
        return lorentz(j.at("weight").get<std::vector<double>>(), w, q);
    }
    throw std::invalid_argument("unknown norm family: " + fam);
}

double eval_norm(const NormSpec& spec, const std::vector<double>& x) {
    spec.validate();
    std::vector<double> xs = rearrange(x);
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;

    switch (spec.family) {
        case NormSpec::Family::sup:
            return xs[0];
        case NormSpec::Family::lp: {
            // scale by the max so that xs[i]/m <= 1; avoids overflow for large p
            const double m = xs[0];
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (double v : xs) s += std::pow(v / m, spec.p);
            return m * std::pow(s, 1.0 / spec.p);
        }
        case NormSpec::Family::weak_lp: {
            // p = 1 multiplies by the exact integer k: the level-count
            // identity sup_r h_r / r relies on exact rational agreement
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double kf = static_cast<double>(i + 1);
                const double w = spec.p == 1.0 ? kf : std::pow(kf, 1.0 / spec.p);
                best = std::max(best, w * xs[i]);
            }
            return best;
        }
        case NormSpec::Family::k_functional: {
            const std::size_t m = std::min<std::size_t>(spec.k, n);
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += xs[i];
            return s;
        }
        case NormSpec::Family::lorentz: {
            if (spec.weight.size() < n)
                throw std::invalid_argument("lorentz weight shorter than input vector");
            // t -> t^(1/q) is monotone, so the rearrangement of |x|^(1/q)
            // is the entrywise power of the rearrangement of |x|.
            const double invq = 1.0 / spec.q;
            if (spec.w == kInf) {
                double best = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    best = std::max(best, spec.weight[i] * std::pow(xs[i], invq));
                return std::pow(best, spec.q);
            }
            double scale = 0.0;
            std::vector<double> terms(n);
            for (std::size_t i = 0; i < n; ++i) {
                terms[i] = spec.weight[i] *
                           std::pow(static_cast<double>(i + 1), -1.0 / spec.w) *
                           std::pow(xs[i], invq);
                scale = std::max(scale, terms[i]);
            }
            if (scale == 0.0) return 0.0;
            double s = 0.0;
            for (double t : terms) s += std::pow(t / scale, spec.w);
            return std::pow(scale * std::pow(s, 1.0 / spec.w), spec.q);
        }
    }
    throw std::logic_error("unreachable norm family");
}

std::vector<double> lorentz_weight_grid(double s, int n) {
    if (!(s > 0.0) || n < 1) throw std::invalid_argument("lorentz_weight_grid requires s > 0, n >= 1");
    std::vector<double> f(n);
    for (int k = 1; k <= n; ++k) f[k - 1] = std::pow(static_cast<double>(k), 1.0 / s);
    return f;
}

double abel_pairing(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("abel_pairing requires equal lengths");
    require_finite(x);
    require_finite(y);
    const auto sorted_nonneg = [](const std::vector<double>& v) {
        if (!v.empty() && v.back() < 0.0) return false;
        return std::is_sorted(v.rbegin(), v.rend());
    };
    if (!sorted_nonneg(x) || !sorted_nonneg(y))
        throw std::domain_error("abel_pairing requires non-increasing nonnegative inputs");
    const std::size_t n = x.size();
    if (n == 0) return 0.0;
    double prefix = 0.0, out = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        prefix += x[k];
        out += (y[k] - y[k + 1]) * prefix;
    }
    prefix += x[n - 1];
    out += y[n - 1] * prefix;
    return out;
}

std::vector<double> hardy_transform(const std::vector<double>& x, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("hardy_transform requires q > 0");
    std::vector<double> xs = rearrange(x);
    std::vector<double> y(xs.size());
    double run = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        run += std::pow(xs[k], 1.0 / q);
        y[k] = std::pow(run / static_cast<double>(k + 1), q);
    }
    return y;
}

void RepetitionProfile::validate() const {
    if (base.size() != beta.size())
        throw std::invalid_argument("repetition profile: base and beta lengths differ");
    double prev = std::numeric_limits<double>::infinity();
    for (double v : base) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("repetition profile: base must be positive and finite");
        if (v > prev) throw std::invalid_argument("repetition profile: base must be non-increasing");
        prev = v;
    }
    for (long b : beta)
        if (b < 0) throw std::invalid_argument("repetition profile: beta must be non-negative");
}

std::vector<double> RepetitionProfile::expand() const {
    validate();
    std::vector<double> y;
    for (std::size_t i = 0; i < base.size(); ++i)
        y.insert(y.end(), static_cast<std::size_t>(beta[i]), base[i]);
    return y;
}

double RepetitionProfile::factor() const {
    validate();
    double best = 1.0;
    long run = 0;
    for (std::size_t r = 0; r < beta.size(); ++r) {
        run += beta[r];
        best = std::max(best, static_cast<double>(run) / static_cast<double>(r + 1));
    }
    return 2.0 * best;
}

}  // namespace symnorm
