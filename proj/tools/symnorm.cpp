// symnorm: runs seeded verification campaigns over the symmetric-norm /
// rearrangement / doubly-stochastic machinery and writes CSV/JSON/markdown
// reports.  Exit status: 0 all asserted bounds hold, 1 some assertion
// failed (descriptors listed), 2 usage error.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "symnorm/harness.hpp"
#include "symnorm/report.hpp"

namespace {

using symnorm::CampaignResult;
using symnorm::RunConfig;

struct CliState {
    RunConfig cfg;
    double p = 0.0;
    std::string p_list_csv;
    std::string norm_arg;
    std::string out_dir;
    std::string config_path;
    std::string matrix_path;
};

nlohmann::json parse_json_arg(const std::string& arg) {
    std::ifstream in(arg);
    if (in) return nlohmann::json::parse(in);
    return nlohmann::json::parse(arg);
}

std::vector<double> parse_p_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stod(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("--p-list: empty list");
    return out;
}

void add_common_flags(CLI::App* sub, CliState& st) {
    sub->add_option("--seed", st.cfg.seed, "RNG seed (determines the full corpus)");
    sub->add_option("--n", st.cfg.n, "largest instance size (sizes are drawn from 2..n)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--count", st.cfg.count, "number of seeded instances")
        ->check(CLI::PositiveNumber);
    auto* popt = sub->add_option("--p", st.p, "single moment exponent p >= 1");
    sub->add_option("--p-list", st.p_list_csv, "comma-separated moment exponents")
        ->excludes(popt);
    sub->add_option("--norm", st.norm_arg,
                    "norm spec as inline JSON or a path to a JSON file "
                    "(object or array of objects)");
    sub->add_option("--family", st.cfg.family,
                    "distribution family: bernoulli, uniform-k-point, "
                    "geometric-truncated, or all")
        ->check(CLI::IsMember({"bernoulli", "uniform-k-point", "geometric-truncated", "all"}));
    sub->add_option_function<std::string>(
           "--mode", [&st](const std::string& m) { st.cfg.mc = (m == "mc"); },
           "exact enumeration or Monte Carlo")
        ->check(CLI::IsMember({"exact", "mc"}));
    sub->add_option("--samples", st.cfg.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", st.out_dir, "output directory (default $SYMNORM_OUT or ./out)");
    sub->add_option("--threads", st.cfg.threads, "worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--config", st.config_path, "JSON config file; explicit flags win")
        ->check(CLI::ExistingFile);
}

// Fill in values from the config file wherever the flag was not given.
void merge_config_file(const CLI::App* sub, CliState& st) {
    if (st.config_path.empty()) return;
    std::ifstream in(st.config_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    const auto absent = [&](const char* flag) { return sub->count(flag) == 0; };
    if (j.contains("seed") && absent("--seed")) st.cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n") && absent("--n")) st.cfg.n = j["n"].get<int>();
    if (j.contains("count") && absent("--count")) st.cfg.count = j["count"].get<int>();
    if (j.contains("p_list") && absent("--p-list") && absent("--p"))
        st.cfg.p_list = j["p_list"].get<std::vector<double>>();
    if (j.contains("family") && absent("--family"))
        st.cfg.family = j["family"].get<std::string>();
    if (j.contains("mode") && absent("--mode")) st.cfg.mc = j["mode"] == "mc";
    if (j.contains("samples") && absent("--samples"))
        st.cfg.samples = j["samples"].get<std::size_t>();
    if (j.contains("norms") && st.norm_arg.empty())
        for (const auto& nj : j["norms"]) st.cfg.norms.push_back(symnorm::NormSpec::from_json(nj));
}

void finalize_config(const CLI::App* sub, CliState& st, const std::string& campaign) {
    // campaigns that study growth in p default to the longer exponent ladder
    if ((campaign == "growth" || campaign == "verify-comb") && sub->count("--p") == 0 &&
        sub->count("--p-list") == 0)
        st.cfg.p_list = {1, 2, 4, 8, 16, 32};
    merge_config_file(sub, st);
    if (sub->count("--p")) st.cfg.p_list = {st.p};
    if (sub->count("--p-list")) st.cfg.p_list = parse_p_list(st.p_list_csv);
    for (double p : st.cfg.p_list)
        if (!(p >= 1.0)) throw std::invalid_argument("moment exponents must satisfy p >= 1");
    if (!st.norm_arg.empty()) {
        const nlohmann::json nj = parse_json_arg(st.norm_arg);
        st.cfg.norms.clear();
        if (nj.is_array())
            for (const auto& e : nj) st.cfg.norms.push_back(symnorm::NormSpec::from_json(e));
        else
            st.cfg.norms.push_back(symnorm::NormSpec::from_json(nj));
    }
    if (st.out_dir.empty()) {
        const char* env = std::getenv("SYMNORM_OUT");
        st.out_dir = env && *env ? env : "./out";
    }
}

int report_and_exit_code(const std::string& out_dir, const CampaignResult& res) {
    const std::string summary = symnorm::emit_reports(out_dir, res);
    std::cout << res.name << ": rows=" << res.rows.size()
              << " failures=" << res.failures.size() << " -> " << summary << "\n";
    for (const auto& [k, v] : res.constants)
        std::cout << "  " << k << " = " << symnorm::format_g17(v) << "\n";
    if (!res.ok()) {
        std::cout << "failed assertions:\n";
        for (const auto& f : res.failures) std::cout << "  " << f << "\n";
    }
    return res.ok() ? 0 : 1;
}

// Single-matrix decomposition entry point (birkhoff --matrix).
int run_birkhoff_matrix(const CliState& st) {
    const nlohmann::json mj = parse_json_arg(st.matrix_path);
    const symnorm::MatrixInstance m = symnorm::MatrixInstance::from_json(mj);
    const symnorm::DoublyStochastic ds =
        symnorm::DoublyStochastic::checked(m.n, m.a, 1e-9);
    const symnorm::BirkhoffDecomposition dec = symnorm::birkhoff_decompose(ds);
    const symnorm::DoublyStochastic rec = dec.reconstruct(m.n);
    double err = 0.0;
    for (std::size_t k = 0; k < ds.a.size(); ++k)
        err = std::max(err, std::fabs(rec.a[k] - ds.a[k]));

    nlohmann::json out;
    out["config"] = {{"campaign", "birkhoff"}, {"matrix", st.matrix_path}};
    out["matrix"] = m.to_json();
    out["decomposition"] = dec.to_json();
    out["terms"] = dec.terms.size();
    out["weight_sum"] = dec.weight_sum();
    out["reconstruction_error"] = err;
    std::filesystem::create_directories(st.out_dir);
    const std::string path = st.out_dir + "/birkhoff_matrix.json";
    std::ofstream f(path);
    f << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    const bool ok = err <= 1e-10 && std::fabs(dec.weight_sum() - 1.0) <= 1e-10;
    if (!ok) std::cout << "failed assertions:\n  birkhoff[matrix=" << st.matrix_path << "]\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "seeded verification campaigns for symmetric-norm moment inequalities,\n"
        "rearrangement surrogates and doubly-stochastic level statistics"};
    app.require_subcommand(1);

    CliState st;
    const std::map<std::string, CampaignResult (*)(const RunConfig&)> campaigns{
        {"verify-main", symnorm::run_verify_main},
        {"verify-geiss", symnorm::run_verify_geiss},
        {"verify-ks", symnorm::run_verify_ks},
        {"verify-prop21", symnorm::run_verify_prop21},
        {"verify-comb", symnorm::run_verify_comb},
        {"herz", symnorm::run_herz},
        {"tails", symnorm::run_tails},
        {"integrals", symnorm::run_integrals},
        {"birkhoff", symnorm::run_birkhoff},
        {"growth", symnorm::run_growth},
    };
    const std::map<std::string, std::string> blurbs{
        {"verify-main", "two-sided moment comparison against the tail+block surrogate"},
        {"verify-geiss", "sup-moment vs tail quantile two-sided bounds"},
        {"verify-ks", "exact permutation averages vs top-n mean brackets"},
        {"verify-prop21", "diagonal-sample comparison over random column tuples"},
        {"verify-comb", "level-sup moments of doubly stochastic matrices"},
        {"herz", "level-count probabilities vs the combinatorial bound"},
        {"tails", "level-sup tail probabilities vs the closed-form bound"},
        {"integrals", "quadrature vs certified integral brackets and majorants"},
        {"birkhoff", "greedy permutation decompositions (or --matrix <json>)"},
        {"growth", "normalized moment growth of the balanced binomial family"},
    };

    int rc = 0;
    for (const auto& [name, fn] : campaigns) {
        CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
        add_common_flags(sub, st);
        if (name == "birkhoff")
            sub->add_option("--matrix", st.matrix_path,
                            "decompose this one matrix (JSON rows) instead of a corpus");
        sub->callback([&rc, &st, name = name, fn = fn, sub]() {
            finalize_config(sub, st, name);
            st.cfg.campaign = name;
            if (name == "birkhoff" && !st.matrix_path.empty())
                rc = run_birkhoff_matrix(st);
            else
                rc = report_and_exit_code(st.out_dir, fn(st.cfg));
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
