#include "symnorm/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace symnorm {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}
}  // namespace

void write_csv(const std::string& path, const CampaignResult& res) {
    std::ofstream out = open_out(path);
    out << "# config " << res.config.dump() << "\n";
    for (std::size_t c = 0; c < res.columns.size(); ++c)
        out << (c ? "," : "") << res.columns[c];
    out << "\n";
    for (const auto& row : res.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

void write_summary_json(const std::string& path, const CampaignResult& res) {
    nlohmann::json j;
    j["campaign"] = res.name;
    j["config"] = res.config;
    j["rows"] = res.rows.size();
    nlohmann::json consts = nlohmann::json::object();
    for (const auto& [k, v] : res.constants) consts[k] = v;
    j["empirical_constants"] = consts;
    j["failures"] = res.failures;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_markdown(const std::string& path, const CampaignResult& res) {
    std::ofstream out = open_out(path);
    out << "```\nconfig " << res.config.dump() << "\n```\n\n" << res.markdown;
}

void write_dat(const std::string& path, const CampaignResult& res) {
    std::ofstream out = open_out(path);
    out << "# config " << res.config.dump() << "\n#";
    for (const auto& c : res.columns) out << " " << c;
    out << "\n";
    for (const auto& row : res.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << row[c];
        out << "\n";
    }
}

std::string emit_reports(const std::string& out_dir, const CampaignResult& res) {
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + res.name;
    write_csv(base + ".csv", res);
    const std::string summary = base + "_summary.json";
    write_summary_json(summary, res);
    if (!res.markdown.empty()) {
        write_markdown(base + ".md", res);
        write_dat(base + ".dat", res);
    }
    return summary;
}

}  // namespace symnorm
