#pragma once

#include <string>

#include "symnorm/harness.hpp"

namespace symnorm {

// Shortest representation that round-trips a double (17 significant digits).
std::string format_g17(double v);

// CSV with a leading "# config <json>" line; cells are pre-formatted.
void write_csv(const std::string& path, const CampaignResult& res);

// {campaign, config, rows, empirical_constants, failures}
void write_summary_json(const std::string& path, const CampaignResult& res);

// Markdown digest (only some campaigns produce one).
void write_markdown(const std::string& path, const CampaignResult& res);

// Whitespace-separated table of the numeric columns, for plotting.
void write_dat(const std::string& path, const CampaignResult& res);

// Emits csv + summary into `out_dir` (plus md/dat when present) and returns
// the summary path.  Creates the directory if needed.
std::string emit_reports(const std::string& out_dir, const CampaignResult& res);

}  // namespace symnorm
