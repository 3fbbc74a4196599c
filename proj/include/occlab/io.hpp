#pragma once

// Run artifacts: deterministic CSV tables, JSON reports, and a manifest
// carrying a stable hash of the effective configuration.
//
// Everything written here must be byte-identical across thread counts, so
// numeric cells are preformatted from values the kernels already compute
// deterministically.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "occlab/stats.hpp"

namespace occlab {

std::string fmt_double(double x);  // %.12g with normalized zero and non-finites

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void push_row(std::vector<std::string> row);
  std::string to_text() const;  // header + rows, comma-separated, '\n' endings
};

void write_text_file(const std::filesystem::path& path, std::string_view text);

std::uint64_t fnv1a64(std::string_view text);

// Flat key -> string configuration. File values are canonicalized to strings
// on load so file entries and --set overrides hash and parse the same way.
using Config = std::map<std::string, std::string>;

Config load_config_file(const std::filesystem::path& path);
void apply_override(Config& config, const std::string& key_eq_value);

double config_double(const Config& c, const std::string& key, double fallback);
int config_int(const Config& c, const std::string& key, int fallback);
std::uint64_t config_u64(const Config& c, const std::string& key, std::uint64_t fallback);
bool config_bool(const Config& c, const std::string& key, bool fallback);
std::string config_string(const Config& c, const std::string& key, std::string fallback);
std::vector<double> config_double_list(const Config& c, const std::string& key,
                                       std::vector<double> fallback);
void require_known_keys(const Config& c, const std::vector<std::string>& known);

std::string config_hash(const Config& c);  // fnv1a64 over sorted "k=v" lines, hex

nlohmann::json verdict_json(const TestVerdict& v);

struct RunContext {
  std::string experiment;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out_dir;
  Config config;
};

// Writes report.json, tables/<name>.csv, and manifest.json under ctx.out_dir.
void write_run_outputs(const RunContext& ctx, const nlohmann::json& report,
                       const std::vector<std::pair<std::string, CsvTable>>& tables);

}  // namespace occlab
