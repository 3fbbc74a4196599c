#include "occlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "occlab/errors.hpp"

namespace occlab {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void CsvTable::push_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("CsvTable: row width mismatch");
  rows.push_back(std::move(row));
}

std::string CsvTable::to_text() const {
  std::string out;
  auto join = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  join(header);
  for (const auto& row : rows) join(row);
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string canonical_value(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out.push_back(',');
      out += canonical_value(v[i]);
    }
    return out;
  }
  throw ConfigError("config values must be scalars or flat arrays");
}

const std::string* find(const Config& c, const std::string& key) {
  auto it = c.find(key);
  return it == c.end() ? nullptr : &it->second;
}

}  // namespace

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, b - a + 1);
}

// Primary format: flat `key = value` lines with '#' comments. A file starting
// with '{' is read as a flat JSON object instead.
Config load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Config c;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) c[key] = canonical_value(value);
    return c;
  }
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config line must look like key = value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line has an empty key: " + line);
    c[key] = value;
  }
  return c;
}

void apply_override(Config& config, const std::string& key_eq_value) {
  const std::size_t eq = key_eq_value.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + key_eq_value);
  }
  config[key_eq_value.substr(0, eq)] = key_eq_value.substr(eq + 1);
}

double config_double(const Config& c, const std::string& key, double fallback) {
  const std::string* s = find(c, key);
  if (!s) return fallback;
  char* end = nullptr;
  const double v = std::strtod(s->c_str(), &end);
  if (end != s->c_str() + s->size() || s->empty()) {
    throw ConfigError("config key '" + key + "' is not a number: " + *s);
  }
  return v;
}

int config_int(const Config& c, const std::string& key, int fallback) {
  const double v = config_double(c, key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("config key '" + key + "' is not an integer");
  }
  return i;
}

std::uint64_t config_u64(const Config& c, const std::string& key, std::uint64_t fallback) {
  const std::string* s = find(c, key);
  if (!s) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s->c_str(), &end, 10);
  if (end != s->c_str() + s->size() || s->empty()) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: " + *s);
  }
  return v;
}

bool config_bool(const Config& c, const std::string& key, bool fallback) {
  const std::string* s = find(c, key);
  if (!s) return fallback;
  if (*s == "true" || *s == "1") return true;
  if (*s == "false" || *s == "0") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + *s);
}

std::string config_string(const Config& c, const std::string& key, std::string fallback) {
  const std::string* s = find(c, key);
  return s ? *s : std::move(fallback);
}

std::vector<double> config_double_list(const Config& c, const std::string& key,
                                       std::vector<double> fallback) {
  const std::string* s = find(c, key);
  if (!s) return fallback;
  std::vector<double> out;
  std::stringstream ss(*s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw ConfigError("config key '" + key + "' has a non-numeric entry: " + item);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

void require_known_keys(const Config& c, const std::vector<std::string>& known) {
  for (const auto& [key, value] : c) {
    bool ok = false;
    for (const std::string& k : known) {
      if (k == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown config key: " + key);
  }
}

std::string config_hash(const Config& c) {
  std::string text;
  for (const auto& [key, value] : c) {
    text += key;
    text.push_back('=');
    text += value;
    text.push_back('\n');
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

nlohmann::json verdict_json(const TestVerdict& v) {
  return nlohmann::json{{"name", v.name},
                        {"statistic", v.statistic},
                        {"threshold", v.threshold},
                        {"n_samples", v.n_samples},
                        {"passed", v.passed}};
}

void write_run_outputs(const RunContext& ctx, const nlohmann::json& report,
                       const std::vector<std::pair<std::string, CsvTable>>& tables) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(ctx.out_dir / "tables", ec);
  if (ec) throw IoError("cannot create output directory: " + ctx.out_dir.string());

  write_text_file(ctx.out_dir / "report.json", report.dump(2) + "\n");

  nlohmann::json artifact_list = nlohmann::json::array();
  artifact_list.push_back("report.json");
  for (const auto& [name, table] : tables) {
    write_text_file(ctx.out_dir / "tables" / (name + ".csv"), table.to_text());
    artifact_list.push_back("tables/" + name + ".csv");
  }

  nlohmann::json config_obj = nlohmann::json::object();
  for (const auto& [key, value] : ctx.config) config_obj[key] = value;
  const nlohmann::json manifest{{"experiment", ctx.experiment},
                                {"seed", ctx.seed},
                                {"threads", ctx.threads},
                                {"config", config_obj},
                                {"config_hash", config_hash(ctx.config)},
                                {"artifacts", artifact_list}};
  write_text_file(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace occlab
