#include "dilation/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dilation {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

long long parse_integer(const std::string& field, const std::string& raw) {
  long long value = 0;
  const auto text = trim(raw);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(field + ": expected an integer, got '" + raw + "'");
  }
  return value;
}

int parse_int(const std::string& field, const std::string& raw) {
  const long long v = parse_integer(field, raw);
  if (v < -2'000'000'000LL || v > 2'000'000'000LL) throw ConfigError(field + ": integer out of range");
  return static_cast<int>(v);
}

double parse_real(const std::string& field, const std::string& raw) {
  const auto text = trim(raw);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError(field + ": expected a finite real number, got '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& field, const std::string& raw) {
  const auto text = trim(raw);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(field + ": expected true/false, got '" + raw + "'");
}

std::vector<int> parse_int_list(const std::string& field, const std::string& raw) {
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(field, item));
  if (out.empty()) throw ConfigError(field + ": list is empty");
  return out;
}

void require_increasing(const std::string& field, const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) throw ConfigError(field + ": must be strictly increasing");
  }
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string real_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string> kRunKeys = {"k",           "seed",          "family_budget",  "n_schedule",
                                        "nl_schedule", "m_list",        "nodes_per_axis", "truncation_r",
                                        "tolerance",   "test_functions", "method"};
const std::set<std::string> kOutputKeys = {"report", "csv", "cache"};

}  // namespace

ConfigTable parse_config_text(std::string_view text) {
  ConfigTable table;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      table[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    table[section][key] = trim(std::string_view(body).substr(eq + 1));
  }
  return table;
}

ConfigTable load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ConfigTable& table, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("--set: expected section.key=value, got '" + std::string(assignment) + "'");
  const std::string lhs = trim(assignment.substr(0, eq));
  const auto dot = lhs.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size()) {
    throw ConfigError("--set: expected section.key=value, got '" + std::string(assignment) + "'");
  }
  table[lhs.substr(0, dot)][lhs.substr(dot + 1)] = trim(assignment.substr(eq + 1));
}

RunConfig to_run_config(const ConfigTable& table) {
  RunConfig cfg;
  for (const auto& [section, entries] : table) {
    if (section != "system" && section != "run" && section != "output") {
      throw ConfigError("unknown section '[" + section + "]'");
    }
    (void)entries;
  }

  const auto sys = table.find("system");
  if (sys == table.end() || !sys->second.contains("id")) throw ConfigError("system.id: missing");
  for (const auto& [key, value] : sys->second) {
    if (key == "id") {
      cfg.system_id = value;
    } else {
      cfg.params[key] = parse_real("system." + key, value);
    }
  }

  if (const auto run = table.find("run"); run != table.end()) {
    auto& th = cfg.theorem;
    for (const auto& [key, value] : run->second) {
      const std::string field = "run." + key;
      if (!kRunKeys.contains(key)) throw ConfigError(field + ": unknown key");
      if (key == "k") {
        cfg.ks = parse_int_list(field, value);
        require_increasing(field, cfg.ks);
        for (int k : cfg.ks) {
          if (k < 1) throw ConfigError(field + ": entries must be >= 1");
        }
      } else if (key == "seed") {
        const long long s = parse_integer(field, value);
        if (s < 0) throw ConfigError(field + ": must be nonnegative");
        th.seed = static_cast<std::uint64_t>(s);
      } else if (key == "family_budget") {
        th.family_budget = parse_int(field, value);
      } else if (key == "n_schedule") {
        th.n_schedule = parse_int_list(field, value);
      } else if (key == "nl_schedule") {
        th.nl_schedule = parse_int_list(field, value);
      } else if (key == "m_list") {
        th.m_list = parse_int_list(field, value);
      } else if (key == "nodes_per_axis") {
        th.nodes_per_axis = parse_int(field, value);
      } else if (key == "truncation_r") {
        th.truncation_r = parse_real(field, value);
      } else if (key == "tolerance") {
        th.tolerance = parse_real(field, value);
      } else if (key == "test_functions") {
        th.test_functions = parse_int(field, value);
      } else if (key == "method") {
        if (value == "slope_fit") {
          th.method = DilationMethod::SlopeFit;
        } else if (value == "last_point") {
          th.method = DilationMethod::LastPoint;
        } else {
          throw ConfigError(field + ": expected slope_fit or last_point");
        }
      }
    }
  }

  if (const auto out = table.find("output"); out != table.end()) {
    for (const auto& [key, value] : out->second) {
      const std::string field = "output." + key;
      if (!kOutputKeys.contains(key)) throw ConfigError(field + ": unknown key");
      if (key == "report") {
        if (value.empty()) throw ConfigError(field + ": empty path");
        cfg.output = value;
      } else if (key == "csv") {
        cfg.write_csv = parse_bool(field, value);
      } else if (key == "cache") {
        if (!value.empty()) cfg.theorem.cache_dir = std::filesystem::path(value);
      }
    }
  }

  try {
    validate(cfg.theorem);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("run.") + e.what());
  }
  return cfg;
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream out;
  out << "[system]\nid = " << c.system_id << "\n";
  for (const auto& [key, value] : c.params) out << key << " = " << real_text(value) << "\n";
  const auto& t = c.theorem;
  out << "[run]\n";
  out << "k = " << (c.ks.empty() ? std::string("all") : join(c.ks)) << "\n";
  out << "seed = " << t.seed << "\n";
  out << "family_budget = " << t.family_budget << "\n";
  out << "n_schedule = " << join(t.n_schedule) << "\n";
  out << "nl_schedule = " << join(t.nl_schedule) << "\n";
  out << "m_list = " << join(t.m_list) << "\n";
  out << "nodes_per_axis = " << t.nodes_per_axis << "\n";
  out << "truncation_r = " << real_text(t.truncation_r) << "\n";
  out << "tolerance = " << real_text(t.tolerance) << "\n";
  out << "test_functions = " << t.test_functions << "\n";
  out << "method = " << (t.method == DilationMethod::SlopeFit ? "slope_fit" : "last_point") << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dilation
