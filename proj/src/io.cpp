#include "quditbell/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "quditbell/errors.hpp"

namespace quditbell::io {

namespace {

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field \"" + key + "\"");
  return *it;
}

int require_int(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::vector<double> require_numbers(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw InputError(where + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Json table_to_json(const JointProbabilityTable& table) {
  const auto& sc = table.scenario();
  Json j;
  j["n"] = sc.n_parties();
  j["d"] = sc.dimension();
  Json tables = Json::object();
  for (const auto& s : SettingString::all(sc.n_parties())) {
    const auto row = table.row(s);
    tables[s.to_string()] = std::vector<double>(row.begin(), row.end());
  }
  j["tables"] = std::move(tables);
  return j;
}

JointProbabilityTable table_from_json(const Json& j) {
  const int n = require_int(j, "n", "table");
  const int d = require_int(j, "d", "table");
  const BellScenario scenario(n, d);
  const Json& tables = require(j, "tables", "table");
  if (!tables.is_object()) throw InputError("table.tables: expected an object keyed by setting string");
  std::vector<std::vector<double>> rows(scenario.setting_count());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [key, value] : tables.items()) {
    const std::string where = "table.tables[\"" + key + "\"]";
    SettingString s = [&] {
      try {
        return SettingString::parse(key);
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    }();
    if (s.size() != n) throw InputError(where + ": setting string length differs from n = " + std::to_string(n));
    rows[s.mask()] = require_numbers(value, where);
    seen[s.mask()] = true;
  }
  for (std::size_t m = 0; m < seen.size(); ++m) {
    if (!seen[m]) {
      throw InputError("table.tables: missing setting \"" +
                       SettingString(n, static_cast<std::uint32_t>(m)).to_string() + "\"");
    }
  }
  return JointProbabilityTable::from_rows(scenario, std::move(rows));
}

Json phases_to_json(const PhaseConfiguration& config) {
  Json j;
  j["n"] = config.n_parties();
  j["d"] = config.dimension();
  Json phases = Json::object();
  for (int p = 0; p < config.n_parties(); ++p) {
    Json party;
    for (int s = 1; s <= 2; ++s) {
      const auto v = config.phases(p, s);
      party["setting-" + std::to_string(s)] = std::vector<double>(v.begin(), v.end());
    }
    phases["party-" + std::to_string(p + 1)] = std::move(party);
  }
  j["phases"] = std::move(phases);
  return j;
}

PhaseConfiguration phases_from_json(const Json& j) {
  const int n = require_int(j, "n", "phases");
  const int d = require_int(j, "d", "phases");
  if (n < 1 || d < 2) throw InputError("phases: need n >= 1 and d >= 2");
  const Json& phases = require(j, "phases", "phases");
  PhaseConfiguration config(n, d);
  for (int p = 0; p < n; ++p) {
    const std::string party_key = "party-" + std::to_string(p + 1);
    const Json& party = require(phases, party_key, "phases.phases");
    for (int s = 1; s <= 2; ++s) {
      const std::string setting_key = "setting-" + std::to_string(s);
      const std::string where = "phases.phases." + party_key + "." + setting_key;
      const auto values = require_numbers(require(party, setting_key, "phases.phases." + party_key), where);
      if (values.size() != static_cast<std::size_t>(d)) {
        throw InputError(where + ": expected " + std::to_string(d) + " entries, got " + std::to_string(values.size()));
      }
      config.set_phases(p, s, values);
    }
  }
  return config;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text(path)); }

JointProbabilityTable read_table_file(const std::filesystem::path& path) {
  return table_from_json(read_json_file(path));
}

PhaseConfiguration read_phases_file(const std::filesystem::path& path) {
  return phases_from_json(read_json_file(path));
}

Json strategy_to_json(const DeterministicStrategy& strategy) {
  auto keyed = [](const std::vector<int>& values, std::size_t block_size) {
    Json out = Json::object();
    for (std::uint32_t k = 0; k < values.size(); ++k) {
      out[SettingString(static_cast<int>(block_size), k).to_string()] = values[k];
    }
    return out;
  };
  Json j;
  j["xi"] = keyed(strategy.xi, strategy.partition.block_a().size());
  j["zeta"] = keyed(strategy.zeta, strategy.partition.block_b().size());
  return j;
}

Json strategy_to_json(const LocalStrategy& strategy) {
  Json j;
  Json outcomes = Json::array();
  for (const auto& o : strategy.outcomes) outcomes.push_back({o[0], o[1]});
  j["outcomes"] = std::move(outcomes);
  return j;
}

namespace {

Json one_based(const std::vector<int>& block) {
  Json out = Json::array();
  for (int p : block) out.push_back(p + 1);
  return out;
}

Json bound_json(const Rational& bound) {
  Json j;
  j["exact"] = bound.to_string();
  j["float"] = bound.to_double();
  return j;
}

}  // namespace

Json hlnhv_report(const BellScenario& scenario, const HlnhvBound& bound, double elapsed_ms) {
  Json j;
  j["n"] = scenario.n_parties();
  j["d"] = scenario.dimension();
  j["model"] = "hlnhv";
  j["partition"] = Json::array({one_based(bound.witness.partition.block_a()), one_based(bound.witness.partition.block_b())});
  j["bound"] = bound_json(bound.bound);
  j["witness"] = strategy_to_json(bound.witness);
  j["strategies_enumerated"] = bound.strategies_enumerated;
  j["elapsed_ms"] = elapsed_ms;
  return j;
}

Json lhv_report(const BellScenario& scenario, const LhvBound& bound, double elapsed_ms) {
  Json j;
  j["n"] = scenario.n_parties();
  j["d"] = scenario.dimension();
  j["model"] = "lhv";
  Json partition = Json::array();
  for (int p = 1; p <= scenario.n_parties(); ++p) partition.push_back(Json::array({p}));
  j["partition"] = std::move(partition);
  j["bound"] = bound_json(bound.bound);
  j["witness"] = strategy_to_json(bound.witness);
  j["strategies_enumerated"] = bound.strategies_enumerated;
  j["elapsed_ms"] = elapsed_ms;
  return j;
}

Json violation_report_to_json(const ViolationReport& r) {
  Json j;
  j["scenario"] = {{"n", r.scenario.n_parties()}, {"d", r.scenario.dimension()}};
  j["max_value"] = r.max_value;
  j["angles"] = phases_to_json(r.angles);
  j["ratio"] = r.ratio;
  j["critical_visibility"] = r.critical_visibility;
  j["svetlichny_visibility"] = r.svetlichny_visibility;
  j["more_noise_resistant_than_svetlichny"] = r.more_noise_resistant_than_svetlichny;
  j["angles_mode"] = r.angles_mode;
  return j;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 10);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<std::string>& columns, const Json& rows) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + quote(columns[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      const auto it = row.find(columns[i]);
      if (it == row.end() || it->is_null()) continue;
      if (it->is_number_float()) {
        out += format_number(it->get<double>());
      } else if (it->is_number()) {
        out += it->dump();
      } else if (it->is_boolean()) {
        out += it->get<bool>() ? "true" : "false";
      } else if (it->is_string()) {
        out += quote(it->get<std::string>());
      } else {
        out += quote(it->dump());
      }
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace quditbell::io
