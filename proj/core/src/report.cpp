#include "maxreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maxreg/error.hpp"

namespace maxreg {

using nlohmann::json;

namespace {

Check make(std::string name, double measured, std::string rel, double threshold, std::optional<double> upper,
           bool passed, std::string detail) {
  return Check{std::move(name), measured, std::move(rel), threshold, upper, passed, std::move(detail)};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
  if (!os) throw Error("write failed for " + path.string());
}

// JSON numbers cannot hold nan/inf; those travel as strings.
json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw Error("report json: bad number '" + s + "'");
}

}  // namespace

Check check_le(std::string name, double measured, double threshold, std::string detail) {
  return make(std::move(name), measured, "<=", threshold, std::nullopt, measured <= threshold, std::move(detail));
}

Check check_ge(std::string name, double measured, double threshold, std::string detail) {
  return make(std::move(name), measured, ">=", threshold, std::nullopt, measured >= threshold, std::move(detail));
}

Check check_in(std::string name, double measured, double lo, double hi, std::string detail) {
  return make(std::move(name), measured, "in", lo, hi, measured >= lo && measured <= hi, std::move(detail));
}

Check check_true(std::string name, bool ok, std::string detail) {
  return make(std::move(name), ok ? 1.0 : 0.0, "==", 1.0, std::nullopt, ok, std::move(detail));
}

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void Report::append(const Report& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  tables.insert(tables.end(), other.tables.begin(), other.tables.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string to_json_string(const Report& r) {
  json j;
  j["command"] = r.command;
  j["passed"] = r.passed();
  json cfg = json::array();
  for (const auto& [k, v] : r.config) cfg.push_back({k, v});
  j["config"] = cfg;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json jc{{"name", c.name},           {"measured", number_to_json(c.measured)}, {"relation", c.relation},
            {"threshold", number_to_json(c.threshold)}, {"passed", c.passed},      {"detail", c.detail}};
    if (c.upper) jc["upper"] = number_to_json(*c.upper);
    checks.push_back(std::move(jc));
  }
  j["checks"] = checks;
  json tables = json::array();
  for (const auto& t : r.tables) tables.push_back({{"name", t.name}, {"header", t.header}, {"rows", t.rows}});
  j["tables"] = tables;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

Report report_from_json_string(const std::string& text) {
  Report r;
  try {
    const json j = json::parse(text);
    r.command = j.at("command").get<std::string>();
    for (const auto& kv : j.at("config")) r.config.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    for (const auto& jc : j.at("checks")) {
      Check c;
      c.name = jc.at("name").get<std::string>();
      c.measured = number_from_json(jc.at("measured"));
      c.relation = jc.at("relation").get<std::string>();
      c.threshold = number_from_json(jc.at("threshold"));
      if (jc.contains("upper")) c.upper = number_from_json(jc.at("upper"));
      c.passed = jc.at("passed").get<bool>();
      c.detail = jc.at("detail").get<std::string>();
      r.checks.push_back(std::move(c));
    }
    for (const auto& jt : j.at("tables")) {
      Table t;
      t.name = jt.at("name").get<std::string>();
      t.header = jt.at("header").get<std::vector<std::string>>();
      t.rows = jt.at("rows").get<std::vector<std::vector<std::string>>>();
      r.tables.push_back(std::move(t));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(std::string("report json: ") + e.what());
  }
  return r;
}

std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out;
}

std::string checks_csv(const Report& r) {
  Table t{"checks", {"name", "measured", "relation", "threshold", "upper", "passed", "detail"}, {}};
  for (const auto& c : r.checks) {
    t.rows.push_back({c.name, format_number(c.measured), c.relation, format_number(c.threshold),
                      c.upper ? format_number(*c.upper) : "", c.passed ? "pass" : "FAIL", c.detail});
  }
  return to_csv(t);
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  os << "config:\n";
  for (const auto& [k, v] : r.config) os << "  " << k << " = " << v << "\n";
  os << "checks:\n";
  for (const auto& c : r.checks) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": " << format_number(c.measured) << ' '
       << c.relation << ' ' << format_number(c.threshold);
    if (c.upper) os << ".." << format_number(*c.upper);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  for (const auto& t : r.tables) {
    os << "table " << t.name << ":\n";
    std::istringstream csv(to_csv(t));
    for (std::string line; std::getline(csv, line);) os << "  " << line << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  os << "verdict: " << (r.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "text") return Format::text;
  throw ConfigError("format", "expected json, csv or text, got '" + name + "'");
}

std::vector<std::filesystem::path> emit(const Report& r, Format format, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& file, const std::string& content) {
    const auto p = out_dir / file;
    write_file(p, content);
    written.push_back(p);
  };
  switch (format) {
    case Format::json:
      put(r.command + ".json", to_json_string(r));
      break;
    case Format::csv:
      put(r.command + "_checks.csv", checks_csv(r));
      for (const auto& t : r.tables) put(r.command + "_" + t.name + ".csv", to_csv(t));
      break;
    case Format::text:
      put(r.command + ".txt", to_text(r));
      break;
  }
  return written;
}

std::string render(const Report& r, Format format) {
  switch (format) {
    case Format::json:
      return to_json_string(r);
    case Format::csv: {
      std::string out = checks_csv(r);
      for (const auto& t : r.tables) out += "\n# " + t.name + "\n" + to_csv(t);
      return out;
    }
    case Format::text:
      break;
  }
  return to_text(r);
}

}  // namespace maxreg
