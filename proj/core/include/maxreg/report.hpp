#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace maxreg {

/// One verdict: measured value compared against a threshold.
struct Check {
  std::string name;
  double measured = 0.0;
  std::string relation;  // "<=", ">=", "==", "in"
  double threshold = 0.0;
  std::optional<double> upper;  // second bound for "in"
  bool passed = false;
  std::string detail;

  bool operator==(const Check&) const = default;
};

Check check_le(std::string name, double measured, double threshold, std::string detail = {});
Check check_ge(std::string name, double measured, double threshold, std::string detail = {});
Check check_in(std::string name, double measured, double lo, double hi, std::string detail = {});
Check check_true(std::string name, bool ok, std::string detail = {});

/// Cells are preformatted so that CSV, JSON and text agree byte for byte.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const Table&) const = default;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<std::string> warnings;

  bool passed() const;
  void append(const Report& other);
  bool operator==(const Report&) const = default;
};

/// %.10g, with "nan"/"inf" spelled out.
std::string format_number(double v);

std::string to_json_string(const Report& report);
Report report_from_json_string(const std::string& text);
std::string to_csv(const Table& table);
std::string checks_csv(const Report& report);
std::string to_text(const Report& report);

enum class Format { json, csv, text };
Format parse_format(const std::string& name);

/// Writes the report into out_dir (created if missing) and returns the paths written.
/// json: <command>.json; csv: <command>_checks.csv plus <command>_<table>.csv per table; text: <command>.txt.
std::vector<std::filesystem::path> emit(const Report& report, Format format, const std::filesystem::path& out_dir);

/// The same content emit() would write, concatenated, for stdout.
std::string render(const Report& report, Format format);

}  // namespace maxreg
