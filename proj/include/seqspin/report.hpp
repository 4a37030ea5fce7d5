#pragma once

// Tabular result container with JSON and CSV serialization. Values are
// quantized to 15 significant digits before writing, which makes
// write/parse/write a byte-identical round trip in both formats.

#include <string>
#include <utility>
#include <vector>

namespace seqspin::report {

enum class Provenance { closed_form, brute_force, monte_carlo };

const char* provenance_name(Provenance p);
Provenance provenance_from(const std::string& name);

struct Row {
  std::string name;
  double value = 0.0;
  Provenance provenance = Provenance::closed_form;
  // Extra named values; column order in CSV follows first appearance.
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& key) const;  // throws if absent
  bool has_extra(const std::string& key) const;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value
  std::vector<Row> rows;

  void set_meta(const std::string& key, const std::string& value);
  const Row& row(const std::string& name) const;  // throws if absent
};

// Round to 15 significant digits (printf %.15g and back), the precision the
// serializers emit.
double quantize15(double v);

std::string to_json(const Report& rep);
Report from_json(const std::string& text);

// CSV layout: "# key = value" meta lines, a header row
// name,value,provenance,<extras...>, then one line per row. Cells for extras
// a row does not carry stay empty.
std::string to_csv(const Report& rep);
Report from_csv(const std::string& text);

}  // namespace seqspin::report
