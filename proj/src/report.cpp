#include "seqspin/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "seqspin/types.hpp"

namespace seqspin::report {

namespace {

std::string format15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

void check_cell(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
    throw config_error("report names must not contain commas or newlines");
}

double parse_value(const std::string& cell) {
  const char* c = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c) throw config_error("unparseable numeric cell: " + cell);
  return v;
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::brute_force: return "brute_force";
    case Provenance::monte_carlo: return "monte_carlo";
  }
  return "closed_form";
}

Provenance provenance_from(const std::string& name) {
  if (name == "closed_form") return Provenance::closed_form;
  if (name == "brute_force") return Provenance::brute_force;
  if (name == "monte_carlo") return Provenance::monte_carlo;
  throw config_error("unknown provenance: " + name);
}

double Row::extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  throw config_error("row '" + name + "' has no extra '" + key + "'");
}

bool Row::has_extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return true;
  return false;
}

void Report::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta)
    if (k == key) {
      v = value;
      return;
    }
  meta.emplace_back(key, value);
}

const Row& Report::row(const std::string& name) const {
  for (const Row& r : rows)
    if (r.name == name) return r;
  throw config_error("report has no row '" + name + "'");
}

double quantize15(double v) {
  return std::strtod(format15(v).c_str(), nullptr);
}

std::string to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rep.meta) j["meta"][k] = v;
  j["rows"] = nlohmann::ordered_json::array();
  for (const Row& r : rep.rows) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["value"] = quantize15(r.value);
    row["provenance"] = provenance_name(r.provenance);
    row["extras"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.extras) row["extras"][k] = quantize15(v);
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

Report from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("invalid report JSON: ") + e.what());
  }
  Report rep;
  try {
    for (const auto& [k, v] : j.at("meta").items())
      rep.meta.emplace_back(k, v.get<std::string>());
    for (const auto& row : j.at("rows")) {
      Row r;
      r.name = row.at("name").get<std::string>();
      r.value = row.at("value").get<double>();
      r.provenance = provenance_from(row.at("provenance").get<std::string>());
      for (const auto& [k, v] : row.at("extras").items())
        r.extras.emplace_back(k, v.get<double>());
      rep.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed report JSON: ") + e.what());
  }
  return rep;
}

std::string to_csv(const Report& rep) {
  // Union of extra columns, ordered by first appearance.
  std::vector<std::string> columns;
  for (const Row& r : rep.rows)
    for (const auto& [k, v] : r.extras) {
      check_cell(k);
      bool seen = false;
      for (const std::string& c : columns) seen = seen || c == k;
      if (!seen) columns.push_back(k);
    }

  std::ostringstream out;
  for (const auto& [k, v] : rep.meta) {
    check_cell(k);
    check_cell(v);
    out << "# " << k << " = " << v << "\n";
  }
  out << "name,value,provenance";
  for (const std::string& c : columns) out << "," << c;
  out << "\n";
  for (const Row& r : rep.rows) {
    check_cell(r.name);
    out << r.name << "," << format15(quantize15(r.value)) << ","
        << provenance_name(r.provenance);
    for (const std::string& c : columns) {
      out << ",";
      if (r.has_extra(c)) out << format15(quantize15(r.extra(c)));
    }
    out << "\n";
  }
  return out.str();
}

Report from_csv(const std::string& text) {
  Report rep;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> columns;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        throw config_error("meta line without '=': " + line);
      rep.meta.emplace_back(trim(body.substr(0, eq)),
                            trim(body.substr(eq + 1)));
      continue;
    }
    std::vector<std::string> cells = split_commas(line);
    if (!header_seen) {
      if (cells.size() < 3 || cells[0] != "name" || cells[1] != "value" ||
          cells[2] != "provenance")
        throw config_error("unexpected CSV header: " + line);
      columns.assign(cells.begin() + 3, cells.end());
      header_seen = true;
      continue;
    }
    if (cells.size() != columns.size() + 3)
      throw config_error("CSV row has wrong cell count: " + line);
    Row r;
    r.name = cells[0];
    r.value = parse_value(cells[1]);
    r.provenance = provenance_from(cells[2]);
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (!cells[c + 3].empty())
        r.extras.emplace_back(columns[c], parse_value(cells[c + 3]));
    rep.rows.push_back(std::move(r));
  }
  if (!header_seen) throw config_error("CSV report lacks a header row");
  return rep;
}

}  // namespace seqspin::report
