#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "experiment.hpp"

namespace iikit::experiment {

int Report::failures() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.pass; }));
}

int Report::warnings() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.warning; }));
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw Error(ErrorCode::schema, "unknown format \"" + name + "\" (expected json or csv)");
}

namespace {

constexpr int kFormatVersion = 1;

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

// Shortest decimal text that reads back to the same double.
std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return shortest(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

std::string emit_json(const Report& rep, bool timing) {
  json doc;
  doc["tool"] = "ii-kit";
  doc["format_version"] = kFormatVersion;
  doc["experiment"] = to_string(rep.kind);
  doc["config"] = rep.config;
  json columns = rep.columns;
  if (timing) columns.push_back("wall_time");
  doc["columns"] = columns;
  json rows = json::array();
  for (const Row& r : rep.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < rep.columns.size(); ++i) obj[rep.columns[i]] = cell_json(r.cells[i]);
    if (timing) obj["wall_time"] = r.wall_time;
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  doc["summary"] = {{"rows", rep.rows.size()},
                    {"failures", rep.failures()},
                    {"warnings", rep.warnings()},
                    {"exit_status", rep.exit_status()}};
  return doc.dump(2) + "\n";
}

std::string emit_csv(const Report& rep, bool timing) {
  std::string out;
  for (std::size_t i = 0; i < rep.columns.size(); ++i) out += (i ? "," : "") + csv_field(rep.columns[i]);
  if (timing) out += ",wall_time";
  out += '\n';
  for (const Row& r : rep.rows) {
    for (std::size_t i = 0; i < r.cells.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(r.cells[i]));
    if (timing) out += "," + shortest(r.wall_time);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string emit_table(const Report& report, Format format, bool timing) {
  if (report.rows.empty()) throw Error(ErrorCode::schema, "report has no rows to emit");
  return format == Format::json ? emit_json(report, timing) : emit_csv(report, timing);
}

std::string render_text(const Report& report) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back(report.columns);
  for (const Row& r : report.rows) {
    std::vector<std::string> line;
    for (const Cell& c : r.cells) {
      if (const double* d = std::get_if<double>(&c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", *d);
        line.emplace_back(buf);
      } else {
        line.push_back(cell_text(c));
      }
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(report.columns.size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream os;
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      os << line[i];
      if (i + 1 < line.size()) os << std::string(width[i] - line[i].size() + 2, ' ');
    }
    os << '\n';
  }
  os << report.rows.size() << " row(s), " << report.failures() << " failure(s), " << report.warnings()
     << " warning(s)\n";
  return os.str();
}

}  // namespace iikit::experiment
