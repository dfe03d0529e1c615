#include <cstring>
#include <sstream>

#include "doctest.h"
#include "experiment/experiment.hpp"

using namespace iikit;
using namespace iikit::experiment;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

const Cell& cell(const Report& r, std::size_t row, const std::string& column) {
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    if (r.columns[i] == column) return r.rows.at(row).cells[i];
  throw std::logic_error("no column " + column);
}

double num(const Report& r, std::size_t row, const std::string& column) {
  return std::get<double>(cell(r, row, column));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') quoted = !quoted;
    else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else cur += ch;
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config schema errors name field paths") {
  CHECK(violations_of("") == std::vector<std::string>{"experiment: missing"});
  CHECK(violations_of("{}") == std::vector<std::string>{"experiment: missing"});
  CHECK(mentions(violations_of("[1, 2]"), "<document>"));
  CHECK(mentions(violations_of("{\"experiment\": "), "<document>"));

  const auto alpha = violations_of(R"({"experiment": "bound", "domain": [0, 1],
      "weight": {"kind": "jacobi", "alpha": -2, "beta": 0},
      "kernel": {"kind": "legendre", "d": 2}, "signal": {"poly": [0, 1]}})");
  REQUIRE(alpha.size() == 1);
  CHECK(alpha[0].rfind("weight.alpha:", 0) == 0);
  CHECK(mentions(alpha, "alpha > -1"));

  CHECK(mentions(violations_of(R"({"experiment": "nope"})"), "experiment: unknown experiment"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [1, 0], "kernel": {"kind": "legendre", "d": 1},
      "signal": {"poly": [1]}})"), "domain"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [0, 1], "kernel": {"kind": "legendre", "d": 14},
      "signal": {"poly": [1]}})"), "kernel.d"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [0, 1], "kernel": {"kind": "legendre", "d": 2},
      "signal": {"poly": [1]}, "extra": 1})"), "extra: unknown field"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [0, 1], "kernel": {"kind": "legendre", "d": 2},
      "signal": {"poly": [[1], [2]]}, "cost": [[1, 2], [2, 1]]})"), "cost"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [0, 1], "kernel": {"kind": "legendre", "d": 2},
      "signal": {"poly": [[1], [2]]}, "cost": "identity 3"})"), "cost"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": {"kind": "half_line"},
      "weight": {"kind": "laguerre"}, "kernel": {"kind": "laguerre", "d": 2}, "signal": {"preset": "exp", "rate": -1}})"),
                 "signal.decay_certificate"));
  CHECK(mentions(violations_of(R"({"experiment": "bound", "domain": [0, 1], "kernel": {"kind": "hermite", "d": 2},
      "signal": {"poly": [1]}})"), "kernel.kind"));
  CHECK(mentions(violations_of(R"({"preset": "no-such-thing"})"), "preset: unknown preset"));
  CHECK(mentions(violations_of(R"({"preset": "jensen", "tolerances": {"sound": -1}})"), "tolerances.sound"));
  CHECK(mentions(violations_of(R"({"preset": "jensen", "seed": -3})"), "seed"));

  // Several problems are reported together.
  const auto many = violations_of(R"({"experiment": "bound", "domain": [0, 1],
      "kernel": {"kind": "legendre", "d": 0}, "tolerances": {"nope": 1}})");
  CHECK(many.size() >= 3);
}

TEST_CASE("config resolution fills defaults and is stable") {
  const Config c = parse_config(R"(
    // comments are allowed
    {"preset": "jensen", "seed": 42})");
  CHECK(c.kind == Kind::bound);
  CHECK(c.resolved.at("preset") == "jensen");
  CHECK(c.resolved.at("seed") == 42);
  CHECK(c.resolved.at("tolerances").size() == tolerance_keys().size());
  CHECK(c.resolved.at("cost") == json::array({json::array({1.0})}));
  const Config again = reparse(c.resolved);
  CHECK(again.resolved == c.resolved);

  const Config seeded = with_seed(c, 9);
  CHECK(seeded.seed == 9);
  const Config tol = with_tolerance(c, "sound", 1e-6);
  CHECK(tol.tol.sound == 1e-6);
  CHECK_THROWS_AS(with_tolerance(c, "bogus", 1.0), ConfigError);

  // Laguerre kernels imply the half line.
  const Config lag = parse_config(R"({"experiment": "bound", "kernel": {"kind": "laguerre", "d": 3},
      "signal": {"poly": [1, 1]}})");
  CHECK(lag.domain->kind() == Domain::Kind::half_line);
}

TEST_CASE("every preset parses and runs cleanly") {
  CHECK(presets().size() == 15);
  for (const Preset& p : presets()) {
    CAPTURE(p.name);
    const Config c = parse_config("{\"preset\": \"" + p.name + "\"}");
    const Report r = run(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].error == "");
    CHECK(r.exit_status() == 0);
    CHECK(num(r, 0, "lower") <= num(r, 0, "upper") + 1e-12);
  }
}

TEST_CASE("jensen row") {
  const Report r = run(parse_config(R"({"preset": "jensen"})"));
  CHECK(num(r, 0, "upper") == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(num(r, 0, "lower") == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::get<bool>(cell(r, 0, "pass")));
  CHECK(std::get<std::string>(cell(r, 0, "experiment")) == "bound");
}

TEST_CASE("sweep rows and sweep errors") {
  const Report r = run(parse_config(R"({"experiment": "sweep", "domain": [0, 1],
      "kernel": {"kind": "legendre", "d": 3}, "signal": {"poly": [0, 0, 1]}})"));
  REQUIRE(r.rows.size() == 3);
  CHECK(num(r, 0, "lower") == doctest::Approx(1.0 / 9).epsilon(1e-13));
  CHECK(num(r, 1, "lower") == doctest::Approx(7.0 / 36).epsilon(1e-13));
  CHECK(num(r, 2, "lower") == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(r.exit_status() == 0);

  // A monomial family under a weight whose Gram becomes numerically singular
  // at high order produces an error row naming the level and exit status 1.
  const Report bad = run(parse_config(R"({"experiment": "sweep", "domain": [0, 1000],
      "kernel": {"kind": "monomial", "d": 13}, "signal": {"poly": [1, 1]}})"));
  CHECK(bad.exit_status() == 1);
  CHECK(bad.rows.back().error.find("at d =") != std::string::npos);
  CHECK_FALSE(bad.rows.back().pass);
}

TEST_CASE("module errors become failed rows") {
  const Report r = run(parse_config(R"({"experiment": "bound", "domain": [0, 1e6],
      "kernel": {"kind": "monomial", "d": 13}, "signal": {"poly": [1]}})"));
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].pass);
  CHECK(r.rows[0].error.rfind("singular-gram", 0) == 0);
  CHECK(r.exit_status() == 1);
}

TEST_CASE("probe warnings do not fail the run") {
  const Report r = run(parse_config(R"({"experiment": "fmt-probe", "domain": [0, 1],
      "kernel": {"kind": "legendre", "d": 3}, "signal": {"preset": "sin", "freq": 3}, "seed": 1,
      "params": {"budget": 1, "iterations": 0}})"));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].warning);
  CHECK(r.rows[0].pass);
  CHECK(r.warnings() == 1);
  CHECK(r.exit_status() == 0);
}

TEST_CASE("csv structure") {
  const Report r = run(parse_config(R"({"experiment": "cauchy", "domain": [0, 2],
      "signal": {"poly": [[1, 2, 3], [0, 1, 0]]}, "params": {"p": 2}})"));
  const std::string csv = emit_table(r, Format::csv);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == r.rows.size() + 1);
  const std::size_t width = split(lines[0]).size();
  CHECK(width == r.columns.size());
  for (const auto& l : lines) CHECK(split(l).size() == width);

  const std::string timed = emit_table(r, Format::csv, true);
  CHECK(timed.substr(0, timed.find('\n')).find("wall_time") != std::string::npos);

  // One row: header plus one data line.
  const Report one = run(parse_config(R"({"preset": "jensen"})"));
  const std::string s = emit_table(one, Format::csv);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2);

  Report empty;
  CHECK_THROWS_AS(emit_table(empty, Format::json), Error);
}

TEST_CASE("json round trip is exact") {
  const Report r = run(parse_config(R"({"experiment": "invariance", "domain": [0, 2],
      "kernel": {"kind": "jacobi", "d": 3, "alpha": 1, "beta": 0.5}, "signal": {"preset": "exp"},
      "seed": 11, "params": {"samples": 20}})"));
  const json doc = json::parse(emit_table(r, Format::json));
  CHECK(doc.at("config") == r.config);
  CHECK(doc.at("summary").at("exit_status") == r.exit_status());
  REQUIRE(doc.at("rows").size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t k = 0; k < r.columns.size(); ++k) {
      if (const double* d = std::get_if<double>(&r.rows[i].cells[k])) {
        const double back = doc.at("rows")[i].at(r.columns[k]).get<double>();
        CHECK(std::memcmp(&back, d, sizeof(double)) == 0);
      }
    }
  }
  CHECK_FALSE(doc.at("rows")[0].contains("wall_time"));
}

TEST_CASE("identical config and seed give identical reports") {
  const std::string text = R"({"preset": "jensen", "experiment": "fmt-probe", "seed": 5,
      "params": {"budget": 3, "iterations": 40, "draws": 10}})";
  const std::string a = emit_table(run(parse_config(text)), Format::json);
  const std::string b = emit_table(run(parse_config(text)), Format::json);
  CHECK(a == b);
  const std::string c = emit_table(run(with_seed(parse_config(text), 6)), Format::json);
  CHECK(a != c);
}
