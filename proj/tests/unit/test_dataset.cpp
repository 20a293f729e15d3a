#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "czek/dataset.hpp"
#include "czek/error.hpp"
#include "fixtures.hpp"

using namespace czek;

namespace {

ObservationTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_table(in, "t.csv");
}

ObservationTable with_ratio() {
  auto t = parse("label,A,B,R,C\nx,1,2,0.5,7\ny,3,4,0.75,8\n");
  std::istringstream meta("[ratios]\nR = [A, B]\n");
  return apply_metadata(t, parse_metadata(meta, "m"));
}

std::vector<std::string> names(const ObservationTable& t) {
  std::vector<std::string> out;
  for (const auto& v : t.variables()) out.push_back(v.name);
  return out;
}

template <class F>
void expect_parse_error(const std::string& text, std::size_t line, std::size_t column, F&&) {
  try {
    parse(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
  }
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("cell syntax") {
  CHECK(is_missing(parse_cell("")));
  CHECK(std::get<Interval>(parse_cell("10-12")) == Interval{10, 12});
  CHECK(std::get<Interval>(parse_cell("10–12")) == Interval{10, 12});
  CHECK(std::get<double>(parse_cell("-3")) == -3.0);
  CHECK(std::get<Interval>(parse_cell("2-3")) == Interval{2, 3});
  CHECK(std::get<Interval>(parse_cell("-5 - -2")) == Interval{-5, -2});
  CHECK(std::get<double>(parse_cell("1.5e2")) == 150.0);
  CHECK_THROWS_AS(parse_cell("12-10"), DataError);
  CHECK_THROWS_AS(parse_cell("abc"), DataError);
  CHECK_THROWS_AS(make_interval(3, 2), DataError);
}

TEST_CASE("cell text round-trips") {
  for (const char* text : {"", "10-12", "3.25", "-3", "0.1-0.2", "1e+300"}) {
    const Cell c = parse_cell(text);
    CHECK(parse_cell(format_cell(c)) == c);
  }
}

TEST_CASE("parse errors carry coordinates") {
  auto noop = [] {};
  expect_parse_error("label,a,b\nx,1,zz\n", 2, 3, noop);
  expect_parse_error("label,a,b\nx,1,5-2\n", 2, 3, noop);
  expect_parse_error("label,a\nx,1\nx,2\n", 3, 1, noop);
  expect_parse_error("label,a,b\nx,1\n", 2, 0, noop);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("parse/write/parse round trip") {
  const auto& t = fixture::skulls();
  std::ostringstream out;
  write_table(out, t);
  const auto again = parse(out.str());
  CHECK(again.labels() == t.labels());
  CHECK(again.cells() == t.cells());
  CHECK(names(again) == names(t));
}

TEST_CASE("fixture shape") {
  const auto t = fixture::skulls27();
  CHECK(t.rows() == 13);
  CHECK(t.cols() == 27);
  CHECK(fixture::skulls().cols() == 47);
}

TEST_CASE("resolve_intervals") {
  const auto t = parse("label,a,b,c,d\nx,10-12,5,,3-3\n");
  const auto r = resolve_intervals(t);
  CHECK(std::get<double>(r.at(0, 0)) == 11.0);
  CHECK(std::get<double>(r.at(0, 1)) == 5.0);
  CHECK(is_missing(r.at(0, 2)));
  CHECK(std::get<double>(r.at(0, 3)) == 3.0);
  CHECK(resolve_intervals(r) == r);
  CHECK(r.labels() == t.labels());
}

TEST_CASE("angles_to_radians") {
  auto t = parse("label,ang,plain\nx,180,90\n");
  std::istringstream meta("[kinds]\nang = angle_degrees\n");
  t = apply_metadata(t, parse_metadata(meta, "m"));
  const auto r = angles_to_radians(t);
  CHECK(std::get<double>(r.at(0, 0)) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(std::get<double>(r.at(0, 1)) == 90.0);
  CHECK(r.variables()[0].kind == VariableKind::angle_radians);
  CHECK(angles_to_radians(r) == r);
}

TEST_CASE("subset_variables") {
  const auto t = with_ratio();
  CHECK(subset_variables(t, VariableMode::all) == t);
  CHECK(names(subset_variables(t, VariableMode::drop_ratios)) == std::vector<std::string>{"A", "B", "C"});
  CHECK(names(subset_variables(t, VariableMode::drop_ratio_components)) ==
        std::vector<std::string>{"R", "C"});
  CHECK(names(subset_variables(t, VariableMode::drop_ratio_components,
                               std::vector<std::string>{"C", "A"})) ==
        std::vector<std::string>{"C"});
  CHECK_THROWS_AS(subset_variables(t, VariableMode::all, std::vector<std::string>{"nope"}),
                  UsageError);
}

TEST_CASE("missingness on the 27-variable fixture") {
  const auto m = missingness(fixture::skulls27());
  auto of = [&](const std::string& label) {
    for (const auto& x : m)
      if (x.label == label) return x;
    FAIL("label missing");
    return Missingness{};
  };
  CHECK(of("Neandertal").missing == 0);
  CHECK(of("Spy I").missing == 2);
  CHECK(of("Spy I").fraction() == doctest::Approx(0.074).epsilon(0.01));
  CHECK(of("Egisheim").missing == 18);
  CHECK(of("Egisheim").fraction() == doctest::Approx(0.667).epsilon(0.001));
  const auto overall = overall_missingness(fixture::skulls27());
  CHECK(overall.missing == 105);
  CHECK(overall.total == 351);
}

TEST_CASE("filter_by_missingness") {
  const auto t = fixture::skulls27();
  const auto f = filter_by_missingness(t, 0.5);
  CHECK(f.rows() == 9);
  for (const char* gone : {"Krapina D", "Galey Hill", "Brunn", "Egisheim"})
    CHECK_FALSE(f.find_label(gone));
  CHECK(filter_by_missingness(t, 1.0) == t);
  const auto complete = parse("label,a\nx,1\ny,2\n");
  CHECK(filter_by_missingness(complete, 0.0) == complete);
  CHECK_THROWS_AS(filter_by_missingness(parse("label,a,b\nx,,\n"), 0.5), DataError);
  CHECK_THROWS_AS(filter_by_missingness(t, 1.5), UsageError);
}

TEST_CASE("normalize examples") {
  const auto r = normalize(parse("label,a,b,c\nx,1,5,1\ny,2,5,\nz,3,5,3\n"));
  CHECK(*r.at(0, 0) == doctest::Approx(-1.0));
  CHECK(*r.at(1, 0) == doctest::Approx(0.0));
  CHECK(*r.at(2, 0) == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(*r.at(i, 1) == 0.0);
  CHECK(r.provenance().columns[1] == ColumnScaling::centred_constant);
  CHECK(*r.at(0, 2) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK_FALSE(r.at(1, 2).has_value());
  CHECK(*r.at(2, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(r.provenance().normalized);
  CHECK_THROWS_AS(normalize(parse("label,a\nx,1-2\n")), DataError);
}

TEST_CASE("normalized columns have mean 0 and sd 1") {
  const auto r = normalize(resolve_intervals(fixture::skulls()));
  for (std::size_t c = 0; c < r.cols(); ++c) {
    std::vector<double> v;
    for (std::size_t i = 0; i < r.rows(); ++i)
      if (r.at(i, c)) v.push_back(*r.at(i, c));
    if (r.provenance().columns[c] != ColumnScaling::standardized) continue;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(std::fabs(mean) < 1e-9);
    CHECK(std::fabs(std::sqrt(ss / static_cast<double>(v.size() - 1)) - 1.0) < 1e-9);
  }
}

TEST_CASE("transforms keep dimensions and label order") {
  const auto& t = fixture::skulls();
  for (const auto& x : {resolve_intervals(t), angles_to_radians(t)}) {
    CHECK(x.labels() == t.labels());
    CHECK(x.cols() == t.cols());
  }
  const auto r = normalize(resolve_intervals(t));
  CHECK(r.labels() == t.labels());
  CHECK(r.cols() == t.cols());
}

TEST_CASE("missingness commutes with normalize and ignores permutations") {
  const auto t = resolve_intervals(fixture::skulls());
  CHECK(missingness(normalize(t)) == missingness(t));

  std::vector<std::string> labels(t.labels().rbegin(), t.labels().rend());
  std::vector<VariableMeta> vars(t.variables().rbegin(), t.variables().rend());
  std::vector<Cell> cells;
  for (std::size_t i = t.rows(); i-- > 0;)
    for (std::size_t j = t.cols(); j-- > 0;) cells.push_back(t.at(i, j));
  const ObservationTable flipped(labels, vars, cells);
  auto a = missingness(t);
  auto b = missingness(flipped);
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("metadata validation") {
  const auto t = parse("label,a,b\nx,1,2\ny,3,4\n");
  auto meta = [](const std::string& text) {
    std::istringstream in(text);
    return parse_metadata(in, "m");
  };
  CHECK_THROWS_AS(meta("[table]\nwhatever = 1\n"), ParseError);
  CHECK_THROWS_AS(meta("[nonsense]\n"), ParseError);
  CHECK_THROWS_AS(meta("[nonsense]\na = 1\n"), ParseError);
  CHECK_THROWS_AS(meta("[kinds]\na = plain\na = plain\n"), ParseError);
  CHECK_THROWS_AS(meta("[variable_sets]\nfull = [a]\n"), ParseError);
  CHECK_THROWS_AS(apply_metadata(t, meta("[kinds]\nzz = plain\n")), DataError);
  CHECK_THROWS_AS(apply_metadata(t, meta("[kinds]\na = ratio\n")), DataError);
  CHECK_THROWS_AS(apply_metadata(t, meta("[groups]\nq = g\n")), DataError);
  const auto ok = apply_metadata(t, meta("[table]\nfocal = x\n[groups]\nx = g1\ny = g2\n"));
  CHECK(ok.annotations().focal == "x");
  CHECK(ok.annotations().groups.at("y") == "g2");
}

}  // TEST_SUITE
