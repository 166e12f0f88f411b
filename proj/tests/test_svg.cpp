#include "doctest.h"

#include <string>

#include "imply/error.hpp"
#include "imply/svg.hpp"

using namespace imply;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

SweepOutcome nominal(bool ok) {
  MemristorParams n;
  VariationSpec v;
  v.levels = {0.0};
  SweepOutcome o;
  o.tuple = generate_grid(v, n).front();
  o.correct = ok;
  return o;
}

}  // namespace

TEST_SUITE("svg") {

TEST_CASE("four square") {
  const auto empty = render_four_square({}, 0.1);
  CHECK(empty.rfind("<svg", 0) == 0);
  CHECK(empty.find("</svg>") != std::string::npos);
  CHECK(count(empty, "<g ") == 0);

  const auto ok = render_four_square({nominal(true)}, 0.1);
  CHECK(count(ok, "<g ") == 1);
  CHECK(count(ok, "stroke=\"#2e9e44\"") == 4);
  CHECK(count(ok, "fill=\"#444\"") == 4);  // half fills
  const auto bad = render_four_square({nominal(false)}, 0.1);
  CHECK(count(bad, "stroke=\"#d62728\"") == 4);
}

TEST_CASE("bar segments") {
  ResultBar b;
  b.parameter = ParamId::kVonQ;
  b.points = {{-0.77, false}, {-0.7, true}, {-0.63, true}};
  const auto seg = bar_segments(b);
  bool orange = false, red = false;
  for (const auto& s : seg) {
    if (s.colour == BarColour::kOrange) {
      orange = true;
      CHECK(s.from == -0.77);
      CHECK(s.to == -0.7);
    }
    if (s.colour == BarColour::kRed) red = true;
  }
  CHECK(orange);
  CHECK(red);
}

TEST_CASE("operating area plot") {
  MemristorParams n;
  GateConfig c;
  AreaAxis x{ParamId::kVonQ, -1.05, -0.25, 21};
  AreaAxis y{ParamId::kRoffP, 0.4e6, 1.7e6, 21};
  const auto a = operating_area(x, y, n, n, c, preset("TTL"));
  const auto plain = render_operating_area(a);
  CHECK(plain.rfind("<svg", 0) == 0);
  CHECK(count(plain, "data-colour") == 0);

  ResultBar b;
  b.parameter = ParamId::kVonQ;
  b.points = {{-0.84, false}, {-0.77, false}, {-0.7, true}};
  const auto withbar = render_operating_area(a, {b});
  CHECK(count(withbar, "data-colour=\"red\"") > 0);
  CHECK(count(withbar, "data-colour=\"orange\"") > 0);

  ResultBar other;
  other.parameter = ParamId::kKonQ;
  CHECK_THROWS_AS(render_operating_area(a, {other}), ConfigError);
}

}
