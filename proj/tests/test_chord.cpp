#include "doctest.h"

#include <map>
#include <string>

#include "knotcx/chord.hpp"
#include "knotcx/cohomology.hpp"
#include "chord_oracle.hpp"

using namespace knotcx;

using chord_oracle::oracle_dimension;

TEST_CASE("diagram counts") {
  CHECK(enumerate_chords(1).size() == 1);
  CHECK(enumerate_chords(2).size() == 3);
  CHECK(enumerate_chords(3).size() == 15);
  CHECK(enumerate_chords(4).size() == 105);
}

TEST_CASE("oracle agrees with the primary relation generator") {
  for (int k = 1; k <= 4; ++k) {
    CHECK(algebra_dimension(k, true) == oracle_dimension(k, true));
    CHECK(algebra_dimension(k, false) == oracle_dimension(k, false));
  }
}

TEST_CASE("known dimensions") {
  CHECK(algebra_dimension(2, true) == 1);
  CHECK(algebra_dimension(3, true) == 1);
  CHECK(algebra_dimension(4, true) == 3);
  CHECK(algebra_dimension(2, false) == 2);
  CHECK(algebra_dimension(3, false) == 3);
  CHECK(algebra_dimension(4, false) == 6);
  for (int k = 1; k <= 4; ++k) CHECK(algebra_dimension(k, true) <= algebra_dimension(k, false));
}

TEST_CASE("degree zero cohomology matches the chord algebra") {
  Complex cx;
  for (int k = 1; k <= 3; ++k) CHECK(cx.betti_number(k, 0) == algebra_dimension(k, true));
}

TEST_CASE("to_graph") {
  auto v = ChordDiagram::from_pairs({{1, 3}, {2, 4}});
  CHECK(to_graph(v) == parse_graph("G[4,0;E{1>3,2>4}]"));
  CHECK(to_graph(ChordDiagram::from_pairs({{1, 2}})) == parse_graph("G[2,0;E{1>2}]"));
  auto nested = to_graph(ChordDiagram::from_pairs({{1, 4}, {2, 3}}));
  CHECK(nested == parse_graph("G[4,0;E{1>4,2>3}]"));
  CHECK(grading(nested) == Grading{2, 0});
  for (const auto& d : enumerate_chords(3)) CHECK(grading(to_graph(d)) == Grading{3, 0});
}

TEST_CASE("text form, isolation, concatenation") {
  auto v = parse_chord("C[1-3,2-4]");
  CHECK(format_chord(v) == "C[1-3,2-4]");
  CHECK_FALSE(v.has_isolated_chord());
  CHECK(parse_chord("C[1-4,2-3]").has_isolated_chord());
  CHECK_THROWS_AS(parse_chord("C[1-3,1-4]"), ParseError);
  CHECK_THROWS_AS(parse_chord("C[1-3"), ParseError);
  auto w = concatenate(v, parse_chord("C[1-2]"));
  CHECK(format_chord(w) == "C[1-3,2-4,5-6]");
  CHECK(w.has_isolated_chord());
  CHECK_THROWS_AS(ChordDiagram(std::vector<int>{0, 1}), std::invalid_argument);
}
