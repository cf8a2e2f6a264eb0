#include "doctest.h"

#include <random>

#include "knotcx/cohomology.hpp"
#include "knotcx/differential.hpp"

using namespace knotcx;

namespace {

const Graph kChordV = parse_graph("G[4,0;E{1>3,2>4}]");
const Graph kTripod = parse_graph("G[3,1;E{1>4,2>4,3>4}]");

GraphVector cocycle_2_0() { return GraphVector::of(kChordV) - GraphVector::of(kTripod); }

// Number of graphs g (ord <= max_k) whose delta(delta(g)) is nonzero.
int delta_squared_failures(int max_k, const SignConvention& conv) {
  int failures = 0;
  for (int k = 1; k <= max_k; ++k)
    for (int l = 0; l + 1 <= max_degree(k); ++l)
      for (const auto& g : enumerate_basis(k, l).graphs)
        failures += !delta_vec(delta(g, conv), conv).is_zero();
  return failures;
}

}  // namespace

TEST_CASE("contraction examples") {
  auto c = contract_raw(kTripod, {ContractionKind::Edge, 2});
  CHECK(c.resulting.vi() == 3);
  CHECK(c.resulting.vf() == 0);
  CHECK(canonicalize(c.resulting).graph == parse_graph("G[3,0;E{1>3,2>3}]"));

  auto a1 = contract_raw(kChordV, {ContractionKind::Arc, 1});
  CHECK(canonicalize(a1.resulting).graph == parse_graph("G[3,0;E{1>2,1>3}]"));

  auto a3 = contract(kChordV, {ContractionKind::Arc, 3});
  CHECK(a3.sign != 0);
  CHECK(a3.graph == parse_graph("G[3,0;E{1>3,2>3}]"));
}

TEST_CASE("arc contraction between chord ends makes a loop") {
  auto c = contract_raw(parse_graph("G[4,0;E{1>4,2>3}]"), {ContractionKind::Arc, 2});
  REQUIRE(c.resulting.loops().size() == 1);
  CHECK(c.resulting.loops()[0].vertex == 2);
}

TEST_CASE("illegal contractions") {
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const GraphError& e) {
      return e.kind();
    }
    return GraphErrorKind::ParseError;
  };
  CHECK(kind([] { contract_raw(kChordV, {ContractionKind::Edge, 0}); }) ==
        GraphErrorKind::IllegalContraction);
  CHECK(kind([] { contract_raw(kChordV, {ContractionKind::Arc, 4}); }) ==
        GraphErrorKind::IllegalContraction);
  CHECK(kind([] { contract_raw(kChordV, {ContractionKind::Arc, 0}); }) ==
        GraphErrorKind::IllegalContraction);
  CHECK(legal_contractions(kChordV).size() == 3);
  CHECK(legal_contractions(kTripod).size() == 5);
}

TEST_CASE("the order 2 cocycle") {
  CHECK(delta_vec(cocycle_2_0()).is_zero());
  CHECK_FALSE(delta(kTripod).is_zero());
  CHECK(delta(kTripod) == delta(kChordV));
}

TEST_CASE("delta shifts the degree by one") {
  auto g = parse_graph("G[5,0;E{1>3,1>4,2>5}]");
  auto d = delta(g);
  CHECK_FALSE(d.is_zero());
  for (const auto& [h, q] : d.terms()) CHECK(grading(h) == Grading{3, 2});
}

TEST_CASE("delta_vec is linear and rejects mixed gradings") {
  CHECK(delta_vec(GraphVector{}).is_zero());
  GraphVector v = mpq_class(3, 7) * GraphVector::of(kTripod);
  CHECK(delta_vec(v) == mpq_class(3, 7) * delta(kTripod));
  GraphVector mixed = GraphVector::of(kChordV) + GraphVector::of(parse_graph("G[2,0;E{1>2}]"));
  try {
    delta_vec(mixed);
    FAIL("no throw");
  } catch (const GraphError& e) {
    CHECK(e.kind() == GraphErrorKind::MixedGrading);
  }
}

TEST_CASE("delta commutes with relabeling and reversal") {
  std::mt19937 rng(99);
  for (int l = 0; l <= 2; ++l) {
    for (const auto& g : enumerate_basis(3, l).graphs) {
      std::vector<Edge> edges = g.edges();
      int sign = 1;
      for (auto& e : edges)
        if (rng() % 2) {
          std::swap(e.from, e.to);
          sign = -sign;
        }
      // reverse the order of the free vertices
      const int vi = g.vi(), vf = g.vf();
      auto flip = [&](int v) { return v > vi ? vi + vf - (v - vi) + 1 : v; };
      for (auto& e : edges) e = {flip(e.from), flip(e.to)};
      int swaps = vf / 2;
      if (swaps % 2) sign = -sign;
      auto h = Graph::make(vi, vf, edges, g.loops());
      REQUIRE(delta(h) == mpq_class(sign) * delta(g));
    }
  }
}

TEST_CASE("delta squares to zero through order 4") {
  CHECK(delta_squared_failures(4, {}) == 0);
}

TEST_CASE("delta squares to zero at the matrix level") {
  Complex cx;
  for (int k = 1; k <= 3; ++k)
    for (int l = 0; l + 2 <= max_degree(k) + 1; ++l)
      CHECK(cx.matrix(k, l + 1).multiply(cx.matrix(k, l)).is_zero());
}

TEST_CASE("alternative sign rules fail a gate") {
  // Only the default passes both delta^2 = 0 and the order 2 cocycle.
  struct Case {
    SignConvention conv;
    bool squares_to_zero;
    bool cocycle;
  };
  auto check = [](const SignConvention& conv) {
    return Case{conv, delta_squared_failures(3, conv) == 0,
                delta_vec(cocycle_2_0(), conv).is_zero()};
  };
  auto def = check({SignRule::PowJPlus1, 1});
  CHECK(def.squares_to_zero);
  CHECK(def.cocycle);
  for (auto conv : {SignConvention{SignRule::PowJPlus1, -1}, SignConvention{SignRule::PowI, 1},
                    SignConvention{SignRule::PowI, -1}, SignConvention{SignRule::PowIPlusJ, 1},
                    SignConvention{SignRule::PowIPlusJ, -1}}) {
    auto c = check(conv);
    CHECK_FALSE((c.squares_to_zero && c.cocycle));
  }
}
