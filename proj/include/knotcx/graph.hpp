#pragma once

// Decorated graphs on the special line: interval vertices 1..vi sit on an
// oriented line in label order, free vertices vi+1..vi+vf sit off it.
// Edges are oriented; small loops live on interval vertices and carry a
// half-edge order flag.

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

namespace knotcx {

enum class GraphErrorKind {
  DisconnectedGraph,
  ValencyTooLow,
  BadLabel,
  LoopAtFreeVertex,
  ParseError,
  MixedGrading,
  IllegalContraction,
};

const char* to_string(GraphErrorKind kind);

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  GraphErrorKind kind() const noexcept { return kind_; }

 private:
  GraphErrorKind kind_;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : GraphError(GraphErrorKind::ParseError,
                   what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

struct Loop {
  int vertex = 0;
  bool positive = true;  // half-edge order flag, '+' or '-'
  auto operator<=>(const Loop&) const = default;
};

struct Grading {
  int ord = 0;
  int deg = 0;
  auto operator<=>(const Grading&) const = default;
};

class Graph {
 public:
  Graph() = default;

  /// Validated construction. Throws GraphError on bad labels, a loop at a
  /// free vertex, a disconnected graph, or a vertex of valency < 3.
  static Graph make(int vi, int vf, std::vector<Edge> edges,
                    std::vector<Loop> loops = {});

  /// No validation. Used for intermediate results (contractions) that may
  /// carry double edges or free loops and are then killed by canonicalize.
  static Graph unchecked(int vi, int vf, std::vector<Edge> edges,
                         std::vector<Loop> loops = {});

  int vi() const noexcept { return vi_; }
  int vf() const noexcept { return vf_; }
  int vertex_count() const noexcept { return vi_ + vf_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Loop>& loops() const noexcept { return loops_; }
  /// Edge count in the grading sense: ordinary edges plus small loops.
  int edge_count() const noexcept {
    return static_cast<int>(edges_.size() + loops_.size());
  }

  bool is_interval(int v) const noexcept { return v >= 1 && v <= vi_; }
  bool is_free(int v) const noexcept { return v > vi_ && v <= vi_ + vf_; }

  /// Edge-ends at v (a loop counts twice), plus 2 line arcs if v is interval.
  int valency(int v) const;

  /// Throws GraphError describing the first violated invariant.
  void validate() const;
  bool is_valid() const noexcept;

  auto operator<=>(const Graph&) const = default;
  bool operator==(const Graph&) const = default;

 private:
  Graph(int vi, int vf, std::vector<Edge> edges, std::vector<Loop> loops)
      : vi_(vi), vf_(vf), edges_(std::move(edges)), loops_(std::move(loops)) {}

  int vi_ = 0;
  int vf_ = 0;
  std::vector<Edge> edges_;
  std::vector<Loop> loops_;
};

/// ord = e - vf, deg = 2e - 3vf - vi.
Grading grading(const Graph& g);

struct SignedGraph {
  Graph graph;
  int sign = 0;  // -1, 0, +1
};

/// Canonical representative under free-vertex relabeling, edge reversal and
/// loop flag flips. Interval labels never move. The canonical form has every
/// edge pointing from the smaller label to the larger, every loop flagged
/// '+', and the lexicographically least sorted edge list. Sign 0 means the
/// graph vanishes in the complex (double edge, loop at a free vertex, two
/// loops at one vertex, or an odd self-symmetry).
SignedGraph canonicalize(const Graph& g);

/// Text form: G[vi,vf;E{a>b,...}] with optional ;L{v+,...}.
Graph parse_graph(std::string_view text);
std::string format_graph(const Graph& g);

nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

/// Formal linear combination of canonical graphs over the rationals.
class GraphVector {
 public:
  using Terms = std::map<Graph, mpq_class>;

  GraphVector() = default;
  /// The class of g in the complex: canonicalizes, drops zero graphs.
  static GraphVector of(const Graph& g, const mpq_class& coeff = 1);

  /// Adds coeff * g, canonicalizing g first.
  void add(const Graph& g, const mpq_class& coeff);
  /// Adds coeff * g where g is already canonical with sign +1.
  void add_canonical(const Graph& g, const mpq_class& coeff);

  GraphVector& operator+=(const GraphVector& other);
  GraphVector& operator-=(const GraphVector& other);
  GraphVector& operator*=(const mpq_class& q);
  friend GraphVector operator+(GraphVector a, const GraphVector& b) {
    return a += b;
  }
  friend GraphVector operator-(GraphVector a, const GraphVector& b) {
    return a -= b;
  }
  friend GraphVector operator*(const mpq_class& q, GraphVector v) {
    return v *= q;
  }

  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const Terms& terms() const noexcept { return terms_; }
  mpq_class coefficient(const Graph& canonical) const;

  bool operator==(const GraphVector& other) const { return terms_ == other.terms_; }

 private:
  Terms terms_;
};

/// Cochain file: [{"coeff":"p/q","graph":"G[...]"}].
nlohmann::json vector_to_json(const GraphVector& v);
GraphVector vector_from_json(const nlohmann::json& j);

std::string format_rational(const mpq_class& q);
mpq_class parse_rational(std::string_view text);

}  // namespace knotcx
