#pragma once
// Chord diagrams on an oriented line and the algebra they span modulo the
// four-term and (optionally) one-term relations.

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "knotcx/graph.hpp"
#include "knotcx/sparse_matrix.hpp"

namespace knotcx {

class ChordDiagram {
 public:
  ChordDiagram() = default;
  /// `mate[p]` is the partner of position p (0-based). Throws
  /// std::invalid_argument unless mate is a fixed-point-free involution.
  explicit ChordDiagram(std::vector<int> mate);
  /// Pairs of 1-based positions.
  static ChordDiagram from_pairs(const std::vector<std::pair<int, int>>& pairs);

  int order() const noexcept { return static_cast<int>(mate_.size() / 2); }
  int points() const noexcept { return static_cast<int>(mate_.size()); }
  int mate(int p) const { return mate_.at(p); }
  /// Chords as 1-based (low, high) pairs sorted by low end.
  std::vector<std::pair<int, int>> chords() const;
  /// A chord meeting no other chord.
  bool has_isolated_chord() const;

  auto operator<=>(const ChordDiagram&) const = default;

 private:
  std::vector<int> mate_;
};

/// All (2k-1)!! diagrams of order k in sorted order.
std::vector<ChordDiagram> enumerate_chords(int k);

/// Concatenation along the line: a's points come first.
ChordDiagram concatenate(const ChordDiagram& a, const ChordDiagram& b);

/// The graph with 2k interval vertices and one edge per chord, low to high.
Graph to_graph(const ChordDiagram& cd);

/// Text form C[1-3,2-4].
std::string format_chord(const ChordDiagram& cd);
ChordDiagram parse_chord(std::string_view text);

/// Four-term relation vectors in the coordinates of enumerate_chords(k).
/// For a diagram, a moving endpoint X and a chord (P, Q) not containing X,
/// the relation is D(X before P) - D(X after P) + D(X before Q) - D(X after Q).
std::vector<SparseVector> four_term_relations(int k);
/// Unit vectors of the diagrams with an isolated chord.
std::vector<SparseVector> one_term_relations(int k);

/// dim span(diagrams) / span(relations).
int algebra_dimension(int k, bool use_1t = true);

}  // namespace knotcx
