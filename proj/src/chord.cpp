#include "knotcx/chord.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace knotcx {

ChordDiagram::ChordDiagram(std::vector<int> mate) : mate_(std::move(mate)) {
  const int n = static_cast<int>(mate_.size());
  if (n % 2) throw std::invalid_argument("chord diagram needs an even number of points");
  for (int p = 0; p < n; ++p) {
    const int q = mate_[p];
    if (q < 0 || q >= n || q == p || mate_[q] != p)
      throw std::invalid_argument("chord pairing is not a fixed-point-free involution");
  }
}

ChordDiagram ChordDiagram::from_pairs(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> mate(2 * pairs.size(), -1);
  for (auto [a, b] : pairs) {
    if (a < 1 || b < 1 || a > static_cast<int>(mate.size()) || b > static_cast<int>(mate.size()) ||
        mate[a - 1] != -1 || mate[b - 1] != -1)
      throw std::invalid_argument("bad chord endpoint " + std::to_string(a) + "-" +
                                  std::to_string(b));
    mate[a - 1] = b - 1;
    mate[b - 1] = a - 1;
  }
  return ChordDiagram(std::move(mate));
}

std::vector<std::pair<int, int>> ChordDiagram::chords() const {
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p < points(); ++p)
    if (p < mate_[p]) out.emplace_back(p + 1, mate_[p] + 1);
  return out;
}

bool ChordDiagram::has_isolated_chord() const {
  for (int p = 0; p < points(); ++p) {
    const int q = mate_[p];
    if (q < p) continue;
    bool crossed = false;
    for (int r = p + 1; r < q && !crossed; ++r) crossed = mate_[r] < p || mate_[r] > q;
    if (!crossed) return true;
  }
  return false;
}

std::vector<ChordDiagram> enumerate_chords(int k) {
  std::vector<ChordDiagram> out;
  if (k < 0) return out;
  std::vector<int> mate(2 * k, -1);
  auto rec = [&](auto&& self) -> void {
    auto first = std::find(mate.begin(), mate.end(), -1);
    if (first == mate.end()) {
      out.emplace_back(mate);
      return;
    }
    const int p = static_cast<int>(first - mate.begin());
    for (int q = p + 1; q < 2 * k; ++q) {
      if (mate[q] != -1) continue;
      mate[p] = q;
      mate[q] = p;
      self(self);
      mate[p] = mate[q] = -1;
    }
  };
  rec(rec);
  std::sort(out.begin(), out.end());
  return out;
}

ChordDiagram concatenate(const ChordDiagram& a, const ChordDiagram& b) {
  std::vector<int> mate;
  for (int p = 0; p < a.points(); ++p) mate.push_back(a.mate(p));
  for (int p = 0; p < b.points(); ++p) mate.push_back(b.mate(p) + a.points());
  return ChordDiagram(std::move(mate));
}

Graph to_graph(const ChordDiagram& cd) {
  std::vector<Edge> edges;
  for (auto [a, b] : cd.chords()) edges.push_back({a, b});
  return Graph::make(cd.points(), 0, std::move(edges));
}

std::string format_chord(const ChordDiagram& cd) {
  std::string s = "C[";
  bool first = true;
  for (auto [a, b] : cd.chords()) {
    if (!first) s += ',';
    first = false;
    s += std::to_string(a) + "-" + std::to_string(b);
  }
  return s + "]";
}

ChordDiagram parse_chord(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> ParseError { return ParseError(pos, what); };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) throw fail(std::string("expected '") + c + "'");
    ++pos;
  };
  auto integer = [&] {
    skip();
    const std::size_t start = pos;
    int v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) && v < 100000)
      v = 10 * v + (text[pos++] - '0');
    if (pos == start) throw fail("expected integer");
    return v;
  };
  expect('C');
  expect('[');
  std::vector<std::pair<int, int>> pairs;
  skip();
  if (pos < text.size() && text[pos] != ']') {
    for (;;) {
      const int a = integer();
      expect('-');
      const int b = integer();
      pairs.emplace_back(a, b);
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
  }
  expect(']');
  skip();
  if (pos != text.size()) throw fail("trailing characters");
  try {
    return ChordDiagram::from_pairs(pairs);
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

namespace {

// Chord labels per position, relabelled by first occurrence.
std::vector<int> word_of(const ChordDiagram& cd) {
  std::vector<int> w(cd.points(), -1);
  int next = 0;
  for (int p = 0; p < cd.points(); ++p)
    if (w[p] == -1) w[p] = w[cd.mate(p)] = next++;
  return w;
}

ChordDiagram diagram_of(const std::vector<int>& word) {
  std::map<int, int> first;
  std::vector<int> mate(word.size());
  for (int p = 0; p < static_cast<int>(word.size()); ++p) {
    auto [it, fresh] = first.emplace(word[p], p);
    if (!fresh) {
      mate[p] = it->second;
      mate[it->second] = p;
    }
  }
  return ChordDiagram(std::move(mate));
}

}  // namespace

std::vector<SparseVector> four_term_relations(int k) {
  const auto diagrams = enumerate_chords(k);
  std::map<ChordDiagram, int> index;
  for (int i = 0; i < static_cast<int>(diagrams.size()); ++i) index.emplace(diagrams[i], i);

  std::vector<SparseVector> out;
  for (const auto& d : diagrams) {
    const auto w = word_of(d);
    for (int x = 0; x < d.points(); ++x) {
      // Word with the moving endpoint removed.
      std::vector<int> rest(w);
      rest.erase(rest.begin() + x);
      const int label = w[x];
      for (int p = 0; p < static_cast<int>(rest.size()); ++p) {
        if (rest[p] == label) continue;
        // p is the left end of the fixed chord; find its right end.
        if (std::find(rest.begin(), rest.begin() + p, rest[p]) != rest.begin() + p) continue;
        int q = p + 1;
        while (rest[q] != rest[p]) ++q;
        SparseVector rel;
        auto put = [&](int gap, int sign) {
          std::vector<int> v(rest);
          v.insert(v.begin() + gap, label);
          axpy(rel, sign, SparseVector{{index.at(diagram_of(v)), 1}});
        };
        put(p, 1);
        put(p + 1, -1);
        put(q, 1);
        put(q + 1, -1);
        if (!rel.empty()) out.push_back(std::move(rel));
      }
    }
  }
  return out;
}

std::vector<SparseVector> one_term_relations(int k) {
  std::vector<SparseVector> out;
  const auto diagrams = enumerate_chords(k);
  for (int i = 0; i < static_cast<int>(diagrams.size()); ++i)
    if (diagrams[i].has_isolated_chord()) out.push_back({{i, 1}});
  return out;
}

int algebra_dimension(int k, bool use_1t) {
  const int total = static_cast<int>(enumerate_chords(k).size());
  EchelonBasis span;
  for (auto& r : four_term_relations(k)) span.insert(std::move(r));
  if (use_1t)
    for (auto& r : one_term_relations(k)) span.insert(std::move(r));
  return total - static_cast<int>(span.dimension());
}

}  // namespace knotcx
