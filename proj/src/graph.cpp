#include "knotcx/graph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace knotcx {

const char* to_string(GraphErrorKind kind) {
  switch (kind) {
    case GraphErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case GraphErrorKind::ValencyTooLow: return "ValencyTooLow";
    case GraphErrorKind::BadLabel: return "BadLabel";
    case GraphErrorKind::LoopAtFreeVertex: return "LoopAtFreeVertex";
    case GraphErrorKind::ParseError: return "ParseError";
    case GraphErrorKind::MixedGrading: return "MixedGrading";
    case GraphErrorKind::IllegalContraction: return "IllegalContraction";
  }
  return "Unknown";
}

Graph Graph::make(int vi, int vf, std::vector<Edge> edges,
                  std::vector<Loop> loops) {
  Graph g(vi, vf, std::move(edges), std::move(loops));
  g.validate();
  return g;
}

Graph Graph::unchecked(int vi, int vf, std::vector<Edge> edges,
                       std::vector<Loop> loops) {
  return Graph(vi, vf, std::move(edges), std::move(loops));
}

int Graph::valency(int v) const {
  int ends = 0;
  for (const auto& e : edges_) {
    if (e.from == v) ++ends;
    if (e.to == v) ++ends;
  }
  for (const auto& l : loops_)
    if (l.vertex == v) ends += 2;
  return is_interval(v) ? ends + 2 : ends;
}

void Graph::validate() const {
  const int n = vertex_count();
  if (vi_ < 0 || vf_ < 0)
    throw GraphError(GraphErrorKind::BadLabel, "negative vertex count");
  auto check_label = [&](int v) {
    if (v < 1 || v > n)
      throw GraphError(GraphErrorKind::BadLabel,
                       "vertex label " + std::to_string(v) + " out of range 1.." +
                           std::to_string(n));
  };
  for (const auto& e : edges_) {
    check_label(e.from);
    check_label(e.to);
    if (e.from == e.to)
      throw GraphError(GraphErrorKind::BadLabel,
                       "edge endpoints coincide; write a small loop as L{v+}");
  }
  for (const auto& l : loops_) {
    check_label(l.vertex);
    if (is_free(l.vertex))
      throw GraphError(GraphErrorKind::LoopAtFreeVertex,
                       "small loop at free vertex " + std::to_string(l.vertex));
  }

  // The special line joins every interval vertex, so they form one component.
  // With no interval vertex the line is a component of its own.
  if (vi_ == 0)
    throw GraphError(GraphErrorKind::DisconnectedGraph,
                     "graph has no vertex on the special line");
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int v = 2; v <= vi_; ++v) parent[find(v)] = find(1);
  for (const auto& e : edges_) parent[find(e.from)] = find(e.to);
  for (int v = 1; v <= n; ++v)
    if (find(v) != find(1))
      throw GraphError(GraphErrorKind::DisconnectedGraph,
                       "vertex " + std::to_string(v) +
                           " is not connected to the special line");

  for (int v = 1; v <= n; ++v)
    if (valency(v) < 3)
      throw GraphError(GraphErrorKind::ValencyTooLow,
                       "vertex " + std::to_string(v) + " has valency " +
                           std::to_string(valency(v)));
}

bool Graph::is_valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const GraphError&) {
    return false;
  }
}

Grading grading(const Graph& g) {
  const int e = g.edge_count();
  return {e - g.vf(), 2 * e - 3 * g.vf() - g.vi()};
}

namespace {

int permutation_sign(const std::vector<int>& perm) {
  // perm is a permutation of 0..m-1
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

// Colour refinement on free vertices. Interval labels are fixed, so they seed
// the colours directly. The resulting colours are invariant under relabeling
// of free vertices; ties are broken later by exhaustive search within cells.
std::vector<int> refine_free_colours(int vi, int vf,
                                     const std::vector<Edge>& undirected) {
  const int n = vi + vf;
  std::vector<std::vector<int>> adj(n + 1);
  for (const auto& e : undirected) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  // colour of vertex v; interval vertex v has colour v-1 permanently
  std::vector<int> colour(n + 1, 0);
  for (int v = 1; v <= vi; ++v) colour[v] = v - 1;
  for (int v = vi + 1; v <= n; ++v) colour[v] = vi;

  int classes = -1;
  for (int round = 0; round <= vf; ++round) {
    std::vector<std::vector<int>> sig(vf);
    for (int f = 0; f < vf; ++f) {
      const int v = vi + 1 + f;
      auto& s = sig[f];
      s.push_back(colour[v]);
      std::vector<int> nb;
      nb.reserve(adj[v].size());
      for (int w : adj[v]) nb.push_back(colour[w]);
      std::sort(nb.begin(), nb.end());
      s.push_back(static_cast<int>(nb.size()));
      s.insert(s.end(), nb.begin(), nb.end());
    }
    std::vector<std::vector<int>> uniq = sig;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (int f = 0; f < vf; ++f) {
      const auto pos = std::lower_bound(uniq.begin(), uniq.end(), sig[f]);
      colour[vi + 1 + f] = vi + static_cast<int>(pos - uniq.begin());
    }
    const int now = static_cast<int>(uniq.size());
    if (now == classes) break;
    classes = now;
  }
  std::vector<int> out(vf);
  for (int f = 0; f < vf; ++f) out[f] = colour[vi + 1 + f] - vi;
  return out;
}

}  // namespace

SignedGraph canonicalize(const Graph& g) {
  const int vi = g.vi();
  const int vf = g.vf();
  SignedGraph zero{g, 0};

  int sign = 1;
  std::vector<Edge> und;
  und.reserve(g.edges().size());
  for (const auto& e : g.edges()) {
    if (e.from == e.to) return zero;
    if (e.from < e.to) {
      und.push_back(e);
    } else {
      und.push_back({e.to, e.from});
      sign = -sign;
    }
  }
  std::vector<Loop> loops;
  loops.reserve(g.loops().size());
  for (const auto& l : g.loops()) {
    if (g.is_free(l.vertex)) return zero;
    if (!l.positive) sign = -sign;
    loops.push_back({l.vertex, true});
  }
  std::sort(loops.begin(), loops.end());
  for (std::size_t i = 1; i < loops.size(); ++i)
    if (loops[i].vertex == loops[i - 1].vertex) return zero;
  {
    auto sorted = und;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1]) return zero;
  }

  if (vf == 0) {
    std::sort(und.begin(), und.end());
    return {Graph::unchecked(vi, vf, std::move(und), std::move(loops)), sign};
  }

  // Free vertices are ordered by refined colour; within a colour class every
  // ordering is tried.
  const auto colour = refine_free_colours(vi, vf, und);
  std::vector<int> order(vf);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return colour[a] < colour[b]; });
  std::vector<std::pair<int, int>> cells;  // [begin, end) in `order`
  for (int i = 0; i < vf;) {
    int j = i;
    while (j < vf && colour[order[j]] == colour[order[i]]) ++j;
    cells.emplace_back(i, j);
    i = j;
  }

  std::vector<Edge> best;
  int best_sign = 0;
  bool have_best = false;
  bool odd_symmetry = false;
  std::vector<Edge> cand(und.size());
  std::vector<int> relabel(vi + vf + 1);
  for (int v = 1; v <= vi; ++v) relabel[v] = v;
  std::vector<int> perm(vf);

  auto evaluate = [&]() {
    // order[p] = old free index placed at new position p
    for (int p = 0; p < vf; ++p) {
      relabel[vi + 1 + order[p]] = vi + 1 + p;
      perm[order[p]] = p;
    }
    int s = permutation_sign(perm);
    for (std::size_t i = 0; i < und.size(); ++i) {
      int a = relabel[und[i].from];
      int b = relabel[und[i].to];
      if (a > b) {
        std::swap(a, b);
        s = -s;
      }
      cand[i] = {a, b};
    }
    std::sort(cand.begin(), cand.end());
    if (!have_best || cand < best) {
      best = cand;
      best_sign = s;
      have_best = true;
      odd_symmetry = false;
    } else if (cand == best && s != best_sign) {
      odd_symmetry = true;
    }
  };

  // Iterate the product of permutations of each cell.
  for (auto& [b, e] : cells) std::sort(order.begin() + b, order.begin() + e);
  while (true) {
    evaluate();
    std::size_t c = 0;
    for (; c < cells.size(); ++c) {
      auto [b, e] = cells[c];
      if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
    }
    if (c == cells.size()) break;
  }

  if (odd_symmetry) return zero;
  return {Graph::unchecked(vi, vf, std::move(best), std::move(loops)),
          sign * best_sign};
}

// ---------------------------------------------------------------------------
// Text form

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c)
      throw ParseError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect(std::string_view word) {
    for (char c : word) expect(c);
  }
  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      value = value * 10 + (s_[pos_] - '0');
      if (value > 1'000'000) throw ParseError(start, "integer too large");
      ++pos_;
    }
    if (pos_ == start) throw ParseError(pos_, "expected integer");
    return static_cast<int>(value);
  }
  char sign_char() {
    skip_ws();
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) return s_[pos_++];
    throw ParseError(pos_, "expected '+' or '-'");
  }
  void finish() {
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(pos_, "trailing characters");
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Graph parse_graph(std::string_view text) {
  Cursor c(text);
  c.expect("G[");
  const int vi = c.integer();
  c.expect(',');
  const int vf = c.integer();
  c.expect(';');
  c.expect("E{");
  std::vector<Edge> edges;
  if (!c.peek('}')) {
    do {
      const int a = c.integer();
      c.expect('>');
      const int b = c.integer();
      edges.push_back({a, b});
    } while (c.peek(',') && (c.expect(','), true));
  }
  c.expect('}');
  std::vector<Loop> loops;
  if (c.peek(';')) {
    c.expect(';');
    c.expect("L{");
    if (!c.peek('}')) {
      do {
        const int v = c.integer();
        loops.push_back({v, c.sign_char() == '+'});
      } while (c.peek(',') && (c.expect(','), true));
    }
    c.expect('}');
  }
  const std::size_t end = c.pos();
  c.expect(']');
  c.finish();
  try {
    return Graph::make(vi, vf, std::move(edges), std::move(loops));
  } catch (const GraphError& e) {
    if (e.kind() == GraphErrorKind::BadLabel) throw ParseError(end, e.what());
    throw;
  }
}

std::string format_graph(const Graph& g) {
  std::ostringstream os;
  os << "G[" << g.vi() << ',' << g.vf() << ";E{";
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    if (i) os << ',';
    os << g.edges()[i].from << '>' << g.edges()[i].to;
  }
  os << '}';
  if (!g.loops().empty()) {
    os << ";L{";
    for (std::size_t i = 0; i < g.loops().size(); ++i) {
      if (i) os << ',';
      os << g.loops()[i].vertex << (g.loops()[i].positive ? '+' : '-');
    }
    os << '}';
  }
  os << ']';
  return os.str();
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, e.to});
  nlohmann::json loops = nlohmann::json::array();
  for (const auto& l : g.loops())
    loops.push_back({l.vertex, l.positive ? "+" : "-"});
  return {{"vi", g.vi()}, {"vf", g.vf()}, {"edges", edges}, {"loops", loops}};
}

Graph graph_from_json(const nlohmann::json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  std::vector<Loop> loops;
  if (j.contains("loops"))
    for (const auto& l : j.at("loops"))
      loops.push_back({l.at(0).get<int>(), l.at(1).get<std::string>() == "+"});
  return Graph::make(j.at("vi").get<int>(), j.at("vf").get<int>(),
                     std::move(edges), std::move(loops));
}

// ---------------------------------------------------------------------------
// GraphVector

GraphVector GraphVector::of(const Graph& g, const mpq_class& coeff) {
  GraphVector v;
  v.add(g, coeff);
  return v;
}

void GraphVector::add(const Graph& g, const mpq_class& coeff) {
  auto c = canonicalize(g);
  if (c.sign == 0) return;
  add_canonical(c.graph, c.sign > 0 ? mpq_class(coeff) : mpq_class(-coeff));
}

void GraphVector::add_canonical(const Graph& g, const mpq_class& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(g, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

GraphVector& GraphVector::operator+=(const GraphVector& other) {
  for (const auto& [g, q] : other.terms_) add_canonical(g, q);
  return *this;
}

GraphVector& GraphVector::operator-=(const GraphVector& other) {
  for (const auto& [g, q] : other.terms_) add_canonical(g, -q);
  return *this;
}

GraphVector& GraphVector::operator*=(const mpq_class& q) {
  if (q == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [g, c] : terms_) c *= q;
  return *this;
}

mpq_class GraphVector::coefficient(const Graph& canonical) const {
  auto it = terms_.find(canonical);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

std::string format_rational(const mpq_class& q) { return q.get_str(); }

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char ch) { return std::isspace(ch); }),
          s.end());
  if (s.empty()) throw ParseError(0, "empty rational");
  if (s.front() == '+') s.erase(s.begin());
  std::size_t slash = s.find('/');
  auto digits_ok = [](std::string_view part, bool allow_sign) {
    if (allow_sign && !part.empty() && part.front() == '-') part.remove_prefix(1);
    return !part.empty() &&
           std::all_of(part.begin(), part.end(),
                       [](unsigned char ch) { return std::isdigit(ch); });
  };
  if (slash == std::string::npos ? !digits_ok(s, true)
                                 : !digits_ok(std::string_view(s).substr(0, slash), true) ||
                                       !digits_ok(std::string_view(s).substr(slash + 1), false))
    throw ParseError(0, "malformed rational '" + std::string(text) + "'");
  mpq_class q(s);
  if (q.get_den() == 0) throw ParseError(slash, "zero denominator");
  q.canonicalize();
  return q;
}

nlohmann::json vector_to_json(const GraphVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [g, q] : v.terms())
    out.push_back({{"coeff", format_rational(q)}, {"graph", format_graph(g)}});
  return out;
}

GraphVector vector_from_json(const nlohmann::json& j) {
  GraphVector v;
  for (const auto& term : j) {
    const auto& c = term.at("coeff");
    mpq_class q = c.is_string() ? parse_rational(c.get<std::string>())
                                : mpq_class(c.get<long>());
    v.add(parse_graph(term.at("graph").get<std::string>()), q);
  }
  return v;
}

}  // namespace knotcx
