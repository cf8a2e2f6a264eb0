#include "knotcx/differential.hpp"

#include <string>

namespace knotcx {

namespace {

int pow_minus_one(int e) { return (e % 2 == 0) ? 1 : -1; }

int local_sign(int i, int j, const SignConvention& conv) {
  switch (conv.rule) {
    case SignRule::PowJPlus1: return pow_minus_one(j + 1);
    case SignRule::PowI: return pow_minus_one(i);
    case SignRule::PowIPlusJ: return pow_minus_one(i + j);
  }
  return 1;
}

// Label map for merging vertex `hi` into `lo` (lo < hi).
int merged_label(int v, int lo, int hi) {
  if (v == hi) return lo;
  return v > hi ? v - 1 : v;
}

}  // namespace

std::vector<ContractionDescriptor> legal_contractions(const Graph& g) {
  std::vector<ContractionDescriptor> out;
  for (int k = 0; k < static_cast<int>(g.edges().size()); ++k) {
    const auto& e = g.edges()[k];
    if (g.is_free(e.from) || g.is_free(e.to))
      out.push_back({ContractionKind::Edge, k});
  }
  for (int i = 1; i < g.vi(); ++i) out.push_back({ContractionKind::Arc, i});
  return out;
}

Contraction contract_raw(const Graph& g, const ContractionDescriptor& c,
                         const SignConvention& conv) {
  int lo = 0;
  int hi = 0;
  int sign = 1;
  int skip_edge = -1;
  int vi = g.vi();
  int vf = g.vf();

  if (c.kind == ContractionKind::Edge) {
    if (c.target < 0 || c.target >= static_cast<int>(g.edges().size()))
      throw GraphError(GraphErrorKind::IllegalContraction,
                       "edge index " + std::to_string(c.target) + " out of range");
    const auto& e = g.edges()[c.target];
    if (!g.is_free(e.from) && !g.is_free(e.to))
      throw GraphError(GraphErrorKind::IllegalContraction,
                       "edge " + std::to_string(e.from) + ">" + std::to_string(e.to) +
                           " joins two interval vertices");
    lo = std::min(e.from, e.to);
    hi = std::max(e.from, e.to);
    sign = local_sign(lo, hi, conv);
    if (e.from == hi) sign = -sign;
    skip_edge = c.target;
    --vf;  // hi is always free: free labels exceed interval labels
  } else {
    if (c.target < 1 || c.target >= g.vi())
      throw GraphError(GraphErrorKind::IllegalContraction,
                       "arc " + std::to_string(c.target) + " out of range 1.." +
                           std::to_string(g.vi() - 1));
    lo = c.target;
    hi = c.target + 1;
    sign = local_sign(lo, hi, conv) * conv.arc_factor;
    --vi;
  }

  std::vector<Edge> edges;
  std::vector<Loop> loops;
  edges.reserve(g.edges().size());
  for (int k = 0; k < static_cast<int>(g.edges().size()); ++k) {
    if (k == skip_edge) continue;
    const auto& e = g.edges()[k];
    const int a = merged_label(e.from, lo, hi);
    const int b = merged_label(e.to, lo, hi);
    if (a == b) {
      // An edge between the merged pair becomes a small loop. Its half-edge
      // order follows the line: '+' when it ran from the earlier vertex.
      loops.push_back({a, e.from == lo});
    } else {
      edges.push_back({a, b});
    }
  }
  for (const auto& l : g.loops())
    loops.push_back({merged_label(l.vertex, lo, hi), l.positive});

  return {c.kind, c.target,
          Graph::unchecked(vi, vf, std::move(edges), std::move(loops)), sign};
}

SignedGraph contract(const Graph& g, const ContractionDescriptor& c,
                     const SignConvention& conv) {
  auto raw = contract_raw(g, c, conv);
  auto canon = canonicalize(raw.resulting);
  canon.sign *= raw.local_sign;
  if (canon.sign != 0 && !canon.graph.is_valid())
    throw GraphError(GraphErrorKind::IllegalContraction,
                     "contraction produced an invalid graph " +
                         format_graph(canon.graph));
  return canon;
}

GraphVector delta(const Graph& g, const SignConvention& conv) {
  // Work on the canonical representative so that graphs which vanish in the
  // complex (double edges) have zero differential.
  const auto canon = canonicalize(g);
  GraphVector out;
  if (canon.sign == 0) return out;
  for (const auto& c : legal_contractions(canon.graph)) {
    auto r = contract(canon.graph, c, conv);
    if (r.sign != 0) out.add_canonical(r.graph, r.sign * canon.sign);
  }
  return out;
}

GraphVector delta_vec(const GraphVector& v, const SignConvention& conv) {
  GraphVector out;
  bool first = true;
  Grading common;
  for (const auto& [g, q] : v.terms()) {
    const auto gr = grading(g);
    if (first) {
      common = gr;
      first = false;
    } else if (gr != common) {
      throw GraphError(GraphErrorKind::MixedGrading,
                       "cochain mixes gradings (" + std::to_string(common.ord) + "," +
                           std::to_string(common.deg) + ") and (" +
                           std::to_string(gr.ord) + "," + std::to_string(gr.deg) + ")");
    }
    auto d = delta(g, conv);
    d *= q;
    out += d;
  }
  return out;
}

}  // namespace knotcx
