#pragma once

#include <vector>

#include "knotcx/graph.hpp"

namespace knotcx {

enum class ContractionKind { Edge, Arc };

/// One term of the differential. For an Edge contraction `target` indexes
/// g.edges(); for an Arc it is the 1-based index i of the arc joining interval
/// vertices i and i+1.
struct ContractionDescriptor {
  ContractionKind kind = ContractionKind::Edge;
  int target = 0;
};

struct Contraction {
  ContractionKind kind = ContractionKind::Edge;
  int target = 0;
  Graph resulting;  // merged graph before canonicalization
  int local_sign = 1;
};

/// Local sign attached to merging endpoints i < j. The default is the rule
/// that makes delta square to zero; the alternatives exist so tests can show
/// they fail.
enum class SignRule {
  PowJPlus1,  // (-1)^(j+1)
  PowI,       // (-1)^i
  PowIPlusJ,  // (-1)^(i+j)
};

struct SignConvention {
  SignRule rule = SignRule::PowJPlus1;
  int arc_factor = 1;  // extra global factor on arc contractions, +1 or -1
};

/// All legal contractions of g: edges with at least one free endpoint, and
/// arcs between consecutive interval vertices.
std::vector<ContractionDescriptor> legal_contractions(const Graph& g);

/// Merge the endpoints of one edge or arc. The merged vertex keeps the
/// smaller label and higher labels shift down by one. Throws GraphError
/// (IllegalContraction) for an edge between two interval vertices or an
/// out-of-range arc.
Contraction contract_raw(const Graph& g, const ContractionDescriptor& c,
                         const SignConvention& conv = {});

/// contract_raw followed by canonicalization; the sign folds in local_sign.
SignedGraph contract(const Graph& g, const ContractionDescriptor& c,
                     const SignConvention& conv = {});

GraphVector delta(const Graph& g, const SignConvention& conv = {});

/// Linear extension of delta. Throws GraphError (MixedGrading) when the terms
/// of v do not share one grading.
GraphVector delta_vec(const GraphVector& v, const SignConvention& conv = {});

}  // namespace knotcx
