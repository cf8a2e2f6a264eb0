#pragma once
// Monte-Carlo evaluation of configuration space integrals: pullbacks of
// normalized sphere volume forms through Gauss maps, linking numbers,
// pairings of graph cochains with resolution cycles, and the two-sheeted
// covering check.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "knotcx/geometry.hpp"
#include "knotcx/graph.hpp"

namespace knotcx {

enum class IntegratorErrorKind { CoincidentPoints, DimensionMismatch, OnDiagonal, OutsideA, InvalidInput };

const char* to_string(IntegratorErrorKind kind);

class IntegratorError : public std::runtime_error {
 public:
  IntegratorError(IntegratorErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  IntegratorErrorKind kind() const noexcept { return kind_; }

 private:
  IntegratorErrorKind kind_;
};

/// (x - y) / |x - y|. Throws CoincidentPoints when x == y.
Vec gauss(const Vec& x, const Vec& y);

/// Central finite-difference Jacobian of f at x, step h.
Mat numerical_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-5);

/// Orthonormal basis of the tangent space of S^m at w (columns), oriented so
/// that det[w | frame] = +1.
Mat sphere_frame(const Vec& w);

/// Volume of the unit sphere S^m.
double sphere_volume(int m);

struct MCEstimate {
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool converged = true;  // std_error below the requested tolerance
};

nlohmann::json to_json(const MCEstimate& e);

/// One factor of an integration domain.
struct Block {
  enum class Kind {
    Sphere,    // S^dim, sampled uniformly
    Interval,  // [lo, hi], uniform
    Line,      // all of R, through a = y / (1 - y^2)
    Simplex,   // lo <= t_1 <= ... <= t_dim <= hi
    Space,     // R^dim, through x = y / (1 - |y|^2) on the unit ball
  };
  Kind kind = Kind::Interval;
  int dim = 1;
  double lo = 0;
  double hi = 1;

  static Block sphere(int m) { return {Kind::Sphere, m, 0, 0}; }
  static Block interval(double lo, double hi) { return {Kind::Interval, 1, lo, hi}; }
  static Block line() { return {Kind::Line, 1, 0, 0}; }
  static Block simplex(int k, double lo, double hi) { return {Kind::Simplex, k, lo, hi}; }
  static Block space(int d) { return {Kind::Space, d, 0, 0}; }
};

/// A point of the domain: one vector per block (points of S^m sit in R^{m+1}).
using Chart = std::vector<Vec>;

/// Integral over the product of `blocks` (oriented in order) of the pullback
/// of the product of `targets` normalized volume forms of S^{n-1}.
struct IntegralProblem {
  int n = 3;
  int targets = 1;
  std::vector<Block> blocks;
  /// Images on S^{n-1}, one per target.
  std::function<void(const Chart&, std::vector<Vec>&)> map;
  /// Optional restriction of the domain; points outside contribute zero.
  std::function<bool(const Chart&)> accept;

  int domain_dim() const;
};

struct MCOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  double fd_step = 1e-5;
  double tolerance = 0.05;  // std_error above this marks the estimate as not converged
};

/// Pullback density at a point: det of the Jacobian of `map` in oriented
/// frames divided by |S^{n-1}|^targets.
double pullback_density(const IntegralProblem& p, const Chart& x, double fd_step = 1e-5);

/// Draws a chart from the sampling density of the blocks; returns 1/density.
double sample_chart(const std::vector<Block>& blocks, std::mt19937_64& rng, Chart& out);

/// Monte-Carlo estimate. Samples are split into fixed chunks, each with its
/// own generator seeded from (seed, stream, chunk index), and merged in
/// chunk order, so the result does not depend on the thread count.
MCEstimate integrate(const IntegralProblem& p, const MCOptions& opt, std::uint64_t stream = 0);

/// Sum of independent estimates.
MCEstimate combine(const std::vector<MCEstimate>& parts, double tolerance);

// ---------------------------------------------------------------------------
// Linking numbers

/// Parametrized cycle in R^n over a product of blocks.
struct ParamCycle {
  std::vector<Block> blocks;
  std::function<Vec(const Chart&)> point;
};

/// Degree of the Gauss map A x B -> S^{n-1}. Throws DimensionMismatch unless
/// dim A + dim B = n - 1.
MCEstimate linking(int n, const ParamCycle& a, const ParamCycle& b, const MCOptions& opt);

/// Round circles in R^3 forming a Hopf link: (cos a, sin a, 0) and
/// (1 + cos b, 0, sin b) with `offset` added to the second.
ParamCycle hopf_circle_a();
ParamCycle hopf_circle_b(const Vec& offset);

/// The resolution sphere around z_1 and the segment through it, in zoomed
/// coordinates at the double point: (u_1, a_1) and a_3.
ParamCycle resolution_sphere(const Immersion& f);
ParamCycle crossing_segment(const Immersion& f);

// ---------------------------------------------------------------------------
// Pairings

enum class CycleKind { Alpha, Lambda };

struct PairingOptions {
  CycleKind cycle = CycleKind::Alpha;
  int n = 5;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::array<double, 2> eps{0.05, 0.05};
  /// delta_i; defaults to eps_i^2 when unset.
  std::array<double, 2> delta{0, 0};
  /// Share of the samples given to the complement of the localized stratum.
  double complement_fraction = 0.1;
  /// Half width of the box holding the interval points.
  double box = 2.0;
  double tolerance = 0.05;
  /// The lambda cycle is only evaluated by direct sampling on request.
  bool direct_lambda = false;
};

struct StratumEstimate {
  std::string stratum;  // "localized" or "complement"
  std::string graph;
  std::string coefficient;
  MCEstimate estimate;  // already multiplied by the coefficient
};

struct PairingResult {
  MCEstimate total;
  std::vector<StratumEstimate> strata;
  bool cocycle = true;
  int cycle_dim = 0;
};

nlohmann::json to_json(const PairingResult& r);

/// Dimension of the cycle: 2(n-3) for alpha(V), 3n-8 for lambda.
int cycle_dimension(CycleKind c, int n);

/// Throws DimensionMismatch unless every term satisfies
/// cycle_dim + v_i + n v_f = (n-1) e.
void check_dimension_balance(const GraphVector& cochain, CycleKind c, int n);

/// Pairing of a cochain with alpha(V) (the resolution cycle of the default
/// two-chord immersion) or with the rotated family lambda.
///
/// alpha(V) is estimated on two strata. The localized stratum has one
/// interval point in each affine window around xi_1..xi_4; there the points
/// are taken in coordinates zoomed by D_i = delta_i exp(-1/eps_i^2) around
/// each double point, which leaves the integrand unchanged. Edges between
/// points at different double points are constant there. The complement is
/// sampled directly in global coordinates.
PairingResult pairing(const GraphVector& cochain, const PairingOptions& opt);

// ---------------------------------------------------------------------------
// Covering check

struct Preimage {
  Vec q;          // [s, u] as the unit vector (sqrt(1-s^2) u, s) in R^{n-1}
  double s = 0;
  Vec u;          // in R^{n-2}
  Vec p1;         // on M = {x_{n-1} = 0, |x| = 1} in R^n
  double p4 = 0;  // positions on the x_{n-1} axis, p4 < p3
  double p3 = 0;
  double residual = 0;
  double det = 0;  // Jacobian determinant of F in oriented local coordinates
};

struct CoveringReport {
  std::vector<Preimage> preimages;
  bool signs_agree = false;
  double max_residual = 0;
};

/// F(q, P_1, p_4, p_3) = (R (P_1 - P_3)/|.|, R (P_1 - P_4)/|.|) with
/// R = e'[s, u] and P_i = p_i e_{n-1}.
std::array<Vec, 2> covering_map(const Vec& q, const Vec& p1, double p4, double p3);

/// Solves F = (v3, v4). Throws OnDiagonal, OutsideA or InvalidInput.
CoveringReport covering_check(const Vec& v3, const Vec& v4);

/// Random target in Int A minus the diagonal.
std::array<Vec, 2> random_covering_target(int n, std::uint64_t seed, std::uint64_t index);

}  // namespace knotcx
