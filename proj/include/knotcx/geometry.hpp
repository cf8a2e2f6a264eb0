#pragma once
// Long knots, the doubly-double-point immersion and its resolutions, the
// clutching loop in SO(n-1), the rotated family Lambda, and the little
// 2-balls action on framed long knots.

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace knotcx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class GeometryErrorKind { NonUnitVector, NonPerpendicular, OverlappingBalls, InvalidSpec };

const char* to_string(GeometryErrorKind kind);

class GeometryError : public std::runtime_error {
 public:
  GeometryError(GeometryErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  GeometryErrorKind kind() const noexcept { return kind_; }

 private:
  GeometryErrorKind kind_;
};

/// t -> point in R^n, equal to (0,...,0,t) for |t| >= 1.
class LongKnot {
 public:
  using Curve = std::function<Vec(double)>;

  LongKnot(int n, Curve eval, Curve deriv)
      : n_(n), eval_(std::move(eval)), deriv_(std::move(deriv)) {}
  static LongKnot trivial(int n);

  int dim() const noexcept { return n_; }
  Vec operator()(double t) const { return eval_(t); }
  Vec derivative(double t) const { return deriv_(t); }

 private:
  int n_;
  Curve eval_;
  Curve deriv_;
};

/// Arc-length parametrized plane path made of straight pieces and circular
/// arcs. Coordinates are (y, z); headings are angles from the +y axis.
class PlanarPath {
 public:
  struct Piece {
    double length = 0;
    double radius = 0;  // 0 for a straight piece
    int turn = 0;       // +1 left, -1 right; 0 for a straight piece
  };

  PlanarPath() = default;
  PlanarPath(Eigen::Vector2d start, double heading, std::vector<Piece> pieces);

  double length() const noexcept { return total_; }
  /// Position and unit tangent; extended straight beyond both ends.
  Eigen::Vector2d point(double s) const;
  Eigen::Vector2d tangent(double s) const;
  /// Index of the piece containing arclength s, or -1 outside.
  int piece_at(double s) const;
  double piece_start(int i) const { return starts_.at(i); }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  Eigen::Vector2d start() const { return start_; }
  double heading() const noexcept { return heading_; }

 private:
  struct State {
    Eigen::Vector2d p;
    double heading;
  };
  State state_at(double s) const;

  Eigen::Vector2d start_ = Eigen::Vector2d::Zero();
  double heading_ = 0;
  std::vector<Piece> pieces_;
  std::vector<State> states_;   // state at the start of each piece
  std::vector<double> starts_;  // arclength at the start of each piece
  double total_ = 0;
};

/// Lift in x_1 over a planar crossing that is not a double point.
struct Bridge {
  double sigma = 0;       // arclength of the lifted point
  double half_width = 0;  // in arclength
  double height = 0;
};

struct ImmersionSpec {
  int n = 5;
  std::array<double, 4> xi{-0.6, -0.2, 0.2, 0.6};
  std::array<double, 2> eps{0.05, 0.05};
  std::array<double, 2> delta{0.0025, 0.0025};
  std::string curve = "figure8-default";
  PlanarPath path;
  /// Arclengths of f(xi_1..xi_4) along the path.
  std::array<double, 4> crossing_sigma{};
  std::vector<Bridge> bridges;
  /// Half width of the parameter window around each xi on which the
  /// parametrization is affine. Must exceed both eps.
  double affine_half_width = 0.06;

  /// The default curve, with double points z_1 = f(xi_1) = f(xi_3) and
  /// z_2 = f(xi_2) = f(xi_4) in the x_{n-1} x_n plane.
  static ImmersionSpec figure_eight(int n = 5);
  /// Keys: xi, eps, delta, n, curve. `curve` is "figure8-default" or an
  /// object {"start":[y,z],"heading":rad,"pieces":[{"line":L} |
  /// {"arc":[R,+1|-1],"length":L}], "crossings":[4 arclengths],
  /// "bridges":[{"sigma":s,"half_width":w,"height":h}]}.
  static ImmersionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// The immersion f of a spec. Construction validates the double points,
/// transversality, window disjointness and monotonicity of the
/// parametrization; violations throw GeometryError (InvalidSpec).
class Immersion {
 public:
  explicit Immersion(ImmersionSpec spec);

  const ImmersionSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return spec_.n; }

  Vec point(double t) const;
  Vec derivative(double t) const;
  LongKnot knot() const;

  /// Arclength reached at parameter t, and its derivative.
  double sigma(double t) const;
  double speed(double t) const;

  /// z_i, i = 1, 2.
  Vec crossing(int i) const;
  /// f'(xi_j), j = 1..4; f(xi_j + s) = z + s f'(xi_j) exactly for |s| below
  /// the affine half width.
  Vec window_velocity(int j) const;

  /// Peak displacement D_i = delta_i exp(-1/eps_i^2).
  double bump_peak(int i) const;
  /// Displacement size delta_i exp(1/((t-xi_i)^2 - eps_i^2)), zero off the window.
  double bump(int i, double t) const;
  double bump_derivative(int i, double t) const;
  /// bump(i, xi_i + s) / D_i, evaluated without underflow.
  double bump_ratio(int i, double s) const;

  /// u_i embedded in R^n from coordinates on the normal space of the plane.
  Vec normal_vector(const Vec& u_small) const;

  /// Throws NonUnitVector / NonPerpendicular.
  void check_resolution_vector(int i, const Vec& u) const;
  /// The resolution v(u1, u2) with u_i in R^n.
  LongKnot resolve(const Vec& u1, const Vec& u2) const;
  Vec resolved_point(const Vec& u1, const Vec& u2, double t) const;
  Vec resolved_derivative(const Vec& u1, const Vec& u2, double t) const;

  /// Point at zoomed parameter xi_j + D a in units of D relative to the
  /// crossing, for chord i = 1 + (j-1) % 2. The displacement u only enters
  /// windows 1 and 2.
  Vec window_offset(int j, double a, const Vec& u) const;

 private:
  struct Span {
    double t0, t1, s0, s1, c0, c1, lift;
  };
  double path_param(double t, double* dsdt) const;
  Vec embed(const Eigen::Vector2d& yz, double x1) const;
  double bridge_lift(double s, double* dlift) const;

  ImmersionSpec spec_;
  std::array<double, 4> c_{};
  std::vector<Span> spans_;
};

/// H_v = I - 2 v v^T.
Mat householder(const Vec& v);

/// e'[s,u] = H_{x_{n-1}} H_{(sqrt(1-s^2) u, s)} in SO(n-1), u in R^{n-2}
/// unit. Identity for |s| >= 1.
Mat clutching(double s, const Vec& u);

/// R in SO(n-1) acting on the first n-1 coordinates of x in R^n.
Vec rotate_fixing_last(const Mat& r, const Vec& x);

/// Lambda'_tau([s,u0], u1, u2)(t); tau = 0 is Lambda.
Vec lambda_point(const Immersion& f, double s, const Vec& u0, const Vec& u1, const Vec& u2,
                 double t, double tau = 0.0);

/// Framed long knot as an embedding g: R^{n-1} x R -> R^n with
/// g(x, t) = (x, t) for |t| >= 1.
class FramedKnot {
 public:
  using Map = std::function<Vec(const Vec& x, double t)>;

  FramedKnot(int n, Map g) : n_(n), g_(std::move(g)) {}
  static FramedKnot trivial(int n);
  /// Tube around t -> (c(t), t), c valued in the open unit ball of R^{n-1}
  /// and zero for |t| >= 1, twisted by frame(t) in SO(n-1):
  /// g(x, t) = (c(t) + (1 - |c(t)|) R(t) x, t).
  static FramedKnot tube(int n, std::function<Vec(double)> c, std::function<Mat(double)> frame);

  int dim() const noexcept { return n_; }
  Vec operator()(const Vec& x, double t) const { return g_(x, t); }
  /// g(0, t).
  Vec core(double t) const;
  /// Rotation part of d g_x / d x at x = 0.
  Mat frame(double t) const;
  /// (*this) after inner.
  FramedKnot after(const FramedKnot& inner) const;

 private:
  int n_;
  Map g_;
};

/// Affine map l(t) = a t + b of R.
struct LittleInterval {
  double a = 1;
  double b = 0;
  double operator()(double t) const { return a * t + b; }
};

/// mu_l(f)(x, t) = (f_x(x, l^{-1} t), l(f_t(x, l^{-1} t))).
FramedKnot reparam(const LittleInterval& l, const FramedKnot& f);

/// The sub-ball x -> center + radius x of the unit disc.
struct LittleBall {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1;

  /// l with l([-1,1]) the first-coordinate projection of the ball.
  LittleInterval interval() const { return {radius, center.x()}; }
  /// Ordering key: lowest second coordinate of the ball.
  double t_b() const { return center.y() - radius; }
  /// this after inner, as maps of the disc.
  LittleBall after(const LittleBall& inner) const;
};

/// Throws OverlappingBalls unless every ball lies in the unit disc and the
/// interiors are pairwise disjoint.
void check_balls(const std::vector<LittleBall>& balls);

/// kappa(b; f): composite of mu_{l_j}(f_j), ordered by t_b, lowest outermost.
FramedKnot operad_act(const std::vector<LittleBall>& balls, const std::vector<FramedKnot>& knots);

/// Operad composition: replaces ball `slot` by the images of `inner` in it.
std::vector<LittleBall> operad_compose(const std::vector<LittleBall>& outer, std::size_t slot,
                                       const std::vector<LittleBall>& inner);

}  // namespace knotcx
