#include "knotcx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace knotcx {

const char* to_string(GeometryErrorKind kind) {
  switch (kind) {
    case GeometryErrorKind::NonUnitVector: return "NonUnitVector";
    case GeometryErrorKind::NonPerpendicular: return "NonPerpendicular";
    case GeometryErrorKind::OverlappingBalls: return "OverlappingBalls";
    case GeometryErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "GeometryError";
}

namespace {

GeometryError invalid(const std::string& what) {
  return GeometryError(GeometryErrorKind::InvalidSpec, what);
}

Vec axis_point(int n, double t) {
  Vec p = Vec::Zero(n);
  p[n - 1] = t;
  return p;
}

}  // namespace

LongKnot LongKnot::trivial(int n) {
  return LongKnot(
      n, [n](double t) { return axis_point(n, t); },
      [n](double) { return axis_point(n, 1.0); });
}

// ---------------------------------------------------------------------------
// PlanarPath

PlanarPath::PlanarPath(Eigen::Vector2d start, double heading, std::vector<Piece> pieces)
    : start_(start), heading_(heading), pieces_(std::move(pieces)) {
  State st{start, heading};
  for (const auto& pc : pieces_) {
    if (!(pc.length > 0)) throw invalid("path piece with nonpositive length");
    if (pc.turn != 0 && !(pc.radius > 0)) throw invalid("arc with nonpositive radius");
    states_.push_back(st);
    starts_.push_back(total_);
    const Eigen::Vector2d dir(std::cos(st.heading), std::sin(st.heading));
    if (pc.turn == 0) {
      st.p += pc.length * dir;
    } else {
      const Eigen::Vector2d left(-dir.y(), dir.x());
      const Eigen::Vector2d center = st.p + pc.turn * pc.radius * left;
      st.heading += pc.turn * pc.length / pc.radius;
      const Eigen::Vector2d nl(-std::sin(st.heading), std::cos(st.heading));
      st.p = center - pc.turn * pc.radius * nl;
    }
    total_ += pc.length;
  }
  states_.push_back(st);
  starts_.push_back(total_);
}

int PlanarPath::piece_at(double s) const {
  if (s < 0 || s > total_ || pieces_.empty()) return -1;
  auto it = std::upper_bound(starts_.begin(), starts_.end() - 1, s);
  return std::max(0, static_cast<int>(it - starts_.begin()) - 1);
}

PlanarPath::State PlanarPath::state_at(double s) const {
  if (pieces_.empty()) {
    return {start_ + s * Eigen::Vector2d(std::cos(heading_), std::sin(heading_)), heading_};
  }
  int i = piece_at(s);
  if (s < 0) i = 0;
  if (s > total_) {
    const State& end = states_.back();
    return {end.p + (s - total_) * Eigen::Vector2d(std::cos(end.heading), std::sin(end.heading)),
            end.heading};
  }
  const State& st = states_[i];
  const Piece& pc = pieces_[i];
  const double ds = s - starts_[i];
  const Eigen::Vector2d dir(std::cos(st.heading), std::sin(st.heading));
  if (pc.turn == 0 || s < 0) return {st.p + ds * dir, st.heading};
  const Eigen::Vector2d left(-dir.y(), dir.x());
  const Eigen::Vector2d center = st.p + pc.turn * pc.radius * left;
  const double h = st.heading + pc.turn * ds / pc.radius;
  const Eigen::Vector2d nl(-std::sin(h), std::cos(h));
  return {center - pc.turn * pc.radius * nl, h};
}

Eigen::Vector2d PlanarPath::point(double s) const { return state_at(s).p; }

Eigen::Vector2d PlanarPath::tangent(double s) const {
  const double h = state_at(s).heading;
  return {std::cos(h), std::sin(h)};
}

// ---------------------------------------------------------------------------
// ImmersionSpec

ImmersionSpec ImmersionSpec::figure_eight(int n) {
  using std::numbers::pi;
  const double r = 0.1;
  using P = PlanarPath::Piece;
  const double quarter = pi * r / 2;
  std::vector<P> pieces = {
      {1.1, 0, 0},             // up through z1 then z2
      {pi * r, r, +1},         // over the top to the left
      {0.5, 0, 0},             // down, under the later leftward pass
      {quarter, r, +1},        // turn to +y
      {0.4, 0, 0},             // rightward through z1
      {quarter, r, +1},        //
      {0.1, 0, 0},             //
      {quarter, r, +1},        // turn to -y
      {0.7, 0, 0},             // leftward through z2 and over the bridge
      {quarter, r, -1},        //
      {0.4, 0, 0},             //
      {quarter, r, -1},        //
      {0.3, 0, 0},             //
      {quarter, r, +1},        // back onto the axis
      {0.5, 0, 0},             //
  };
  ImmersionSpec spec;
  spec.n = n;
  spec.path = PlanarPath({0.0, -1.0}, pi / 2, pieces);
  spec.crossing_sigma = {0.5, 0.8, 1.7 + 0.15 * pi, 2.4 + 0.25 * pi};
  // The downward strand passes under the leftward one at y = -0.2, z = -0.2.
  spec.bridges = {{1.4 + 0.1 * pi, 0.1, 0.05}};
  return spec;
}

ImmersionSpec ImmersionSpec::from_json(const nlohmann::json& j) {
  const int n = j.value("n", 5);
  ImmersionSpec spec;
  if (!j.contains("curve") || j["curve"].is_string()) {
    const std::string name = j.value("curve", std::string("figure8-default"));
    if (name != "figure8-default") throw invalid("unknown curve '" + name + "'");
    spec = figure_eight(n);
  } else {
    const auto& c = j["curve"];
    spec.n = n;
    spec.curve = "inline";
    std::vector<PlanarPath::Piece> pieces;
    for (const auto& p : c.at("pieces")) {
      if (p.contains("line")) {
        pieces.push_back({p["line"].get<double>(), 0, 0});
      } else {
        const auto arc = p.at("arc");
        pieces.push_back({p.at("length").get<double>(), arc.at(0).get<double>(), arc.at(1).get<int>()});
      }
    }
    const auto start = c.at("start");
    spec.path = PlanarPath({start.at(0).get<double>(), start.at(1).get<double>()},
                           c.at("heading").get<double>(), pieces);
    spec.crossing_sigma = c.at("crossings").get<std::array<double, 4>>();
    if (c.contains("bridges"))
      for (const auto& b : c["bridges"])
        spec.bridges.push_back({b.at("sigma").get<double>(), b.at("half_width").get<double>(),
                                b.at("height").get<double>()});
  }
  if (j.contains("xi")) spec.xi = j["xi"].get<std::array<double, 4>>();
  if (j.contains("eps")) spec.eps = j["eps"].get<std::array<double, 2>>();
  if (j.contains("delta")) {
    spec.delta = j["delta"].get<std::array<double, 2>>();
  } else {
    spec.delta = {spec.eps[0] * spec.eps[0], spec.eps[1] * spec.eps[1]};
  }
  if (j.contains("affine_half_width")) spec.affine_half_width = j["affine_half_width"].get<double>();
  return spec;
}

nlohmann::json ImmersionSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["xi"] = xi;
  j["eps"] = eps;
  j["delta"] = delta;
  j["affine_half_width"] = affine_half_width;
  if (curve == "figure8-default") {
    j["curve"] = curve;
    return j;
  }
  nlohmann::json c;
  c["start"] = {path.start().x(), path.start().y()};
  c["heading"] = path.heading();
  for (const auto& p : path.pieces()) {
    if (p.turn == 0)
      c["pieces"].push_back({{"line", p.length}});
    else
      c["pieces"].push_back({{"arc", {p.radius, p.turn}}, {"length", p.length}});
  }
  c["crossings"] = crossing_sigma;
  for (const auto& b : bridges)
    c["bridges"].push_back({{"sigma", b.sigma}, {"half_width", b.half_width}, {"height", b.height}});
  j["curve"] = c;
  return j;
}

// ---------------------------------------------------------------------------
// Immersion

namespace {

// Speed profile on a transition span: smoothstep between the end speeds plus
// a bump carrying the remaining arclength.
double span_value(double tau, double c0, double c1, double lift, double* speed) {
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  if (speed) *speed = c0 + (c1 - c0) * (3 * t2 - 2 * t3) + lift * 30 * t2 * (1 - tau) * (1 - tau);
  return c0 * tau + (c1 - c0) * (t3 - t4 / 2) + lift * (10 * t3 - 15 * t4 + 6 * t5);
}

}  // namespace

Immersion::Immersion(ImmersionSpec spec) : spec_(std::move(spec)) {
  const auto& s = spec_;
  if (s.n < 3) throw invalid("ambient dimension must be at least 3");
  const double w = s.affine_half_width;
  for (int i = 0; i < 2; ++i) {
    if (!(s.eps[i] > 0) || !(s.delta[i] > 0)) throw invalid("eps and delta must be positive");
    if (!(w > s.eps[i])) throw invalid("affine half width must exceed eps");
  }
  if (!(s.xi[0] - w > -1) || !(s.xi[3] + w < 1)) throw invalid("windows must lie inside (-1,1)");
  for (int j = 0; j < 3; ++j)
    if (!(s.xi[j + 1] - s.xi[j] > 2 * w)) throw invalid("windows around xi overlap");

  const double total = s.path.length();
  const std::array<double, 6> tn{-1, s.xi[0], s.xi[1], s.xi[2], s.xi[3], 1};
  const std::array<double, 6> sn{0, s.crossing_sigma[0], s.crossing_sigma[1], s.crossing_sigma[2],
                                 s.crossing_sigma[3], total};
  for (int j = 0; j < 5; ++j)
    if (!(sn[j + 1] > sn[j])) throw invalid("crossing arclengths must increase inside the path");

  // Path endpoints must continue the axis.
  const Eigen::Vector2d a = s.path.point(0), b = s.path.point(total);
  const Eigen::Vector2d ta = s.path.tangent(0), tb = s.path.tangent(total);
  if ((a - Eigen::Vector2d(0, -1)).norm() > 1e-9 || (b - Eigen::Vector2d(0, 1)).norm() > 1e-9 ||
      (ta - Eigen::Vector2d(0, 1)).norm() > 1e-9 || (tb - Eigen::Vector2d(0, 1)).norm() > 1e-9)
    throw invalid("path must run from (0,-1) to (0,1) heading along +x_n at both ends");

  std::array<double, 5> m{};
  for (int j = 0; j < 5; ++j) m[j] = (sn[j + 1] - sn[j]) / (tn[j + 1] - tn[j]);
  for (int j = 0; j < 4; ++j) c_[j] = 0.5 * std::min(m[j], m[j + 1]);

  // Each window maps into one straight piece, clear of bridges.
  for (int j = 0; j < 4; ++j) {
    const double lo = sn[j + 1] - c_[j] * w, hi = sn[j + 1] + c_[j] * w;
    const int p = s.path.piece_at(sn[j + 1]);
    if (p < 0 || s.path.pieces()[p].turn != 0 || s.path.piece_at(lo) != p || s.path.piece_at(hi) != p)
      throw invalid("the path is not straight around crossing " + std::to_string(j + 1));
    for (const auto& br : s.bridges)
      if (hi > br.sigma - br.half_width && lo < br.sigma + br.half_width)
        throw invalid("a bridge overlaps the window of crossing " + std::to_string(j + 1));
  }

  // Transition spans between the affine windows.
  std::vector<std::array<double, 4>> nodes;  // t, sigma, speed at the span ends
  nodes.push_back({-1, 0, 1, 0});
  for (int j = 0; j < 4; ++j) {
    nodes.push_back({s.xi[j] - w, sn[j + 1] - c_[j] * w, c_[j], 0});
    nodes.push_back({s.xi[j] + w, sn[j + 1] + c_[j] * w, c_[j], 0});
  }
  nodes.push_back({1, total, 1, 0});
  for (std::size_t k = 0; k < nodes.size(); k += 2) {
    Span sp{nodes[k][0], nodes[k + 1][0], nodes[k][1], nodes[k + 1][1], nodes[k][2], nodes[k + 1][2], 0};
    const double dt = sp.t1 - sp.t0;
    sp.lift = (sp.s1 - sp.s0) / dt - (sp.c0 + sp.c1) / 2;
    for (int q = 0; q <= 200; ++q) {
      double v = 0;
      span_value(q / 200.0, sp.c0, sp.c1, sp.lift, &v);
      if (!(v > 0)) throw invalid("parametrization is not monotone; move xi or the crossings");
    }
    spans_.push_back(sp);
  }

  // Double points and transversality.
  for (int i = 0; i < 2; ++i) {
    if ((point(s.xi[i]) - point(s.xi[i + 2])).norm() > 1e-9)
      throw invalid("f(xi_" + std::to_string(i + 1) + ") != f(xi_" + std::to_string(i + 3) + ")");
    const Vec t1 = derivative(s.xi[i]).normalized(), t3 = derivative(s.xi[i + 2]).normalized();
    if (std::abs(t1.dot(t3)) > 1 - 1e-6) throw invalid("double point is not transversal");
  }
}

double Immersion::bridge_lift(double s, double* dlift) const {
  double lift = 0, d = 0;
  for (const auto& b : spec_.bridges) {
    const double u = (s - b.sigma) / b.half_width;
    if (std::abs(u) >= 1) continue;
    const double q = 1 - u * u;
    lift += b.height * q * q * q;
    d += b.height * 3 * q * q * (-2 * u) / b.half_width;
  }
  if (dlift) *dlift = d;
  return lift;
}

double Immersion::path_param(double t, double* dsdt) const {
  const auto& s = spec_;
  const double total = s.path.length();
  if (t <= -1) {
    if (dsdt) *dsdt = 1;
    return t + 1;
  }
  if (t >= 1) {
    if (dsdt) *dsdt = 1;
    return total + (t - 1);
  }
  const double w = s.affine_half_width;
  for (int j = 0; j < 4; ++j) {
    if (std::abs(t - s.xi[j]) <= w) {
      if (dsdt) *dsdt = c_[j];
      return s.crossing_sigma[j] + c_[j] * (t - s.xi[j]);
    }
  }
  for (const auto& sp : spans_) {
    if (t < sp.t0 || t > sp.t1) continue;
    const double dt = sp.t1 - sp.t0;
    double v = 0;
    const double out = sp.s0 + dt * span_value((t - sp.t0) / dt, sp.c0, sp.c1, sp.lift, &v);
    if (dsdt) *dsdt = v;
    return out;
  }
  throw std::logic_error("parameter outside every span");
}

double Immersion::sigma(double t) const { return path_param(t, nullptr); }

double Immersion::speed(double t) const {
  double v = 0;
  path_param(t, &v);
  return v;
}

Vec Immersion::embed(const Eigen::Vector2d& yz, double x1) const {
  Vec p = Vec::Zero(spec_.n);
  p[0] = x1;
  p[spec_.n - 2] = yz.x();
  p[spec_.n - 1] = yz.y();
  return p;
}

Vec Immersion::point(double t) const {
  const double s = sigma(t);
  return embed(spec_.path.point(s), bridge_lift(s, nullptr));
}

Vec Immersion::derivative(double t) const {
  double v = 0;
  const double s = path_param(t, &v);
  double dl = 0;
  bridge_lift(s, &dl);
  return v * embed(spec_.path.tangent(s), dl);
}

LongKnot Immersion::knot() const {
  return LongKnot(
      spec_.n, [this](double t) { return point(t); }, [this](double t) { return derivative(t); });
}

Vec Immersion::crossing(int i) const { return point(spec_.xi.at(i - 1)); }

Vec Immersion::window_velocity(int j) const {
  return c_.at(j - 1) * embed(spec_.path.tangent(spec_.crossing_sigma.at(j - 1)), 0);
}

double Immersion::bump_peak(int i) const {
  const double e = spec_.eps.at(i - 1);
  return spec_.delta[i - 1] * std::exp(-1 / (e * e));
}

double Immersion::bump(int i, double t) const {
  const double d = t - spec_.xi.at(i - 1), e = spec_.eps.at(i - 1);
  if (std::abs(d) >= e) return 0;
  return spec_.delta[i - 1] * std::exp(1 / (d * d - e * e));
}

double Immersion::bump_derivative(int i, double t) const {
  const double d = t - spec_.xi.at(i - 1), e = spec_.eps.at(i - 1);
  if (std::abs(d) >= e) return 0;
  const double q = d * d - e * e;
  return spec_.delta[i - 1] * std::exp(1 / q) * (-2 * d / (q * q));
}

double Immersion::bump_ratio(int i, double s) const {
  const double e = spec_.eps.at(i - 1);
  if (std::abs(s) >= e) return 0;
  const double s2 = s * s;
  return std::exp(s2 / (e * e * (s2 - e * e)));
}

Vec Immersion::normal_vector(const Vec& u_small) const {
  if (u_small.size() != spec_.n - 2) throw invalid("normal vector must have n-2 coordinates");
  Vec u = Vec::Zero(spec_.n);
  u.head(spec_.n - 2) = u_small;
  return u;
}

void Immersion::check_resolution_vector(int i, const Vec& u) const {
  if (u.size() != spec_.n)
    throw GeometryError(GeometryErrorKind::NonUnitVector, "resolution vector has wrong dimension");
  if (std::abs(u.norm() - 1) > 1e-12)
    throw GeometryError(GeometryErrorKind::NonUnitVector, "resolution vector is not a unit vector");
  for (int j : {i, i + 2}) {
    const Vec t = window_velocity(j).normalized();
    if (std::abs(u.dot(t)) > 1e-12)
      throw GeometryError(GeometryErrorKind::NonPerpendicular,
                          "u_" + std::to_string(i) + " is not perpendicular to f'(xi_" +
                              std::to_string(j) + ")");
  }
}

Vec Immersion::resolved_point(const Vec& u1, const Vec& u2, double t) const {
  Vec p = point(t);
  if (const double b = bump(1, t); b != 0) p += b * u1;
  if (const double b = bump(2, t); b != 0) p += b * u2;
  return p;
}

Vec Immersion::resolved_derivative(const Vec& u1, const Vec& u2, double t) const {
  return derivative(t) + bump_derivative(1, t) * u1 + bump_derivative(2, t) * u2;
}

LongKnot Immersion::resolve(const Vec& u1, const Vec& u2) const {
  check_resolution_vector(1, u1);
  check_resolution_vector(2, u2);
  return LongKnot(
      spec_.n, [this, u1, u2](double t) { return resolved_point(u1, u2, t); },
      [this, u1, u2](double t) { return resolved_derivative(u1, u2, t); });
}

Vec Immersion::window_offset(int j, double a, const Vec& u) const {
  const int i = 1 + (j - 1) % 2;
  Vec off = a * window_velocity(j);
  if (j <= 2) off += bump_ratio(i, bump_peak(i) * a) * u;
  return off;
}

// ---------------------------------------------------------------------------
// Rotations

Mat householder(const Vec& v) {
  return Mat::Identity(v.size(), v.size()) - 2 * v * v.transpose();
}

Mat clutching(double s, const Vec& u) {
  const int m = static_cast<int>(u.size()) + 1;
  if (std::abs(s) > 1) return Mat::Identity(m, m);
  if (std::abs(u.norm() - 1) > 1e-9)
    throw GeometryError(GeometryErrorKind::NonUnitVector, "clutching direction is not a unit vector");
  Vec q(m);
  q.head(m - 1) = std::sqrt(1 - s * s) * u;
  q[m - 1] = s;
  return householder(Vec::Unit(m, m - 1)) * householder(q);
}

Vec rotate_fixing_last(const Mat& r, const Vec& x) {
  Vec y = x;
  const int m = static_cast<int>(r.rows());
  y.head(m) = r * x.head(m);
  return y;
}

Vec lambda_point(const Immersion& f, double s, const Vec& u0, const Vec& u1, const Vec& u2,
                 double t, double tau) {
  const Vec v = f.resolved_point(u1, u2, t);
  const double arg = (2 - tau) * s + (1 - tau) * v[v.size() - 1];
  return rotate_fixing_last(clutching(arg, u0), v);
}

// ---------------------------------------------------------------------------
// Framed knots

FramedKnot FramedKnot::trivial(int n) {
  return FramedKnot(n, [n](const Vec& x, double t) {
    Vec y(n);
    y.head(n - 1) = x;
    y[n - 1] = t;
    return y;
  });
}

FramedKnot FramedKnot::tube(int n, std::function<Vec(double)> c, std::function<Mat(double)> frame) {
  return FramedKnot(n, [n, c = std::move(c), frame = std::move(frame)](const Vec& x, double t) {
    Vec y(n);
    y[n - 1] = t;
    if (std::abs(t) >= 1) {
      y.head(n - 1) = x;
      return y;
    }
    const Vec ct = c(t);
    y.head(n - 1) = ct + (1 - ct.norm()) * (frame(t) * x);
    return y;
  });
}

Vec FramedKnot::core(double t) const { return g_(Vec::Zero(n_ - 1), t); }

Mat FramedKnot::frame(double t) const {
  const int m = n_ - 1;
  const double h = 1e-6;
  Mat j(m, m);
  for (int c = 0; c < m; ++c) {
    Vec dx = Vec::Zero(m);
    dx[c] = h;
    j.col(c) = (g_(dx, t) - g_(-dx, t)).head(m) / (2 * h);
  }
  Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

FramedKnot FramedKnot::after(const FramedKnot& inner) const {
  const int m = n_ - 1;
  return FramedKnot(n_, [outer = g_, in = inner.g_, m](const Vec& x, double t) {
    const Vec y = in(x, t);
    return outer(y.head(m), y[m]);
  });
}

FramedKnot reparam(const LittleInterval& l, const FramedKnot& f) {
  const int n = f.dim();
  return FramedKnot(n, [l, f, n](const Vec& x, double t) {
    Vec y = f(x, (t - l.b) / l.a);
    y[n - 1] = l(y[n - 1]);
    return y;
  });
}

LittleBall LittleBall::after(const LittleBall& inner) const {
  return {center + radius * inner.center, radius * inner.radius};
}

void check_balls(const std::vector<LittleBall>& balls) {
  const double tol = 1e-12;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto& b = balls[i];
    if (!(b.radius > 0) || b.center.norm() + b.radius > 1 + tol)
      throw GeometryError(GeometryErrorKind::OverlappingBalls,
                          "ball " + std::to_string(i + 1) + " is not inside the unit disc");
    for (std::size_t j = 0; j < i; ++j)
      if ((b.center - balls[j].center).norm() < b.radius + balls[j].radius - tol)
        throw GeometryError(GeometryErrorKind::OverlappingBalls,
                            "balls " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                                " overlap");
  }
}

FramedKnot operad_act(const std::vector<LittleBall>& balls, const std::vector<FramedKnot>& knots) {
  if (balls.size() != knots.size() || balls.empty())
    throw std::invalid_argument("operad_act needs one knot per ball");
  check_balls(balls);
  std::vector<std::size_t> order(balls.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return balls[a].t_b() < balls[b].t_b(); });
  FramedKnot result = reparam(balls[order.back()].interval(), knots[order.back()]);
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it)
    result = reparam(balls[*it].interval(), knots[*it]).after(result);
  return result;
}

std::vector<LittleBall> operad_compose(const std::vector<LittleBall>& outer, std::size_t slot,
                                       const std::vector<LittleBall>& inner) {
  std::vector<LittleBall> out;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (i != slot) {
      out.push_back(outer[i]);
      continue;
    }
    for (const auto& b : inner) out.push_back(outer[i].after(b));
  }
  return out;
}

}  // namespace knotcx
