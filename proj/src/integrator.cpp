#include "knotcx/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include "knotcx/differential.hpp"

namespace knotcx {

const char* to_string(IntegratorErrorKind kind) {
  switch (kind) {
    case IntegratorErrorKind::CoincidentPoints: return "CoincidentPoints";
    case IntegratorErrorKind::DimensionMismatch: return "DimensionMismatch";
    case IntegratorErrorKind::OnDiagonal: return "OnDiagonal";
    case IntegratorErrorKind::OutsideA: return "OutsideA";
    case IntegratorErrorKind::InvalidInput: return "InvalidInput";
  }
  return "IntegratorError";
}

Vec gauss(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "gauss: points of different dimension");
  const Vec w = x - y;
  const double r = w.norm();
  if (!(r > 0)) throw IntegratorError(IntegratorErrorKind::CoincidentPoints, "gauss: coincident points");
  return w / r;
}

Mat numerical_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int c = 0; c < x.size(); ++c) {
    Vec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (f(xp) - f(xm)) / (2 * h);
  }
  return j;
}

Mat sphere_frame(const Vec& w) {
  const int d = static_cast<int>(w.size());
  const Mat col = w;
  Eigen::HouseholderQR<Mat> qr(col);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  Mat frame = q.rightCols(d - 1);
  Mat full(d, d);
  full << w, frame;
  if (full.determinant() < 0) frame.col(d - 2) *= -1;
  return frame;
}

double sphere_volume(int m) {
  const double h = (m + 1) / 2.0;
  return 2 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

nlohmann::json to_json(const MCEstimate& e) {
  return {{"value", e.value},
          {"stderr", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"converged", e.converged}};
}

namespace {

int block_dim(const Block& b) { return b.kind == Block::Kind::Sphere || b.kind == Block::Kind::Simplex ||
                                               b.kind == Block::Kind::Space
                                           ? b.dim
                                           : 1; }

}  // namespace

int IntegralProblem::domain_dim() const {
  int d = 0;
  for (const auto& b : blocks) d += block_dim(b);
  return d;
}

double sample_chart(const std::vector<Block>& blocks, std::mt19937_64& rng, Chart& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  out.resize(blocks.size());
  double weight = 1;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    Vec& v = out[i];
    switch (b.kind) {
      case Block::Kind::Sphere: {
        v.resize(b.dim + 1);
        do {
          for (int k = 0; k <= b.dim; ++k) v[k] = normal(rng);
        } while (v.norm() == 0);
        v.normalize();
        weight *= sphere_volume(b.dim);
        break;
      }
      case Block::Kind::Interval:
        v.resize(1);
        v[0] = b.lo + (b.hi - b.lo) * unit(rng);
        weight *= b.hi - b.lo;
        break;
      case Block::Kind::Line: {
        v.resize(1);
        const double y = 2 * unit(rng) - 1;
        const double q = 1 - y * y;
        if (q <= 0) {
          v[0] = 0;
          weight = 0;
          break;
        }
        v[0] = y / q;
        weight *= 2 * (1 + y * y) / (q * q);
        break;
      }
      case Block::Kind::Simplex: {
        v.resize(b.dim);
        for (int k = 0; k < b.dim; ++k) v[k] = b.lo + (b.hi - b.lo) * unit(rng);
        std::sort(v.data(), v.data() + b.dim);
        weight *= std::pow(b.hi - b.lo, b.dim) / std::tgamma(b.dim + 1.0);
        break;
      }
      case Block::Kind::Space: {
        v.resize(b.dim);
        do {
          for (int k = 0; k < b.dim; ++k) v[k] = normal(rng);
        } while (v.norm() == 0);
        const double r = std::pow(unit(rng), 1.0 / b.dim);
        v *= r / v.norm();
        const double q = 1 - r * r;
        if (q <= 0) {
          weight = 0;
          break;
        }
        v /= q;
        weight *= sphere_volume(b.dim - 1) / b.dim * (1 + r * r) / std::pow(q, b.dim + 1);
        break;
      }
    }
  }
  return weight;
}

double pullback_density(const IntegralProblem& p, const Chart& x, double h) {
  const int m = p.n - 1;
  const int d = m * p.targets;
  if (p.domain_dim() != d)
    throw IntegratorError(IntegratorErrorKind::DimensionMismatch,
                          "domain dimension " + std::to_string(p.domain_dim()) + " != (n-1)e = " +
                              std::to_string(d));
  std::vector<Vec> base, plus, minus;
  p.map(x, base);
  std::vector<Mat> frames;
  for (const auto& w : base) frames.push_back(sphere_frame(w));

  Mat jac(d, d);
  int col = 0;
  Chart y = x;
  auto put_column = [&](double step) {
    for (int t = 0; t < p.targets; ++t)
      jac.block(t * m, col, m, 1) = frames[t].transpose() * (plus[t] - minus[t]) / (2 * step);
    ++col;
  };
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const Block& b = p.blocks[i];
    if (b.kind == Block::Kind::Sphere) {
      const Mat e = sphere_frame(x[i]);
      for (int k = 0; k < b.dim; ++k) {
        y[i] = std::cos(h) * x[i] + std::sin(h) * e.col(k);
        p.map(y, plus);
        y[i] = std::cos(h) * x[i] - std::sin(h) * e.col(k);
        p.map(y, minus);
        put_column(h);
      }
    } else {
      for (int k = 0; k < x[i].size(); ++k) {
        const double step = h * std::max(1.0, std::abs(x[i][k]));
        y[i][k] = x[i][k] + step;
        p.map(y, plus);
        y[i][k] = x[i][k] - step;
        p.map(y, minus);
        put_column(step);
        y[i][k] = x[i][k];
      }
    }
    y[i] = x[i];
  }
  const double norm = std::pow(sphere_volume(m), p.targets);
  return jac.partialPivLu().determinant() / norm;
}

namespace {

constexpr std::uint64_t kChunk = 2048;

struct Moments {
  double sum = 0;
  double sum_sq = 0;
};

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(chunk), hi(chunk)};
  return std::mt19937_64(seq);
}

unsigned thread_count(unsigned requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

MCEstimate integrate(const IntegralProblem& p, const MCOptions& opt, std::uint64_t stream) {
  if (p.domain_dim() != (p.n - 1) * p.targets)
    throw IntegratorError(IntegratorErrorKind::DimensionMismatch,
                          "domain dimension " + std::to_string(p.domain_dim()) + " != (n-1)e = " +
                              std::to_string((p.n - 1) * p.targets));
  if (opt.samples == 0) throw IntegratorError(IntegratorErrorKind::InvalidInput, "samples must be positive");
  const std::uint64_t chunks = (opt.samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_chunk = [&](std::uint64_t c, Chart& x) {
    auto rng = chunk_rng(opt.seed, stream, c);
    const std::uint64_t count = std::min(kChunk, opt.samples - c * kChunk);
    Moments mo;
    for (std::uint64_t s = 0; s < count; ++s) {
      const double w = sample_chart(p.blocks, rng, x);
      if (w == 0 || (p.accept && !p.accept(x))) continue;
      double v = 0;
      try {
        v = w * pullback_density(p, x, opt.fd_step);
      } catch (const IntegratorError& e) {
        // Coincident configurations have measure zero.
        if (e.kind() != IntegratorErrorKind::CoincidentPoints) throw;
      }
      if (!std::isfinite(v)) v = 0;
      mo.sum += v;
      mo.sum_sq += v * v;
    }
    parts[c] = mo;
  };
  auto worker = [&] {
    Chart x;
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c, x);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(thread_count(opt.threads), chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  Moments total;
  for (const auto& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  const double n = static_cast<double>(opt.samples);
  MCEstimate e;
  e.samples = opt.samples;
  e.seed = opt.seed;
  e.value = total.sum / n;
  const double var = n > 1 ? std::max(0.0, (total.sum_sq / n - e.value * e.value) * n / (n - 1)) : 0.0;
  e.std_error = std::sqrt(var / n);
  e.converged = e.std_error <= opt.tolerance;
  return e;
}

MCEstimate combine(const std::vector<MCEstimate>& parts, double tolerance) {
  MCEstimate e;
  double var = 0;
  for (const auto& p : parts) {
    e.value += p.value;
    var += p.std_error * p.std_error;
    e.samples += p.samples;
    e.seed = p.seed;
  }
  e.std_error = std::sqrt(var);
  e.converged = e.std_error <= tolerance;
  return e;
}

// ---------------------------------------------------------------------------
// Linking

MCEstimate linking(int n, const ParamCycle& a, const ParamCycle& b, const MCOptions& opt) {
  IntegralProblem p;
  p.n = n;
  p.targets = 1;
  p.blocks = a.blocks;
  p.blocks.insert(p.blocks.end(), b.blocks.begin(), b.blocks.end());
  const std::size_t na = a.blocks.size();
  p.map = [a, b, na](const Chart& x, std::vector<Vec>& out) {
    const Chart xa(x.begin(), x.begin() + na), xb(x.begin() + na, x.end());
    out.assign(1, gauss(a.point(xa), b.point(xb)));
  };
  if (p.domain_dim() != n - 1)
    throw IntegratorError(IntegratorErrorKind::DimensionMismatch,
                          "linking needs dim A + dim B = n - 1, got " + std::to_string(p.domain_dim()));
  return integrate(p, opt);
}

ParamCycle hopf_circle_a() {
  return {{Block::interval(0, 2 * std::numbers::pi)}, [](const Chart& x) {
            const double a = x[0][0];
            return Vec((Vec(3) << std::cos(a), std::sin(a), 0).finished());
          }};
}

ParamCycle hopf_circle_b(const Vec& offset) {
  return {{Block::interval(0, 2 * std::numbers::pi)}, [offset](const Chart& x) {
            const double b = x[0][0];
            return Vec((Vec(3) << 1 + std::cos(b), 0, std::sin(b)).finished() + offset);
          }};
}

ParamCycle resolution_sphere(const Immersion& f) {
  const int n = f.dim();
  return {{Block::sphere(n - 3), Block::line()}, [f](const Chart& x) {
            return f.window_offset(1, x[1][0], f.normal_vector(x[0]));
          }};
}

ParamCycle crossing_segment(const Immersion& f) {
  return {{Block::line()}, [f](const Chart& x) {
            return f.window_offset(3, x[0][0], Vec::Zero(f.dim()));
          }};
}

// ---------------------------------------------------------------------------
// Pairings

int cycle_dimension(CycleKind c, int n) { return c == CycleKind::Alpha ? 2 * (n - 3) : 3 * n - 8; }

void check_dimension_balance(const GraphVector& cochain, CycleKind c, int n) {
  const int dim = cycle_dimension(c, n);
  for (const auto& [g, coeff] : cochain.terms()) {
    const int lhs = dim + g.vi() + n * g.vf();
    const int rhs = (n - 1) * g.edge_count();
    if (lhs != rhs)
      throw IntegratorError(IntegratorErrorKind::DimensionMismatch,
                            format_graph(g) + ": cycle dim + v_i + n v_f = " + std::to_string(lhs) +
                                " but (n-1)e = " + std::to_string(rhs));
  }
}

nlohmann::json to_json(const PairingResult& r) {
  nlohmann::json j = to_json(r.total);
  j["cycle_dim"] = r.cycle_dim;
  j["level"] = r.cocycle ? "class-level" : "chain-level, not class-level";
  j["strata"] = nlohmann::json::array();
  for (const auto& s : r.strata) {
    auto e = to_json(s.estimate);
    e["stratum"] = s.stratum;
    e["graph"] = s.graph;
    e["coefficient"] = s.coefficient;
    j["strata"].push_back(e);
  }
  return j;
}

namespace {

// Targets of a graph given vertex positions and tangents at the interval
// vertices; edges first, then loops.
void graph_targets(const Graph& g, const std::vector<Vec>& pos, const std::vector<Vec>& tangent,
                   std::vector<Vec>& out) {
  out.clear();
  for (const auto& e : g.edges()) out.push_back(gauss(pos[e.from - 1], pos[e.to - 1]));
  for (const auto& l : g.loops()) out.push_back(tangent[l.vertex - 1].normalized());
}

bool has_localized_stratum(const Graph& g) { return g.vi() == 4 && g.vf() == 0; }

// One interval point in each affine window, in the order of the windows.
bool in_localized_stratum(const Immersion& f, const Vec& t) {
  if (t.size() != 4) return false;
  const auto& s = f.spec();
  for (int j = 0; j < 4; ++j)
    if (std::abs(t[j] - s.xi[j]) >= s.affine_half_width) return false;
  return true;
}

IntegralProblem localized_problem(const Immersion& f, const Graph& g) {
  const int n = f.dim();
  IntegralProblem p;
  p.n = n;
  p.targets = g.edge_count();
  p.blocks = {Block::sphere(n - 3), Block::sphere(n - 3)};
  for (int j = 0; j < 4; ++j) p.blocks.push_back(Block::line());
  p.map = [f, g](const Chart& x, std::vector<Vec>& out) {
    const Vec u1 = f.normal_vector(x[0]), u2 = f.normal_vector(x[1]);
    const Vec zero = Vec::Zero(f.dim());
    std::vector<Vec> pos(4), tangent(4);
    for (int j = 1; j <= 4; ++j) {
      pos[j - 1] = f.window_offset(j, x[1 + j][0], j == 1 ? u1 : j == 2 ? u2 : zero);
      tangent[j - 1] = f.window_velocity(j);
    }
    out.clear();
    for (const auto& e : g.edges()) {
      const int ia = 1 + (e.from - 1) % 2, ib = 1 + (e.to - 1) % 2;
      if (ia == ib)
        out.push_back(gauss(pos[e.from - 1], pos[e.to - 1]));
      else
        out.push_back(gauss(f.crossing(ia), f.crossing(ib)));
    }
    for (const auto& l : g.loops()) out.push_back(tangent[l.vertex - 1].normalized());
  };
  return p;
}

IntegralProblem complement_problem(const Immersion& f, const Graph& g, double box) {
  const int n = f.dim();
  IntegralProblem p;
  p.n = n;
  p.targets = g.edge_count();
  p.blocks = {Block::sphere(n - 3), Block::sphere(n - 3), Block::simplex(g.vi(), -box, box)};
  for (int k = 0; k < g.vf(); ++k) p.blocks.push_back(Block::space(n));
  if (has_localized_stratum(g))
    p.accept = [f](const Chart& x) { return !in_localized_stratum(f, x[2]); };
  p.map = [f, g](const Chart& x, std::vector<Vec>& out) {
    const Vec u1 = f.normal_vector(x[0]), u2 = f.normal_vector(x[1]);
    std::vector<Vec> pos, tangent;
    for (int j = 0; j < g.vi(); ++j) {
      pos.push_back(f.resolved_point(u1, u2, x[2][j]));
      tangent.push_back(f.resolved_derivative(u1, u2, x[2][j]));
    }
    for (int k = 0; k < g.vf(); ++k) pos.push_back(x[3 + k]);
    graph_targets(g, pos, tangent, out);
  };
  return p;
}

IntegralProblem lambda_problem(const Immersion& f, const Graph& g, double box) {
  const int n = f.dim();
  IntegralProblem p;
  p.n = n;
  p.targets = g.edge_count();
  p.blocks = {Block::sphere(n - 2), Block::sphere(n - 3), Block::sphere(n - 3),
              Block::simplex(g.vi(), -box, box)};
  for (int k = 0; k < g.vf(); ++k) p.blocks.push_back(Block::space(n));
  p.map = [f, g, n](const Chart& x, std::vector<Vec>& out) {
    const Vec& q = x[0];
    const double s = q[n - 2];
    Vec u0 = q.head(n - 2);
    u0 = u0.norm() > 0 ? Vec(u0.normalized()) : Vec(Vec::Unit(n - 2, 0));
    const Vec u1 = f.normal_vector(x[1]), u2 = f.normal_vector(x[2]);
    auto point = [&](double t) { return lambda_point(f, s, u0, u1, u2, t); };
    const double h = 1e-6;
    std::vector<Vec> pos, tangent;
    for (int j = 0; j < g.vi(); ++j) {
      const double t = x[3][j];
      pos.push_back(point(t));
      tangent.push_back((point(t + h) - point(t - h)) / (2 * h));
    }
    for (int k = 0; k < g.vf(); ++k) pos.push_back(x[4 + k]);
    graph_targets(g, pos, tangent, out);
  };
  return p;
}

}  // namespace

PairingResult pairing(const GraphVector& cochain, const PairingOptions& opt) {
  if (opt.n < 5 || opt.n % 2 == 0)
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "pairings need odd n >= 5");
  if (cochain.is_zero()) throw IntegratorError(IntegratorErrorKind::InvalidInput, "empty cochain");
  if (opt.samples == 0) throw IntegratorError(IntegratorErrorKind::InvalidInput, "samples must be positive");
  if (!(opt.complement_fraction >= 0 && opt.complement_fraction <= 1))
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "complement fraction must lie in [0,1]");
  check_dimension_balance(cochain, opt.cycle, opt.n);
  if (opt.cycle == CycleKind::Lambda && !opt.direct_lambda)
    throw IntegratorError(IntegratorErrorKind::InvalidInput,
                          "the lambda cycle is only evaluated by direct sampling; enable it explicitly");

  auto spec = ImmersionSpec::figure_eight(opt.n);
  spec.eps = opt.eps;
  for (int i = 0; i < 2; ++i) spec.delta[i] = opt.delta[i] > 0 ? opt.delta[i] : opt.eps[i] * opt.eps[i];
  const Immersion f(spec);

  PairingResult result;
  result.cycle_dim = cycle_dimension(opt.cycle, opt.n);
  result.cocycle = delta_vec(cochain).is_zero();

  const std::size_t terms = cochain.size();
  std::size_t localized = 0;
  if (opt.cycle == CycleKind::Alpha)
    for (const auto& [g, c] : cochain.terms()) localized += has_localized_stratum(g);
  const double n_total = static_cast<double>(opt.samples);
  const double comp_share = localized ? opt.complement_fraction : 1.0;
  auto count = [](double x) { return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(x))); };
  const std::uint64_t n_loc = localized ? count(n_total * (1 - comp_share) / localized) : 0;
  const std::uint64_t n_comp = count(n_total * comp_share / terms);

  std::vector<MCEstimate> parts;
  std::uint64_t stream = 0;
  for (const auto& [g, c] : cochain.terms()) {
    const double coeff = c.get_d();
    auto add = [&](const std::string& name, const IntegralProblem& p, std::uint64_t samples) {
      MCOptions mo{samples, opt.seed, opt.threads, 1e-5, opt.tolerance};
      MCEstimate e = integrate(p, mo, stream++);
      e.value *= coeff;
      e.std_error *= std::abs(coeff);
      parts.push_back(e);
      result.strata.push_back({name, format_graph(g), format_rational(c), e});
    };
    if (opt.cycle == CycleKind::Lambda) {
      add("direct", lambda_problem(f, g, opt.box), count(n_total / terms));
      continue;
    }
    if (has_localized_stratum(g)) add("localized", localized_problem(f, g), n_loc);
    if (n_comp > 0 && comp_share > 0) add("complement", complement_problem(f, g, opt.box), n_comp);
  }
  result.total = combine(parts, opt.tolerance);
  result.total.seed = opt.seed;
  return result;
}

// ---------------------------------------------------------------------------
// Covering check

namespace {

Mat frame_rotation(const Vec& q) {
  const int m = static_cast<int>(q.size());
  return householder(Vec::Unit(m, m - 1)) * householder(q);
}

// Coordinates on M: drop x_{n-1}.
Vec m_coords(const Vec& p) {
  const int n = static_cast<int>(p.size());
  Vec y(n - 1);
  y.head(n - 2) = p.head(n - 2);
  y[n - 2] = p[n - 1];
  return y;
}

Vec m_point(const Vec& y) {
  const int n = static_cast<int>(y.size()) + 1;
  Vec p = Vec::Zero(n);
  p.head(n - 2) = y.head(n - 2);
  p[n - 1] = y[n - 2];
  return p;
}

double covering_det(const Preimage& pre, const Vec& v3, const Vec& v4) {
  const int n = static_cast<int>(v3.size());
  const double h = 1e-6;
  const Mat f3 = sphere_frame(v3), f4 = sphere_frame(v4);
  const int d = 2 * (n - 1);
  Mat jac(d, d);
  int col = 0;
  auto column = [&](const std::array<Vec, 2>& a, const std::array<Vec, 2>& b, double step) {
    jac.block(0, col, n - 1, 1) = f3.transpose() * (a[0] - b[0]) / (2 * step);
    jac.block(n - 1, col, n - 1, 1) = f4.transpose() * (a[1] - b[1]) / (2 * step);
    ++col;
  };
  const Mat eq = sphere_frame(pre.q);
  for (int k = 0; k < n - 2; ++k) {
    const Vec qp = std::cos(h) * pre.q + std::sin(h) * eq.col(k);
    const Vec qm = std::cos(h) * pre.q - std::sin(h) * eq.col(k);
    column(covering_map(qp, pre.p1, pre.p4, pre.p3), covering_map(qm, pre.p1, pre.p4, pre.p3), h);
  }
  const Vec y = m_coords(pre.p1);
  const Mat ey = sphere_frame(y);
  for (int k = 0; k < n - 2; ++k) {
    const Vec pp = m_point(std::cos(h) * y + std::sin(h) * ey.col(k));
    const Vec pm = m_point(std::cos(h) * y - std::sin(h) * ey.col(k));
    column(covering_map(pre.q, pp, pre.p4, pre.p3), covering_map(pre.q, pm, pre.p4, pre.p3), h);
  }
  column(covering_map(pre.q, pre.p1, pre.p4 + h, pre.p3), covering_map(pre.q, pre.p1, pre.p4 - h, pre.p3), h);
  column(covering_map(pre.q, pre.p1, pre.p4, pre.p3 + h), covering_map(pre.q, pre.p1, pre.p4, pre.p3 - h), h);
  return jac.partialPivLu().determinant();
}

}  // namespace

std::array<Vec, 2> covering_map(const Vec& q, const Vec& p1, double p4, double p3) {
  const int n = static_cast<int>(p1.size());
  const Mat r = frame_rotation(q);
  Vec a = p1, b = p1;
  a[n - 2] -= p3;
  b[n - 2] -= p4;
  return {rotate_fixing_last(r, a.normalized()), rotate_fixing_last(r, b.normalized())};
}

CoveringReport covering_check(const Vec& v3, const Vec& v4) {
  const int n = static_cast<int>(v3.size());
  if (n < 3 || v4.size() != n)
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "targets must be two vectors in R^n, n >= 3");
  if (std::abs(v3.norm() - 1) > 1e-9 || std::abs(v4.norm() - 1) > 1e-9)
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "targets must be unit vectors");
  if ((v3 - v4).norm() < 1e-12) throw IntegratorError(IntegratorErrorKind::OnDiagonal, "v3 = v4");
  if (!(v3[n - 1] * v4[n - 1] > 0))
    throw IntegratorError(IntegratorErrorKind::OutsideA, "(v3)_n (v4)_n must be positive");

  // Direction of the line H(v3, v4) ∩ {x_n = 0}.
  Vec m = v4[n - 1] * v3 - v3[n - 1] * v4;
  m.normalize();
  Vec k = v3 - v3.dot(m) * m;
  k.normalize();
  if (k[n - 1] * v3[n - 1] < 0) k = -k;
  const double l3 = k[n - 1] / v3[n - 1], l4 = k[n - 1] / v4[n - 1];
  double p3 = -l3 * v3.dot(m), p4 = -l4 * v4.dot(m);
  if (p4 >= p3) {
    m = -m;
    p3 = -p3;
    p4 = -p4;
  }
  const double mlast = m[n - 2];
  if (1 - std::abs(mlast) < 1e-12)
    throw IntegratorError(IntegratorErrorKind::InvalidInput, "target lies on the branch locus s = 0 or |s| = 1");

  const double s = std::sqrt((1 + mlast) / 2);
  const double c = std::sqrt(1 - s * s);
  Vec u = -m.head(n - 2) / (2 * s * c);
  u.normalize();

  CoveringReport report;
  for (int sign : {+1, -1}) {
    Preimage pre;
    pre.s = sign * s;
    pre.u = sign * u;
    pre.q = Vec(n - 1);
    pre.q.head(n - 2) = c * pre.u;
    pre.q[n - 2] = pre.s;
    const Mat r = frame_rotation(pre.q);
    Vec kk = k;
    kk.head(n - 1) = r.transpose() * k.head(n - 1);
    pre.p1 = kk;
    pre.p1[n - 2] = 0;  // exact zero up to rounding
    pre.p4 = p4;
    pre.p3 = p3;
    const auto img = covering_map(pre.q, pre.p1, pre.p4, pre.p3);
    pre.residual = std::sqrt((img[0] - v3).squaredNorm() + (img[1] - v4).squaredNorm());
    pre.det = covering_det(pre, v3, v4);
    report.max_residual = std::max(report.max_residual, pre.residual);
    report.preimages.push_back(std::move(pre));
  }
  report.signs_agree = report.preimages[0].det * report.preimages[1].det > 0;
  return report;
}

std::array<Vec, 2> random_covering_target(int n, std::uint64_t seed, std::uint64_t index) {
  auto rng = chunk_rng(seed, 0x636f766572ULL, index);
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return Vec(v.normalized());
  };
  for (;;) {
    Vec a = draw(), b = draw();
    if (a[n - 1] * b[n - 1] > 1e-6 && (a - b).norm() > 1e-6) return {a, b};
  }
}

}  // namespace knotcx
