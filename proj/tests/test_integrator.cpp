#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "knotcx/cohomology.hpp"
#include "knotcx/integrator.hpp"

using namespace knotcx;

namespace {

using std::numbers::pi;

Vec random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Degree of r = A(a) - B(b) normalized, by the trapezoid rule on the torus:
// (1/4pi) \int det[r, dr/da, dr/db] / |r|^3.
double hopf_degree_oracle(const Eigen::Vector3d& offset, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = 2 * pi * i / n, b = 2 * pi * j / n;
      const Eigen::Vector3d ra(std::cos(a), std::sin(a), 0);
      const Eigen::Vector3d rb = Eigen::Vector3d(1 + std::cos(b), 0, std::sin(b)) + offset;
      const Eigen::Vector3d da(-std::sin(a), std::cos(a), 0), db(std::sin(b), 0, -std::cos(b));
      const Eigen::Vector3d r = ra - rb;
      s += r.dot(da.cross(db)) / std::pow(r.norm(), 3);
    }
  return s * (2 * pi / n) * (2 * pi / n) / (4 * pi);
}

GraphVector gamma1() { return GraphVector::of(parse_graph("G[4,0;E{1>3,2>4}]")); }
GraphVector gamma2() { return GraphVector::of(parse_graph("G[3,1;E{1>4,2>4,3>4}]")); }

bool kind_is(IntegratorErrorKind kind, const std::function<void()>& f) {
  try {
    f();
  } catch (const IntegratorError& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("gauss map") {
  const Vec x = (Vec(3) << 1, 0, 0).finished(), o = Vec::Zero(3);
  CHECK((gauss(x, o) - x).norm() == 0.0);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec a = random_vec(rng, 5), b = random_vec(rng, 5);
    CHECK((gauss(a, b) + gauss(b, a)).norm() < 1e-15);
    CHECK(std::abs(gauss(a, b).norm() - 1) < 1e-15);
  }
  CHECK(kind_is(IntegratorErrorKind::CoincidentPoints, [&] { gauss(x, x); }));
}

TEST_CASE("finite-difference Jacobian of gauss matches the analytic derivative") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = random_vec(rng, 5), y = random_vec(rng, 5);
    const Vec w = x - y;
    const Vec wh = w.normalized();
    const Mat analytic = (Mat::Identity(5, 5) - wh * wh.transpose()) / w.norm();
    const Mat fd = numerical_jacobian([&](const Vec& z) { return gauss(z, y); }, x, 1e-5);
    CHECK((fd - analytic).norm() / analytic.norm() < 1e-5);
  }
}

TEST_CASE("sphere frames and volumes") {
  CHECK(sphere_volume(1) == doctest::Approx(2 * pi));
  CHECK(sphere_volume(2) == doctest::Approx(4 * pi));
  CHECK(sphere_volume(3) == doctest::Approx(2 * pi * pi));
  CHECK(sphere_volume(4) == doctest::Approx(8 * pi * pi / 3));
  std::mt19937_64 rng(3);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec w = random_vec(rng, d).normalized();
      const Mat e = sphere_frame(w);
      CHECK(e.cols() == d - 1);
      CHECK((e.transpose() * e - Mat::Identity(d - 1, d - 1)).norm() < 1e-12);
      CHECK((e.transpose() * w).norm() < 1e-12);
      Mat full(d, d);
      full << w, e;
      CHECK(full.determinant() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("sampling weights integrate known functions") {
  // Plain Monte Carlo with the block samplers against closed forms.
  auto mc = [](const std::vector<Block>& blocks, const std::function<double(const Chart&)>& f) {
    std::mt19937_64 rng(4);
    Chart x;
    double sum = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double w = sample_chart(blocks, rng, x);
      if (w > 0) sum += w * f(x);
    }
    return sum / n;
  };
  CHECK(mc({Block::line()}, [](const Chart& x) { return 1 / (1 + x[0][0] * x[0][0]); }) ==
        doctest::Approx(pi).epsilon(0.01));
  CHECK(mc({Block::space(3)}, [](const Chart& x) { return std::exp(-x[0].squaredNorm()); }) ==
        doctest::Approx(std::pow(pi, 1.5)).epsilon(0.01));
  CHECK(mc({Block::simplex(3, -2, 2)}, [](const Chart& x) {
          return x[0][0] <= x[0][1] && x[0][1] <= x[0][2] ? 1.0 : 0.0;
        }) == doctest::Approx(64.0 / 6));
  CHECK(mc({Block::sphere(2)}, [](const Chart& x) { return x[0][2] * x[0][2]; }) ==
        doctest::Approx(4 * pi / 3).epsilon(0.01));
}

TEST_CASE("linking numbers") {
  MCOptions opt;
  opt.samples = 200000;
  opt.seed = 11;
  SUBCASE("Hopf link against the quadrature oracle") {
    const double oracle = hopf_degree_oracle(Eigen::Vector3d::Zero(), 600);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-6));
    const auto e = linking(3, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt);
    CHECK(std::abs(e.value - oracle) <= 4 * e.std_error);
    CHECK(e.std_error < 0.01);
  }
  SUBCASE("separated circles") {
    const Vec far = (Vec(3) << 10, 0, 0).finished();
    CHECK(std::abs(hopf_degree_oracle(far, 200)) < 1e-9);
    const auto e = linking(3, hopf_circle_a(), hopf_circle_b(far), opt);
    CHECK(std::abs(e.value) <= 4 * e.std_error + 1e-4);
  }
  SUBCASE("unlinked but close circles") {
    const Vec shifted = (Vec(3) << 1.5, 0, 0).finished();
    CHECK(std::abs(hopf_degree_oracle(shifted, 600)) < 1e-6);
    const auto e = linking(3, hopf_circle_a(), hopf_circle_b(shifted), opt);
    CHECK(std::abs(e.value) <= 4 * e.std_error);
  }
  SUBCASE("resolution sphere and segment") {
    Immersion f(ImmersionSpec::figure_eight(5));
    const auto e = linking(5, resolution_sphere(f), crossing_segment(f), opt);
    CHECK(std::abs(e.value - 1) <= 4 * e.std_error);
    // At z_2 the later branch runs along -x_{n-1}, so the sign flips.
    ParamCycle s2{{Block::sphere(2), Block::line()}, [&](const Chart& x) {
                    return f.window_offset(2, x[1][0], f.normal_vector(x[0]));
                  }};
    ParamCycle i2{{Block::line()}, [&](const Chart& x) { return f.window_offset(4, x[0][0], Vec::Zero(5)); }};
    const auto e2 = linking(5, s2, i2, opt);
    CHECK(std::abs(e2.value + e.value) <= 4 * std::hypot(e.std_error, e2.std_error));
  }
  SUBCASE("dimension mismatch") {
    CHECK(kind_is(IntegratorErrorKind::DimensionMismatch,
                  [&] { linking(5, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt); }));
  }
}

TEST_CASE("estimates do not depend on the thread count") {
  MCOptions opt;
  opt.samples = 50000;
  opt.seed = 99;
  opt.threads = 1;
  const auto a = linking(3, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt);
  opt.threads = 4;
  const auto b = linking(3, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt);
  opt.threads = 7;
  const auto c = linking(3, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.value == c.value);
  opt.seed = 100;
  const auto d = linking(3, hopf_circle_a(), hopf_circle_b(Vec::Zero(3)), opt);
  CHECK(a.value != d.value);
  CHECK(a.samples == 50000);
  CHECK(a.seed == 99);
  CHECK(a.std_error >= 0);
}

TEST_CASE("pairing with the resolution cycle") {
  PairingOptions opt;
  opt.samples = 100000;
  opt.seed = 21;
  const GraphVector cocycle = gamma1() - gamma2();

  SUBCASE("Gamma1 - Gamma2 pairs to one in absolute value") {
    const auto r = pairing(cocycle, opt);
    CHECK(r.cocycle);
    CHECK(r.cycle_dim == 4);
    CHECK(std::abs(std::abs(r.total.value) - 1) <= 4 * r.total.std_error);
    // Only the localized stratum of the chord diagram contributes.
    for (const auto& s : r.strata)
      if (s.stratum == "complement") CHECK(std::abs(s.estimate.value) < 1e-6);
    const auto j = to_json(r);
    CHECK(j["level"] == "class-level");
    CHECK(j["strata"].size() == 3);
    // Reseeding stays within the combined error.
    opt.seed = 22;
    const auto r2 = pairing(cocycle, opt);
    CHECK(std::abs(r2.total.value - r.total.value) <= 4 * std::hypot(r.total.std_error, r2.total.std_error));
  }
  SUBCASE("linearity") {
    const auto r1 = pairing(cocycle, opt);
    opt.seed = 23;
    const auto r2 = pairing(mpq_class(2) * cocycle, opt);
    CHECK(std::abs(r2.total.value - 2 * r1.total.value) <=
          3 * std::hypot(r2.total.std_error, 2 * r1.total.std_error));
  }
  SUBCASE("chain-level input is labelled") {
    const auto r = pairing(gamma1(), opt);
    CHECK_FALSE(r.cocycle);
    CHECK(to_json(r)["level"] == "chain-level, not class-level");
  }
  SUBCASE("errors and flags") {
    CHECK(kind_is(IntegratorErrorKind::DimensionMismatch,
                  [&] { pairing(GraphVector::of(parse_graph("G[2,0;E{1>2}]")), opt); }));
    CHECK(kind_is(IntegratorErrorKind::DimensionMismatch,
                  [&] { check_dimension_balance(cocycle, CycleKind::Lambda, 5); }));
    CHECK_NOTHROW(check_dimension_balance(cocycle, CycleKind::Alpha, 5));
    CHECK_NOTHROW(check_dimension_balance(cocycle, CycleKind::Alpha, 7));
    opt.n = 4;
    CHECK(kind_is(IntegratorErrorKind::InvalidInput, [&] { pairing(cocycle, opt); }));
    opt.n = 5;
    opt.samples = 2000;
    opt.tolerance = 1e-9;
    CHECK_FALSE(pairing(cocycle, opt).total.converged);
  }
}

TEST_CASE("direct sampling of the lambda cycle") {
  Complex cx;
  const auto reps = cx.kernel_representatives(3, 1);
  REQUIRE(reps.size() == 1);
  CHECK_NOTHROW(check_dimension_balance(reps[0], CycleKind::Lambda, 5));
  PairingOptions opt;
  opt.cycle = CycleKind::Lambda;
  opt.samples = 200;
  CHECK(kind_is(IntegratorErrorKind::InvalidInput, [&] { pairing(reps[0], opt); }));
  opt.direct_lambda = true;
  const auto r = pairing(reps[0], opt);
  CHECK(std::isfinite(r.total.value));
  CHECK(r.cycle_dim == 7);
  CHECK(r.strata.size() == reps[0].size());
}

TEST_CASE("covering check") {
  const int n = 5;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [v3, v4] = random_covering_target(n, 17, i);
    REQUIRE(v3[n - 1] * v4[n - 1] > 0);
    const auto rep = covering_check(v3, v4);
    REQUIRE(rep.preimages.size() == 2);
    CHECK(rep.max_residual < 1e-8);
    CHECK(rep.signs_agree);
    const auto& a = rep.preimages[0];
    const auto& b = rep.preimages[1];
    CHECK((a.q + b.q).norm() < 1e-12);
    CHECK(std::abs(a.q.norm() - 1) < 1e-12);
    CHECK(a.p4 < a.p3);
    CHECK(std::abs(a.p1[n - 2]) < 1e-12);
    CHECK(std::abs(a.p1.norm() - 1) < 1e-12);
    CHECK(std::abs(a.det) > 1e-8);
    // Independent evaluation of F through the clutching map.
    const Mat r = clutching(a.s, a.u);
    Vec p3 = Vec::Zero(n), p4 = Vec::Zero(n);
    p3[n - 2] = a.p3;
    p4[n - 2] = a.p4;
    CHECK((rotate_fixing_last(r, gauss(a.p1, p3)) - v3).norm() < 1e-9);
    CHECK((rotate_fixing_last(r, gauss(a.p1, p4)) - v4).norm() < 1e-9);
  }
  const Vec v = (Vec(5) << 0.6, 0, 0, 0, 0.8).finished();
  const Vec w = (Vec(5) << 0.6, 0, 0, 0, -0.8).finished();
  CHECK(kind_is(IntegratorErrorKind::OnDiagonal, [&] { covering_check(v, v); }));
  CHECK(kind_is(IntegratorErrorKind::OutsideA, [&] { covering_check(v, w); }));
  CHECK(kind_is(IntegratorErrorKind::InvalidInput, [&] { covering_check(2 * v, v); }));
}
