#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "fsp/experiments.hpp"
#include "fsp/kernels.hpp"
#include "fsp/verify.hpp"

using namespace fsp;

namespace {

std::vector<Problem> all_models() {
  return {small_synthetic_problem(2, 3), small_gmm_problem(3), small_relu_problem(3)};
}

Vector random_point(const Problem& pb, RandomStream& rng) { return sample_uniform(pb.domain, rng); }

double fd_slope(const std::function<double(const Vector&)>& f, const Vector& x, int a, double h = 1e-6) {
  Vector p = x, m = x;
  p[a] += h;
  m[a] -= h;
  return (f(p) - f(m)) / (2.0 * h);
}

}  // namespace

TEST_CASE("per-sample forms average to the full quantities") {
  RandomStream rng(4);
  for (const auto& pb : all_models()) {
    CAPTURE(pb.model->name());
    const auto& m = *pb.model;
    const std::size_t n = m.n_samples();
    for (int trial = 0; trial < 5; ++trial) {
      const Vector s = random_point(pb, rng), t = random_point(pb, rng);
      double k = 0.0, y = 0.0;
      Vector gk = Vector::Zero(s.size()), gy = Vector::Zero(s.size());
      for (std::size_t i = 0; i < n; ++i) {
        k += m.kernel_sample(s, t, i);
        y += m.y_inner_sample(t, i);
        gk += m.grad1_kernel_sample(s, t, i);
        gy += m.grad_y_inner_sample(t, i);
      }
      const double nn = static_cast<double>(n);
      CHECK(k / nn == doctest::Approx(m.kernel(s, t)).epsilon(1e-10));
      CHECK(y / nn == doctest::Approx(m.y_inner(t)).epsilon(1e-10));
      CHECK((gk / nn - m.grad1_kernel(s, t)).norm() <= 1e-10 * (1.0 + gk.norm() / nn));
      CHECK((gy / nn - m.grad_y_inner(t)).norm() <= 1e-10 * (1.0 + gy.norm() / nn));
    }
  }
}

TEST_CASE("gradients agree with finite differences") {
  RandomStream rng(8);
  for (const auto& pb : all_models()) {
    CAPTURE(pb.model->name());
    const auto& m = *pb.model;
    for (int trial = 0; trial < 5; ++trial) {
      const Vector s = random_point(pb, rng) * 0.9, t = random_point(pb, rng) * 0.9;
      const Vector gk = m.grad1_kernel(s, t);
      const Vector gy = m.grad_y_inner(t);
      for (int a = 0; a < s.size(); ++a) {
        const double fk = fd_slope([&](const Vector& x) { return m.kernel(x, t); }, s, a);
        const double fy = fd_slope([&](const Vector& x) { return m.y_inner(x); }, t, a);
        CHECK(gk[a] == doctest::Approx(fk).epsilon(1e-5).scale(1.0));
        CHECK(gy[a] == doctest::Approx(fy).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("residual field matches the pointwise definition, exact and batched") {
  RandomStream rng(12);
  for (const auto& pb : all_models()) {
    CAPTURE(pb.model->name());
    const auto& m = *pb.model;
    const ParticleSwarm swarm = random_swarm(pb, 7, 1.3, rng);
    std::vector<Vector> pts;
    for (int i = 0; i < 9; ++i) pts.push_back(random_point(pb, rng));
    SampleIndices batch;
    for (int l = 0; l < 40; ++l) batch.push_back(rng.index(m.n_samples()));
    batch.push_back(batch.front());

    const SampleIndices* none = nullptr;
    for (const SampleIndices* b : {none, static_cast<const SampleIndices*>(&batch)}) {
      std::vector<double> vals(pts.size());
      std::vector<Vector> grads(pts.size());
      m.residual_field(swarm, pts, b, vals, grads);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        double u = 0.0;
        Vector g = Vector::Zero(pts[k].size());
        if (b == nullptr) {
          for (const auto& p : swarm) {
            u += p.weight * p.sign * m.kernel(p.position, pts[k]);
            g += p.weight * p.sign * m.grad1_kernel(pts[k], p.position);
          }
          u -= m.y_inner(pts[k]);
          g -= m.grad_y_inner(pts[k]);
        } else {
          for (std::size_t i : *b) {
            for (const auto& p : swarm) {
              u += p.weight * p.sign * m.kernel_sample(p.position, pts[k], i);
              g += p.weight * p.sign * m.grad1_kernel_sample(pts[k], p.position, i);
            }
            u -= m.y_inner_sample(pts[k], i);
            g -= m.grad_y_inner_sample(pts[k], i);
          }
          u /= static_cast<double>(b->size());
          g /= static_cast<double>(b->size());
        }
        CHECK(vals[k] == doctest::Approx(u).epsilon(1e-10).scale(1.0));
        CHECK((grads[k] - g).norm() <= 1e-10 * (1.0 + g.norm()));
      }
    }
  }
}

TEST_CASE("synthetic kernel is normalized and bounded below on the domain") {
  const Problem pb = small_synthetic_problem(2, 1);
  const auto& m = dynamic_cast<const SyntheticKernel&>(*pb.model);
  const Vector t{{0.3, 0.4}};
  CHECK(m.kernel(t, t) == 1.0);
  CHECK(m.kernel(Vector{{0.0, 0.0}}, Vector{{1.0, 1.0}}) >= m.kernel_floor() * (1 - 1e-12));
  CHECK(m.n_samples() % 2 == 0);
  SyntheticKernel::Params bad;
  bad.noise_kernel = 1.0;
  CHECK_THROWS_AS(SyntheticKernel(bad, Domain::unit_box(1)), std::invalid_argument);
}

TEST_CASE("gmm kernel matches quadrature of the feature maps") {
  Matrix x(3, 2);
  x << 0.0, 0.0, 1.0, -0.5, -0.7, 0.8;
  const double tau = 0.5;
  const GmmKernel m(x, tau);
  auto gauss = [](const Vector& z, const Vector& mu, double var) {
    return std::exp(-(z - mu).squaredNorm() / (2 * var)) / (2 * std::numbers::pi * var);
  };
  const Vector s{{0.2, 0.1}}, t{{-0.3, 0.4}};
  const double h = 0.04;
  double yy = 0.0, kst = 0.0, yt = 0.0;
  for (double a = -9.0; a <= 9.0; a += h) {
    for (double b = -9.0; b <= 9.0; b += h) {
      const Vector z{{a, b}};
      double f = 0.0;
      for (int i = 0; i < 3; ++i) f += gauss(z, x.row(i).transpose(), tau * tau) / 3.0;
      const double ps = gauss(z, s, 1 + tau * tau), pt = gauss(z, t, 1 + tau * tau);
      yy += f * f;
      kst += ps * pt;
      yt += f * pt;
    }
  }
  yy *= h * h;
  kst *= h * h;
  yt *= h * h;
  CHECK(m.y_norm_sq() == doctest::Approx(yy).epsilon(1e-6));
  CHECK(m.kernel(s, t) == doctest::Approx(kst).epsilon(1e-6));
  CHECK(m.y_inner(t) == doctest::Approx(yt).epsilon(1e-6));
}

TEST_CASE("relu kernel is the empirical average of activation products") {
  Matrix x(2, 1);
  x << 1.0, -2.0;
  const ReluKernel m(x, Vector{{0.5, 1.5}});
  const Vector s{{1.0, 0.0}}, t{{0.5, 0.5}};
  // s.(1,1)=1, s.(-2,1)=0 ; t.(1,1)=1, t.(-2,1)=-0.5
  CHECK(m.kernel(s, t) == doctest::Approx(0.5));
  CHECK(m.y_inner(t) == doctest::Approx(0.25));
  CHECK(m.y_norm_sq() == doctest::Approx((0.25 + 2.25) / 2));
  // kink: s.(-2,1) = 0 contributes no subgradient
  CHECK(m.grad1_kernel_sample(s, t, 1).norm() == 0.0);
  CHECK(m.grad_y_inner_sample(s, 1).norm() == 0.0);
  ParticleSwarm nn;
  nn.push_back({2.0, -1, t});
  const Vector f = m.predict(nn, x);
  CHECK(f[0] == doctest::Approx(-2.0));
  CHECK(f[1] == doctest::Approx(0.0));
}

TEST_CASE("audit finds positivity for the synthetic and gmm kernels, not for relu") {
  RandomStream rng(5);
  const Problem syn = small_synthetic_problem(1, 2, 0.2, 0.5);
  const auto b1 = audit_assumptions(*syn.model, syn.domain, 64, rng);
  CHECK(b1.positivity_ok);
  CHECK(b1.c_P_est > 0.0);
  CHECK(b1.normalization_gap < 1e-12);
  CHECK(b1.E_inf_est > 0.0);
  const Problem relu = small_relu_problem(2);
  const auto b3 = audit_assumptions(*relu.model, relu.domain, 64, rng);
  CHECK_FALSE(b3.positivity_ok);
  CHECK(b3.c_P_est == 0.0);
  const Problem gmm = small_gmm_problem(2);
  const auto b2 = audit_assumptions(*gmm.model, gmm.domain, 64, rng);
  CHECK(b2.normalization_gap > 0.5);
  CHECK(b2.E_inf_est > 0.0);
}
