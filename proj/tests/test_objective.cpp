#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsp/experiments.hpp"
#include "fsp/objective.hpp"
#include "fsp/verify.hpp"

using namespace fsp;

TEST_CASE("empty swarm loss is half the squared observation norm") {
  for (const auto& pb : {small_synthetic_problem(1, 1), small_gmm_problem(1), small_relu_problem(1)}) {
    CHECK(loss(pb, ParticleSwarm{}) == doctest::Approx(0.5 * pb.model->y_norm_sq()));
  }
}

TEST_CASE("relu loss equals the direct regression objective") {
  RandomStream rng(3);
  const Problem pb = small_relu_problem(4);
  const auto& m = dynamic_cast<const ReluKernel&>(*pb.model);
  const ParticleSwarm sw = random_swarm(pb, 6, 0.8, rng);
  const Matrix& xt = m.inputs();
  double sq = 0.0;
  for (Eigen::Index i = 0; i < xt.rows(); ++i) {
    double f = 0.0;
    for (const auto& p : sw) f += p.weight * p.sign * std::max(0.0, xt.row(i).dot(p.position));
    sq += (m.targets()[i] - f) * (m.targets()[i] - f);
  }
  const double direct = 0.5 * sq / static_cast<double>(xt.rows()) + pb.kappa * tv_norm(sw);
  CHECK(loss(pb, sw) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("synthetic loss equals quadrature of the residual in one dimension") {
  const double sigma = 0.3;
  SyntheticKernel::Params prm;
  prm.sigma = sigma;
  prm.atoms = {Vector{{0.2}}, Vector{{0.7}}};
  prm.atom_weights = {1.0, -0.5};
  const Domain dom = Domain::unit_box(1);
  const Problem pb(std::make_shared<SyntheticKernel>(prm, dom), dom, 0.1, true);
  ParticleSwarm sw;
  sw.push_back({0.4, 1, Vector{{0.25}}});
  sw.push_back({0.3, -1, Vector{{0.9}}});
  // phi_t(x) = (2/(pi sigma^2))^{1/4} exp(-(x-t)^2/sigma^2) has <phi_s,phi_t> = exp(-(s-t)^2/(2 sigma^2))
  const double c = std::pow(2.0 / (std::numbers::pi * sigma * sigma), 0.25);
  auto phi = [&](double x, double t) { return c * std::exp(-(x - t) * (x - t) / (sigma * sigma)); };
  const double h = 1e-3;
  double integral = 0.0;
  for (double x = -3.0; x <= 4.0; x += h) {
    const double y = phi(x, 0.2) - 0.5 * phi(x, 0.7);
    const double f = 0.4 * phi(x, 0.25) - 0.3 * phi(x, 0.9);
    integral += (y - f) * (y - f) * h;
  }
  CHECK(loss(pb, sw) == doctest::Approx(0.5 * integral + 0.1 * 0.7).epsilon(1e-9));
}

TEST_CASE("gmm loss equals quadrature of the density fit") {
  Matrix x(2, 2);
  x << 0.0, 0.0, 1.0, 1.0;
  const double tau = 0.5;
  const GmmData data = gmm_from_samples(x, tau);
  const Problem pb(data.kernel, data.domain, 0.01);
  ParticleSwarm sw;
  sw.push_back({0.6, 1, Vector{{0.1, 0.0}}});
  sw.push_back({0.3, 1, Vector{{0.8, 0.9}}});
  auto gauss = [](double a, double b, double ma, double mb, double var) {
    return std::exp(-((a - ma) * (a - ma) + (b - mb) * (b - mb)) / (2 * var)) / (2 * std::numbers::pi * var);
  };
  const double h = 0.03;
  double integral = 0.0;
  for (double a = -8.0; a <= 9.0; a += h) {
    for (double b = -8.0; b <= 9.0; b += h) {
      const double y = 0.5 * (gauss(a, b, 0, 0, tau * tau) + gauss(a, b, 1, 1, tau * tau));
      const double f = 0.6 * gauss(a, b, 0.1, 0.0, 1 + tau * tau) + 0.3 * gauss(a, b, 0.8, 0.9, 1 + tau * tau);
      integral += (y - f) * (y - f) * h * h;
    }
  }
  CHECK(loss(pb, sw) == doctest::Approx(0.5 * integral + 0.01 * 0.9).epsilon(1e-7));
}

TEST_CASE("Frechet identity holds for random pairs on every model") {
  RandomStream rng(21);
  for (const auto& pb : {small_synthetic_problem(2, 2), small_gmm_problem(2), small_relu_problem(2)}) {
    for (int i = 0; i < 10; ++i) {
      const ParticleSwarm nu = random_swarm(pb, 5, 1.0, rng);
      const ParticleSwarm sg = random_swarm(pb, 3, 0.5, rng);
      const double scale = std::max(1.0, std::abs(loss(pb, nu)));
      CHECK(frechet_gap(pb, nu, sg) / scale <= 1e-9);
    }
  }
}

TEST_CASE("certificate and its gradient are consistent") {
  RandomStream rng(6);
  const Problem pb = small_synthetic_problem(2, 4, 0.2, 0.4);
  const ParticleSwarm sw = random_swarm(pb, 4, 1.0, rng);
  for (int sign : {1, -1}) {
    const Vector t{{0.4, 0.6}};
    const Vector g = dual_certificate_grad(pb, sw, t, sign);
    for (int a = 0; a < 2; ++a) {
      Vector p = t, m = t;
      p[a] += 1e-6;
      m[a] -= 1e-6;
      const double fd = (dual_certificate(pb, sw, p, sign) - dual_certificate(pb, sw, m, sign)) / 2e-6;
      CHECK(g[a] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
  // certificate of the empty swarm: kappa - sign <y, phi_t>
  const Vector t{{0.1, 0.9}};
  CHECK(dual_certificate(pb, ParticleSwarm{}, t, -1) ==
        doctest::Approx(pb.kappa + pb.model->y_inner(t)));
}

TEST_CASE("kkt residual is clean when kappa dominates the data") {
  const Problem base = small_synthetic_problem(1, 1, 0.2, 0.5);
  const Problem pb(base.model, base.domain, 100.0, true);
  const auto grid = lattice(pb.domain, 50);
  const KktReport r = kkt_residual(pb, ParticleSwarm{}, grid);
  CHECK(r.violation() == 0.0);
  CHECK(r.min_cert_grid > 0.0);
  CHECK_THROWS_AS(kkt_residual(pb, ParticleSwarm{}, std::vector<Vector>{}), std::invalid_argument);
}

TEST_CASE("problem rejects non-positive kappa and dimension mismatch") {
  const Problem pb = small_synthetic_problem(2, 1);
  CHECK_THROWS_AS(Problem(pb.model, pb.domain, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Problem(pb.model, Domain::unit_box(3), 1.0), std::invalid_argument);
  CHECK(Problem(pb.model, pb.domain, 1.0, true).admissible_signs().size() == 2);
}
