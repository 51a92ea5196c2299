#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "pai/core.hpp"
#include "pai/quadrature.hpp"
#include "pai/rng.hpp"
#include "pai/types.hpp"

using namespace pai;

TEST_CASE("affine layer shape checks and application") {
  MatrixXd w(2, 3);
  w << 1, 2, 3, 4, 5, 6;
  VectorXd b(2);
  b << 10, 20;
  AffineLayer layer(w, b);
  CHECK(layer.in_dim() == 3);
  CHECK(layer.out_dim() == 2);
  VectorXd x(3);
  x << 1, 1, 1;
  const VectorXd y = layer.apply(x);
  CHECK(y[0] == doctest::Approx(16.0));
  CHECK(y[1] == doctest::Approx(35.0));

  CHECK_THROWS_AS(AffineLayer(w, VectorXd::Zero(3)), DimensionError);
  CHECK_THROWS_AS(layer.apply(VectorXd::Zero(2)), DimensionError);
  MatrixXd bad = w;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(AffineLayer(bad, b), ValidationError);
}

TEST_CASE("compose_affine equals sequential application") {
  const AffineLayer f = testutil::scalar_affine(2.0, 1.0);
  const AffineLayer g = testutil::scalar_affine(-3.0, 0.5);
  const AffineLayer gf = compose_affine(f, g);
  for (double x : {-1.5, 0.0, 2.25}) {
    VectorXd v(1);
    v << x;
    CHECK(gf.apply(v)[0] == doctest::Approx(g.apply(f.apply(v))[0]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(compose_affine(testutil::shear_affine(), f), DimensionError);
}

TEST_CASE("activation kinds") {
  CHECK(activation_from_string("relu") == ActivationKind::relu);
  CHECK(to_string(ActivationKind::sigmoid) == "sigmoid");
  CHECK_THROWS_AS(activation_from_string("swish"), ValidationError);
  CHECK(apply_activation(ActivationKind::relu, -1.0) == 0.0);
  CHECK(apply_activation(ActivationKind::relu, 2.0) == 2.0);
  CHECK(apply_activation(ActivationKind::identity, -3.5) == -3.5);
  CHECK(apply_activation(ActivationKind::tanh, 0.0) == 0.0);
  CHECK(apply_activation(ActivationKind::sigmoid, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("network chaining and slicing") {
  std::vector<Layer> layers;
  layers.emplace_back(testutil::shear_affine());
  layers.emplace_back(ActivationLayer(ActivationKind::relu, 2));
  const Network net{layers};
  CHECK(net.input_dim() == 2);
  CHECK(net.output_dim() == 2);
  CHECK(net.size() == 2);
  CHECK(net.slice(1).size() == 1);
  CHECK_THROWS_AS(net.slice(2), IndexError);

  std::vector<Layer> broken;
  broken.emplace_back(testutil::shear_affine());
  broken.emplace_back(ActivationLayer(ActivationKind::relu, 3));
  CHECK_THROWS_AS(Network{broken}, DimensionError);
}

TEST_CASE("weighted point set validation") {
  MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  VectorXd w(2);
  w << 0.25, 0.75;
  const WeightedPointSet d(pts, w);
  CHECK(d.total_weight() == doctest::Approx(1.0));

  CHECK_THROWS_AS(WeightedPointSet(pts, VectorXd::Ones(3)), DimensionError);
  VectorXd neg(2);
  neg << 0.5, -0.1;
  CHECK_THROWS_AS(WeightedPointSet(pts, neg), ValidationError);
  CHECK_THROWS_AS(WeightedPointSet(pts, VectorXd::Zero(2)), ValidationError);

  VectorXd w2(2);
  w2 << 1.0, 3.0;
  CHECK(WeightedPointSet(pts, w2).normalized().total_weight() ==
        doctest::Approx(1.0));
  CHECK(WeightedPointSet(pts, w2).normalized().weights[1] == doctest::Approx(0.75));
}

TEST_CASE("region bounds are closed and validated") {
  VectorXd lo(2), hi(2);
  lo << 0, 0;
  hi << 1, 2;
  const Region r(lo, hi);
  VectorXd x(2);
  x << 1.0, 2.0;
  CHECK(r.contains(x));
  x << 1.0 + 1e-12, 2.0;
  CHECK_FALSE(r.contains(x));
  CHECK_THROWS_AS(Region(hi, lo), ValidationError);
  CHECK_THROWS_AS(Region(lo, VectorXd::Ones(3)), DimensionError);
}

TEST_CASE("rng reproduces frozen reference vectors") {
  std::uint64_t s = 0;
  CHECK(splitmix64_next(s) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64_next(s) == 0x6E789E6AA1B965F4ULL);

  Rng rng(0);
  CHECK(rng.next() == 0x53175D61490B23DFULL);
  CHECK(rng.next() == 0x61DA6F3DC380D507ULL);
  CHECK(rng.next() == 0x5C0FDF91EC9A7BFCULL);

  Rng a(7), b(7), c(8);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next();
    same = same && va == b.next();
    differ = differ || va != c.next();
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("rng distributions behave") {
  Rng rng(123);
  double mean = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  CHECK(mean / 10000 == doctest::Approx(0.5).epsilon(0.02));

  for (int i = 0; i < 100; ++i) REQUIRE(rng.below(13) < 13);

  double m = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m += z;
    m2 += z * z;
  }
  m /= n;
  m2 /= n;
  CHECK(m == doctest::Approx(0.0).epsilon(0.05));
  CHECK(std::abs(m) < 0.05);
  CHECK(m2 - m * m == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stream derivation separates modules") {
  CHECK(derive_seed(0, Stream::zonotope) != derive_seed(0, Stream::kmeans));
  CHECK(derive_seed(0, Stream::gmm) != derive_seed(0, Stream::oracle));
  CHECK(make_stream(5, Stream::kmeans).next() ==
        make_stream(5, Stream::kmeans).next());
}

TEST_CASE("forward_eval walks the layer stack") {
  const Network empty;
  VectorXd x(2);
  x << -1.0, 3.0;
  CHECK((forward_eval(empty, x) - x).norm() == 0.0);

  std::vector<Layer> layers;
  layers.emplace_back(testutil::shear_affine());
  layers.emplace_back(ActivationLayer(ActivationKind::relu, 2));
  const Network net{layers};
  const VectorXd y = forward_eval(net, x);
  CHECK(y[0] == 0.0);  // 2*(-1) - 3 = -5, clipped
  CHECK(y[1] == 3.0);
  CHECK_THROWS_AS(forward_eval(net, VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("affine inversion round-trips and rejects bad maps") {
  const AffineLayer f = testutil::shear_affine();
  const AffineLayer g = affine_invert(f);
  VectorXd x(2);
  x << 0.3, -1.7;
  CHECK((g.apply(f.apply(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(affine_abs_det(f) == doctest::Approx(2.0));

  MatrixXd rect(1, 2);
  rect << 1, 2;
  CHECK_THROWS_AS(affine_invert(AffineLayer(rect, VectorXd::Zero(1))),
                  NotInvertibleError);

  MatrixXd sing(2, 2);
  sing << 1, 1, 1, 1;
  CHECK_THROWS_AS(affine_invert(AffineLayer(sing, VectorXd::Zero(2))),
                  NotInvertibleError);

  MatrixXd illcond = MatrixXd::Identity(2, 2);
  illcond(1, 1) = 1e-13;
  CHECK_THROWS_AS(affine_invert(AffineLayer(illcond, VectorXd::Zero(2))),
                  IllConditionedError);
}

TEST_CASE("zonotope sampling is deterministic and stays inside the hull") {
  VectorXd center(2);
  center << 1.0, 2.0;
  std::vector<VectorXd> gens;
  VectorXd g1(2), g2(2), g3(2);
  g1 << 0.5, 0.5;
  g2 << 0.5, 0.0;
  g3 << 0.0, 0.5;
  gens = {g1, g2, g3};
  const ZonotopeSource z(center, gens);

  const auto a = sample_zonotope(z, 1000, 42);
  const auto b = sample_zonotope(z, 1000, 42);
  const auto c = sample_zonotope(z, 1000, 43);
  CHECK(a.count() == 1000);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.weights.minCoeff() == doctest::Approx(1e-3));
  CHECK(a.total_weight() == doctest::Approx(1.0));
  // interval hull: center +- sum |g|
  CHECK(a.points.col(0).minCoeff() >= 0.0);
  CHECK(a.points.col(0).maxCoeff() <= 2.0);
  CHECK(a.points.col(1).minCoeff() >= 1.0);
  CHECK(a.points.col(1).maxCoeff() <= 3.0);
  CHECK_THROWS_AS(sample_zonotope(z, 0, 1), ValidationError);
}

TEST_CASE("region mass of point sets counts closed boundaries") {
  MatrixXd pts(4, 1);
  pts << 0.0, 0.5, 1.0, 2.0;
  VectorXd w(4);
  w << 0.1, 0.2, 0.3, 0.4;
  const WeightedPointSet d(pts, w);
  VectorXd lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  CHECK(region_mass_points(d, Region(lo, hi)) == doctest::Approx(0.6));
  lo << 1.0;
  CHECK(region_mass_points(d, Region(lo, hi)) == doctest::Approx(0.3));
}

TEST_CASE("simpson rule is exact on cubics and validated") {
  const auto cubic = [](double x) { return x * x * x - 2.0 * x + 1.0; };
  CHECK(quad::simpson(cubic, 0.0, 2.0, 3) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(quad::simpson([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(quad::simpson(cubic, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(quad::simpson(cubic, 0.0, 1.0, 4), ValidationError);
  CHECK_THROWS_AS(quad::simpson(cubic, 0.0, 1.0, 1), ValidationError);
}

TEST_CASE("gauss-legendre nodes integrate high-degree polynomials") {
  VectorXd nodes, weights;
  quad::gauss_legendre(5, nodes, weights);
  CHECK(weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double x8 = 0.0;
  for (int i = 0; i < 5; ++i) x8 += weights[i] * std::pow(nodes[i], 8);
  CHECK(x8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
  for (int i = 0; i < 5; ++i)
    CHECK(nodes[i] == doctest::Approx(-nodes[4 - i]).epsilon(1e-14));
}

TEST_CASE("normal box mass: diagonal matches erf, full matches quadrature") {
  VectorXd mean = VectorXd::Zero(1);
  MatrixXd cov = MatrixXd::Identity(1, 1);
  VectorXd lo(1), hi(1);
  lo << -1.0;
  hi << 1.0;
  CHECK(quad::normal_box_mass(mean, cov, Region(lo, hi)) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-14));

  // correlated 2-D case against a dense Simpson double integral
  VectorXd mu(2);
  mu << 0.2, -0.1;
  MatrixXd sigma(2, 2);
  sigma << 1.0, 0.4, 0.4, 0.5;
  VectorXd l2(2), h2(2);
  l2 << -0.5, -0.8;
  h2 << 1.0, 0.6;
  const Region box(l2, h2);

  const double det = sigma.determinant();
  const MatrixXd inv = sigma.inverse();
  const auto pdf = [&](double x, double y) {
    VectorXd d(2);
    d << x - mu[0], y - mu[1];
    return std::exp(-0.5 * d.dot(inv * d)) /
           (2.0 * 3.14159265358979323846 * std::sqrt(det));
  };
  const double oracle = quad::simpson(
      [&](double x) {
        return quad::simpson([&](double y) { return pdf(x, y); }, l2[1], h2[1], 401);
      },
      l2[0], h2[0], 401);
  CHECK(quad::normal_box_mass(mu, sigma, box) == doctest::Approx(oracle).epsilon(1e-9));

  // a wide box captures everything
  l2 << -8.0, -8.0;
  h2 << 8.0, 8.0;
  CHECK(quad::normal_box_mass(mu, sigma, Region(l2, h2)) ==
        doctest::Approx(1.0).epsilon(1e-8));
}
