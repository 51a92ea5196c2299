#include <omp.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pai/kernels.hpp"
#include "pai/rng.hpp"
#include "pai/types.hpp"

// Times every OpenMP kernel against its serial reference on synthetic data
// and reports the speedup plus the largest result discrepancy.

namespace {

using pai::MatrixXd;
using pai::VectorXd;

MatrixXd random_matrix(pai::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_pm1();
  return m;
}

VectorXd random_vector(pai::Rng& rng, Eigen::Index n) {
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform01();
  return v;
}

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

void report(const std::string& name, double serial, double parallel,
            double discrepancy) {
  std::printf("%-18s serial %8.4fs   parallel %8.4fs   speedup %5.2fx   max|diff| %.3g\n",
              name.c_str(), serial, parallel, serial / parallel, discrepancy);
}

}  // namespace

int main() {
  namespace k = pai::kernels;
  std::printf("threads: %d\n", k::thread_count());
  pai::Rng rng(42);

  {
    const Eigen::Index n = 2000000, dim = 8;
    const MatrixXd pts = random_matrix(rng, n, dim);
    const MatrixXd weight = random_matrix(rng, dim, dim);
    const VectorXd bias = random_vector(rng, dim);
    MatrixXd out_ref(n, dim), out_par(n, dim);
    const double ts = best_of(3, [&] { k::ref::batch_affine(weight, bias, pts, out_ref); });
    const double tp = best_of(3, [&] { k::batch_affine(weight, bias, pts, out_par); });
    report("batch_affine", ts, tp, (out_ref - out_par).cwiseAbs().maxCoeff());
  }

  {
    const Eigen::Index n = 1000000, dim = 4, kc = 16;
    const MatrixXd pts = random_matrix(rng, n, dim);
    const MatrixXd centroids = random_matrix(rng, kc, dim);
    const VectorXd weights = random_vector(rng, n);
    std::vector<std::int32_t> ls, lp;
    const double ts = best_of(3, [&] { ls = k::ref::assign_nearest(pts, centroids); });
    const double tp = best_of(3, [&] { lp = k::assign_nearest(pts, centroids); });
    double diff = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      diff = std::max(diff, static_cast<double>(std::abs(ls[i] - lp[i])));
    report("assign_nearest", ts, tp, diff);

    k::ClusterMoments ms, mp;
    const double ts2 = best_of(3, [&] { ms = k::ref::cluster_moments(pts, weights, ls, kc, false); });
    const double tp2 = best_of(3, [&] { mp = k::cluster_moments(pts, weights, lp, kc, false); });
    report("cluster_moments", ts2, tp2,
           (ms.coord_sums - mp.coord_sums).cwiseAbs().maxCoeff());

    pai::Region region(VectorXd::Constant(dim, -0.5), VectorXd::Constant(dim, 0.5));
    double rs = 0.0, rp = 0.0;
    const double ts3 = best_of(3, [&] { rs = k::ref::region_weight_sum(pts, weights, region); });
    const double tp3 = best_of(3, [&] { rp = k::region_weight_sum(pts, weights, region); });
    report("region_weight_sum", ts3, tp3, std::abs(rs - rp));
  }

  {
    const Eigen::Index m = 44;
    VectorXd xs(m), ys(m);
    pai::Rng drng(7);
    for (Eigen::Index i = 0; i < m; ++i) {
      xs[i] = 8.0 * static_cast<double>(i) / static_cast<double>(m - 1);
      ys[i] = 0.05 + 0.04 * std::sin(1.7 * xs[i]) + 0.002 * drng.uniform_pm1();
    }
    const auto phi = [](double d) { return std::exp(-d * d); };
    std::optional<k::RbfSearchResult> bs, bp;
    const double ts = best_of(3, [&] { bs = k::ref::rbf_search(xs, ys, 4, phi); });
    const double tp = best_of(3, [&] { bp = k::rbf_search(xs, ys, 4, phi); });
    report("rbf_search", ts, tp,
           std::abs(bs->rms - bp->rms) + static_cast<double>(bs->rank != bp->rank));
  }

  {
    const Eigen::Index n = 400000, dim = 4, kc = 8;
    const MatrixXd pts = random_matrix(rng, n, dim);
    std::vector<k::PreparedComponent> comps;
    for (Eigen::Index c = 0; c < kc; ++c) {
      const MatrixXd half = random_matrix(rng, dim, dim);
      comps.push_back(k::prepare_component(
          1.0 / static_cast<double>(kc), random_vector(rng, dim),
          half * half.transpose() + MatrixXd::Identity(dim, dim)));
    }
    MatrixXd rs(n, kc), rp(n, kc);
    double lls = 0.0, llp = 0.0;
    const double ts = best_of(3, [&] { lls = k::ref::gmm_estep(pts, comps, rs); });
    const double tp = best_of(3, [&] { llp = k::gmm_estep(pts, comps, rp); });
    report("gmm_estep", ts, tp,
           std::max(std::abs(lls - llp), (rs - rp).cwiseAbs().maxCoeff()));
  }

  return 0;
}
