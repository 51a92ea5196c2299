#pragma once

// Template bodies for pai/kernels.hpp. Not a standalone header.

#include <Eigen/LU>
#include <cmath>
#include <cstdlib>

namespace pai::kernels {

namespace detail {

/// Ranks per search chunk; partial winners are merged in chunk order.
inline constexpr std::uint64_t kRankChunk = 1024;

/// Lexicographic successor of an ascending combination over {0..n-1}.
inline bool next_combination(std::vector<int>& combo, int n) {
  const int k = static_cast<int>(combo.size());
  for (int i = k - 1; i >= 0; --i) {
    if (combo[i] < n - k + i) {
      ++combo[i];
      for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

/// Interpolates on the combo's centers and scores against all data.
/// Returns the rms, or nullopt for a singular system.
template <class Phi>
std::optional<double> score_combination(const VectorXd& xs, const VectorXd& ys,
                                        const std::vector<int>& combo,
                                        Phi& phi, VectorXd& coeffs) {
  const int k = static_cast<int>(combo.size());
  VectorXd centers(k), values(k);
  for (int i = 0; i < k; ++i) {
    centers[i] = xs[combo[i]];
    values[i] = ys[combo[i]];
  }
  auto solved = solve_interpolation_system(centers, values, phi);
  if (!solved) return std::nullopt;
  coeffs = std::move(*solved);
  double sq_sum = 0.0;
  for (Eigen::Index j = 0; j < xs.size(); ++j) {
    double model = 0.0;
    for (int i = 0; i < k; ++i)
      model += coeffs[i] * phi(std::abs(xs[j] - centers[i]));
    const double r = model - ys[j];
    sq_sum += r * r;
  }
  return std::sqrt(sq_sum / static_cast<double>(xs.size()));
}

struct SearchPartial {
  bool valid = false;
  double rms = 0.0;
  std::uint64_t rank = 0;
  std::vector<int> combo;
  VectorXd coeffs;
  std::uint64_t skipped = 0;

  /// Total order (rms, rank); makes the winner independent of merge order.
  void offer(double r, std::uint64_t rk, const std::vector<int>& c,
             const VectorXd& a) {
    if (!valid || r < rms || (r == rms && rk < rank)) {
      valid = true;
      rms = r;
      rank = rk;
      combo = c;
      coeffs = a;
    }
  }
};

}  // namespace detail

template <class Phi>
std::optional<VectorXd> solve_interpolation_system(const VectorXd& centers,
                                                   const VectorXd& values,
                                                   Phi&& phi) {
  const Eigen::Index k = centers.size();
  MatrixXd m(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      m(r, c) = phi(std::abs(centers[r] - centers[c]));
  Eigen::FullPivLU<MatrixXd> lu(m);
  if (!lu.isInvertible()) return std::nullopt;
  VectorXd a = lu.solve(values);
  const double scale = std::max(1.0, values.template lpNorm<Eigen::Infinity>());
  if ((m * a - values).template lpNorm<Eigen::Infinity>() > 1e-9 * scale)
    return std::nullopt;
  return a;
}

template <class Phi>
std::optional<RbfSearchResult> rbf_search(const VectorXd& xs, const VectorXd& ys,
                                          int n_centers, Phi&& phi) {
  const int m = static_cast<int>(xs.size());
  const std::uint64_t total = binomial(m, n_centers);
  const std::uint64_t n_chunks =
      (total + detail::kRankChunk - 1) / detail::kRankChunk;
  std::vector<detail::SearchPartial> partials(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (long long ci = 0; ci < static_cast<long long>(n_chunks); ++ci) {
    auto& part = partials[ci];
    const std::uint64_t begin = static_cast<std::uint64_t>(ci) * detail::kRankChunk;
    const std::uint64_t end = std::min(total, begin + detail::kRankChunk);
    std::vector<int> combo;
    unrank_combination(begin, m, n_centers, combo);
    VectorXd coeffs;
    for (std::uint64_t r = begin; r < end; ++r) {
      if (auto rms = detail::score_combination(xs, ys, combo, phi, coeffs))
        part.offer(*rms, r, combo, coeffs);
      else
        ++part.skipped;
      if (r + 1 < end) detail::next_combination(combo, m);
    }
  }

  detail::SearchPartial best;
  std::uint64_t skipped = 0;
  for (const auto& part : partials) {
    skipped += part.skipped;
    if (part.valid) best.offer(part.rms, part.rank, part.combo, part.coeffs);
  }
  if (!best.valid) return std::nullopt;
  return RbfSearchResult{best.rms,   best.rank, std::move(best.combo),
                         std::move(best.coeffs), total,     skipped};
}

namespace ref {

template <class Phi>
std::optional<RbfSearchResult> rbf_search(const VectorXd& xs, const VectorXd& ys,
                                          int n_centers, Phi&& phi) {
  const int m = static_cast<int>(xs.size());
  const std::uint64_t total = binomial(m, n_centers);
  detail::SearchPartial best;
  std::uint64_t skipped = 0;
  std::vector<int> combo;
  unrank_combination(0, m, n_centers, combo);
  VectorXd coeffs;
  for (std::uint64_t r = 0; r < total; ++r) {
    if (auto rms = detail::score_combination(xs, ys, combo, phi, coeffs))
      best.offer(*rms, r, combo, coeffs);
    else
      ++skipped;
    if (r + 1 < total) detail::next_combination(combo, m);
  }
  if (!best.valid) return std::nullopt;
  return RbfSearchResult{best.rms,   best.rank, std::move(best.combo),
                         std::move(best.coeffs), total,     skipped};
}

}  // namespace ref

}  // namespace pai::kernels
