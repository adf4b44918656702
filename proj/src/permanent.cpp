#include "capbound/permanent.hpp"

#include <cmath>
#include <limits>

#include "capbound/rng.hpp"

namespace capbound {
namespace {

void check_spec(const ColumnSumSpec& spec) {
  if (spec.c.size() != spec.n) {
    throw std::invalid_argument("column sums: length mismatch");
  }
  if ((spec.c.array() <= 0.0).any()) {
    throw std::invalid_argument("column sums must be strictly positive");
  }
  if (std::abs(spec.c.sum() - spec.n) > 1e-9) {
    throw std::invalid_argument("column sums must total n");
  }
}

}  // namespace

Mat rank_one_candidate(const ColumnSumSpec& spec) {
  check_spec(spec);
  return Vec::Ones(spec.n) * spec.c.transpose() / spec.n;
}

UniquenessCheck uniqueness_condition(const ColumnSumSpec& spec, double L) {
  check_spec(spec);
  if (spec.n < 3) {
    throw std::invalid_argument("uniqueness_condition: needs n >= 3");
  }
  if (!(L > 0.0)) {
    throw std::invalid_argument("uniqueness_condition: L must be positive");
  }
  const double n = spec.n;
  UniquenessCheck check;
  check.lhs = std::exp((n - 2) * std::log(n - 2) + (n - 1) * std::log(n) -
                       (2 * n - 3) * std::log(n - 1));
  check.rhs = spec.c.prod() / L;
  check.margin = check.lhs - check.rhs;
  check.holds = check.lhs > check.rhs;
  return check;
}

MinPerCounterexample min_per_counterexample(int n, double t) {
  if (n < 3) throw std::invalid_argument("min_per_counterexample: n >= 3");
  const double eps = std::pow(static_cast<double>(n), -(1.0 + t));

  MinPerCounterexample out;
  out.c = Vec::Zero(n + 1);
  out.c[0] = 2.0 - eps;  // 1 + alpha_1 with alpha_j = 1 - eps
  for (int j = 1; j < n; ++j) out.c[j] = 1.0 - eps;
  out.c[n] = n * eps;
  out.c_deviation = 2.0 * (1.0 - eps);

  out.sparse = Mat::Zero(n + 1, n + 1);
  out.sparse(0, 0) = 1.0;
  for (int k = 1; k <= n; ++k) {
    out.sparse(k, k - 1) = 1.0 - k * eps;
    out.sparse(k, k) = k * eps;
  }

  ColumnSumSpec spec{n + 1, out.c};
  out.rank_one = rank_one_candidate(spec);

  // Closed forms, in logs to survive large n.
  out.per_sparse = std::exp(std::lgamma(n + 1.0) + n * std::log(eps));
  out.per_rank_one =
      std::exp(std::lgamma(n + 2.0) - (n + 1.0) * std::log(n + 1.0) +
               std::log(2.0 - eps) + (n - 1.0) * std::log(1.0 - eps) +
               std::log(n * eps));

  if (n <= 10) {
    const double ryser_sparse = permanent<double>(out.sparse);
    const double ryser_rank_one = permanent<double>(out.rank_one);
    if (std::abs(ryser_sparse - out.per_sparse) >
            1e-9 * std::max(1.0, out.per_sparse) ||
        std::abs(ryser_rank_one - out.per_rank_one) >
            1e-9 * std::max(1.0, out.per_rank_one)) {
      throw std::logic_error(
          "min_per_counterexample: closed forms disagree with Ryser");
    }
  }
  return out;
}

namespace {

// Orthogonal projection onto the affine subspace {X1 = 1, X^T 1 = c}.
Mat project_affine(const Mat& m, const Vec& c) {
  const int n = static_cast<int>(m.rows());
  const Vec r = Vec::Ones(n) - m.rowwise().sum();
  const Vec s = c - m.colwise().sum().transpose();
  const double shift = r.sum() / (2.0 * n);
  const Vec a = (r.array() - shift).matrix() / n;
  const Vec b = (s.array() - shift).matrix() / n;
  return m + a * Vec::Ones(n).transpose() + Vec::Ones(n) * b.transpose();
}

// Gradient of the permanent: entry (i, j) is per(M with row i, col j
// removed).
Mat permanent_gradient(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Mat grad(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int col = 0, cc = 0; col < n; ++col) {
          if (col == j) continue;
          minor(rr, cc++) = m(r, col);
        }
        ++rr;
      }
      grad(i, j) = permanent<double>(minor);
    }
  }
  return grad;
}

double permanent_second(const Mat& m, int i, int j, int k, int l) {
  const int n = static_cast<int>(m.rows());
  if (i == k || j == l) return 0.0;
  Mat minor(n - 2, n - 2);
  for (int r = 0, rr = 0; r < n; ++r) {
    if (r == i || r == k) continue;
    for (int col = 0, cc = 0; col < n; ++col) {
      if (col == j || col == l) continue;
      minor(rr, cc++) = m(r, col);
    }
    ++rr;
  }
  return permanent<double>(minor);
}

}  // namespace

MinimizeResult minimize_permanent(const ColumnSumSpec& spec,
                                  std::uint64_t seed, int iters,
                                  int restarts) {
  check_spec(spec);
  const int n = spec.n;
  if (n > 8) throw std::invalid_argument("minimize_permanent: n > 8");

  // Null-space basis of the row/column-sum constraints for the polish
  // step. Entries are vectorized column-major, matching Eigen's layout.
  Mat constraints = Mat::Zero(2 * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      constraints(i, j * n + i) = 1.0;
      constraints(n + j, j * n + i) = 1.0;
    }
  }
  const Eigen::FullPivLU<Mat> lu(constraints);
  const Mat kernel = lu.kernel();
  const int kdim = static_cast<int>(kernel.cols());

  Rng rng(seed);
  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(0.05, 1.0);
    }
    for (int rep = 0; rep < 200; ++rep) {
      m = project_affine(m, spec.c).cwiseMax(0.0);
    }

    double value = permanent<double>(m);
    double step = 0.1;
    for (int it = 0; it < iters; ++it) {
      const Mat grad = permanent_gradient(m);
      Mat trial = m - step * grad;
      for (int rep = 0; rep < 60; ++rep) {
        trial = project_affine(trial, spec.c).cwiseMax(0.0);
      }
      const double trial_value = permanent<double>(trial);
      if (trial_value < value) {
        m = trial;
        value = trial_value;
        step *= 1.2;
      } else {
        step *= 0.5;
        if (step < 1e-14) break;
      }
    }

    // Newton polish in the feasible subspace once safely interior.
    if (m.minCoeff() > 1e-9) {
      for (int polish = 0; polish < 50; ++polish) {
        const Mat grad_m = permanent_gradient(m);
        const Eigen::Map<const Vec> grad_vec(grad_m.data(), n * n);
        const Vec g = kernel.transpose() * grad_vec;
        if (g.lpNorm<Eigen::Infinity>() < 1e-13) break;

        Mat hess_full = Mat::Zero(n * n, n * n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
              for (int l = 0; l < n; ++l) {
                // Column-major layout to match the gradient map above.
                hess_full(j * n + i, l * n + k) =
                    permanent_second(m, i, j, k, l);
              }
            }
          }
        }
        const Mat hess = kernel.transpose() * hess_full * kernel;
        Mat damped = hess;
        Vec dir;
        bool ok = false;
        for (double ridge = 0.0; ridge < 16.0; ridge += 1.0) {
          damped = hess + std::pow(10.0, ridge - 12.0) * Mat::Identity(kdim, kdim);
          const Eigen::LDLT<Mat> ldlt(damped);
          if (ldlt.info() == Eigen::Success) {
            dir = ldlt.solve(-g);
            if (dir.allFinite()) {
              ok = true;
              break;
            }
          }
        }
        if (!ok) break;

        // Fraction-to-boundary cap, then require a decrease.
        Vec de = kernel * dir;
        double cap = 1.0;
        for (int idx = 0; idx < n * n; ++idx) {
          const int i = idx % n, j = idx / n;
          if (de[idx] < 0.0) cap = std::min(cap, -0.95 * m(i, j) / de[idx]);
        }
        bool moved = false;
        for (double s = cap; s > 1e-16; s *= 0.5) {
          Mat trial = m;
          for (int idx = 0; idx < n * n; ++idx) {
            trial(idx % n, idx / n) += s * de[idx];
          }
          const double tv = permanent<double>(trial);
          if (tv < value && trial.minCoeff() >= 0.0) {
            m = trial;
            value = tv;
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
    }

    if (value < best.value) {
      best.value = value;
      best.matrix = m;
    }
  }
  best.restarts_used = restarts;
  return best;
}

}  // namespace capbound
