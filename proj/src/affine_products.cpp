#include "capbound/affine_products.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "capbound/rational_lp.hpp"
#include "capbound/rng.hpp"

namespace capbound {
namespace {

constexpr double kSnapThreshold = 1e-14;
constexpr double kRowSumTol = 1e-12;

// Union-find cycle detection over rows + columns.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // Returns false if x and y were already connected.
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent_[x] = y;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

RowStochasticMatrix::RowStochasticMatrix(Mat entries)
    : entries_(std::move(entries)) {
  if (entries_.cols() < 1) {
    throw std::invalid_argument("matrix needs at least the constant column");
  }
  for (int i = 0; i < entries_.rows(); ++i) {
    for (int j = 0; j < entries_.cols(); ++j) {
      double& v = entries_(i, j);
      if (v < 0.0) {
        if (v < -kSnapThreshold) {
          throw std::invalid_argument("negative matrix entry");
        }
        v = 0.0;
      }
    }
    const double rs = entries_.row(i).sum();
    if (std::abs(rs - 1.0) > kRowSumTol) {
      throw std::invalid_argument("row sum differs from 1 beyond 1e-12");
    }
  }
}

ValidationReport validate(const Mat& entries, const Vec& alpha, double atol) {
  ValidationReport report;
  const int d = static_cast<int>(entries.rows());
  const int n = static_cast<int>(entries.cols()) - 1;
  auto complain = [&report](const std::string& msg) {
    report.ok = false;
    report.violations.push_back(msg);
  };
  if (alpha.size() != n) {
    complain("alpha length does not match variable columns");
    return report;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (entries(i, j) < 0.0) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") is negative";
        complain(os.str());
      }
    }
    const double rs = entries.row(i).sum();
    if (std::abs(rs - 1.0) > atol) {
      std::ostringstream os;
      os << "row " << i << " sums to " << rs;
      complain(os.str());
    }
  }
  const Vec sums = entries.colwise().sum();
  for (int j = 0; j < n; ++j) {
    if (std::abs(sums[j] - alpha[j]) > atol) {
      std::ostringstream os;
      os << "column " << j << " sums to " << sums[j] << ", expected "
         << alpha[j];
      complain(os.str());
    }
  }
  const double expected_last = d - alpha.sum();
  if (std::abs(sums[n] - expected_last) > atol) {
    std::ostringstream os;
    os << "constant column sums to " << sums[n] << ", expected "
       << expected_last;
    complain(os.str());
  }
  return report;
}

ValidationReport validate(const RowStochasticMatrix& m, const Vec& alpha,
                          double atol) {
  return validate(m.entries(), alpha, atol);
}

Polynomial associated_polynomial(const RowStochasticMatrix& m,
                                 std::size_t term_cap) {
  const int n = m.num_vars();
  Polynomial product = Polynomial::constant(n, 1.0);
  for (int i = 0; i < m.rows(); ++i) {
    Polynomial factor(n);
    if (m.entries()(i, n) != 0.0) {
      factor.add_term(ExponentVec::Zero(n), m.entries()(i, n));
    }
    for (int j = 0; j < n; ++j) {
      if (m.entries()(i, j) != 0.0) {
        ExponentVec e = ExponentVec::Zero(n);
        e[j] = 1;
        factor.add_term(e, m.entries()(i, j));
      }
    }
    product = product * factor;
    if (product.term_count() > term_cap) {
      throw std::length_error("associated_polynomial: term cap exceeded");
    }
  }
  return product;
}

double phi_eval(const RowStochasticMatrix& m, const Vec& x) {
  if (x.size() != m.num_vars()) {
    throw std::invalid_argument("phi_eval: dimension mismatch");
  }
  double value = 1.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = m.entries()(i, m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) row += m.entries()(i, j) * x[j];
    value *= row;
  }
  return value;
}

double phi_log_eval(const RowStochasticMatrix& m, const Vec& y) {
  if (y.size() != m.num_vars()) {
    throw std::invalid_argument("phi_log_eval: dimension mismatch");
  }
  double log_value = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = m.entries()(i, m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) {
      row += m.entries()(i, j) * std::exp(y[j]);
    }
    log_value += std::log(row);
  }
  return log_value;
}

bool is_extreme(const RowStochasticMatrix& m) {
  const int d = m.rows();
  const int cols = m.num_vars() + 1;
  DisjointSets ds(d + cols);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (m.entries()(i, j) != 0.0 && !ds.unite(i, d + j)) {
        return false;  // support edge closes a cycle
      }
    }
  }
  return true;
}

RowStochasticMatrix random_extreme_point(int n, int d, const Vec& alpha,
                                         std::uint64_t seed) {
  if (n < 0 || d < 0 || alpha.size() != n) {
    throw std::invalid_argument("random_extreme_point: bad shape");
  }
  Rational alpha_total(0);
  std::vector<Rational> alpha_q(n);
  for (int j = 0; j < n; ++j) {
    if (alpha[j] < 0.0) {
      throw std::invalid_argument("random_extreme_point: negative alpha");
    }
    alpha_q[j] = rational_from(alpha[j]);
    alpha_total += alpha_q[j];
  }
  if (alpha_total > d) {
    throw std::invalid_argument("random_extreme_point: |alpha|_1 exceeds d");
  }

  // Variables m_ij in row-major order; d row-sum rows + (n+1) column-sum
  // rows (one of which is redundant; the simplex tolerates that).
  const int cols = n + 1;
  const std::size_t vars = static_cast<std::size_t>(d) * cols;
  std::vector<std::vector<Rational>> A(d + cols,
                                       std::vector<Rational>(vars, Rational(0)));
  std::vector<Rational> b(d + cols, Rational(0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < cols; ++j) A[i][i * cols + j] = 1;
    b[i] = 1;
  }
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < d; ++i) A[d + j][i * cols + j] = 1;
    b[d + j] = j < n ? alpha_q[j] : Rational(d) - alpha_total;
  }

  Rng rng(seed);
  std::vector<Rational> objective(vars);
  for (auto& c : objective) {
    c = -Rational(static_cast<long long>(rng.next() % (1u << 20)));
  }
  const LpResult lp = solve_lp_max(A, b, objective);
  if (lp.status != LpStatus::optimal) {
    throw std::invalid_argument("random_extreme_point: infeasible class");
  }

  Mat entries(d, cols);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < cols; ++j) {
      double v = to_double(lp.x[i * cols + j]);
      if (std::abs(v) < kSnapThreshold) v = 0.0;
      entries(i, j) = v;
    }
  }
  return RowStochasticMatrix(std::move(entries));
}

RowStochasticMatrix delta_tight_matrix(const ExponentVec& kappa,
                                       const Vec& alpha) {
  const int n = static_cast<int>(kappa.size());
  if (alpha.size() != n || n == 0) {
    throw std::invalid_argument("delta_tight_matrix: bad shape");
  }
  double dev_total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (kappa[j] < 1) {
      throw std::invalid_argument("delta_tight_matrix: kappa must be >= 1");
    }
    const double dev = kappa[j] - alpha[j];
    if (dev < 0.0) {
      throw std::invalid_argument("delta_tight_matrix: needs kappa >= alpha");
    }
    dev_total += dev;
  }
  if (!(dev_total < 1.0)) {
    throw std::invalid_argument("delta_tight_matrix: |kappa - alpha|_1 >= 1");
  }

  const int d = kappa.sum();
  Mat entries = Mat::Zero(d, n + 1);
  int row = 0;
  for (int j = 0; j < n; ++j) {
    for (int r = 0; r < kappa[j] - 1; ++r) entries(row++, j) = 1.0;
  }
  double prefix = 0.0;
  for (int k = 0; k < n; ++k) {
    prefix += kappa[k] - alpha[k];
    entries(row, k) = 1.0 - prefix;
    entries(row, k + 1) = prefix;
    ++row;
  }
  return RowStochasticMatrix(std::move(entries));
}

std::pair<RowStochasticMatrix, double> restrict_zero_column(
    const RowStochasticMatrix& m, int col, const ExponentVec& kappa) {
  const int n = m.num_vars();
  if (col < 0 || col >= n) {
    throw std::invalid_argument("restrict_zero_column: column out of range");
  }
  if (kappa.size() != n || kappa[col] != 0) {
    throw std::invalid_argument("restrict_zero_column: kappa_j must be 0");
  }
  double factor = 1.0;
  Mat reduced(m.rows(), n);
  for (int i = 0; i < m.rows(); ++i) {
    const double mij = m.entries()(i, col);
    if (mij >= 1.0) {
      throw std::invalid_argument("restrict_zero_column: a row dies (m_ij = 1)");
    }
    factor *= 1.0 - mij;
    int out = 0;
    for (int j = 0; j <= n; ++j) {
      if (j == col) continue;
      reduced(i, out++) = m.entries()(i, j) / (1.0 - mij);
    }
  }
  return {RowStochasticMatrix(std::move(reduced)), factor};
}

std::pair<RowStochasticMatrix, double> peel_leaf_column(
    const RowStochasticMatrix& m, int col, const ExponentVec& kappa) {
  const int n = m.num_vars();
  if (col < 0 || col >= n) {
    throw std::invalid_argument("peel_leaf_column: column out of range");
  }
  if (kappa.size() != n || kappa[col] != 1) {
    throw std::invalid_argument("peel_leaf_column: kappa_j must be 1");
  }
  int pivot_row = -1;
  for (int i = 0; i < m.rows(); ++i) {
    if (m.entries()(i, col) != 0.0) {
      if (pivot_row >= 0) {
        throw std::invalid_argument(
            "peel_leaf_column: column has more than one non-zero entry");
      }
      pivot_row = i;
    }
  }
  if (pivot_row < 0) {
    throw std::invalid_argument("peel_leaf_column: column is identically zero");
  }
  const double factor = m.entries()(pivot_row, col);
  Mat reduced(m.rows() - 1, n);
  int out_row = 0;
  for (int i = 0; i < m.rows(); ++i) {
    if (i == pivot_row) continue;
    int out = 0;
    for (int j = 0; j <= n; ++j) {
      if (j == col) continue;
      reduced(out_row, out++) = m.entries()(i, j);
    }
    ++out_row;
  }
  return {RowStochasticMatrix(std::move(reduced)), factor};
}

namespace {

// Maximizes sum_i log(r_i(M)) + mu * sum log(entries) over the affine
// class by Newton steps in a null-space parametrization, following a
// decreasing barrier path. Requires a strictly positive starting point,
// which the centroid provides once zero-forced columns are dropped.
struct ConcaveMaxProblem {
  int d;
  std::vector<int> active_cols;  // column indices with positive target sum
  Vec col_targets;               // target sums for active columns
  Vec u_hat;                     // evaluation weights per active column

  int entry_count() const {
    return d * static_cast<int>(active_cols.size());
  }
};

double ascend_log_phi(const ConcaveMaxProblem& prob, Vec* out_entries) {
  const int d = prob.d;
  const int c = static_cast<int>(prob.active_cols.size());
  const int vars = d * c;

  // Constraint matrix: d row sums and c column sums (rank d + c - 1).
  Mat constraints = Mat::Zero(d + c, vars);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < c; ++j) constraints(i, i * c + j) = 1.0;
  }
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < d; ++i) constraints(d + j, i * c + j) = 1.0;
  }
  Eigen::FullPivLU<Mat> lu(constraints);
  const Mat kernel = lu.kernel();
  const int k = static_cast<int>(kernel.cols());

  Vec entries(vars);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < c; ++j) entries[i * c + j] = prob.col_targets[j] / d;
  }

  auto row_values = [&](const Vec& e) {
    Vec r = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < c; ++j) r[i] += e[i * c + j] * prob.u_hat[j];
    }
    return r;
  };

  for (double mu = 1.0; mu >= 1e-12; mu *= 0.1) {
    for (int step = 0; step < 60; ++step) {
      const Vec r = row_values(entries);
      // Gradient and Hessian of G(e) = sum log r_i + mu sum log e.
      Vec grad_e(vars);
      Vec hess_diag(vars);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < c; ++j) {
          const int idx = i * c + j;
          grad_e[idx] = prob.u_hat[j] / r[i] + mu / entries[idx];
          hess_diag[idx] = mu / (entries[idx] * entries[idx]);
        }
      }
      const Vec grad = kernel.transpose() * grad_e;
      Mat hess = Mat::Zero(k, k);
      // Row blocks: -(u u^T)/r_i^2 within each row, plus barrier diagonal.
      for (int i = 0; i < d; ++i) {
        Vec zrow = Vec::Zero(k);
        for (int j = 0; j < c; ++j) {
          zrow += prob.u_hat[j] * kernel.row(i * c + j).transpose();
        }
        hess += zrow * zrow.transpose() / (r[i] * r[i]);
      }
      for (int idx = 0; idx < vars; ++idx) {
        hess += hess_diag[idx] * kernel.row(idx).transpose() * kernel.row(idx);
      }

      const Vec dir = hess.ldlt().solve(grad);
      const Vec de = kernel * dir;
      // Fraction-to-boundary step cap.
      double step_len = 1.0;
      for (int idx = 0; idx < vars; ++idx) {
        if (de[idx] < 0.0) {
          step_len = std::min(step_len, -0.99 * entries[idx] / de[idx]);
        }
      }
      auto merit = [&](const Vec& e) {
        const Vec rv = row_values(e);
        if ((rv.array() <= 0.0).any() || (e.array() <= 0.0).any()) {
          return -std::numeric_limits<double>::infinity();
        }
        return rv.array().log().sum() + mu * e.array().log().sum();
      };
      const double base = merit(entries);
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Vec trial = entries + step_len * de;
        if (merit(trial) > base) {
          entries = trial;
          moved = true;
          break;
        }
        step_len *= 0.5;
      }
      if (!moved || grad.lpNorm<Eigen::Infinity>() < 1e-13) break;
    }
  }

  *out_entries = entries;
  return row_values(entries).array().log().sum();
}

}  // namespace

RowStochasticMatrix productize(const Polynomial& p, const Vec& u, int d,
                               double tol, std::uint64_t seed) {
  const int n = p.num_vars();
  if (u.size() != n) {
    throw std::invalid_argument("productize: point dimension mismatch");
  }
  if ((u.array() <= 0.0).any()) {
    throw std::invalid_argument("productize: point must be positive");
  }
  Vector<double> ones = Vec::Ones(n);
  if (std::abs(eval(p, ones) - 1.0) > 1e-9) {
    throw std::invalid_argument("productize: polynomial not normalized");
  }
  if (d < p.total_degree()) {
    throw std::invalid_argument("productize: degree bound below total degree");
  }
  const Vec alpha = gradient_at_one(p);
  const double target = eval(p, Vector<double>(u));
  const double log_target = std::log(target);

  // Zero-sum columns are identically zero across the class; drop them.
  ConcaveMaxProblem prob;
  prob.d = d;
  const double alpha_rest = d - alpha.sum();
  if (alpha_rest < -1e-12) {
    throw std::invalid_argument("productize: |alpha|_1 exceeds degree bound");
  }
  std::vector<double> targets, weights;
  for (int j = 0; j < n; ++j) {
    if (alpha[j] > 0.0) {
      prob.active_cols.push_back(j);
      targets.push_back(alpha[j]);
      weights.push_back(u[j]);
    }
  }
  if (alpha_rest > 1e-12) {
    prob.active_cols.push_back(n);  // constant column
    targets.push_back(alpha_rest);
    weights.push_back(1.0);
  }
  prob.col_targets = Eigen::Map<Vec>(targets.data(), targets.size());
  prob.u_hat = Eigen::Map<Vec>(weights.data(), weights.size());

  auto to_full_matrix = [&](const Vec& active_entries) {
    Mat full = Mat::Zero(d, n + 1);
    const int c = static_cast<int>(prob.active_cols.size());
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < c; ++j) {
        full(i, prob.active_cols[j]) = active_entries[i * c + j];
      }
    }
    return full;
  };

  Vec max_entries;
  const double log_max = ascend_log_phi(prob, &max_entries);

  // Vertex sampling for the low end of the bracket: 63 random objectives
  // plus one guided by the gradient of log phi at the maximizer.
  Rng rng(seed ^ 0x70726f64ULL);
  double log_min = std::numeric_limits<double>::infinity();
  RowStochasticMatrix low_anchor(Mat::Ones(0, n + 1));
  bool have_anchor = false;
  auto consider_vertex = [&](const RowStochasticMatrix& vertex) {
    const double lv = std::log(phi_eval(vertex, u));
    if (lv < log_min) {
      log_min = lv;
      low_anchor = vertex;
      have_anchor = true;
    }
  };
  for (int s = 0; s < 63; ++s) {
    consider_vertex(random_extreme_point(n, d, alpha, rng.next()));
  }
  {
    // Linearization of log phi at the maximizer points to a low vertex.
    const int c = static_cast<int>(prob.active_cols.size());
    Vec r = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < c; ++j) {
        r[i] += max_entries[i * c + j] * prob.u_hat[j];
      }
    }
    const int cols = n + 1;
    const std::size_t vars = static_cast<std::size_t>(d) * cols;
    std::vector<std::vector<Rational>> A(d + cols,
                                         std::vector<Rational>(vars, Rational(0)));
    std::vector<Rational> b(d + cols, Rational(0));
    Rational alpha_total(0);
    for (int j = 0; j < n; ++j) alpha_total += rational_from(alpha[j]);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < cols; ++j) A[i][i * cols + j] = 1;
      b[i] = 1;
    }
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < d; ++i) A[d + j][i * cols + j] = 1;
      b[d + j] = j < n ? rational_from(alpha[j]) : Rational(d) - alpha_total;
    }
    std::vector<Rational> obj(vars, Rational(0));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < cols; ++j) {
        const double weight = j < n ? u[j] : 1.0;
        obj[i * cols + j] = -rational_from(weight / r[i]);
      }
    }
    const LpResult lp = solve_lp_max(A, b, obj);
    if (lp.status == LpStatus::optimal) {
      Mat entries(d, cols);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < cols; ++j) {
          double v = to_double(lp.x[i * cols + j]);
          entries(i, j) = std::abs(v) < kSnapThreshold ? 0.0 : v;
        }
      }
      consider_vertex(RowStochasticMatrix(std::move(entries)));
    }
  }

  const double log_tol = std::log1p(tol);
  if (log_target > log_max + log_tol) {
    throw NotProductizableError(
        "productize: value above the class maximum; not productizable here");
  }
  if (have_anchor && log_target < log_min - tol) {
    throw NotProductizableError(
        "productize: value below every sampled vertex; not productizable here");
  }

  const Mat top = to_full_matrix(max_entries);
  if (!have_anchor || log_target >= log_max) {
    RowStochasticMatrix candidate(top);
    if (std::abs(phi_eval(candidate, u) - target) <= tol * target) {
      return candidate;
    }
    throw NotProductizableError("productize: bracket degenerate at maximum");
  }

  // log phi((1-s) M* + s W)(u) is concave in s with endpoints straddling
  // the target; bisect on the upper crossing.
  const Mat bottom = low_anchor.entries();
  auto value_at = [&](double s) {
    const Mat blend = (1.0 - s) * top + s * bottom;
    double log_value = 0.0;
    for (int i = 0; i < d; ++i) {
      double row = blend(i, n);
      for (int j = 0; j < n; ++j) row += blend(i, j) * u[j];
      log_value += std::log(row);
    }
    return log_value;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) >= log_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = value_at(lo) >= log_target ? lo : hi;
  RowStochasticMatrix result(Mat((1.0 - s) * top + s * bottom));
  if (std::abs(phi_eval(result, u) - target) > tol * target) {
    throw NotProductizableError("productize: bisection failed tolerance");
  }
  return result;
}

}  // namespace capbound
