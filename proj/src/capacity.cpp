#include "capbound/capacity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace capbound {
namespace {

constexpr int kMaxIterations = 500;
constexpr double kMaxHessianCondition = 1e12;

// Dense view of the support for fast repeated evaluation.
struct TermData {
  Mat exponents;     // T x n
  Vec log_coef;      // length T
  Vec target;        // kappa as doubles
};

TermData make_term_data(const Polynomial& p, const ExponentVec& kappa) {
  TermData td;
  const int t = static_cast<int>(p.term_count());
  const int n = p.num_vars();
  td.exponents.resize(t, n);
  td.log_coef.resize(t);
  td.target = kappa.cast<double>();
  int row = 0;
  for (const auto& [e, c] : p.terms()) {
    td.exponents.row(row) = e.cast<double>().transpose();
    td.log_coef[row] = std::log(c);
    ++row;
  }
  return td;
}

// F(y) = log p(e^y) - kappa.y via log-sum-exp; optionally the gradient
// (mean exponent under the Gibbs weights minus kappa) and the Hessian
// (covariance of the exponents).
double objective(const TermData& td, const Vec& y, Vec* grad, Mat* hess) {
  const Vec a = td.log_coef + td.exponents * y;
  const double m = a.maxCoeff();
  const Vec w = (a.array() - m).exp();
  const double total = w.sum();
  const Vec wn = w / total;
  const double value = m + std::log(total) - td.target.dot(y);
  if (grad != nullptr) {
    *grad = td.exponents.transpose() * wn - td.target;
  }
  if (hess != nullptr) {
    const Vec mean = td.exponents.transpose() * wn;
    *hess = td.exponents.transpose() * wn.asDiagonal() * td.exponents -
            mean * mean.transpose();
  }
  return value;
}

struct InteriorSolve {
  double value = 0.0;
  Vec minimizer;
  bool converged = false;
  int iterations = 0;
};

InteriorSolve minimize_interior(const Polynomial& p, const ExponentVec& kappa,
                                double tol) {
  const TermData td = make_term_data(p, kappa);
  const int n = p.num_vars();
  if (n == 0) {
    InteriorSolve flat;
    flat.value = std::exp(objective(td, Vec::Zero(0), nullptr, nullptr));
    flat.minimizer = Vec::Zero(0);
    flat.converged = true;
    return flat;
  }
  Vec y = Vec::Zero(n);  // start at x = 1
  Vec grad;
  Mat hess;
  double f = objective(td, y, &grad, &hess);
  double last_step = std::numeric_limits<double>::infinity();

  InteriorSolve out;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    out.iterations = iter;
    if (grad.lpNorm<Eigen::Infinity>() <= tol && last_step < tol) {
      out.converged = true;
      break;
    }

    // Newton direction; steepest descent when the Hessian is unusable.
    Vec direction;
    bool use_newton = false;
    {
      Eigen::LDLT<Mat> ldlt(hess);
      if (ldlt.info() == Eigen::Success) {
        const Vec d = ldlt.vectorD();
        const double dmax = d.maxCoeff();
        const double dmin = d.minCoeff();
        if (dmin > 0.0 && dmax / dmin <= kMaxHessianCondition) {
          direction = ldlt.solve(-grad);
          use_newton = true;
        }
      }
    }
    if (!use_newton) direction = -grad;
    if (direction.lpNorm<Eigen::Infinity>() == 0.0) {
      out.converged = grad.lpNorm<Eigen::Infinity>() <= tol;
      break;
    }

    // Backtracking with the Armijo condition.
    const double slope = grad.dot(direction);
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec trial = y + step * direction;
      const double ft = objective(td, trial, nullptr, nullptr);
      if (ft <= f + 1e-4 * step * slope) {
        last_step = step * direction.lpNorm<Eigen::Infinity>();
        y = trial;
        f = objective(td, y, &grad, &hess);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent at machine precision: treat as converged if the
      // gradient criterion holds, otherwise stop with what we have.
      out.converged = grad.lpNorm<Eigen::Infinity>() <= tol;
      break;
    }
  }
  out.value = std::exp(f);
  out.minimizer = y.array().exp();
  return out;
}

}  // namespace

CapacityResult capacity(const CapacityQuery& query) {
  if (query.kappa.size() != query.p.num_vars()) {
    throw std::invalid_argument("capacity: dimension mismatch");
  }
  if (!(query.tol > 0.0) || query.tol > 1e-2) {
    throw std::invalid_argument("capacity: tol out of range (0, 1e-2]");
  }
  if (query.p.is_zero()) {
    throw std::invalid_argument("capacity: polynomial has no terms");
  }

  CapacityResult result;
  const NewtonPosition pos = newton_membership(query.p, query.kappa);
  switch (pos) {
    case NewtonPosition::outside:
      result.status = CapacityStatus::zero_outside;
      result.value = 0.0;
      return result;
    case NewtonPosition::vertex:
      result.status = CapacityStatus::vertex_shortcut;
      result.value = coefficient(query.p, query.kappa);
      return result;
    case NewtonPosition::interior: {
      const InteriorSolve s =
          minimize_interior(query.p, query.kappa, query.tol);
      result.value = s.value;
      result.iterations = s.iterations;
      if (s.converged) {
        result.status = CapacityStatus::converged;
        result.minimizer = s.minimizer;
      } else {
        result.status = CapacityStatus::iteration_limit;
      }
      return result;
    }
    case NewtonPosition::boundary: {
      // The infimum is the capacity of the face restriction: the face
      // terms minorize p pointwise, and scaling along the face normal
      // makes the remaining terms vanish in the limit.
      const Polynomial face = face_restriction(query.p, query.kappa);
      const InteriorSolve s = minimize_interior(face, query.kappa, query.tol);
      result.value = s.value;
      result.iterations = s.iterations;
      result.status = CapacityStatus::boundary_limit;
      return result;
    }
  }
  throw std::logic_error("capacity: unreachable");
}

double capacity_oracle(const CapacityQuery& query, int grid_points_per_axis) {
  const int n = query.p.num_vars();
  if (n > 4) {
    throw std::invalid_argument("capacity_oracle: more than 4 variables");
  }
  if (grid_points_per_axis < 50) {
    throw std::invalid_argument("capacity_oracle: grid too coarse");
  }
  if (query.kappa.size() != n) {
    throw std::invalid_argument("capacity_oracle: dimension mismatch");
  }
  const TermData td = make_term_data(query.p, query.kappa);
  const double lo = -20.0, hi = 20.0;
  const int g = grid_points_per_axis;
  const double h = (hi - lo) / (g - 1);

  Vec best_y = Vec::Zero(std::max(n, 0));
  double best_f = objective(td, best_y, nullptr, nullptr);
  if (n > 0) {
    std::vector<int> idx(n, 0);
    while (true) {
      Vec y(n);
      for (int i = 0; i < n; ++i) y[i] = lo + h * idx[i];
      const double f = objective(td, y, nullptr, nullptr);
      if (f < best_f) {
        best_f = f;
        best_y = y;
      }
      int i = 0;
      while (i < n && ++idx[i] == g) idx[i++] = 0;
      if (i == n) break;
    }
  }

  // Golden-section sweeps along each axis (F is convex along lines).
  const double gr = 0.6180339887498949;
  double span = h;
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int axis = 0; axis < n; ++axis) {
      double a = best_y[axis] - span;
      double b = best_y[axis] + span;
      auto eval_at = [&](double v) {
        Vec y = best_y;
        y[axis] = v;
        return objective(td, y, nullptr, nullptr);
      };
      double x1 = b - gr * (b - a);
      double x2 = a + gr * (b - a);
      double f1 = eval_at(x1);
      double f2 = eval_at(x2);
      for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = eval_at(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = eval_at(x2);
        }
      }
      const double v = f1 < f2 ? x1 : x2;
      const double fv = std::min(f1, f2);
      if (fv < best_f) {
        best_f = fv;
        best_y[axis] = v;
      }
    }
    span *= 0.25;
  }
  return std::exp(best_f);
}

double gurvits_prefactor(const ExponentVec& kappa) {
  double log_value = 0.0;
  for (int i = 0; i < kappa.size(); ++i) {
    const int k = kappa[i];
    if (k < 0) throw std::invalid_argument("gurvits_prefactor: negative entry");
    if (k == 0) continue;  // 0^0 / 0! = 1
    log_value += k * std::log(double(k)) - k - std::lgamma(double(k) + 1.0);
  }
  return std::exp(log_value);
}

double kko_doubly_exp_bound(double eps, const ExponentVec& kappa) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw std::invalid_argument("kko_doubly_exp_bound: eps outside (0, 1]");
  }
  const int n = static_cast<int>(kappa.size());
  double log_value = std::pow(2.0, n) * std::log(eps);
  long long prefix = kappa.size() > 0 ? kappa[0] : 0;
  for (int i = 1; i < n; ++i) {
    const long long m = std::max<long long>(kappa[i], prefix);
    log_value -= std::log(double(m + 1));
    prefix += kappa[i];
  }
  return std::exp(log_value);
}

const char* to_string(CapacityStatus status) {
  switch (status) {
    case CapacityStatus::converged: return "converged";
    case CapacityStatus::vertex_shortcut: return "vertex-shortcut";
    case CapacityStatus::boundary_limit: return "boundary-limit";
    case CapacityStatus::zero_outside: return "zero-outside";
    case CapacityStatus::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

}  // namespace capbound
