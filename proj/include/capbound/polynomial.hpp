#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "capbound/types.hpp"

namespace capbound {

// Multivariate polynomial with non-negative coefficients, stored sparsely
// as exponent vector -> coefficient in graded-lex order. Zero coefficients
// are never stored (exact-zero pruning only, no epsilon threshold), so the
// stored terms are exactly the support. Values are immutable in spirit:
// every operation returns a fresh polynomial.
template <typename Scalar>
class SparsePolynomial {
 public:
  using TermMap = std::map<ExponentVec, Scalar, GrlexLess>;

  explicit SparsePolynomial(int num_vars) : num_vars_(num_vars) {
    if (num_vars < 0) throw std::invalid_argument("negative variable count");
  }

  static SparsePolynomial constant(int num_vars, const Scalar& c) {
    SparsePolynomial p(num_vars);
    p.add_term(ExponentVec::Zero(num_vars), c);
    return p;
  }

  static SparsePolynomial monomial(const ExponentVec& exponents,
                                   const Scalar& c) {
    SparsePolynomial p(static_cast<int>(exponents.size()));
    p.add_term(exponents, c);
    return p;
  }

  int num_vars() const { return num_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  // Merges additively; rejects negative coefficients, drops exact zeros.
  void add_term(const ExponentVec& exponents, const Scalar& coefficient) {
    if (exponents.size() != num_vars_) {
      throw std::invalid_argument("exponent vector length mismatch");
    }
    if ((exponents.array() < 0).any()) {
      throw std::invalid_argument("negative exponent");
    }
    if (coefficient < Scalar(0)) {
      throw std::invalid_argument("negative coefficient");
    }
    if (coefficient == Scalar(0)) return;
    auto [it, inserted] = terms_.emplace(exponents, coefficient);
    if (!inserted) {
      it->second += coefficient;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, int(e.sum()));
    return deg;
  }

  // Per-variable degrees.
  ExponentVec max_degrees() const {
    ExponentVec d = ExponentVec::Zero(num_vars_);
    for (const auto& [e, c] : terms_) d = d.cwiseMax(e);
    return d;
  }

 private:
  int num_vars_;
  TermMap terms_;
};

namespace detail {
template <typename Scalar>
Scalar pow_int(Scalar base, int e) {
  Scalar acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}
}  // namespace detail

// p(x) for x > 0 componentwise (argument checked).
template <typename Scalar>
Scalar eval(const SparsePolynomial<Scalar>& p, const Vector<Scalar>& x) {
  if (x.size() != p.num_vars()) {
    throw std::invalid_argument("eval: point dimension mismatch");
  }
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] > Scalar(0))) {
      throw std::invalid_argument("eval: point must be strictly positive");
    }
  }
  Scalar total(0);
  for (const auto& [e, c] : p.terms()) {
    Scalar m = c;
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] != 0) m *= detail::pow_int(x[i], e[i]);
    }
    total += m;
  }
  return total;
}

// Component i is sum over terms of coefficient * e_i, i.e. (d/dx_i p)(1).
template <typename Scalar>
Vector<Scalar> gradient_at_one(const SparsePolynomial<Scalar>& p) {
  Vector<Scalar> g = Vector<Scalar>::Zero(p.num_vars());
  for (const auto& [e, c] : p.terms()) {
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] != 0) g[i] += c * Scalar(e[i]);
    }
  }
  return g;
}

template <typename Scalar>
Scalar coefficient(const SparsePolynomial<Scalar>& p,
                   const ExponentVec& kappa) {
  if (kappa.size() != p.num_vars()) {
    throw std::invalid_argument("coefficient: exponent length mismatch");
  }
  auto it = p.terms().find(kappa);
  return it == p.terms().end() ? Scalar(0) : it->second;
}

template <typename Scalar>
SparsePolynomial<Scalar> operator*(const SparsePolynomial<Scalar>& a,
                                   const SparsePolynomial<Scalar>& b) {
  if (a.num_vars() != b.num_vars()) {
    throw std::invalid_argument("product: variable count mismatch");
  }
  SparsePolynomial<Scalar> out(a.num_vars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      out.add_term(ea + eb, ca * cb);
    }
  }
  return out;
}

template <typename Scalar>
SparsePolynomial<Scalar> operator*(const Scalar& s,
                                   const SparsePolynomial<Scalar>& p) {
  SparsePolynomial<Scalar> out(p.num_vars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, s * c);
  return out;
}

// One substitution target: either a non-negative constant or a variable
// index in the output polynomial.
template <typename Scalar>
struct SubstTarget {
  enum class Kind { constant, variable };
  Kind kind;
  Scalar value{};
  int target = -1;

  static SubstTarget to_constant(const Scalar& v) {
    return {Kind::constant, v, -1};
  }
  static SubstTarget to_variable(int idx) {
    return {Kind::variable, Scalar(0), idx};
  }
};

// Applies a partial substitution. Variables absent from the map stay
// polynomial variables: they are assigned fresh output indices (in input
// order) after the largest explicit target. Coefficients merge additively
// and exact zeros are dropped.
template <typename Scalar>
SparsePolynomial<Scalar> substitute(
    const SparsePolynomial<Scalar>& p,
    const std::map<int, SubstTarget<Scalar>>& assignment) {
  const int n = p.num_vars();
  int max_target = -1;
  for (const auto& [var, sub] : assignment) {
    if (var < 0 || var >= n) {
      throw std::invalid_argument("substitute: variable index out of range");
    }
    if (sub.kind == SubstTarget<Scalar>::Kind::constant) {
      if (sub.value < Scalar(0)) {
        throw std::invalid_argument("substitute: negative constant");
      }
    } else {
      if (sub.target < 0) {
        throw std::invalid_argument("substitute: negative target index");
      }
      max_target = std::max(max_target, sub.target);
    }
  }

  // -1 marks "becomes a constant"; otherwise the output variable index.
  std::vector<int> target_of(n, -1);
  std::vector<bool> is_const(n, false);
  std::vector<Scalar> const_val(n, Scalar(0));
  int next_fresh = max_target + 1;
  for (int v = 0; v < n; ++v) {
    auto it = assignment.find(v);
    if (it == assignment.end()) {
      target_of[v] = next_fresh++;
    } else if (it->second.kind == SubstTarget<Scalar>::Kind::variable) {
      target_of[v] = it->second.target;
    } else {
      is_const[v] = true;
      const_val[v] = it->second.value;
    }
  }
  const int out_n = next_fresh;

  SparsePolynomial<Scalar> out(out_n);
  for (const auto& [e, c] : p.terms()) {
    Scalar coef = c;
    ExponentVec oe = ExponentVec::Zero(out_n);
    bool dead = false;
    for (int v = 0; v < n && !dead; ++v) {
      if (e[v] == 0) continue;
      if (is_const[v]) {
        if (const_val[v] == Scalar(0)) {
          dead = true;
        } else {
          coef *= detail::pow_int(const_val[v], e[v]);
        }
      } else {
        oe[target_of[v]] += e[v];
      }
    }
    if (!dead) out.add_term(oe, coef);
  }
  return out;
}

// Formal partial derivative with respect to variable i.
template <typename Scalar>
SparsePolynomial<Scalar> partial_derivative(const SparsePolynomial<Scalar>& p,
                                            int i) {
  if (i < 0 || i >= p.num_vars()) {
    throw std::invalid_argument("partial_derivative: index out of range");
  }
  SparsePolynomial<Scalar> out(p.num_vars());
  for (const auto& [e, c] : p.terms()) {
    if (e[i] == 0) continue;
    ExponentVec d = e;
    d[i] -= 1;
    out.add_term(d, c * Scalar(e[i]));
  }
  return out;
}

// Polarization: each variable of degree D is replaced by a block of D
// fresh multiaffine variables, x_i^j mapping to e_j(block)/binom(D, j).
// Collapsing every block back to a common variable recovers the input.
template <typename Scalar>
struct Polarization {
  SparsePolynomial<Scalar> poly;
  // blocks[i] = [first, last) range of output variables for input var i.
  std::vector<std::pair<int, int>> blocks;
};

namespace detail {

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Enumerates k-subsets of {0..n-1}, invoking fn with each index list.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

template <typename Scalar>
Polarization<Scalar> polarize(const SparsePolynomial<Scalar>& p) {
  const int n = p.num_vars();
  const ExponentVec degs = p.max_degrees();
  std::vector<std::pair<int, int>> blocks(n);
  int offset = 0;
  for (int i = 0; i < n; ++i) {
    blocks[i] = {offset, offset + degs[i]};
    offset += degs[i];
  }
  const int out_n = offset;

  SparsePolynomial<Scalar> out(out_n);
  for (const auto& [e, c] : p.terms()) {
    // Terms of the product over variables of e_{e_i}(block_i)/binom.
    std::vector<ExponentVec> partial{ExponentVec::Zero(out_n)};
    Scalar coef = c;
    for (int i = 0; i < n; ++i) {
      if (degs[i] == 0) continue;
      coef /= Scalar(detail::binomial(degs[i], e[i]));
      std::vector<ExponentVec> next;
      detail::for_each_subset(degs[i], e[i], [&](const std::vector<int>& s) {
        for (const auto& base : partial) {
          ExponentVec v = base;
          for (int j : s) v[blocks[i].first + j] = 1;
          next.push_back(std::move(v));
        }
      });
      partial = std::move(next);
    }
    for (const auto& v : partial) out.add_term(v, coef);
  }
  return {std::move(out), std::move(blocks)};
}

// Inverse of polarize: sends every variable of block i back to x_i.
template <typename Scalar>
SparsePolynomial<Scalar> collapse(const Polarization<Scalar>& pol, int n) {
  std::map<int, SubstTarget<Scalar>> assignment;
  for (int i = 0; i < n; ++i) {
    for (int v = pol.blocks[i].first; v < pol.blocks[i].second; ++v) {
      assignment[v] = SubstTarget<Scalar>::to_variable(i);
    }
  }
  auto collapsed = substitute(pol.poly, assignment);
  // Blocks of degree-0 variables vanish; reattach the right variable count.
  if (collapsed.num_vars() == n) return collapsed;
  SparsePolynomial<Scalar> out(n);
  for (const auto& [e, c] : collapsed.terms()) {
    ExponentVec padded = ExponentVec::Zero(n);
    padded.head(e.size()) = e;
    out.add_term(padded, c);
  }
  return out;
}

template <typename To, typename From>
SparsePolynomial<To> convert_poly(const SparsePolynomial<From>& p) {
  SparsePolynomial<To> out(p.num_vars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, static_cast<To>(c));
  return out;
}

using Polynomial = SparsePolynomial<double>;
using RationalPolynomial = SparsePolynomial<Rational>;

inline SparsePolynomial<double> to_double_poly(const RationalPolynomial& p) {
  SparsePolynomial<double> out(p.num_vars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, to_double(c));
  return out;
}

}  // namespace capbound
