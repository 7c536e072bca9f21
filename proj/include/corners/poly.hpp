#pragma once

#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "corners/rational.hpp"

namespace corners {

using Monomial = std::vector<int>;  // exponent vector, one entry per variable

inline int total_degree(const Monomial& a) { return std::accumulate(a.begin(), a.end(), 0); }

inline uint32_t monomial_support(const Monomial& a) {
  uint32_t s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0) s |= 1u << i;
  return s;
}

/** Graded-lexicographic order: by total degree, then lexicographic. Basis
 * enumeration and coefficient storage both use this order so that indices
 * are reproducible. */
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

/** All monomials in nvars variables of total degree at most max_deg, in
 * graded-lex order. */
inline void enumerate_monomials(int nvars, int max_deg, std::vector<Monomial>& out) {
  std::vector<Monomial> all;
  Monomial cur(nvars, 0);
  struct Rec {
    int nvars;
    std::vector<Monomial>* all;
    void go(Monomial& cur, int pos, int left) {
      if (pos == nvars) {
        all->push_back(cur);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur[pos] = e;
        go(cur, pos + 1, left - e);
      }
      cur[pos] = 0;
    }
  } rec{nvars, &all};
  rec.go(cur, 0, max_deg);
  std::sort(all.begin(), all.end(), GradedLex());
  out = std::move(all);
}

/** Polynomial with exact rational coefficients, truncated at a degree bound.
 * Terms above the bound are discarded by every operation. Zero coefficients
 * are never stored.
 */
class TruncatedPoly {
 public:
  TruncatedPoly() = default;
  TruncatedPoly(int nvars, int bound) : nvars_(nvars), bound_(bound) {}

  static TruncatedPoly constant(int nvars, int bound, const Rational& c) {
    TruncatedPoly p(nvars, bound);
    p.set_coeff(Monomial(nvars, 0), c);
    return p;
  }

  static TruncatedPoly variable(int nvars, int bound, int i) {
    TruncatedPoly p(nvars, bound);
    Monomial a(nvars, 0);
    a[i] = 1;
    p.set_coeff(a, Rational(1));
    return p;
  }

  int nvars() const { return nvars_; }
  int bound() const { return bound_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational, GradedLex>& terms() const { return terms_; }

  Rational coeff(const Monomial& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void set_coeff(const Monomial& a, const Rational& c) {
    if ((int)a.size() != nvars_) throw ShapeError("monomial arity mismatch");
    if (total_degree(a) > bound_) return;  // silently truncated
    if (c.is_zero())
      terms_.erase(a);
    else
      terms_[a] = c;
  }

  void add_coeff(const Monomial& a, const Rational& c) { set_coeff(a, coeff(a) + c); }

  int degree() const {
    int d = 0;
    for (auto& [a, c] : terms_) d = std::max(d, total_degree(a));
    return d;
  }

  TruncatedPoly operator+(const TruncatedPoly& o) const {
    check_compatible(o);
    TruncatedPoly r = *this;
    for (auto& [a, c] : o.terms_) r.add_coeff(a, c);
    return r;
  }

  TruncatedPoly operator-(const TruncatedPoly& o) const {
    check_compatible(o);
    TruncatedPoly r = *this;
    for (auto& [a, c] : o.terms_) r.add_coeff(a, -c);
    return r;
  }

  TruncatedPoly operator*(const TruncatedPoly& o) const {
    check_compatible(o);
    TruncatedPoly r(nvars_, bound_);
    for (auto& [a, ca] : terms_)
      for (auto& [b, cb] : o.terms_) {
        if (total_degree(a) + total_degree(b) > bound_) continue;
        Monomial ab(nvars_);
        for (int i = 0; i < nvars_; ++i) ab[i] = a[i] + b[i];
        r.add_coeff(ab, ca * cb);
      }
    return r;
  }

  TruncatedPoly scaled(const Rational& c) const {
    TruncatedPoly r(nvars_, bound_);
    if (c.is_zero()) return r;
    for (auto& [a, v] : terms_) r.terms_[a] = v * c;
    return r;
  }

  TruncatedPoly pow(int e) const {
    TruncatedPoly acc = constant(nvars_, bound_, Rational(1));
    for (int i = 0; i < e; ++i) acc = acc * *this;
    return acc;
  }

  /** Re-bound to a new truncation degree (drops higher terms if lower). */
  TruncatedPoly rebound(int new_bound) const {
    TruncatedPoly r(nvars_, new_bound);
    for (auto& [a, c] : terms_)
      if (total_degree(a) <= new_bound) r.terms_[a] = c;
    return r;
  }

  TruncatedPoly partial_derivative(int i) const {
    TruncatedPoly r(nvars_, bound_);
    for (auto& [a, c] : terms_)
      if (a[i] > 0) {
        Monomial b = a;
        b[i] -= 1;
        r.add_coeff(b, c * Rational(a[i]));
      }
    return r;
  }

  /** Substitutes x_i -> images[i]; the result lives at out_bound. Products
   * are truncated along the way, which is exact only when the constant terms
   * of the images vanish or out_bound is large enough — the callers enforce
   * whichever they need. */
  TruncatedPoly subst(const std::vector<TruncatedPoly>& images, int out_bound) const {
    if ((int)images.size() != nvars_) throw ShapeError("substitution arity mismatch");
    int out_vars = images.empty() ? 0 : images[0].nvars_;
    TruncatedPoly r(out_vars, out_bound);
    for (auto& [a, c] : terms_) {
      TruncatedPoly term = TruncatedPoly::constant(out_vars, out_bound, c);
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < a[i]; ++e) term = term * images[i].rebound(out_bound);
      r = r + term;
    }
    return r;
  }

  /** Substitute x_i = 0. */
  TruncatedPoly restrict_zero(int i) const {
    TruncatedPoly r(nvars_, bound_);
    for (auto& [a, c] : terms_)
      if (a[i] == 0) r.terms_[a] = c;
    return r;
  }

  Rational eval(const std::vector<Rational>& p) const {
    if ((int)p.size() != nvars_) throw ShapeError("evaluation arity mismatch");
    Rational acc(0);
    for (auto& [a, c] : terms_) {
      Rational t = c;
      for (int i = 0; i < nvars_; ++i)
        if (a[i] > 0) t *= p[i].pow(a[i]);
      acc += t;
    }
    return acc;
  }

  double eval_double(const std::vector<double>& p) const {
    double acc = 0;
    for (auto& [a, c] : terms_) {
      double t = c.to_double();
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < a[i]; ++e) t *= p[i];
      acc += t;
    }
    return acc;
  }

  bool operator==(const TruncatedPoly& o) const {
    return nvars_ == o.nvars_ && bound_ == o.bound_ && terms_ == o.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [a, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += c.str();
      for (int i = 0; i < nvars_; ++i)
        if (a[i] > 0) s += "*x" + std::to_string(i + 1) + (a[i] > 1 ? "^" + std::to_string(a[i]) : "");
    }
    return s;
  }

 private:
  int nvars_ = 0, bound_ = 0;
  std::map<Monomial, Rational, GradedLex> terms_;

  void check_compatible(const TruncatedPoly& o) const {
    if (nvars_ != o.nvars_ || bound_ != o.bound_) throw ShapeError("polynomial shape mismatch");
  }
};

/** Target-indexed tuple of truncated polynomials over a shared source and
 * degree bound: a polynomial map R^source -> R^target truncated at r. */
struct TruncatedPolyMap {
  int source_vars = 0;
  int bound = 0;
  std::vector<TruncatedPoly> comp;

  TruncatedPolyMap() = default;
  TruncatedPolyMap(int src, int r, std::vector<TruncatedPoly> components)
      : source_vars(src), bound(r), comp(std::move(components)) {
    for (auto& c : comp)
      if (c.nvars() != src || c.bound() != r) throw ShapeError("poly map component shape mismatch");
  }

  static TruncatedPolyMap zero(int src, int tgt, int r) {
    return TruncatedPolyMap(src, r, std::vector<TruncatedPoly>(tgt, TruncatedPoly(src, r)));
  }

  static TruncatedPolyMap identity(int n, int r) {
    std::vector<TruncatedPoly> c;
    for (int i = 0; i < n; ++i) c.push_back(TruncatedPoly::variable(n, r, i));
    return TruncatedPolyMap(n, r, std::move(c));
  }

  int target_dim() const { return (int)comp.size(); }

  bool origin_preserving() const {
    Monomial zero_mon(source_vars, 0);
    for (auto& c : comp)
      if (!c.coeff(zero_mon).is_zero()) return false;
    return true;
  }

  std::vector<Rational> eval(const std::vector<Rational>& p) const {
    std::vector<Rational> out;
    out.reserve(comp.size());
    for (auto& c : comp) out.push_back(c.eval(p));
    return out;
  }

  std::vector<double> eval_double(const std::vector<double>& p) const {
    std::vector<double> out;
    out.reserve(comp.size());
    for (auto& c : comp) out.push_back(c.eval_double(p));
    return out;
  }

  TruncatedPolyMap operator+(const TruncatedPolyMap& o) const {
    if (source_vars != o.source_vars || bound != o.bound || comp.size() != o.comp.size())
      throw ShapeError("poly map sum shape mismatch");
    std::vector<TruncatedPoly> c;
    for (size_t i = 0; i < comp.size(); ++i) c.push_back(comp[i] + o.comp[i]);
    return TruncatedPolyMap(source_vars, bound, std::move(c));
  }

  TruncatedPolyMap rebound(int r) const {
    std::vector<TruncatedPoly> c;
    for (auto& x : comp) c.push_back(x.rebound(r));
    return TruncatedPolyMap(source_vars, r, std::move(c));
  }

  bool operator==(const TruncatedPolyMap& o) const {
    return source_vars == o.source_vars && bound == o.bound && comp == o.comp;
  }
};

/** Truncated composition g ∘ f. Requires f(0) = 0 so that discarding terms
 * above the bound loses nothing below it. */
inline TruncatedPolyMap truncate_compose(const TruncatedPolyMap& g, const TruncatedPolyMap& f) {
  if (g.source_vars != f.target_dim()) throw ShapeError("composition arity mismatch");
  if (g.bound != f.bound) throw ShapeError("composition bound mismatch");
  if (!f.origin_preserving()) throw DomainError("truncate_compose: inner map must preserve the origin");
  std::vector<TruncatedPoly> out;
  for (auto& gc : g.comp) out.push_back(gc.subst(f.comp, g.bound));
  return TruncatedPolyMap(f.source_vars, g.bound, std::move(out));
}

/** Full composition (no truncation loss): computed at degree deg(g)*deg(f),
 * then cut back. Used as the independent oracle for truncate_compose. */
inline TruncatedPolyMap full_compose_then_truncate(const TruncatedPolyMap& g, const TruncatedPolyMap& f,
                                                   int final_bound) {
  int big = 0;
  for (auto& c : g.comp) big = std::max(big, c.degree());
  int df = 0;
  for (auto& c : f.comp) df = std::max(df, c.degree());
  big = std::max(1, big) * std::max(1, df);
  std::vector<TruncatedPoly> images;
  for (auto& c : f.comp) images.push_back(c.rebound(big));
  std::vector<TruncatedPoly> out;
  for (auto& gc : g.comp) out.push_back(gc.rebound(big).subst(images, big).rebound(final_bound));
  return TruncatedPolyMap(f.source_vars, final_bound, std::move(out));
}

/** Jet of f at p: substitutes x -> x + p and re-expands. A degree-1 shift
 * never exceeds the degree bound, so this is exact: the output coefficient
 * at alpha equals (d^alpha f)(p) / alpha!. */
inline TruncatedPoly taylor_shift(const TruncatedPoly& f, const std::vector<Rational>& p) {
  if ((int)p.size() != f.nvars()) throw ShapeError("taylor shift arity mismatch");
  std::vector<TruncatedPoly> images;
  for (int i = 0; i < f.nvars(); ++i) {
    TruncatedPoly xi = TruncatedPoly::variable(f.nvars(), f.bound(), i);
    xi.add_coeff(Monomial(f.nvars(), 0), p[i]);
    images.push_back(xi);
  }
  return f.subst(images, f.bound());
}

inline TruncatedPolyMap taylor_shift(const TruncatedPolyMap& f, const std::vector<Rational>& p) {
  std::vector<TruncatedPoly> out;
  for (auto& c : f.comp) out.push_back(taylor_shift(c, p));
  return TruncatedPolyMap(f.source_vars, f.bound, std::move(out));
}

}  // namespace corners
