#pragma once

#include <map>
#include <utility>
#include <vector>

#include "corners/arrangement.hpp"
#include "corners/poly.hpp"

namespace corners {

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/** dim P^r(I) for |I| = m. */
inline long long jet_algebra_dim(int m, int r) { return binomial(m + r, m); }

/** dim P^r(I,J)_0 for |I| = m, |J| = n (origin-preserving maps). */
inline long long jet_map_dim0(int m, int n, int r) { return n * (binomial(m + r, m) - 1); }

/** The coefficient-vanishing criterion, stated positively: the coefficient
 * slot (j, alpha) is allowed in P^r(I,J) iff every shape element whose
 * coordinate set contains supp(alpha) also contains j in its target set. */
inline bool pair_allowed(const SetArrangement& I, const SetArrangement& J, int j, const Monomial& alpha) {
  uint32_t supp = monomial_support(alpha);
  for (int s = 0; s < I.shape.size(); ++s)
    if ((supp & ~I.at(s)) == 0 && !((J.at(s) >> j) & 1)) return false;
  return true;
}

/** Coordinate basis of the relative polynomial space P^r(I,J): the allowed
 * (target, multi-index) slots, ordered by (j, graded-lex alpha). */
struct RelativeJetBasis {
  int r = 0;
  std::vector<std::pair<int, Monomial>> allowed;

  long long dim() const { return (long long)allowed.size(); }

  long long dim_homogeneous(int d) const {
    long long c = 0;
    for (auto& [j, a] : allowed)
      if (total_degree(a) == d) ++c;
    return c;
  }

  /** Excludes constant slots: basis of the origin-preserving part. */
  long long dim0() const {
    long long c = 0;
    for (auto& [j, a] : allowed)
      if (total_degree(a) >= 1) ++c;
    return c;
  }
};

inline RelativeJetBasis relative_basis(const SetArrangement& I, const SetArrangement& J, int r) {
  if (!I.shape.same_shape(J.shape)) throw ShapeError("relative basis: arrangements over different shapes");
  RelativeJetBasis out;
  out.r = r;
  std::vector<Monomial> mons;
  enumerate_monomials(I.ambient.m, r, mons);
  for (int j = 0; j < J.ambient.m; ++j)
    for (auto& a : mons)
      if (pair_allowed(I, J, j, a)) out.allowed.emplace_back(j, a);
  return out;
}

/** Degree-1 dimension by the closed formula: sum over shape elements of
 * #{i : s_I(i) = s} * |J(s)|, where s_I(i) is the least element whose
 * coordinate set contains i. Cross-checks relative_basis at degree 1. */
inline long long rel1jet_dim_formula(const SetArrangement& I, const SetArrangement& J) {
  if (!I.shape.same_shape(J.shape)) throw ShapeError("dimension formula: shape mismatch");
  long long total = 0;
  for (int i = 0; i < I.ambient.m; ++i) {
    int s_min = -1;
    for (int s = 0; s < I.shape.size(); ++s)
      if ((I.at(s) >> i) & 1) s_min = s_min < 0 ? s : I.shape.meet(s_min, s);
    if (s_min < 0) continue;  // coordinate not in I(max), cannot happen for valid arrangements
    total += popcount32(J.at(s_min));
  }
  return total;
}

/** Coefficient criterion for membership in P^r(I,J). */
inline bool is_relative(const TruncatedPolyMap& f, const SetArrangement& I, const SetArrangement& J) {
  if (f.source_vars != I.ambient.m || f.target_dim() != J.ambient.m)
    throw ShapeError("is_relative: dimension mismatch");
  if (!I.shape.same_shape(J.shape)) throw ShapeError("is_relative: shape mismatch");
  for (int j = 0; j < f.target_dim(); ++j)
    for (auto& [a, c] : f.comp[j].terms())
      if (!pair_allowed(I, J, j, a)) return false;
  return true;
}

/** Restriction of an arrangement to an interval [lo, hi] of its shape; the
 * ambient becomes I(hi), re-indexed. */
inline SetArrangement interval_restrict(const SetArrangement& A, int lo, int hi) {
  if (!A.shape.leq(lo, hi)) throw DomainError("interval_restrict: not an interval");
  std::vector<int> members;
  for (int s = 0; s < A.shape.size(); ++s)
    if (A.shape.leq(lo, s) && A.shape.leq(s, hi)) members.push_back(s);
  int n = (int)members.size();
  std::vector<uint64_t> rows(n, 0);
  std::vector<std::string> names(n);
  for (int a = 0; a < n; ++a) {
    names[a] = A.shape.name(members[a]);
    for (int b = 0; b < n; ++b)
      if (A.shape.leq(members[a], members[b])) rows[a] |= 1ull << b;
  }
  FiniteLattice sub = FiniteLattice::from_poset(FinitePoset(n, rows, names));
  std::vector<int> mu = members;  // inclusion is a lattice hom on an interval
  return restrict(A, sub, mu);
}

/** Multijet index set |n| and the fiber dimension of J^r_n: the sum over
 * supported intervals kappa of n(kappa) * dim P^r(I_kappa, J_kappa)_0. */
struct MultijetIndex {
  std::vector<std::pair<std::pair<int, int>, int>> index;  // ((lo,hi), copy)
  long long fiber_dim = 0;
  std::vector<std::pair<std::pair<int, int>, long long>> interval_dims;
};

inline MultijetIndex multijet_index(const SetArrangement& I, const SetArrangement& J, int r,
                                    const std::map<std::pair<int, int>, int>& n) {
  if (!I.shape.same_shape(J.shape)) throw ShapeError("multijet index: shape mismatch");
  MultijetIndex out;
  for (auto& [kappa, count] : n) {
    if (count < 0) throw DomainError("multijet multiplicity must be nonnegative");
    if (count == 0) continue;
    if (!I.shape.leq(kappa.first, kappa.second)) throw DomainError("multijet index: not an interval");
    SetArrangement Ik = interval_restrict(I, kappa.first, kappa.second);
    SetArrangement Jk = interval_restrict(J, kappa.first, kappa.second);
    long long d = relative_basis(Ik, Jk, r).dim0();
    out.interval_dims.emplace_back(kappa, d);
    for (int i = 1; i <= count; ++i) out.index.emplace_back(kappa, i);
    out.fiber_dim += (long long)count * d;
  }
  return out;
}

}  // namespace corners
