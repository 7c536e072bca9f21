#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corners/lattice.hpp"
#include "corners/rational.hpp"

namespace corners {

/** Marked finite set: m coordinates 0..m-1 with a marked subset.
 * The model H^I is R^{marked} x R_+^{unmarked}; the isomorphism class is
 * <m|k> where k = |marked|.
 */
struct MarkedFiniteSet {
  int m = 0;
  uint32_t marked = 0;

  MarkedFiniteSet() = default;
  MarkedFiniteSet(int m_, uint32_t marked_) : m(m_), marked(marked_) {
    if (m < 0 || m > 16) throw ShapeError("marked set size out of range (0..16)");
    if (m < 32 && (marked >> m) != 0) throw ShapeError("marked subset out of range");
  }

  /** Normal form <m|k>: coordinates 0..k-1 marked. */
  static MarkedFiniteSet mk(int m, int k) {
    if (k < 0 || k > m) throw ShapeError("<m|k> requires 0 <= k <= m");
    return MarkedFiniteSet(m, k == 0 ? 0u : (k == 32 ? ~0u : (1u << k) - 1));
  }

  uint32_t full_mask() const { return m == 0 ? 0u : (m == 32 ? ~0u : (1u << m) - 1); }
  uint32_t unmarked() const { return full_mask() & ~marked; }
  int k() const { return popcount32(marked); }
  bool operator==(const MarkedFiniteSet& o) const { return m == o.m && marked == o.marked; }
};

using Point = std::vector<Rational>;

inline uint32_t support(const Point& p) {
  uint32_t s = 0;
  for (size_t i = 0; i < p.size(); ++i)
    if (!p[i].is_zero()) s |= 1u << i;
  return s;
}

/** Membership in the model H^I: unmarked coordinates nonnegative. */
inline bool in_model(const MarkedFiniteSet& I, const Point& p) {
  if ((int)p.size() != I.m) return false;
  for (int i = 0; i < I.m; ++i)
    if (!((I.marked >> i) & 1) && p[i].sign() < 0) return false;
  return true;
}

/** Arrangement of marked finite sets: a meet-preserving assignment from a
 * shape lattice to coordinate subsets of an ambient marked set, with
 * markings inherited. All model geometry downstream (jet dimensions,
 * strata, scopes) derives from this table.
 */
struct SetArrangement {
  FiniteLattice shape;
  MarkedFiniteSet ambient;
  std::vector<uint32_t> assign;  // per shape element, coordinate subset

  SetArrangement() = default;
  SetArrangement(FiniteLattice shape_, MarkedFiniteSet ambient_, std::vector<uint32_t> assign_)
      : shape(std::move(shape_)), ambient(ambient_), assign(std::move(assign_)) {
    if ((int)assign.size() != shape.size()) throw ShapeError("arrangement assignment size mismatch");
  }

  /** Constant (trivial) arrangement: every shape element gets the ambient. */
  static SetArrangement constant(FiniteLattice shape, MarkedFiniteSet ambient) {
    std::vector<uint32_t> a(shape.size(), ambient.full_mask());
    return SetArrangement(std::move(shape), ambient, std::move(a));
  }

  uint32_t at(int s) const { return assign[s]; }
  MarkedFiniteSet marked_set_at(int s) const {
    return MarkedFiniteSet(ambient.m, ambient.marked & assign[s]);  // same indexing, restricted
  }
};

struct ArrangementViolation {
  std::string kind;  // "monotone" | "meet" | "ambient"
  int s = -1, t = -1;
  std::string detail;
};

/** Report-valued validation: monotonicity, meet-preservation, and that the
 * top of the shape carries the full ambient set. */
inline std::vector<ArrangementViolation> validate(const SetArrangement& A) {
  std::vector<ArrangementViolation> out;
  const auto& S = A.shape;
  for (int s = 0; s < S.size(); ++s)
    for (int t = 0; t < S.size(); ++t) {
      if (S.leq(s, t) && (A.assign[s] & ~A.assign[t]) != 0)
        out.push_back({"monotone", s, t, S.name(s) + " <= " + S.name(t) + " but I(s) not a subset of I(t)"});
      if (s < t && A.assign[S.meet(s, t)] != (A.assign[s] & A.assign[t]))
        out.push_back({"meet", s, t,
                       "I(" + S.name(s) + " ^ " + S.name(t) + ") != I(" + S.name(s) + ") ∩ I(" + S.name(t) + ")"});
    }
  if (A.assign[S.top()] != A.ambient.full_mask())
    out.push_back({"ambient", S.top(), -1, "I(max S) != |I|"});
  return out;
}

inline bool is_valid(const SetArrangement& A) { return validate(A).empty(); }

/** Scope of a point: the least shape element whose subspace contains it.
 * Exists because I(max) is the full ambient set. */
inline int scope(const SetArrangement& A, const Point& p) {
  if (!in_model(A.ambient, p)) throw DomainError("scope: point outside the model");
  uint32_t supp = support(p);
  int acc = A.shape.top();
  for (int s = 0; s < A.shape.size(); ++s)
    if ((supp & ~A.assign[s]) == 0) acc = A.shape.meet(acc, s);
  return acc;
}

/** Neatness criterion at model level: every I(s) contains all unmarked
 * ambient coordinates. */
inline bool is_neat(const SetArrangement& A) {
  uint32_t unm = A.ambient.unmarked();
  for (uint32_t a : A.assign)
    if ((unm & ~a) != 0) return false;
  return true;
}

/** Product of two shape lattices; pair (s,t) gets index s*|T|+t. */
struct ProductLattice {
  FiniteLattice lattice;
  int left_size = 0, right_size = 0;
  int index_of(int s, int t) const { return s * right_size + t; }
  std::pair<int, int> split(int i) const { return {i / right_size, i % right_size}; }
};

inline ProductLattice product_lattice(const FiniteLattice& S, const FiniteLattice& T) {
  int n = S.size() * T.size();
  if (n > 64) throw ShapeError("product lattice exceeds 64 elements");
  std::vector<uint64_t> rows(n, 0);
  std::vector<std::string> names(n);
  for (int a = 0; a < n; ++a) {
    int s = a / T.size(), t = a % T.size();
    names[a] = "(" + S.name(s) + "," + T.name(t) + ")";
    for (int b = 0; b < n; ++b)
      if (S.leq(s, b / T.size()) && T.leq(t, b % T.size())) rows[a] |= 1ull << b;
  }
  ProductLattice out;
  out.lattice = FiniteLattice::from_poset(FinitePoset(n, rows, names));
  out.left_size = S.size();
  out.right_size = T.size();
  return out;
}

/** Product arrangement over S x T: (s,t) gets I(s) ⊔ J(t), with J's
 * coordinates shifted past I's ambient. */
inline SetArrangement product(const SetArrangement& A, const SetArrangement& B) {
  ProductLattice P = product_lattice(A.shape, B.shape);
  int m = A.ambient.m + B.ambient.m;
  MarkedFiniteSet ambient(m, A.ambient.marked | (B.ambient.marked << A.ambient.m));
  std::vector<uint32_t> assign(P.lattice.size());
  for (int i = 0; i < P.lattice.size(); ++i) {
    auto [s, t] = P.split(i);
    assign[i] = A.assign[s] | (B.assign[t] << A.ambient.m);
  }
  return SetArrangement(P.lattice, ambient, std::move(assign));
}

/** Checks that mu : T -> S preserves meets and joins. */
inline bool is_lattice_hom(const FiniteLattice& T, const FiniteLattice& S, const std::vector<int>& mu) {
  if ((int)mu.size() != T.size()) return false;
  for (int v : mu)
    if (v < 0 || v >= S.size()) return false;
  for (int a = 0; a < T.size(); ++a)
    for (int b = 0; b < T.size(); ++b) {
      if (mu[T.meet(a, b)] != S.meet(mu[a], mu[b])) return false;
      if (mu[T.join(a, b)] != S.join(mu[a], mu[b])) return false;
    }
  return true;
}

/** Restriction along a lattice homomorphism mu : T -> S. The ambient of the
 * result is I(mu(max T)), re-indexed to 0..m'-1 with markings inherited. */
inline SetArrangement restrict(const SetArrangement& A, const FiniteLattice& T, const std::vector<int>& mu) {
  if (!is_lattice_hom(T, A.shape, mu)) throw ValidationError("restrict: not a lattice homomorphism");
  uint32_t amb_mask = A.assign[mu[T.top()]];
  std::vector<int> reindex(A.ambient.m, -1);
  int m2 = 0;
  uint32_t marked2 = 0;
  for (int i = 0; i < A.ambient.m; ++i)
    if ((amb_mask >> i) & 1) {
      reindex[i] = m2;
      if ((A.ambient.marked >> i) & 1) marked2 |= 1u << m2;
      ++m2;
    }
  std::vector<uint32_t> assign(T.size(), 0);
  for (int t = 0; t < T.size(); ++t)
    for (int i = 0; i < A.ambient.m; ++i)
      if (((A.assign[mu[t]] >> i) & 1) && reindex[i] >= 0) assign[t] |= 1u << reindex[i];
  return SetArrangement(T, MarkedFiniteSet(m2, marked2), std::move(assign));
}

}  // namespace corners
