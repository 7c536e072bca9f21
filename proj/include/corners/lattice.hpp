#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corners/rational.hpp"

namespace corners {

inline int popcount32(uint32_t m) { return __builtin_popcount(m); }

/** Finite poset on elements 0..n-1, relation stored as bitmask rows.
 * Bit j of up_[i] is set iff i <= j. Capped at 64 elements.
 */
struct FinitePoset {
  int n = 0;
  std::vector<uint64_t> up;  // up[i] bit j: i <= j
  std::vector<std::string> names;

  FinitePoset() = default;
  FinitePoset(int n_, std::vector<uint64_t> rows, std::vector<std::string> names_ = {})
      : n(n_), up(std::move(rows)), names(std::move(names_)) {
    if (n < 0 || n > 64) throw ShapeError("poset size out of range (0..64)");
    if ((int)up.size() != n) throw ShapeError("poset relation row count mismatch");
    if (names.empty())
      for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    validate();
  }

  static FinitePoset chain(int n) {
    std::vector<uint64_t> rows(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) rows[i] |= 1ull << j;
    return FinitePoset(n, rows);
  }

  static FinitePoset antichain_with_top(int k) {  // k minimal elements below one top
    int n = k + 1;
    std::vector<uint64_t> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = (1ull << i) | (1ull << k);
    return FinitePoset(n, rows);
  }

  bool leq(int i, int j) const { return (up[i] >> j) & 1; }

  std::optional<int> maximum() const {
    for (int i = 0; i < n; ++i)
      if (popcount64(up[i]) == 1) {
        // i has only itself above; it is THE maximum iff everything is below it
        bool all = true;
        for (int j = 0; j < n; ++j)
          if (!leq(j, i)) all = false;
        if (all) return i;
      }
    return std::nullopt;
  }

  std::optional<int> minimum() const {
    for (int i = 0; i < n; ++i) {
      bool all = true;
      for (int j = 0; j < n; ++j)
        if (!leq(i, j)) all = false;
      if (all) return i;
    }
    return std::nullopt;
  }

  static int popcount64(uint64_t m) { return __builtin_popcountll(m); }

 private:
  void validate() const {
    for (int i = 0; i < n; ++i) {
      if (n < 64 && (up[i] >> n) != 0) throw ShapeError("poset relation references missing element");
      if (!leq(i, i)) throw ShapeError("poset relation not reflexive");
      for (int j = 0; j < n; ++j) {
        if (i != j && leq(i, j) && leq(j, i)) throw ShapeError("poset relation not antisymmetric");
        if (leq(i, j))
          for (int k = 0; k < n; ++k)
            if (leq(j, k) && !leq(i, k)) throw ShapeError("poset relation not transitive");
      }
    }
  }
};

/** Finite lattice: a poset with meet/join tables.
 *
 * Construction is the validation gate: from_poset throws unless every pair
 * has a greatest lower bound and a least upper bound, and the resulting
 * tables pass the commutative/associative/idempotent/absorption axioms
 * exhaustively. Invalid lattices are unrepresentable downstream.
 */
class FiniteLattice {
 public:
  FiniteLattice() = default;

  static FiniteLattice from_poset(const FinitePoset& p) {
    FiniteLattice L;
    L.poset_ = p;
    int n = p.n;
    if (n == 0) throw ShapeError("lattice must be nonempty");
    L.meet_.assign(n, std::vector<int16_t>(n, -1));
    L.join_.assign(n, std::vector<int16_t>(n, -1));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        L.meet_[a][b] = bound(p, a, b, /*lower=*/true);
        L.join_[a][b] = bound(p, a, b, /*lower=*/false);
        if (L.meet_[a][b] < 0) throw ShapeError("no meet for pair (" + p.names[a] + "," + p.names[b] + ")");
        if (L.join_[a][b] < 0) throw ShapeError("no join for pair (" + p.names[a] + "," + p.names[b] + ")");
      }
    L.check_axioms();
    return L;
  }

  int size() const { return poset_.n; }
  bool leq(int a, int b) const { return poset_.leq(a, b); }
  int meet(int a, int b) const { return meet_[a][b]; }
  int join(int a, int b) const { return join_[a][b]; }
  const FinitePoset& poset() const { return poset_; }
  const std::string& name(int i) const { return poset_.names[i]; }

  int top() const { return *poset_.maximum(); }
  int bottom() const { return *poset_.minimum(); }

  bool same_shape(const FiniteLattice& o) const {
    return poset_.n == o.poset_.n && poset_.up == o.poset_.up;
  }

  /** Longest-chain length from x up to the top. */
  int coheight(int x) const {
    std::vector<int> memo(size(), -1);
    return coheight_rec(x, memo);
  }

 private:
  FinitePoset poset_;
  std::vector<std::vector<int16_t>> meet_, join_;

  int coheight_rec(int x, std::vector<int>& memo) const {
    if (memo[x] >= 0) return memo[x];
    int best = 0;
    for (int y = 0; y < size(); ++y)
      if (y != x && leq(x, y)) best = std::max(best, 1 + coheight_rec(y, memo));
    return memo[x] = best;
  }

  static int bound(const FinitePoset& p, int a, int b, bool lower) {
    int best = -1;
    for (int c = 0; c < p.n; ++c) {
      bool is_bound = lower ? (p.leq(c, a) && p.leq(c, b)) : (p.leq(a, c) && p.leq(b, c));
      if (!is_bound) continue;
      if (best < 0)
        best = c;
      else if (lower ? p.leq(best, c) : p.leq(c, best))
        best = c;
    }
    // best must dominate every other bound, else the pair has no glb/lub
    if (best >= 0)
      for (int c = 0; c < p.n; ++c) {
        bool is_bound = lower ? (p.leq(c, a) && p.leq(c, b)) : (p.leq(a, c) && p.leq(b, c));
        if (is_bound && !(lower ? p.leq(c, best) : p.leq(best, c))) return -1;
      }
    return best;
  }

  void check_axioms() const {
    int n = size();
    for (int a = 0; a < n; ++a) {
      if (meet_[a][a] != a || join_[a][a] != a) throw ShapeError("lattice idempotence fails");
      for (int b = 0; b < n; ++b) {
        if (meet_[a][b] != meet_[b][a] || join_[a][b] != join_[b][a])
          throw ShapeError("lattice commutativity fails");
        if (meet_[a][join_[a][b]] != a || join_[a][meet_[a][b]] != a)
          throw ShapeError("lattice absorption fails");
        for (int c = 0; c < n; ++c) {
          if (meet_[meet_[a][b]][c] != meet_[a][meet_[b][c]]) throw ShapeError("meet associativity fails");
          if (join_[join_[a][b]][c] != join_[a][join_[b][c]]) throw ShapeError("join associativity fails");
        }
      }
    }
    if (!poset_.maximum()) throw ShapeError("lattice has no maximum");
    if (!poset_.minimum()) throw ShapeError("lattice has no minimum");
  }
};

/** Boolean face lattice on a ground set of size `ground`: element index IS
 * the subset bitmask, ordered by REVERSED inclusion (sigma <= tau iff
 * sigma contains tau). Under this order meet = union, join = intersection,
 * the top element is the empty set, and coheight(sigma) = |sigma|.
 */
struct BooleanFaceLattice {
  int ground = 0;
  FiniteLattice lattice;

  static BooleanFaceLattice make(int ground) {
    if (ground < 0 || ground > 5) throw ShapeError("boolean face lattice ground set capped at 5 for explicit tables");
    int n = 1 << ground;
    std::vector<uint64_t> rows(n, 0);
    std::vector<std::string> names;
    for (int s = 0; s < n; ++s) {
      // reversed inclusion: s <= t iff s contains t
      for (int t = 0; t < n; ++t)
        if ((s & t) == t) rows[s] |= 1ull << t;
      names.push_back(mask_name(s));
    }
    BooleanFaceLattice B;
    B.ground = ground;
    B.lattice = FiniteLattice::from_poset(FinitePoset(n, rows, names));
    return B;
  }

  static std::string mask_name(uint32_t mask) {
    std::string s = "{";
    bool first = true;
    for (int i = 0; i < 32; ++i)
      if (mask & (1u << i)) {
        if (!first) s += ",";
        s += std::to_string(i);
        first = false;
      }
    return s + "}";
  }

  int coheight(uint32_t mask) const { return popcount32(mask); }
};

/** Partial map between finite sets: total on its domain subset. */
struct PartialMap {
  int source_size = 0, target_size = 0;
  uint32_t domain = 0;                // bitmask over source
  std::vector<int> images;            // size source_size; meaningful where domain bit set

  PartialMap() = default;
  PartialMap(int src, int tgt, uint32_t dom, std::vector<int> img)
      : source_size(src), target_size(tgt), domain(dom), images(std::move(img)) {
    if ((int)images.size() != source_size) throw ShapeError("partial map image vector size mismatch");
    for (int a = 0; a < source_size; ++a)
      if (defined(a) && (images[a] < 0 || images[a] >= target_size))
        throw ShapeError("partial map image out of range");
  }

  static PartialMap identity(int n) {
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) img[i] = i;
    return PartialMap(n, n, n == 32 ? ~0u : (1u << n) - 1, img);
  }

  static PartialMap empty_map(int src, int tgt) { return PartialMap(src, tgt, 0, std::vector<int>(src, -1)); }

  bool defined(int a) const { return (domain >> a) & 1; }
  int operator()(int a) const {
    if (!defined(a)) throw DomainError("partial map applied outside its domain");
    return images[a];
  }

  /** Image of a subset through the induced map: f~(A') = f(A' ∩ D(f)). */
  uint32_t image_mask(uint32_t subset) const {
    uint32_t out = 0;
    uint32_t live = subset & domain;
    while (live) {
      int a = __builtin_ctz(live);
      live &= live - 1;
      out |= 1u << images[a];
    }
    return out;
  }

  bool injective_on(uint32_t subset) const {
    uint32_t live = subset & domain;
    return popcount32(image_mask(subset)) == popcount32(live);
  }

  /** gf, defined on D(f) ∩ f^-1(D(g)). */
  static PartialMap compose(const PartialMap& g, const PartialMap& f) {
    if (f.target_size != g.source_size) throw ShapeError("partial map composition size mismatch");
    std::vector<int> img(f.source_size, -1);
    uint32_t dom = 0;
    for (int a = 0; a < f.source_size; ++a)
      if (f.defined(a) && g.defined(f.images[a])) {
        dom |= 1u << a;
        img[a] = g.images[f.images[a]];
      }
    return PartialMap(f.source_size, g.target_size, dom, img);
  }

  bool operator==(const PartialMap& o) const {
    if (source_size != o.source_size || target_size != o.target_size || domain != o.domain) return false;
    for (int a = 0; a < source_size; ++a)
      if (defined(a) && images[a] != o.images[a]) return false;
    return true;
  }
};

/** Map between Boolean lattices Gamma_A -> Gamma_B, tabulated on masks. */
struct BoolLatticeHom {
  int src_ground = 0, dst_ground = 0;
  std::vector<uint32_t> img;  // size 2^src_ground

  uint32_t operator()(uint32_t mask) const { return img[mask]; }

  /** Preserves all infimums (meet = union under the reversed order, so the
   * table must satisfy img[a|b] == img[a]|img[b] and img[empty] == empty)
   * and never raises coheight (popcount). */
  bool is_valid_morphism() const {
    int n = 1 << src_ground;
    if (img[0] != 0) return false;  // top (empty set) must go to top
    for (int a = 0; a < n; ++a) {
      if (popcount32(img[a]) > popcount32((uint32_t)a)) return false;
      for (int b = 0; b < n; ++b)
        if (img[a | b] != (img[a] | img[b])) return false;
    }
    return true;
  }

  bool operator==(const BoolLatticeHom& o) const {
    return src_ground == o.src_ground && dst_ground == o.dst_ground && img == o.img;
  }
};

/** Completion S^v of a poset with maximum: all nonempty upper subsets.
 *
 * The lattice order is REVERSED inclusion (F <= F' iff F contains F'): that
 * is the order under which the principal-upper-set embedding s -> up(s) is
 * order-preserving and the completion formula X(F) = intersection of the
 * X(s), s in F, is monotone. Meet is union, join is intersection, the
 * bottom element is the whole poset and the top is {max}. */
struct Completion {
  FiniteLattice lattice;
  std::vector<uint64_t> upper_sets;  // per lattice element
  std::vector<int> embedding;        // poset element -> lattice element
};

inline Completion completion(const FinitePoset& S) {
  if (!S.maximum()) throw ShapeError("completion requires a poset with maximum");
  if (S.n > 20) throw ShapeError("completion input too large");
  std::vector<uint64_t> uppers;
  for (uint64_t mask = 1; mask < (1ull << S.n); ++mask) {
    bool upper = true;
    for (int i = 0; i < S.n && upper; ++i)
      if ((mask >> i) & 1)
        for (int j = 0; j < S.n; ++j)
          if (S.leq(i, j) && !((mask >> j) & 1)) upper = false;
    if (upper) uppers.push_back(mask);
  }
  std::sort(uppers.begin(), uppers.end(), [](uint64_t a, uint64_t b) {
    int pa = FinitePoset::popcount64(a), pb = FinitePoset::popcount64(b);
    return pa != pb ? pa > pb : a < b;  // bottom (the full set) first
  });
  int n = (int)uppers.size();
  if (n > 64) throw ShapeError("completion exceeds 64 elements");
  std::vector<uint64_t> rows(n, 0);
  std::vector<std::string> names(n);
  for (int a = 0; a < n; ++a) {
    names[a] = BooleanFaceLattice::mask_name((uint32_t)uppers[a]);
    for (int b = 0; b < n; ++b)
      if ((uppers[a] & uppers[b]) == uppers[b]) rows[a] |= 1ull << b;  // a <= b iff a ⊇ b
  }
  Completion out;
  out.lattice = FiniteLattice::from_poset(FinitePoset(n, rows, names));
  out.upper_sets = uppers;
  out.embedding.assign(S.n, -1);
  for (int s = 0; s < S.n; ++s) {
    uint64_t principal = 0;
    for (int j = 0; j < S.n; ++j)
      if (S.leq(s, j)) principal |= 1ull << j;
    for (int e = 0; e < n; ++e)
      if (uppers[e] == principal) out.embedding[s] = e;
  }
  return out;
}

/** Interval lattice S^[1]: pairs (s,t) with s <= t, ordered componentwise. */
struct IntervalLattice {
  FiniteLattice lattice;
  std::vector<std::pair<int, int>> pairs;

  int index_of(int s, int t) const {
    for (int i = 0; i < (int)pairs.size(); ++i)
      if (pairs[i].first == s && pairs[i].second == t) return i;
    throw DomainError("interval lattice: not an interval");
  }
};

inline IntervalLattice interval_lattice(const FiniteLattice& S) {
  IntervalLattice out;
  for (int s = 0; s < S.size(); ++s)
    for (int t = 0; t < S.size(); ++t)
      if (S.leq(s, t)) out.pairs.emplace_back(s, t);
  int n = (int)out.pairs.size();
  if (n > 64) throw ShapeError("interval lattice exceeds 64 elements");
  std::vector<uint64_t> rows(n, 0);
  std::vector<std::string> names(n);
  for (int a = 0; a < n; ++a) {
    names[a] = "[" + S.name(out.pairs[a].first) + "," + S.name(out.pairs[a].second) + "]";
    for (int b = 0; b < n; ++b)
      if (S.leq(out.pairs[a].first, out.pairs[b].first) && S.leq(out.pairs[a].second, out.pairs[b].second))
        rows[a] |= 1ull << b;
  }
  out.lattice = FiniteLattice::from_poset(FinitePoset(n, rows, names));
  return out;
}

/** The partial-map side of the equivalence: f~(A') := f(A' ∩ D(f)). */
inline BoolLatticeHom partial_to_hom(const PartialMap& f) {
  BoolLatticeHom h;
  h.src_ground = f.source_size;
  h.dst_ground = f.target_size;
  h.img.resize(1u << f.source_size);
  for (uint32_t m = 0; m < h.img.size(); ++m) h.img[m] = f.image_mask(m);
  return h;
}

/** Inverse direction, defined on coatoms (singletons): the domain consists
 * of the coatoms whose image still has coheight 1. Validates that phi is a
 * legal morphism first. */
inline PartialMap hom_to_partial(const BoolLatticeHom& phi) {
  if ((int)phi.img.size() != (1 << phi.src_ground)) throw ValidationError("hom table size mismatch");
  if (!phi.is_valid_morphism())
    throw ValidationError("map is not inf-preserving / raises coheight");
  uint32_t dom = 0;
  std::vector<int> img(phi.src_ground, -1);
  for (int a = 0; a < phi.src_ground; ++a) {
    uint32_t out = phi(1u << a);
    if (popcount32(out) == 1) {
      dom |= 1u << a;
      img[a] = __builtin_ctz(out);
    }
  }
  return PartialMap(phi.src_ground, phi.dst_ground, dom, img);
}

}  // namespace corners
