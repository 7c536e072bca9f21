#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corners/arrangement.hpp"
#include "corners/lattice.hpp"

namespace corners {

/** Combinatorics of a manifold with faces: the face set bd X plus the
 * downward-closed family N of face subsets with nonempty intersection.
 *
 * This is the abstraction boundary of the module: every downstream check
 * consumes (faces, N, dim), never raw geometry, so abstract examples and
 * polyhedra share one code path. The top of the face lattice Gamma_X is the
 * empty subset throughout.
 */
struct FaceStructure {
  std::vector<std::string> faces;
  int ambient_dim = 0;
  std::vector<uint32_t> nonempty;  // sorted masks

  FaceStructure() = default;
  FaceStructure(std::vector<std::string> faces_, int dim, std::vector<uint32_t> nonempty_)
      : faces(std::move(faces_)), ambient_dim(dim), nonempty(std::move(nonempty_)) {
    if (faces.size() > 16) throw ShapeError("face structure capped at 16 faces");
    std::sort(nonempty.begin(), nonempty.end());
    nonempty.erase(std::unique(nonempty.begin(), nonempty.end()), nonempty.end());
    validate();
  }

  int count() const { return (int)faces.size(); }
  uint32_t full_mask() const { return count() == 0 ? 0u : (1u << count()) - 1; }

  bool in_N(uint32_t mask) const { return std::binary_search(nonempty.begin(), nonempty.end(), mask); }

  int face_index(const std::string& label) const {
    for (int i = 0; i < count(); ++i)
      if (faces[i] == label) return i;
    throw DomainError("unknown face label '" + label + "'");
  }

  /** Face structure of the model H^I: one face per unmarked coordinate, all
   * intersections nonempty (they meet at the origin). */
  static FaceStructure model(const MarkedFiniteSet& I) {
    std::vector<std::string> labels;
    for (int i = 0; i < I.m; ++i)
      if (!((I.marked >> i) & 1)) labels.push_back("x" + std::to_string(i + 1));
    int k = (int)labels.size();
    std::vector<uint32_t> n;
    for (uint32_t m = 0; m < (1u << k); ++m) n.push_back(m);
    return FaceStructure(std::move(labels), I.m, std::move(n));
  }

  bool operator==(const FaceStructure& o) const {
    return faces == o.faces && ambient_dim == o.ambient_dim && nonempty == o.nonempty;
  }

 private:
  void validate() const {
    if (nonempty.empty() || nonempty[0] != 0) throw ValidationError("face family must contain the empty set");
    for (uint32_t m : nonempty) {
      if ((m & ~full_mask()) != 0) throw ValidationError("face subset references missing face");
      if (popcount32(m) > ambient_dim)
        throw ValidationError("face subset larger than the ambient dimension (codimension cap)");
      uint32_t live = m;
      while (live) {
        uint32_t sub = m & ~(live & -live);
        live &= live - 1;
        if (!std::binary_search(nonempty.begin(), nonempty.end(), sub))
          throw ValidationError("face family not closed under subsets");
      }
    }
  }
};

/** Edging of X with Y: a partial map between face sets whose induced lattice
 * map respects nonempty intersections and distinctness. Validation is
 * report-valued; see validate_edging.
 *
 * Strata of the domain are presented throughout via the target-face
 * indexing (the decomposition of the tau-stratum into maximal preimages);
 * the other equivalent presentations of maps along an edging are not
 * materialized. */
struct Edging {
  PartialMap beta;

  uint32_t tilde(uint32_t sigma) const { return beta.image_mask(sigma); }

  static Edging identity(const FaceStructure& X) { return Edging{PartialMap::identity(X.count())}; }
};

struct EdgingViolation {
  std::string kind;  // "nonempty" | "distinct" | "join"
  uint32_t sigma = 0, tau = 0;
};

/** Checks, for every sigma in N_X, that beta~(sigma) is in N_Y and beta is
 * injective on sigma ∩ D(beta); additionally verifies the join law
 * beta~(sigma v tau) = beta~(sigma) v beta~(tau) whenever sigma ∪ tau lies
 * in N_X (the lattice-level reformulation, kept as an oracle). */
inline std::vector<EdgingViolation> validate_edging(const Edging& e, const FaceStructure& X,
                                                    const FaceStructure& Y) {
  std::vector<EdgingViolation> out;
  if (e.beta.source_size != X.count() || e.beta.target_size != Y.count())
    throw ShapeError("edging face counts do not match the structures");
  for (uint32_t sigma : X.nonempty) {
    if (!Y.in_N(e.tilde(sigma))) out.push_back({"nonempty", sigma, 0});
    if (!e.beta.injective_on(sigma)) out.push_back({"distinct", sigma, 0});
  }
  for (uint32_t sigma : X.nonempty)
    for (uint32_t tau : X.nonempty) {
      if (!X.in_N(sigma | tau)) continue;
      if (e.tilde(sigma & tau) != (e.tilde(sigma) & e.tilde(tau))) out.push_back({"join", sigma, tau});
    }
  return out;
}

inline bool is_valid_edging(const Edging& e, const FaceStructure& X, const FaceStructure& Y) {
  return validate_edging(e, X, Y).empty();
}

/** Components of the stratum over tau: the inclusion-minimal elements of
 * beta~^-1{tau} that carry nonempty strata. Pairwise disjoint in the sense
 * that no union of two of them lies in N_X. */
inline std::vector<uint32_t> boundary_decomposition(const Edging& e, const FaceStructure& X,
                                                    const FaceStructure& Y, uint32_t tau) {
  if (!is_valid_edging(e, X, Y)) throw ValidationError("boundary decomposition of an invalid edging");
  std::vector<uint32_t> preimage;
  for (uint32_t sigma = 0; sigma <= X.full_mask(); ++sigma)
    if (e.tilde(sigma) == tau) preimage.push_back(sigma);
  std::vector<uint32_t> out;
  for (uint32_t sigma : preimage) {
    bool minimal = true;
    for (uint32_t other : preimage)
      if (other != sigma && (other & ~sigma) == 0) minimal = false;
    if (minimal && X.in_N(sigma)) out.push_back(sigma);
  }
  std::sort(out.begin(), out.end(), [](uint32_t a, uint32_t b) {
    return popcount32(a) != popcount32(b) ? popcount32(a) < popcount32(b) : a < b;
  });
  return out;
}

/** Component-level check of the wedge identity for closed strata:
 * components of tau ∧ tau' are exactly the unions sigma ∪ sigma' of
 * component pairs that still meet. */
inline bool wedge_check(const Edging& e, const FaceStructure& X, const FaceStructure& Y, uint32_t tau,
                        uint32_t tau2) {
  auto d1 = boundary_decomposition(e, X, Y, tau);
  auto d2 = boundary_decomposition(e, X, Y, tau2);
  auto dm = boundary_decomposition(e, X, Y, tau | tau2);  // meet in Gamma_Y is union
  std::vector<uint32_t> pairs;
  for (uint32_t a : d1)
    for (uint32_t b : d2)
      if (X.in_N(a | b)) pairs.push_back(a | b);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<uint32_t> sorted_dm = dm;
  std::sort(sorted_dm.begin(), sorted_dm.end());
  return pairs == sorted_dm;
}

/** gamma after beta, as an edging. */
inline Edging compose_edgings(const Edging& gamma, const Edging& beta) {
  return Edging{PartialMap::compose(gamma.beta, beta.beta)};
}

/** Face structure of a product: faces are the disjoint union, a subset meets
 * iff both halves do, dimension adds. */
inline FaceStructure product_faces(const FaceStructure& A, const FaceStructure& B) {
  std::vector<std::string> labels = A.faces;
  for (auto& l : B.faces) labels.push_back(l);
  std::vector<uint32_t> n;
  for (uint32_t a : A.nonempty)
    for (uint32_t b : B.nonempty) n.push_back(a | (b << A.count()));
  return FaceStructure(std::move(labels), A.ambient_dim + B.ambient_dim, std::move(n));
}

/** Pasting of two edgings with disjoint domains into one with the product
 * target. Returns the edging together with the product face structure. */
inline std::pair<Edging, FaceStructure> disjoint_union_edging(const Edging& b1, const FaceStructure& Y1,
                                                              const Edging& b2, const FaceStructure& Y2) {
  if (b1.beta.source_size != b2.beta.source_size) throw ShapeError("paste: source mismatch");
  if ((b1.beta.domain & b2.beta.domain) != 0) throw DomainError("paste: domains must be disjoint");
  int src = b1.beta.source_size;
  std::vector<int> img(src, -1);
  uint32_t dom = b1.beta.domain | b2.beta.domain;
  for (int c = 0; c < src; ++c) {
    if (b1.beta.defined(c)) img[c] = b1.beta.images[c];
    if (b2.beta.defined(c)) img[c] = Y1.count() + b2.beta.images[c];
  }
  FaceStructure Y = product_faces(Y1, Y2);
  return {Edging{PartialMap(src, Y.count(), dom, img)}, Y};
}

/** Restriction of an edging to the stratum over sigma (which must avoid the
 * domain): returns the face structure of the stratum and the induced
 * edging. Faces of the stratum are the faces C outside sigma with
 * sigma ∪ {C} still nonempty. */
inline std::pair<Edging, FaceStructure> face_restrict(const Edging& e, const FaceStructure& X,
                                                      const FaceStructure& Y, uint32_t sigma) {
  if (!X.in_N(sigma)) throw DomainError("face_restrict: empty stratum");
  if ((sigma & e.beta.domain) != 0) throw DomainError("face_restrict: stratum meets the edging domain");
  std::vector<int> face_of;  // stratum face index -> X face index
  std::vector<std::string> labels;
  for (int c = 0; c < X.count(); ++c)
    if (!((sigma >> c) & 1) && X.in_N(sigma | (1u << c))) {
      face_of.push_back(c);
      labels.push_back(X.faces[c]);
    }
  int k = (int)face_of.size();
  std::vector<uint32_t> n;
  for (uint32_t m = 0; m < (1u << k); ++m) {
    uint32_t expanded = sigma;
    for (int i = 0; i < k; ++i)
      if ((m >> i) & 1) expanded |= 1u << face_of[i];
    if (X.in_N(expanded)) n.push_back(m);
  }
  FaceStructure Xs(std::move(labels), X.ambient_dim - popcount32(sigma), std::move(n));
  std::vector<int> img(k, -1);
  uint32_t dom = 0;
  for (int i = 0; i < k; ++i)
    if (e.beta.defined(face_of[i])) {
      dom |= 1u << i;
      img[i] = e.beta.images[face_of[i]];
    }
  return {Edging{PartialMap(k, Y.count(), dom, img)}, Xs};
}

/** Combinatorial index of the arrangement an edging derives on a shaped
 * domain: the lattice S x Gamma^beta_X x Gamma_Y together with, for each
 * (s; sigma, tau), the component list {sigma ∪ sigma' : sigma' maximal in
 * beta~^-1{tau}} ∩ N_X. Gamma^beta_X is the Boolean lattice on the faces
 * outside D(beta). */
struct DerivedIndex {
  FiniteLattice index;
  std::vector<std::tuple<int, uint32_t, uint32_t>> coords;  // (s, sigma in Gamma^beta, tau)
  std::vector<std::vector<uint32_t>> components;
};

inline DerivedIndex derived_index(const Edging& e, const FaceStructure& X, const FaceStructure& Y,
                                  const FiniteLattice& S) {
  if (!is_valid_edging(e, X, Y)) throw ValidationError("derived index of an invalid edging");
  std::vector<int> free_faces;  // faces outside D(beta)
  for (int c = 0; c < X.count(); ++c)
    if (!e.beta.defined(c)) free_faces.push_back(c);
  int a = (int)free_faces.size();
  int b = Y.count();
  long long n = (long long)S.size() << (a + b);
  if (n > 64) throw ShapeError("derived index exceeds 64 elements");

  DerivedIndex out;
  std::vector<uint64_t> rows(n, 0);
  std::vector<std::string> names(n);
  auto pack = [&](int s, uint32_t sg, uint32_t tau) { return ((s << a) | (int)sg) << b | (int)tau; };
  for (int s = 0; s < S.size(); ++s)
    for (uint32_t sg = 0; sg < (1u << a); ++sg)
      for (uint32_t tau = 0; tau < (1u << b); ++tau) {
        int i = pack(s, sg, tau);
        out.coords.emplace_back(s, sg, tau);
        names[i] = "(" + S.name(s) + ";" + BooleanFaceLattice::mask_name(sg) + "," +
                   BooleanFaceLattice::mask_name(tau) + ")";
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto [s1, g1, t1] = out.coords[i];
      auto [s2, g2, t2] = out.coords[j];
      // reversed inclusion on both mask coordinates
      if (S.leq(s1, s2) && (g1 & g2) == g2 && (t1 & t2) == t2) rows[i] |= 1ull << j;
    }
  out.index = FiniteLattice::from_poset(FinitePoset((int)n, rows, names));
  for (auto& [s, sg, tau] : out.coords) {
    (void)s;
    uint32_t sigma_full = 0;
    for (int i = 0; i < a; ++i)
      if ((sg >> i) & 1) sigma_full |= 1u << free_faces[i];
    std::vector<uint32_t> comps;
    for (uint32_t sp : boundary_decomposition(e, X, Y, tau))
      if (X.in_N(sigma_full | sp)) comps.push_back(sigma_full | sp);
    std::sort(comps.begin(), comps.end());
    out.components.push_back(std::move(comps));
  }
  return out;
}

}  // namespace corners
