#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "corners/arrangement.hpp"
#include "corners/jets.hpp"
#include "corners/lattice.hpp"
#include "corners/linalg.hpp"
#include "corners/poly.hpp"

namespace corners {

/** Exact Jacobian of a polynomial map at a rational point: rows indexed by
 * target components, columns by source variables. */
inline RatMatrix jacobian(const TruncatedPolyMap& f, const Point& p) {
  RatMatrix J(f.target_dim(), f.source_vars);
  for (int j = 0; j < f.target_dim(); ++j)
    for (int i = 0; i < f.source_vars; ++i) J.at(j, i) = f.comp[j].partial_derivative(i).eval(p);
  return J;
}

inline int corank(const RatMatrix& m) { return m.corank(); }

/** F transversal to the coordinate subspace V = span{e_j : j in V_mask} at p.
 * Vacuously true when f(p) is off V; otherwise the Jacobian columns plus the
 * subspace must span the target. */
inline bool transverse_to_coordinate_subspace(const TruncatedPolyMap& f, const Point& p, uint32_t v_mask) {
  int n = f.target_dim();
  std::vector<Rational> fp = f.eval(p);
  for (int j = 0; j < n; ++j)
    if (!((v_mask >> j) & 1) && !fp[j].is_zero()) return true;  // f(p) not in V
  RatMatrix J = jacobian(f, p);
  RatMatrix V(n, popcount32(v_mask));
  int col = 0;
  for (int j = 0; j < n; ++j)
    if ((v_mask >> j) & 1) V.at(j, col++) = Rational(1);
  return RatMatrix::hcat(J, V).rank() == n;
}

/** Codimension of the corank-rho stratum: rho * (rho + |dimY - dimX|). */
inline long long corank_stratum_codim(int rho, int dim_x, int dim_y) {
  if (rho < 0) throw DomainError("corank must be nonnegative");
  return (long long)rho * (rho + std::abs(dim_y - dim_x));
}

/** Whitney-style pseudometric on a finite grid: the max over sampled points
 * of d/(1+d), where d is Euclidean distance between k-jet coefficient
 * vectors. A lower bound for the true sup over the whole domain. */
inline double whitney_rho(const TruncatedPolyMap& F, const TruncatedPolyMap& G, int k,
                          const std::vector<Point>& grid) {
  if (grid.empty()) throw DomainError("whitney_rho: empty grid");
  if (F.source_vars != G.source_vars || F.target_dim() != G.target_dim())
    throw ShapeError("whitney_rho: map shape mismatch");
  std::vector<Monomial> mons;
  enumerate_monomials(F.source_vars, k, mons);
  double best = 0;
  for (auto& p : grid) {
    TruncatedPolyMap jf = taylor_shift(F.rebound(std::max(k, F.bound)), p);
    TruncatedPolyMap jg = taylor_shift(G.rebound(std::max(k, G.bound)), p);
    double d2 = 0;
    for (int j = 0; j < F.target_dim(); ++j)
      for (auto& a : mons) {
        double diff = (jf.comp[j].coeff(a) - jg.comp[j].coeff(a)).to_double();
        d2 += diff * diff;
      }
    double d = std::sqrt(d2);
    best = std::max(best, d / (1 + d));
  }
  return best;
}

/** A nonnegative function recognizes the face {x_face = 0} when it vanishes
 * on the face (checked symbolically) and its differential does not vanish
 * there (checked at the sampled face points). */
inline bool recognizes_face(const TruncatedPoly& f, int face_coord, const std::vector<Point>& face_samples) {
  if (!f.restrict_zero(face_coord).is_zero()) return false;
  for (auto& p : face_samples) {
    if (!p[face_coord].is_zero()) throw DomainError("recognizes_face: sample off the face");
    bool nonzero = false;
    for (int i = 0; i < f.nvars(); ++i)
      if (!f.partial_derivative(i).eval(p).is_zero()) nonzero = true;
    if (!nonzero) return false;
  }
  return true;
}

/** Faces of the model H^I are its unmarked coordinates; this maps face index
 * k to the k-th unmarked coordinate. */
inline std::vector<int> model_face_coords(const MarkedFiniteSet& I) {
  std::vector<int> out;
  for (int i = 0; i < I.m; ++i)
    if (!((I.marked >> i) & 1)) out.push_back(i);
  return out;
}

struct AdmissibilityEntry {
  std::string condition;  // "along" | "transversal-to-face" | "stratum-preservation"
  uint32_t stratum = 0;   // face mask (X side)
  bool ok = true;
  std::string provenance;  // "proved" | "sampled(N)"
  std::optional<Point> witness;
  std::string detail;
};

/** Lexicographic order on points; failing witnesses are reported as the
 * least failing sample so reports do not depend on sample order. */
inline bool lex_less(const Point& a, const Point& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

struct AdmissibilityReport {
  bool along = true;
  bool admissible = true;
  std::vector<AdmissibilityEntry> entries;
};

/** Admissibility of a polynomial map along an edging of model faces.
 *
 * - Alongness is checked symbolically (condition 0): for each face C in
 *   D(beta), the beta(C)-component restricted to {x_C = 0} must be the zero
 *   polynomial.
 * - Condition (i): at every sampled point of every face C in D(beta), the
 *   beta(C)-row of the Jacobian must be nonzero (transversality to the
 *   target face). Sampled points on an open stratum cannot prove the
 *   condition everywhere; the provenance records this.
 * - Condition (ii): at every sample, the exact zero-pattern of the image on
 *   the target's unmarked coordinates must be exactly the image under
 *   beta~ of the sample's own face pattern, with strict positivity on the
 *   remaining unmarked target coordinates.
 *
 * Canonical corner points (one per face subset, unmarked coordinates off the
 * stratum set to 1/2, marked to 1/3) are always added to the samples.
 */
inline AdmissibilityReport admissibility_check(const TruncatedPolyMap& f, const PartialMap& beta,
                                               const MarkedFiniteSet& X, const MarkedFiniteSet& Y,
                                               std::vector<Point> samples = {}) {
  std::vector<int> xf = model_face_coords(X);
  std::vector<int> yf = model_face_coords(Y);
  if (f.source_vars != X.m || f.target_dim() != Y.m) throw ShapeError("admissibility: dimension mismatch");
  if (beta.source_size != (int)xf.size() || beta.target_size != (int)yf.size())
    throw ShapeError("admissibility: edging face counts do not match the models");

  AdmissibilityReport rep;

  // condition 0: along beta, symbolically
  for (int c = 0; c < beta.source_size; ++c) {
    if (!beta.defined(c)) continue;
    AdmissibilityEntry e;
    e.condition = "along";
    e.stratum = 1u << c;
    e.provenance = "proved";
    e.ok = f.comp[yf[beta.images[c]]].restrict_zero(xf[c]).is_zero();
    if (!e.ok) {
      e.detail = "component " + std::to_string(yf[beta.images[c]] + 1) + " does not vanish on face";
      rep.along = false;
      rep.admissible = false;
    }
    rep.entries.push_back(e);
  }
  if (!rep.along) return rep;

  // canonical corner-stratum points
  int nfaces = (int)xf.size();
  for (uint32_t sigma = 0; sigma < (1u << nfaces); ++sigma) {
    Point p(X.m, Rational(0));
    for (int i = 0; i < X.m; ++i)
      if ((X.marked >> i) & 1) p[i] = Rational(1, 3);
    for (int c = 0; c < nfaces; ++c) p[xf[c]] = ((sigma >> c) & 1) ? Rational(0) : Rational(1, 2);
    samples.push_back(p);
  }
  for (auto& p : samples)
    if (!in_model(X, p)) throw DomainError("admissibility: sample outside the model");

  auto face_pattern = [&](const Point& p) {
    uint32_t sigma = 0;
    for (int c = 0; c < nfaces; ++c)
      if (p[xf[c]].is_zero()) sigma |= 1u << c;
    return sigma;
  };

  // condition (i): transversality to the designated target face on each face
  for (int c = 0; c < beta.source_size; ++c) {
    if (!beta.defined(c)) continue;
    AdmissibilityEntry e;
    e.condition = "transversal-to-face";
    e.stratum = 1u << c;
    int count = 0;
    int row = yf[beta.images[c]];
    for (auto& p : samples) {
      if (!p[xf[c]].is_zero()) continue;
      ++count;
      bool nonzero = false;
      for (int i = 0; i < X.m; ++i)
        if (!f.comp[row].partial_derivative(i).eval(p).is_zero()) nonzero = true;
      if (!nonzero) {
        e.ok = false;
        if (!e.witness || lex_less(p, *e.witness)) e.witness = p;
      }
    }
    e.provenance = "sampled(" + std::to_string(count) + ")";
    if (!e.ok) rep.admissible = false;
    rep.entries.push_back(e);
  }

  // condition (ii): exact stratum-to-stratum zero patterns
  {
    AdmissibilityEntry e;
    e.condition = "stratum-preservation";
    for (auto& p : samples) {
      uint32_t sigma = face_pattern(p);
      uint32_t tau = beta.image_mask(sigma);
      std::vector<Rational> fp = f.eval(p);
      bool ok = true;
      for (int d = 0; d < (int)yf.size(); ++d) {
        if ((tau >> d) & 1) {
          if (!fp[yf[d]].is_zero()) ok = false;
        } else {
          if (fp[yf[d]].sign() <= 0) ok = false;
        }
      }
      if (!ok) {
        e.ok = false;
        if (!e.witness || lex_less(p, *e.witness)) {
          e.witness = p;
          e.stratum = sigma;
        }
      }
    }
    e.provenance = "sampled(" + std::to_string(samples.size()) + ")";
    if (!e.ok) rep.admissible = false;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace corners
