#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corners/evaluable.hpp"
#include "corners/jets.hpp"
#include "corners/linalg.hpp"
#include "corners/polyhedron.hpp"
#include "corners/rng.hpp"
#include "corners/transversality.hpp"

namespace corners {

/** An element of the H-preserving cone: a relative polynomial map together
 * with the radius delta it is certified on and the coefficient scale eps. */
struct ConeSample {
  Rational delta;
  Rational eps;
  TruncatedPolyMap poly;
};

/** Strict cone criterion: b must be relative, and for every unmarked target
 * coordinate j the constant term must dominate the other coefficients,
 * a_{j0} - sum_{1<=|alpha|<=r} |a_{j,alpha}| delta^|alpha| > 0.
 * (The |alpha| >= 1 restriction is forced: including alpha = 0 in the sum
 * would make the inequality unsatisfiable, see the zero-polynomial example.)
 */
inline bool cone_membership(const TruncatedPolyMap& b, const SetArrangement& I, const SetArrangement& J,
                            const Rational& delta) {
  if (delta.sign() <= 0) throw DomainError("cone radius must be positive");
  if (!is_relative(b, I, J)) return false;
  for (int j = 0; j < J.ambient.m; ++j) {
    if ((J.ambient.marked >> j) & 1) continue;
    Rational bound = b.comp[j].coeff(Monomial(b.source_vars, 0));
    for (auto& [a, c] : b.comp[j].terms())
      if (total_degree(a) >= 1) bound -= c.abs() * delta.pow(total_degree(a));
    if (bound.sign() <= 0) return false;
  }
  return true;
}

/** Draws a cone member with max-norm of coefficients at most eps: constant
 * terms of unmarked targets pinned at eps/2, every other allowed slot drawn
 * uniformly small enough that membership holds by construction. */
inline ConeSample cone_sample(const SetArrangement& I, const SetArrangement& J, int r, const Rational& delta,
                              const Rational& eps, Rng& rng) {
  if (delta.sign() <= 0 || eps.sign() <= 0) throw DomainError("cone sampler needs positive delta and eps");
  RelativeJetBasis basis = relative_basis(I, J, r);
  TruncatedPolyMap b = TruncatedPolyMap::zero(I.ambient.m, J.ambient.m, r);
  Monomial zero_mon(I.ambient.m, 0);
  uint32_t unmarked = J.ambient.unmarked();
  // feasibility: every unmarked target needs its constant slot
  for (int j = 0; j < J.ambient.m; ++j) {
    if (!((unmarked >> j) & 1)) continue;
    if (!pair_allowed(I, J, j, zero_mon))
      throw SamplerError("cone sampler infeasible: unmarked target " + std::to_string(j + 1) +
                         " has no constant slot (target arrangement not neat)");
  }
  std::vector<int> slots_per_target(J.ambient.m, 0);
  for (auto& [j, a] : basis.allowed)
    if (total_degree(a) >= 1) ++slots_per_target[j];
  Rational dmax = delta > Rational(1) ? delta.pow(r) : Rational(1);
  for (auto& [j, a] : basis.allowed) {
    if (total_degree(a) == 0) {
      if ((unmarked >> j) & 1) b.comp[j].set_coeff(a, eps / Rational(2));
      else b.comp[j].set_coeff(a, rng.rational_pm1() * eps / Rational(2));
    } else {
      Rational scale = eps / (Rational(4) * Rational(std::max(1, slots_per_target[j])) * dmax);
      b.comp[j].set_coeff(a, rng.rational_pm1() * scale);
    }
  }
  ConeSample out{delta, eps, std::move(b)};
  if (!cone_membership(out.poly, I, J, delta)) throw SamplerError("cone sampler postcondition failed");
  return out;
}

/** G(p) = F(p) + rhoU(p) * rhoV(F(p)) * b(p): the chart-level perturbation
 * with identity charts. b = 0 gives back F on the nose, and G agrees with F
 * outside the support of rhoU. */
inline EvalPtr perturb_map(EvalPtr F, const ConeSample& b, const BumpProfile& rho_u, const BumpProfile& rho_v) {
  int src = F->source_dim();
  EvalPtr bump_u = std::make_shared<BumpNode>(src, rho_u);
  EvalPtr bump_v_of_f = std::make_shared<ComposeNode>(
      std::make_shared<BumpNode>(F->target_dim(), rho_v), F);
  EvalPtr scalar = std::make_shared<ProductScalarNode>(std::vector<EvalPtr>{bump_u, bump_v_of_f});
  return make_sum(F, make_scaled(scalar, make_poly(b.poly)));
}

struct ConeSafetyReport {
  bool ok = true;
  int checked = 0;
  std::optional<Point> witness;
  std::string reason;
};

/** Exact certificate that the perturbed map cannot leave the model: at each
 * rational sample p in H^I with ||p|| < delta, every unmarked target needs
 * F_j(p) >= 0 and b_j(p) > 0; then F + theta*b stays in H^J for every bump
 * value theta in [0,1]. Pure rational sign checks, no tolerance. */
inline ConeSafetyReport cone_safety_check(const TruncatedPolyMap& F, const ConeSample& b,
                                          const SetArrangement& I, const SetArrangement& J,
                                          const std::vector<Point>& samples) {
  ConeSafetyReport rep;
  Rational d2 = b.delta * b.delta;
  for (auto& p : samples) {
    if (!in_model(I.ambient, p)) throw DomainError("cone safety: sample outside the model");
    Rational norm2(0);
    for (auto& x : p) norm2 += x * x;
    if (!(norm2 < d2)) continue;  // certificate only covers the delta ball
    ++rep.checked;
    std::vector<Rational> fp = F.eval(p);
    std::vector<Rational> bp = b.poly.eval(p);
    for (int j = 0; j < J.ambient.m; ++j) {
      if ((J.ambient.marked >> j) & 1) continue;
      if (fp[j].sign() < 0 || bp[j].sign() <= 0) {
        rep.ok = false;
        if (!rep.witness || lex_less(p, *rep.witness)) {
          rep.witness = p;
          rep.reason = fp[j].sign() < 0 ? "base map leaves the model" : "cone positivity fails";
        }
      }
    }
    // stratum preservation: supp(p) inside I(s) must keep the image inside J(s)
    uint32_t supp = support(p);
    for (int s = 0; s < I.shape.size(); ++s) {
      if ((supp & ~I.at(s)) != 0) continue;
      for (int j = 0; j < J.ambient.m; ++j)
        if (!((J.at(s) >> j) & 1) && (!fp[j].is_zero() || !bp[j].is_zero())) {
          rep.ok = false;
          if (!rep.witness || lex_less(p, *rep.witness)) {
            rep.witness = p;
            rep.reason = "stratum preservation fails";
          }
        }
    }
  }
  return rep;
}

/** Affine condition on jet coefficients: coefficient alpha of component j
 * equals value. A finite pin list cuts a coordinate-affine submanifold W of
 * the jet space. */
struct JetPin {
  int component = 0;
  Monomial alpha;
  Rational value;
};

struct McScenario {
  std::string name;
  TruncatedPolyMap F;
  SetArrangement I, J;
  Rational delta = Rational(1);
  std::vector<JetPin> pins;
  std::vector<Point> grid;
};

struct McPerEps {
  Rational eps;
  int trials = 0;
  int successes = 0;
  std::vector<Point> witnesses;  // grid points of failed trials, capped
  double rate() const { return trials ? double(successes) / trials : 1.0; }
};

struct McReport {
  uint64_t seed = 0;
  std::vector<McPerEps> per_eps;
};

/** One trial: draw a cone sample, perturb F by it, and test j^r(G) against
 * W at every grid point. At a grid point where the jet lies on W exactly
 * (rational equality of all pinned coefficients), transversality demands
 * that the pinned coefficients, as functions of the base point, have a
 * surjective differential; their gradients are exact polynomials. Success
 * means every grid point either misses W or is transversal. */
inline bool mc_trial(const McScenario& sc, const Rational& eps, Rng& rng, const Point** witness) {
  ConeSample b = cone_sample(sc.I, sc.J, sc.F.bound, sc.delta, eps, rng);
  TruncatedPolyMap G = sc.F + b.poly;
  for (auto& p : sc.grid) {
    bool on_w = true;
    for (auto& pin : sc.pins) {
      // jet coefficient at alpha = d^alpha G_j (p) / alpha!
      TruncatedPoly shifted = taylor_shift(G.comp[pin.component], p);
      if (shifted.coeff(pin.alpha) != pin.value) on_w = false;
    }
    if (!on_w) continue;
    RatMatrix D((int)sc.pins.size(), G.source_vars);
    for (int r = 0; r < (int)sc.pins.size(); ++r) {
      TruncatedPoly shifted = taylor_shift(G.comp[sc.pins[r].component], p);
      for (int i = 0; i < G.source_vars; ++i) {
        Monomial up = sc.pins[r].alpha;
        up[i] += 1;
        D.at(r, i) = shifted.coeff(up) * Rational(up[i]);
      }
    }
    if (D.rank() != (int)sc.pins.size()) {
      *witness = &p;
      return false;
    }
  }
  return true;
}

inline McReport mc_transversality(const McScenario& sc, const std::vector<Rational>& eps_schedule, int trials,
                                  uint64_t seed) {
  McReport rep;
  rep.seed = seed;
  Rng root(seed);
  for (size_t e = 0; e < eps_schedule.size(); ++e) {
    McPerEps pe;
    pe.eps = eps_schedule[e];
    pe.trials = trials;
    for (int t = 0; t < trials; ++t) {
      Rng trial_rng = root.split(e * 1000003ull + t);
      const Point* witness = nullptr;
      if (mc_trial(sc, pe.eps, trial_rng, &witness)) {
        ++pe.successes;
      } else if (witness && pe.witnesses.size() < 5) {
        pe.witnesses.push_back(*witness);
      }
    }
    rep.per_eps.push_back(pe);
  }
  return rep;
}

/** Result of the polyhedron-target construction F(p) = sum rho_sigma(p) v(sigma)
 * over the inclusion-maximal nonempty strata sigma of X, with v(sigma) an
 * exact relative-interior point of the K-face over beta~(sigma). */
struct PolyhedronMapResult {
  EvalPtr map;
  FaceStructure domain_faces;
  FaceStructure target_faces;
  std::vector<uint32_t> sigmas;                  // inclusion-maximal nonempty strata
  std::vector<std::vector<Rational>> vertices;   // v(sigma), exact
  std::vector<EvalPtr> weights;                  // unnormalized weight of each sigma
  double step_width = 0.25;
};

inline PolyhedronMapResult polyhedron_map(const Polyhedron& X, const Edging& beta, const Polyhedron& K,
                                          double step_width = 0.25) {
  PolyhedronMapResult out;
  out.step_width = step_width;
  out.domain_faces = polyhedron_faces(X);
  out.target_faces = polyhedron_faces(K);
  auto violations = validate_edging(beta, out.domain_faces, out.target_faces);
  if (!violations.empty()) throw ValidationError("polyhedron_map: edging invalid");

  for (uint32_t sigma : out.domain_faces.nonempty) {
    bool maximal = true;
    for (uint32_t other : out.domain_faces.nonempty)
      if (other != sigma && (sigma & ~other) == 0) maximal = false;
    if (maximal) out.sigmas.push_back(sigma);
  }
  int n = X.dim();
  for (uint32_t sigma : out.sigmas) {
    uint32_t tau = beta.tilde(sigma);
    // validity of beta makes this face nonempty
    out.vertices.push_back(relative_interior_point(K, tau));
    std::vector<EvalPtr> factors;
    for (int c = 0; c < X.rows(); ++c) {
      if ((sigma >> c) & 1) continue;
      Vec a(n);
      for (int j = 0; j < n; ++j) a[j] = X.A[c][j].to_double();
      factors.push_back(std::make_shared<FacetStepNode>(a, X.b[c].to_double(), step_width));
    }
    if (factors.empty())
      out.weights.push_back(std::make_shared<ConstNode>(n, Vec{1.0}));
    else
      out.weights.push_back(std::make_shared<ProductScalarNode>(std::move(factors)));
  }
  std::vector<Vec> pts;
  for (auto& v : out.vertices) {
    Vec p;
    for (auto& x : v) p.push_back(x.to_double());
    pts.push_back(p);
  }
  out.map = std::make_shared<ConvexCombinationNode>(out.weights, pts);
  return out;
}

struct HullCheckEntry {
  Point sample;
  bool support_ok = true;  // weights vanish exactly off the admissible strata
  bool in_hull = true;     // exact LP membership of the rationalized image
  bool on_target_face = true;
};

struct PolyhedronMapReport {
  bool ok = true;
  std::vector<HullCheckEntry> entries;
};

/** Verification of the construction on exact rational samples. Weights are
 * evaluated in floating point, rationalized dyadically, and renormalized
 * exactly, so hull membership is decided by exact LP on a genuinely convex
 * combination; support correctness ties the floating map to the exact one. */
inline PolyhedronMapReport verify_polyhedron_map(const PolyhedronMapResult& pm, const Polyhedron& X,
                                                 const Edging& beta, const Polyhedron& K,
                                                 const std::vector<Point>& samples) {
  PolyhedronMapReport rep;
  for (auto& p : samples) {
    HullCheckEntry e;
    e.sample = p;
    uint32_t sigma_p = 0;
    for (int c = 0; c < X.rows(); ++c)
      if (X.slack(c, p).is_zero()) sigma_p |= 1u << c;
    Vec pd;
    for (auto& x : p) pd.push_back(x.to_double());

    std::vector<Rational> lam((int)pm.sigmas.size(), Rational(0));
    Rational total(0);
    std::vector<std::vector<Rational>> hull;
    for (size_t i = 0; i < pm.sigmas.size(); ++i) {
      double w = pm.weights[i]->value(pd)[0];
      bool admissible = (sigma_p & ~pm.sigmas[i]) == 0;  // sigma_p subset of sigma
      if (admissible) {
        hull.push_back(pm.vertices[i]);
        lam[i] = Rational::from_double_dyadic(w);
        total += lam[i];
      } else if (w != 0.0) {
        e.support_ok = false;
      }
    }
    if (total.sign() <= 0) {
      e.support_ok = false;
      rep.ok = false;
      rep.entries.push_back(e);
      continue;
    }
    std::vector<Rational> image(K.dim(), Rational(0));
    for (size_t i = 0; i < pm.sigmas.size(); ++i) {
      if (lam[i].is_zero()) continue;
      for (int j = 0; j < K.dim(); ++j) image[j] += (lam[i] / total) * pm.vertices[i][j];
    }
    e.in_hull = in_convex_hull(image, hull);
    uint32_t tau = beta.tilde(sigma_p);
    for (int d = 0; d < K.rows(); ++d)
      if (((tau >> d) & 1) && !K.slack(d, image).is_zero()) e.on_target_face = false;
    if (!e.support_ok || !e.in_hull || !e.on_target_face) rep.ok = false;
    rep.entries.push_back(e);
  }
  return rep;
}

/** Proper lift: appends ||p||^2 as an extra coordinate. Preimages of bounded
 * balls are bounded because the extra coordinate dominates ||p||. */
inline EvalPtr proper_lift(EvalPtr F) {
  int src = F->source_dim();
  return make_concat({F, std::make_shared<SquaredNormNode>(src)});
}

/** Rational grid over a polyhedron: points of a dyadic lattice inside the
 * (LP-computed, capped) bounding box that satisfy Ax >= b exactly. */
inline std::vector<Point> polyhedron_grid(const Polyhedron& P, int resolution) {
  int n = P.dim();
  std::vector<Point> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<Rational> lo(n, Rational(-2)), hi(n, Rational(2));
  for (int i = 0; i < n; ++i) {
    std::vector<Rational> c(n);
    c[i] = Rational(1);
    LpResult mx = solve_lp(c, P.A, P.b);
    c[i] = Rational(-1);
    LpResult mn = solve_lp(c, P.A, P.b);
    if (mx.status == LpResult::Optimal && mx.objective < hi[i]) hi[i] = mx.objective;
    if (mn.status == LpResult::Optimal && -mn.objective > lo[i]) lo[i] = -mn.objective;
  }
  std::vector<int> idx(n, 0);
  for (;;) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * Rational(idx[i], 1) / Rational(resolution);
    if (P.contains(p)) out.push_back(p);
    int carry = 0;
    while (carry < n && ++idx[carry] > resolution) idx[carry++] = 0;
    if (carry == n) break;
  }
  return out;
}

struct EmbeddingOptions {
  int max_rounds = 50;
  double eps = 0.05;
  int grid_resolution = 8;
  double tol = 1e-9;
};

struct EmbeddingRound {
  int round = 0;
  bool stratum_ok = false, transversal_ok = false, corank_ok = false, injective_ok = false;
};

struct EmbeddingReport {
  bool ok = false;
  bool rejected = false;
  std::string reject_reason;
  uint64_t seed = 0;
  int rounds = 0;
  double eps_used = 0;
  double whitney_to_base = 0;
  std::vector<EmbeddingRound> history;
  EvalPtr final_map;
};

/** Desk-scale embedding pipeline: polyhedron_map, proper lift into
 * K x R^n, then repeated seeded perturbation rounds until the sampled
 * checks pass (admissibility conditions, corank 0, pairwise injectivity
 * within strata).
 *
 * Each round adds (a) for every face C in D(beta) a term
 * c_C * slack_C(p) * facet_bump_C(p) * n_{beta(C)} pushing transversally off
 * the target face while vanishing identically on C itself (so alongness is
 * preserved exactly), and (b) a small random polynomial on the free R^n
 * block, which cannot violate the target polyhedron at all. This is the
 * chart-local relative cone perturbation of the theory, globalized with
 * facet slacks instead of chart coordinates.
 */
inline EmbeddingReport embedding_demo(const Polyhedron& X, const Edging& beta, const Polyhedron& K, int n,
                                      uint64_t seed, const EmbeddingOptions& opts = {}) {
  EmbeddingReport rep;
  rep.seed = seed;
  int dx = X.dim(), dk = K.dim();
  if (2 * dx + 1 > dk + n) {
    rep.rejected = true;
    rep.reject_reason = "dimension precondition 2 dim X + 1 <= dim(K x R^n) violated";
    return rep;
  }

  PolyhedronMapResult base = polyhedron_map(X, beta, K);
  std::vector<EvalPtr> parts{base.map};
  if (n >= 1) parts.push_back(std::make_shared<SquaredNormNode>(dx));
  if (n >= 2) parts.push_back(std::make_shared<ConstNode>(dx, Vec(n - 1, 0.0)));
  EvalPtr G0 = make_concat(parts);
  EvalPtr G = G0;

  std::vector<Point> grid = polyhedron_grid(X, opts.grid_resolution);
  std::vector<Vec> grid_d;
  std::vector<uint32_t> grid_sigma;
  for (auto& p : grid) {
    Vec pd;
    for (auto& x : p) pd.push_back(x.to_double());
    grid_d.push_back(pd);
    uint32_t s = 0;
    for (int c = 0; c < X.rows(); ++c)
      if (X.slack(c, p).is_zero()) s |= 1u << c;
    grid_sigma.push_back(s);
  }

  Rng root(seed);
  double eps = opts.eps;
  double eps_applied = opts.eps;

  auto run_checks = [&](const EvalPtr& map, EmbeddingRound& r) {
    r.stratum_ok = r.transversal_ok = r.corank_ok = r.injective_ok = true;
    std::vector<Vec> images;
    for (size_t g = 0; g < grid_d.size(); ++g) {
      Vec y = map->value(grid_d[g]);
      images.push_back(y);
      uint32_t tau = beta.tilde(grid_sigma[g]);
      for (int d = 0; d < K.rows(); ++d) {
        double s = -K.b[d].to_double();
        for (int j = 0; j < dk; ++j) s += K.A[d][j].to_double() * y[j];
        if ((tau >> d) & 1) {
          if (std::abs(s) > opts.tol) r.stratum_ok = false;
        } else {
          if (s <= 1e-12) r.stratum_ok = false;
        }
      }
      Mat J = map->jacobian(grid_d[g]);
      if (numeric_rank(J) != dx) r.corank_ok = false;
      for (int c = 0; c < X.rows(); ++c) {
        if (!((grid_sigma[g] >> c) & 1) || !beta.beta.defined(c)) continue;
        int d = beta.beta.images[c];
        double row_norm = 0;
        for (int i = 0; i < dx; ++i) {
          double v = 0;
          for (int j = 0; j < dk; ++j) v += K.A[d][j].to_double() * J[j][i];
          row_norm = std::max(row_norm, std::abs(v));
        }
        if (row_norm <= opts.tol) r.transversal_ok = false;
      }
    }
    for (size_t a = 0; a < grid_d.size(); ++a)
      for (size_t b2 = a + 1; b2 < grid_d.size(); ++b2) {
        if (grid_sigma[a] != grid_sigma[b2]) continue;
        double diff = 0;
        for (size_t j = 0; j < images[a].size(); ++j)
          diff = std::max(diff, std::abs(images[a][j] - images[b2][j]));
        if (diff <= opts.tol) r.injective_ok = false;
      }
    return r.stratum_ok && r.transversal_ok && r.corank_ok && r.injective_ok;
  };

  for (int round = 0; round <= opts.max_rounds; ++round) {
    EmbeddingRound r;
    r.round = round;
    bool pass = run_checks(G, r);
    rep.history.push_back(r);
    if (pass) {
      rep.ok = true;
      rep.rounds = round;
      rep.eps_used = eps_applied;
      rep.whitney_to_base = whitney_rho_eval(*G0, *G, 1, grid_d);
      rep.final_map = G;
      return rep;
    }
    if (round == opts.max_rounds) break;

    Rng rng = root.split(round + 1);
    eps_applied = eps;
    EvalPtr delta;
    // (a) face-transversality terms along each edged facet
    for (int c = 0; c < X.rows(); ++c) {
      if (!beta.beta.defined(c)) continue;
      int d = beta.beta.images[c];
      Vec ax(dx);
      for (int j = 0; j < dx; ++j) ax[j] = X.A[c][j].to_double();
      EvalPtr scalar = std::make_shared<ProductScalarNode>(std::vector<EvalPtr>{
          std::make_shared<AffineSlackNode>(ax, X.b[c].to_double()),
          std::make_shared<FacetBumpNode>(ax, X.b[c].to_double(), 0.5)});
      Vec dir(dk + n, 0.0);
      double c_scale = eps * (0.5 + 0.5 * rng.uniform());
      for (int j = 0; j < dk; ++j) dir[j] = c_scale * K.A[d][j].to_double();
      EvalPtr term = make_scaled(scalar, std::make_shared<ConstNode>(dx, dir));
      delta = delta ? make_sum(delta, term) : term;
    }
    // (b) free-block random polynomial
    if (n > 0 && dx > 0) {
      TruncatedPolyMap q = TruncatedPolyMap::zero(dx, n, 2);
      std::vector<Monomial> mons;
      enumerate_monomials(dx, 2, mons);
      for (int j = 0; j < n; ++j)
        for (auto& a : mons)
          q.comp[j].set_coeff(a, rng.rational_pm1() * Rational::from_double_dyadic(eps / (4.0 * mons.size())));
      EvalPtr free_term =
          make_concat({std::make_shared<ConstNode>(dx, Vec(dk, 0.0)), make_poly(std::move(q))});
      delta = delta ? make_sum(delta, free_term) : free_term;
    }
    if (delta) G = make_sum(G, delta);
    eps *= 0.75;  // calm down if earlier rounds failed
  }
  rep.rounds = opts.max_rounds;
  rep.eps_used = eps_applied;
  rep.final_map = G;
  return rep;
}

}  // namespace corners
