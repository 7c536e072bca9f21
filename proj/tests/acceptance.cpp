// Acceptance suite: one check per criterion, one pass/fail line each.
// Exit code 0 iff every criterion holds at its stated tolerance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "corners/collar.hpp"
#include "corners/jets.hpp"
#include "corners/perturb.hpp"
#include "corners/polyhedron.hpp"
#include "corners/rng.hpp"
#include "corners/transversality.hpp"

using namespace corners;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("%s criterion %02d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

std::vector<PartialMap> all_partial_maps(int a, int b) {
  std::vector<PartialMap> out;
  long long total = 1;
  for (int i = 0; i < a; ++i) total *= b + 1;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    uint32_t dom = 0;
    std::vector<int> img(a, -1);
    for (int i = 0; i < a; ++i) {
      int v = int(c % (b + 1));
      c /= b + 1;
      if (v < b) {
        dom |= 1u << i;
        img[i] = v;
      }
    }
    out.push_back(PartialMap(a, b, dom, img));
  }
  return out;
}

// ---- criterion 1: the partial-map / lattice-hom equivalence ----

void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  long long cases = 0;
  for (int a = 0; a <= 4 && ok; ++a)
    for (int b = 0; b <= 4 && ok; ++b)
      for (auto& f : all_partial_maps(a, b)) {
        ++cases;
        BoolLatticeHom h = partial_to_hom(f);
        if (!h.is_valid_morphism()) ok = false;
        if (!(hom_to_partial(h) == f)) ok = false;
        if (!(partial_to_hom(hom_to_partial(h)) == h)) ok = false;
      }
  // functoriality on composable triples of size <= 3
  for (int a = 0; a <= 3 && ok; ++a)
    for (int b = 0; b <= 3 && ok; ++b)
      for (int c = 0; c <= 3 && ok; ++c)
        for (auto& f : all_partial_maps(a, b))
          for (auto& g : all_partial_maps(b, c)) {
            ++cases;
            BoolLatticeHom lhs = partial_to_hom(PartialMap::compose(g, f));
            BoolLatticeHom hf = partial_to_hom(f), hg = partial_to_hom(g);
            for (uint32_t m = 0; m < (1u << a); ++m)
              if (lhs(m) != hg(hf(m))) ok = false;
          }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 10.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld cases in %.2fs", cases, secs);
  report(1, "equivalence roundtrip + functoriality, exhaustive <= 4", ok, buf);
}

// ---- criterion 2: truncated composition vs compose-then-truncate ----

TruncatedPolyMap random_poly_map(Rng& rng, int src, int tgt, int r, bool origin_preserving) {
  TruncatedPolyMap f = TruncatedPolyMap::zero(src, tgt, r);
  std::vector<Monomial> mons;
  enumerate_monomials(src, r, mons);
  for (int j = 0; j < tgt; ++j)
    for (auto& a : mons) {
      if (origin_preserving && total_degree(a) == 0) continue;
      if (rng.uniform() < 0.5) f.comp[j].set_coeff(a, rng.rational_pm1(6));
    }
  return f;
}

void criterion_2() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(20260808);
  bool ok = true;
  for (int t = 0; t < 500 && ok; ++t) {
    int r = rng.uniform_int(1, 3);
    int a = rng.uniform_int(1, 3), b = rng.uniform_int(1, 3), c = rng.uniform_int(1, 3);
    TruncatedPolyMap f = random_poly_map(rng, a, b, r, true);
    TruncatedPolyMap g = random_poly_map(rng, b, c, r, false);
    if (!(truncate_compose(g, f) == full_compose_then_truncate(g, f, r))) ok = false;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 30.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "500 random triples in %.2fs", secs);
  report(2, "truncated composition equals the compose-then-truncate oracle", ok, buf);
}

// ---- criterion 3: degree-1 relative dimension formula ----

SetArrangement random_arrangement(const FiniteLattice& S, Rng& rng, int m_max) {
  for (;;) {
    int m = rng.uniform_int(1, m_max);
    uint32_t marked = (uint32_t)(rng.next_u64() & ((1u << m) - 1));
    std::vector<uint32_t> assign(S.size());
    uint32_t full = (1u << m) - 1;
    for (int s = 0; s < S.size(); ++s) {
      uint32_t base = 0;
      for (int t = 0; t < S.size(); ++t)
        if (t != s && S.leq(t, s)) base |= assign[t];
      assign[s] = (s == S.top()) ? full : (base | ((uint32_t)rng.next_u64() & full));
    }
    assign[S.top()] = full;
    SetArrangement A(S, MarkedFiniteSet(m, marked), assign);
    if (is_valid(A)) return A;
  }
}

void criterion_3() {
  std::vector<FiniteLattice> shapes;
  shapes.push_back(completion(FinitePoset::chain(2)).lattice);   // 2 elements
  shapes.push_back(completion(FinitePoset::chain(3)).lattice);   // 3
  shapes.push_back(completion(FinitePoset::chain(4)).lattice);   // 4
  shapes.push_back(completion(FinitePoset::chain(5)).lattice);   // 5
  shapes.push_back(completion(FinitePoset::antichain_with_top(2)).lattice);  // diamond, 4
  {
    // M3: bottom < a,b,c < top (5 elements)
    std::vector<uint64_t> rows(5);
    rows[0] = 0b11111;
    rows[1] = 0b10010;
    rows[2] = 0b10100;
    rows[3] = 0b11000;
    rows[4] = 0b10000;
    shapes.push_back(FiniteLattice::from_poset(FinitePoset(5, rows, {"bot", "a", "b", "c", "top"})));
  }
  Rng rng(314159);
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    const FiniteLattice& S = shapes[t % shapes.size()];
    SetArrangement I = random_arrangement(S, rng, 4);
    SetArrangement J = random_arrangement(S, rng, 4);
    if (relative_basis(I, J, 1).dim_homogeneous(1) != rel1jet_dim_formula(I, J)) ok = false;
  }
  report(3, "degree-1 relative dimension equals the closed formula, 50 random pairs", ok);
}

// ---- criterion 4: the corner counterexample ----

void criterion_4() {
  TruncatedPolyMap F = TruncatedPolyMap::zero(2, 2, 2);
  F.comp[0].set_coeff({2, 0}, Rational(1));
  F.comp[1].set_coeff({1, 0}, Rational(1, 2));
  F.comp[1].set_coeff({1, 1}, Rational(-1, 2));
  F.comp[1].set_coeff({0, 1}, Rational(1));
  PartialMap beta(2, 2, 0b01, {0, -1});  // left edge to left edge
  AdmissibilityReport rep =
      admissibility_check(F, beta, MarkedFiniteSet::mk(2, 0), MarkedFiniteSet::mk(2, 0));
  bool along = rep.along;
  // restriction to {x1 = 0}: x2 -> F2(0, x2) = x2, corank 0
  RatMatrix full = jacobian(F, {0, 0});
  RatMatrix restricted(1, 1);
  restricted.at(0, 0) = F.comp[1].partial_derivative(1).eval({Rational(0), Rational(0)});
  bool coranks = corank(restricted) == 0 && corank(full) == 1;
  bool fails_at_origin = false;
  for (auto& e : rep.entries)
    if (e.condition == "transversal-to-face" && !e.ok && e.witness && (*e.witness)[0].is_zero() &&
        (*e.witness)[1].is_zero())
      fails_at_origin = true;
  report(4, "corner counterexample: along, edge-corank 0, full corank 1, witness at origin",
         along && coranks && !rep.admissible && fails_at_origin);
}

// ---- criterion 5: cone safety, exact sign checks ----

void criterion_5() {
  struct Case {
    int m, k;
    std::vector<uint32_t> I_assign, J_assign;
    int mJ, kJ;
  };
  bool ok = true;
  long long checked = 0;
  Rng rng(55);
  // three model configurations, 10^4 exact evaluations each
  for (int cfg = 0; cfg < 3 && ok; ++cfg) {
    FiniteLattice S = completion(FinitePoset::chain(cfg == 2 ? 1 : 2)).lattice;
    SetArrangement I, J;
    if (cfg == 0) {  // marked line times half-line, both levels see the half-line
      I = SetArrangement(S, MarkedFiniteSet::mk(2, 1), {0b10, 0b11});
      J = I;
    } else if (cfg == 1) {  // two unmarked coordinates everywhere
      I = SetArrangement::constant(S, MarkedFiniteSet::mk(2, 0));
      J = I;
    } else {  // trivial shape, mixed marks
      I = SetArrangement::constant(S, MarkedFiniteSet::mk(3, 1));
      J = SetArrangement::constant(S, MarkedFiniteSet::mk(2, 0));
    }
    TruncatedPolyMap F;
    if (cfg == 2) {
      F = TruncatedPolyMap::zero(3, 2, 2);
      F.comp[0].set_coeff({0, 1, 0}, Rational(1));  // (x2, x3): keeps H, relative
      F.comp[1].set_coeff({0, 0, 1}, Rational(1));
    } else {
      F = TruncatedPolyMap::identity(2, 2);
    }
    Rng sampler = rng.split(cfg);
    ConeSample b = cone_sample(I, J, 2, Rational(1), Rational(1, 20), sampler);
    std::vector<Point> samples;
    for (int t = 0; t < 10000; ++t) {
      Point p(I.ambient.m);
      for (int i = 0; i < I.ambient.m; ++i) {
        bool marked = (I.ambient.marked >> i) & 1;
        Rational v = marked ? sampler.rational_pm1(8) : sampler.rational_01(8);
        p[i] = v / Rational(2);
        if (!marked && t % 4 == 0) p[i] = Rational(0);
      }
      samples.push_back(p);
    }
    ConeSafetyReport rep = cone_safety_check(F, b, I, J, samples);
    ok = ok && rep.ok && rep.checked == 10000;
    checked += rep.checked;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%lld exact evaluations", checked);
  report(5, "cone safety: perturbed evaluations never leave the model, zero tolerance", ok, buf);
}

// ---- criterion 6: Monte-Carlo transversality, 5 scenarios ----

void criterion_6() {
  auto start = std::chrono::steady_clock::now();
  FiniteLattice pt = completion(FinitePoset::chain(1)).lattice;
  auto line = SetArrangement::constant(pt, MarkedFiniteSet::mk(1, 1));
  auto halfline = SetArrangement::constant(pt, MarkedFiniteSet::mk(1, 0));
  auto plane = SetArrangement::constant(pt, MarkedFiniteSet::mk(2, 2));

  std::vector<McScenario> suite;
  // Expected rates, derived from the sampler density before acceptance: a
  // trial fails only if some pinned coefficient combination hits an exact
  // rational value; every free coefficient is uniform on a dyadic lattice of
  // 2^17 + 1 points, so each grid point hits with probability <= 2^-17 and
  // the per-trial failure probability is <= grid * 2^-17 < 3e-5. Expected
  // success rate >= 1 - 3e-5, far above the 0.95 gate.
  {
    McScenario s;  // 1: zero map, pin value and derivative (codim 2 > dim 1)
    s.name = "critical-zero";
    s.F = TruncatedPolyMap::zero(1, 1, 1);
    s.I = line;
    s.J = line;
    s.pins = {{0, {0}, Rational(0)}, {0, {1}, Rational(0)}};
    s.grid = {{Rational(0)}, {Rational(1, 3)}, {Rational(2, 3)}};
    suite.push_back(s);
  }
  {
    McScenario s;  // 2: the fold x^2, same pins at r = 2
    s.name = "fold";
    s.F = TruncatedPolyMap::zero(1, 1, 2);
    s.F.comp[0].set_coeff({2}, Rational(1));
    s.I = line;
    s.J = line;
    s.pins = {{0, {0}, Rational(0)}, {0, {1}, Rational(0)}};
    s.grid = {{Rational(0)}, {Rational(1, 2)}, {Rational(-1, 2)}};
    suite.push_back(s);
  }
  {
    McScenario s;  // 3: a constant curve in the plane, pin both values (codim 2 > 1)
    s.name = "plane-avoidance";
    s.F = TruncatedPolyMap::zero(1, 2, 1);
    s.F.comp[0].set_coeff({0}, Rational(1, 8));
    s.F.comp[1].set_coeff({0}, Rational(-1, 8));
    s.I = line;
    s.J = plane;
    s.pins = {{0, {0}, Rational(0)}, {1, {0}, Rational(0)}};
    s.grid = {{Rational(0)}, {Rational(1, 4)}, {Rational(1, 2)}};
    suite.push_back(s);
  }
  {
    McScenario s;  // 4: two-dimensional source, pin value and both partials (codim 3 > 2)
    s.name = "saddle";
    s.F = TruncatedPolyMap::zero(2, 1, 2);
    s.F.comp[0].set_coeff({1, 1}, Rational(1));
    s.I = plane;
    s.J = line;
    s.pins = {{0, {0, 0}, Rational(0)}, {0, {1, 0}, Rational(0)}, {0, {0, 1}, Rational(0)}};
    s.grid = {{Rational(0), Rational(0)}, {Rational(1, 2), Rational(1, 2)},
              {Rational(-1, 2), Rational(1, 4)}};
    suite.push_back(s);
  }
  {
    McScenario s;  // 5: half-line into half-line, cone-positive sampler (codim 2 > 1)
    s.name = "boundary-jet";
    s.F = TruncatedPolyMap::identity(1, 2);
    s.I = halfline;
    s.J = halfline;
    s.pins = {{0, {0}, Rational(1, 2)}, {0, {1}, Rational(1)}};
    s.grid = {{Rational(0)}, {Rational(1, 4)}, {Rational(1, 2)}};
    suite.push_back(s);
  }

  std::vector<Rational> schedule{Rational(1, 5), Rational(1, 10), Rational(1, 20), Rational(1, 50)};
  bool ok = true;
  double min_rate = 1.0;
  for (size_t i = 0; i < suite.size(); ++i) {
    McReport rep = mc_transversality(suite[i], schedule, 500, 808 + i);
    double rate = rep.per_eps.back().rate();  // epsilon = 1/50 = 0.02
    min_rate = std::min(min_rate, rate);
    if (rate < 0.95) ok = false;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 120.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "min rate %.4f at eps=0.02, N=500, %.1fs", min_rate, secs);
  report(6, "Monte-Carlo transversality, 5 scenarios with codim W > dim source", ok, buf);
}

// ---- criterion 7: collar flow laws ----

void criterion_7() {
  BoxModel box = BoxModel::box(2);
  FlowField xi = build_collaring_field(box, {0, false}) + build_collaring_field(box, {1, false});
  Rng rng(12);
  double worst_semigroup = 0;
  for (int i = 0; i < 100; ++i) {
    Vec p{rng.uniform(0, 0.4), rng.uniform(0, 0.4)};
    double t = rng.uniform(0.05, 0.45), t2 = rng.uniform(0.05, 0.45);
    Vec a = flow_point(xi, box, flow_point(xi, box, p, t, 1e-3), t2, 1e-3);
    Vec b = flow_point(xi, box, p, t + t2, 1e-3);
    for (size_t j = 0; j < a.size(); ++j)
      worst_semigroup = std::max(worst_semigroup, std::abs(a[j] - b[j]));
  }
  // stratum preservation: a field tangent to {x1 = 0} keeps it for t in [0,1]
  FlowField tangent = build_collaring_field(box, {1, false});
  double worst_stratum = 0;
  for (int i = 0; i < 20; ++i) {
    FlowResult res = flow(tangent, box, {0.0, rng.uniform(0, 0.4)}, 1.0, 1e-2);
    for (auto& q : res.trajectory) worst_stratum = std::max(worst_stratum, std::abs(q[0]));
  }
  // fourth-order convergence of the integration error across halved steps
  BoxModel line = BoxModel::box(1);
  FlowField xi1 = build_collaring_field(line, {0, false});
  auto err = [&](double h) {
    Rng r2(99);
    double acc = 0;
    for (int i = 0; i < 24; ++i) {
      Vec p{r2.uniform(0.0, 0.3)};
      double t = r2.uniform(0.1, 0.4);
      acc += std::abs(flow_point(xi1, line, p, t, h)[0] - flow_point(xi1, line, p, t, 1e-5)[0]);
    }
    return acc / 24;
  };
  double e1 = err(1e-2), e2 = err(5e-3), e3 = err(2.5e-3);
  double r1 = e1 / e2, r2n = e2 / e3;
  bool ok = worst_semigroup < 1e-6 && worst_stratum < 1e-9 && r1 > 12 && r1 < 20 && r2n > 12 && r2n < 20;
  char buf[128];
  std::snprintf(buf, sizeof buf, "semigroup %.2e, stratum %.2e, ratios %.1f / %.1f", worst_semigroup,
                worst_stratum, r1, r2n);
  report(7, "collar flow laws: semigroup, stratum preservation, 4th-order ratios", ok, buf);
}

// ---- criterion 8: beta-collaring compatibility ----

void criterion_8() {
  Rng rng(3);
  double worst_defect = 0;
  bool well = true, ident = true;
  for (int dim = 1; dim <= 3; ++dim) {
    BoxModel box = BoxModel::box(dim);
    int faces = (int)box.facets().size();
    Edging id{PartialMap::identity(faces)};
    std::vector<Vec> samples;
    for (int i = 0; i < 12; ++i) {
      Vec p(dim);
      for (int j = 0; j < dim; ++j) p[j] = rng.uniform(0.05, 0.45);
      samples.push_back(p);
    }
    CollarReport rep = beta_collaring_check(box, id, faces, samples);
    worst_defect = std::max({worst_defect, rep.max_order_defect, rep.max_commutator});
    well = well && rep.well_defined;
    ident = ident && rep.identity_at_zero;
  }
  // merged edging: both interval endpoints onto the single ray face
  {
    BoxModel box = BoxModel::box(1);
    Edging collapse{PartialMap(2, 1, 0b11, {0, 0})};
    CollarReport rep = beta_collaring_check(box, collapse, 1, {{0.2}, {0.5}, {0.8}});
    well = well && rep.well_defined;
  }
  // exactly-commuting coordinate baseline
  double baseline = 0;
  {
    BoxModel box = BoxModel::box(2);
    FlowField e1, e2;
    e1.dim = e2.dim = 2;
    e1.terms.push_back({0, false, true, 0, 0, 1.0});
    e2.terms.push_back({1, false, true, 0, 0, 1.0});
    for (int i = 0; i < 20; ++i) {
      Vec p{rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4)};
      Vec br = lie_bracket_fd(e1, e2, p);
      for (double v : br) baseline = std::max(baseline, std::abs(v));
      Vec a = flow_point(e1, box, flow_point(e2, box, p, 0.2, 1e-3), 0.2, 1e-3);
      Vec b = flow_point(e2, box, flow_point(e1, box, p, 0.2, 1e-3), 0.2, 1e-3);
      for (size_t j = 0; j < a.size(); ++j) baseline = std::max(baseline, std::abs(a[j] - b[j]));
    }
  }
  bool ok = well && ident && worst_defect < 1e-5 && baseline < 1e-10;
  char buf[96];
  std::snprintf(buf, sizeof buf, "box-suite defect %.2e, coordinate baseline %.2e", worst_defect, baseline);
  report(8, "beta-collaring compatibility on the box suite", ok, buf);
}

// ---- criterion 9: polyhedron map, exact hull containment ----

void criterion_9() {
  struct Fixture {
    std::string name;
    Polyhedron X, K;
    Edging beta;
  };
  std::vector<Fixture> fixtures;
  {
    Polyhedron I = Polyhedron::box(1);
    fixtures.push_back({"interval->interval", I, I, Edging::identity(polyhedron_faces(I))});
  }
  {
    Polyhedron I = Polyhedron::box(1), R = Polyhedron::orthant(1, 0);
    fixtures.push_back({"interval->ray", I, R, Edging{PartialMap(2, 1, 0b11, {0, 0})}});
  }
  {
    Polyhedron S = Polyhedron::box(2);
    fixtures.push_back({"square->square", S, S, Edging::identity(polyhedron_faces(S))});
  }
  {
    Polyhedron S = Polyhedron::box(2);
    Polyhedron T({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}, {Rational(-1), Rational(-1)}},
                 {Rational(0), Rational(0), Rational(-1)}, {"x", "y", "diag"});
    // lo1 -> x, lo2 -> y; the upper facets stay free
    fixtures.push_back({"square->triangle", S, T, Edging{PartialMap(4, 3, 0b101, {0, -1, 1, -1})}});
  }
  {
    Polyhedron T({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}, {Rational(-1), Rational(-1)}},
                 {Rational(0), Rational(0), Rational(-1)}, {"x", "y", "diag"});
    fixtures.push_back({"triangle->triangle", T, T, Edging::identity(polyhedron_faces(T))});
  }
  bool ok = true;
  std::string failing;
  for (auto& fx : fixtures) {
    PolyhedronMapResult pm = polyhedron_map(fx.X, fx.beta, fx.K);
    auto samples = polyhedron_grid(fx.X, 6);
    PolyhedronMapReport rep = verify_polyhedron_map(pm, fx.X, fx.beta, fx.K, samples);
    if (!rep.ok) {
      ok = false;
      failing = fx.name;
    }
  }
  report(9, "polyhedron map: exact LP hull containment on 5 fixtures", ok, failing);
}

// ---- criterion 10: the embedding pipeline ----

void criterion_10() {
  Polyhedron X = Polyhedron::box(1), K = Polyhedron::box(1);
  Edging beta = Edging::identity(polyhedron_faces(X));
  EmbeddingOptions opts;  // eps = 0.05, 50 round cap
  EmbeddingReport rep = embedding_demo(X, beta, K, 2, 2026, opts);
  // regression value: the seeded run converged in exactly one round when the
  // pipeline was frozen; any future drift is a behavioral change
  const int expected_rounds = 1;
  bool ok = rep.ok && rep.rounds == expected_rounds && rep.rounds <= 50;
  char buf[96];
  std::snprintf(buf, sizeof buf, "rounds=%d (expected %d), whitney=%.4f", rep.rounds, expected_rounds,
                rep.whitney_to_base);
  report(10, "embedding pipeline: interval into interval x R^2, seeded regression", ok, buf);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all 10 criteria passed\n");
  return failures ? 1 : 0;
}
