#include <doctest.h>

#include "corners/rng.hpp"
#include "corners/transversality.hpp"

using namespace corners;

namespace {

/** The running counterexample: F(x1,x2) = (x1^2, x1(1-x2)/2 + x2) on the
 * full corner, preserving the left and right edges. */
TruncatedPolyMap square_counterexample() {
  TruncatedPolyMap F = TruncatedPolyMap::zero(2, 2, 2);
  F.comp[0].set_coeff({2, 0}, Rational(1));
  F.comp[1].set_coeff({1, 0}, Rational(1, 2));
  F.comp[1].set_coeff({1, 1}, Rational(-1, 2));
  F.comp[1].set_coeff({0, 1}, Rational(1));
  return F;
}

RatMatrix random_invertible(Rng& rng, int n) {
  for (;;) {
    RatMatrix M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = rng.rational_pm1(4);
    if (M.rank() == n) return M;
  }
}

}  // namespace

TEST_CASE("jacobian and corank basics") {
  CHECK(corank(jacobian(TruncatedPolyMap::identity(3, 1), {0, 0, 0})) == 0);
  TruncatedPolyMap zero = TruncatedPolyMap::zero(1, 1, 1);
  CHECK(corank(jacobian(zero, {0})) == 1);
}

TEST_CASE("the corner counterexample has the stated Jacobian at the origin") {
  TruncatedPolyMap F = square_counterexample();
  RatMatrix J = jacobian(F, {0, 0});
  CHECK(J.at(0, 0) == Rational(0));
  CHECK(J.at(0, 1) == Rational(0));
  CHECK(J.at(1, 0) == Rational(1, 2));
  CHECK(J.at(1, 1) == Rational(1));
  CHECK(corank(J) == 1);
}

TEST_CASE("corank is invariant under invertible composition") {
  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    int n = rng.uniform_int(2, 4), m = rng.uniform_int(2, 4);
    RatMatrix M(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.7) M.at(i, j) = rng.rational_pm1(4);
    RatMatrix L = random_invertible(rng, m), R = random_invertible(rng, n);
    CHECK(RatMatrix::product(L, M).corank() == M.corank());
    CHECK(RatMatrix::product(M, R).corank() == M.corank());
    CHECK(RatMatrix::product(L, RatMatrix::product(M, R)).corank() == M.corank());
  }
}

TEST_CASE("degenerate zero-dimensional source has corank 0") {
  TruncatedPolyMap F = TruncatedPolyMap::zero(0, 2, 1);
  RatMatrix J = jacobian(F, {});
  CHECK(J.cols() == 0);
  CHECK(corank(J) == 0);
}

TEST_CASE("transversality to coordinate subspaces") {
  // a submersion is transversal to anything
  TruncatedPolyMap sub = TruncatedPolyMap::zero(2, 1, 1);
  sub.comp[0].set_coeff({1, 0}, Rational(1));
  CHECK(transverse_to_coordinate_subspace(sub, {0, 0}, 0b0));
  // off the subspace it is vacuous
  TruncatedPolyMap F = square_counterexample();
  CHECK(transverse_to_coordinate_subspace(F, {Rational(1, 2), Rational(0)}, 0b10));
  // at the origin, the image plus {y1 = 0} does not span
  CHECK(!transverse_to_coordinate_subspace(F, {0, 0}, 0b10));
}

TEST_CASE("corank stratum codimension formula") {
  CHECK(corank_stratum_codim(1, 2, 5) == 4);
  CHECK(corank_stratum_codim(0, 7, 3) == 0);
  CHECK(corank_stratum_codim(2, 3, 3) == 4);
  // in the embedding regime the stratum codimension exceeds the source dim
  for (int dx = 1; dx <= 4; ++dx)
    for (int dy = 2 * dx; dy <= 2 * dx + 3; ++dy)
      for (int rho = 1; rho <= 3; ++rho) CHECK(corank_stratum_codim(rho, dx, dy) > dx);
}

TEST_CASE("whitney rho: zero on equal maps, bounded by one, shift example") {
  TruncatedPolyMap F = TruncatedPolyMap::identity(1, 1);
  std::vector<Point> grid{{Rational(0)}, {Rational(1, 2)}, {Rational(2)}};
  CHECK(whitney_rho(F, F, 1, grid) == 0.0);
  TruncatedPolyMap G = F;
  G.comp[0].set_coeff({0}, Rational(1));  // G = x + 1
  double d = whitney_rho(F, G, 0, grid);
  CHECK(d == doctest::Approx(0.5));
  CHECK(whitney_rho(F, G, 1, grid) < 1.0);
  CHECK_THROWS_AS(whitney_rho(F, G, 0, {}), DomainError);
}

TEST_CASE("whitney rho satisfies the triangle inequality on sampled triples") {
  Rng rng(7);
  std::vector<Point> grid;
  for (int i = 0; i < 5; ++i) grid.push_back({rng.rational_pm1(4), rng.rational_pm1(4)});
  for (int t = 0; t < 20; ++t) {
    auto rand_map = [&] {
      TruncatedPolyMap f = TruncatedPolyMap::zero(2, 2, 2);
      std::vector<Monomial> mons;
      enumerate_monomials(2, 2, mons);
      for (int j = 0; j < 2; ++j)
        for (auto& a : mons)
          if (rng.uniform() < 0.5) f.comp[j].set_coeff(a, rng.rational_pm1(5));
      return f;
    };
    TruncatedPolyMap A = rand_map(), B = rand_map(), C = rand_map();
    for (int k = 0; k <= 2; ++k) {
      double ab = whitney_rho(A, B, k, grid), bc = whitney_rho(B, C, k, grid),
             ac = whitney_rho(A, C, k, grid);
      CHECK(ac <= ab + bc + 1e-12);
      CHECK(ab == whitney_rho(B, A, k, grid));
    }
  }
}

TEST_CASE("recognizing functions on the model") {
  // f = x_m recognizes {x_m = 0}
  TruncatedPoly xm = TruncatedPoly::variable(2, 2, 1);
  std::vector<Point> face{{Rational(0), Rational(0)}, {Rational(1, 2), Rational(0)}};
  CHECK(recognizes_face(xm, 1, face));
  // f = x_m^2 fails: the differential dies on the face
  CHECK(!recognizes_face(xm * xm, 1, face));
  // f = x_m (1 + x_{m-1}) works on the model where x_{m-1} >= 0
  TruncatedPoly f = xm * (TruncatedPoly::constant(2, 2, Rational(1)) + TruncatedPoly::variable(2, 2, 0));
  CHECK(recognizes_face(f, 1, face));
  // something not vanishing on the face is rejected symbolically
  CHECK(!recognizes_face(TruncatedPoly::constant(2, 2, Rational(1)), 1, face));
}

TEST_CASE("pullback along a transversal map recognizes the source face") {
  // g recognizes D = {y1 = 0}; pulled back along an admissible map it must
  // recognize the matched source face, and fail along the counterexample
  TruncatedPoly g = TruncatedPoly::variable(2, 4, 0);
  std::vector<Point> face{{Rational(0), Rational(0)}, {Rational(0), Rational(1, 2)},
                          {Rational(0), Rational(1)}};
  // good map: (x1 (1 + x2), x2): transversal to {y1=0} along the left edge
  TruncatedPolyMap good = TruncatedPolyMap::zero(2, 2, 2);
  good.comp[0].set_coeff({1, 0}, Rational(1));
  good.comp[0].set_coeff({1, 1}, Rational(1));
  good.comp[1].set_coeff({0, 1}, Rational(1));
  TruncatedPoly pulled_good = g.rebound(4).subst({good.comp[0].rebound(4), good.comp[1].rebound(4)}, 4);
  CHECK(recognizes_face(pulled_good, 0, face));
  TruncatedPolyMap bad = square_counterexample();
  TruncatedPoly pulled_bad = g.rebound(4).subst({bad.comp[0].rebound(4), bad.comp[1].rebound(4)}, 4);
  CHECK(!recognizes_face(pulled_bad, 0, face));
}

TEST_CASE("admissibility: coordinate projection is admissible") {
  // X = H^<2|1> x R_+ = <3|1>, projection onto the last coordinate
  TruncatedPolyMap f = TruncatedPolyMap::zero(3, 1, 1);
  f.comp[0].set_coeff({0, 0, 1}, Rational(1));
  // faces of X: x2, x3; faces of Y=R_+: y1; beta sends x3-face to y1-face
  PartialMap beta(2, 1, 0b10, {-1, 0});
  AdmissibilityReport rep = admissibility_check(f, beta, MarkedFiniteSet::mk(3, 1), MarkedFiniteSet::mk(1, 0));
  CHECK(rep.along);
  CHECK(rep.admissible);
}

TEST_CASE("admissibility: identity map along the identity edging") {
  TruncatedPolyMap id = TruncatedPolyMap::identity(2, 1);
  PartialMap beta = PartialMap::identity(2);
  AdmissibilityReport rep = admissibility_check(id, beta, MarkedFiniteSet::mk(2, 0), MarkedFiniteSet::mk(2, 0));
  CHECK(rep.admissible);
}

TEST_CASE("admissibility: the corner counterexample fails at the origin") {
  TruncatedPolyMap F = square_counterexample();
  // chart at the corner: faces x1, x2 of <2|0>; left edge goes to left edge
  PartialMap beta(2, 2, 0b01, {0, -1});
  AdmissibilityReport rep =
      admissibility_check(F, beta, MarkedFiniteSet::mk(2, 0), MarkedFiniteSet::mk(2, 0));
  CHECK(rep.along);
  CHECK(!rep.admissible);
  bool transversality_failed_at_origin = false;
  for (auto& e : rep.entries)
    if (e.condition == "transversal-to-face" && !e.ok && e.witness) {
      REQUIRE(e.witness->size() == 2);
      if ((*e.witness)[0].is_zero() && (*e.witness)[1].is_zero()) transversality_failed_at_origin = true;
    }
  CHECK(transversality_failed_at_origin);
  // the restriction to the left edge is still immersive: corank 0 of the
  // 1x1 stratum block, while the full Jacobian has corank 1
  RatMatrix full = jacobian(F, {0, 0});
  CHECK(corank(full) == 1);
  RatMatrix restricted(1, 1);
  restricted.at(0, 0) = full.at(1, 1);
  CHECK(corank(restricted) == 0);
}

TEST_CASE("alongness failure is reported as condition 0") {
  // F = (x1 + x2, x2) does not keep the left edge on the left edge
  TruncatedPolyMap F = TruncatedPolyMap::zero(2, 2, 1);
  F.comp[0].set_coeff({1, 0}, Rational(1));
  F.comp[0].set_coeff({0, 1}, Rational(1));
  F.comp[1].set_coeff({0, 1}, Rational(1));
  PartialMap beta(2, 2, 0b01, {0, -1});
  AdmissibilityReport rep =
      admissibility_check(F, beta, MarkedFiniteSet::mk(2, 0), MarkedFiniteSet::mk(2, 0));
  CHECK(!rep.along);
  CHECK(!rep.admissible);
}

TEST_CASE("admissible maps have stratum-independent corank (restricted vs full)") {
  // for the projection example, at sampled stratum points the corank of the
  // stratum-restricted block equals that of the full Jacobian
  TruncatedPolyMap f = TruncatedPolyMap::zero(3, 1, 1);
  f.comp[0].set_coeff({0, 0, 1}, Rational(1));
  std::vector<int> xf = model_face_coords(MarkedFiniteSet::mk(3, 1));  // coords 1,2 (0-based)
  PartialMap beta(2, 1, 0b10, {-1, 0});
  std::vector<Point> pts{{Rational(1, 3), Rational(0), Rational(0)},
                         {Rational(0), Rational(1, 2), Rational(0)},
                         {Rational(1), Rational(0), Rational(1, 2)}};
  for (auto& p : pts) {
    uint32_t sigma = 0;
    for (size_t c = 0; c < xf.size(); ++c)
      if (p[xf[c]].is_zero()) sigma |= 1u << c;
    RatMatrix full = jacobian(f, p);
    // restricted block: drop source columns normal to the stratum and target
    // rows normal to the image stratum
    uint32_t tau = beta.image_mask(sigma);
    std::vector<int> cols, rows;
    for (int i = 0; i < 3; ++i) {
      bool normal = false;
      for (size_t c = 0; c < xf.size(); ++c)
        if (xf[c] == i && ((sigma >> c) & 1)) normal = true;
      if (!normal) cols.push_back(i);
    }
    for (int j = 0; j < 1; ++j)
      if (!((tau >> j) & 1)) rows.push_back(j);
    RatMatrix restricted((int)rows.size(), (int)cols.size());
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < cols.size(); ++c) restricted.at(r, c) = full.at(rows[r], cols[c]);
    CHECK(restricted.corank() == full.corank());
  }
}

TEST_CASE("along a full edging the corner mixed-partial block is symbolically diagonal") {
  // any map along the full identity edging of <2|0>: F_j vanishes on {x_j=0},
  // so every monomial of F_j is divisible by x_j and the off-diagonal linear
  // coefficients are exactly zero
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    TruncatedPolyMap F = TruncatedPolyMap::zero(2, 2, 3);
    std::vector<Monomial> mons;
    enumerate_monomials(2, 3, mons);
    for (int j = 0; j < 2; ++j)
      for (auto& a : mons)
        if (a[j] >= 1 && rng.uniform() < 0.6) F.comp[j].set_coeff(a, rng.rational_pm1(4));
    for (int j = 0; j < 2; ++j) {
      CHECK(F.comp[j].restrict_zero(j).is_zero());  // along the edging
      Monomial other(2, 0);
      other[1 - j] = 1;
      CHECK(F.comp[j].coeff(other) == Rational(0));  // off-diagonal block vanishes
    }
  }
}
