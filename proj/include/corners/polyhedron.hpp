#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corners/edging.hpp"
#include "corners/rational.hpp"

namespace corners {

struct LpResult {
  enum Status { Infeasible, Optimal, Unbounded } status = Infeasible;
  Rational objective;
  std::vector<Rational> x;
};

namespace detail {

/** Two-phase simplex with Bland's rule on the standard form
 * max c.z s.t. Mz = d, z >= 0, all arithmetic exact rational.
 * Bland's smallest-index rule rules out cycling; exactness rules out the
 * usual floating-point degeneracy headaches.
 */
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rational>> M, std::vector<Rational> d, std::vector<Rational> c)
      : m_((int)M.size()), n_((int)c.size()), T_(std::move(M)), rhs_(std::move(d)), c_(std::move(c)) {
    for (int i = 0; i < m_; ++i)
      if (rhs_[i].sign() < 0) {
        for (auto& v : T_[i]) v = -v;
        rhs_[i] = -rhs_[i];
      }
    for (int i = 0; i < m_; ++i) {
      T_[i].resize(n_ + m_);
      T_[i][n_ + i] = Rational(1);
      basis_.push_back(n_ + i);
    }
  }

  LpResult solve() {
    // phase 1: drive out the artificials
    std::vector<Rational> obj1(n_ + m_);
    for (int i = 0; i < m_; ++i) obj1[n_ + i] = Rational(-1);
    run(obj1, n_ + m_);
    Rational v1(0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) v1 += -rhs_[i];
    if (v1.sign() < 0) return {LpResult::Infeasible, Rational(0), {}};
    purge_artificials();

    std::vector<Rational> obj2 = c_;
    obj2.resize(n_ + m_);
    if (!run(obj2, n_)) return {LpResult::Unbounded, Rational(0), {}};

    std::vector<Rational> z(n_);
    Rational val(0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) z[basis_[i]] = rhs_[i];
    for (int j = 0; j < n_; ++j) val += c_[j] * z[j];
    return {LpResult::Optimal, val, z};
  }

 private:
  int m_, n_;
  std::vector<std::vector<Rational>> T_;
  std::vector<Rational> rhs_;
  std::vector<Rational> c_;
  std::vector<int> basis_;

  void pivot(int row, int col) {
    Rational p = T_[row][col];
    for (auto& v : T_[row]) v /= p;
    rhs_[row] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row || T_[i][col].is_zero()) continue;
      Rational f = T_[i][col];
      for (int j = 0; j < (int)T_[i].size(); ++j) T_[i][j] -= f * T_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  /** Maximizes obj over columns < allowed; returns false on unboundedness. */
  bool run(const std::vector<Rational>& obj, int allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < allowed && enter < 0; ++j) {
        Rational rc = obj[j];
        for (int i = 0; i < m_; ++i)
          if (!T_[i][j].is_zero()) rc -= obj[basis_[i]] * T_[i][j];
        if (rc.sign() > 0) enter = j;  // Bland: first improving index
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m_; ++i) {
        if (T_[i][enter].sign() <= 0) continue;
        Rational ratio = rhs_[i] / T_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  /** After phase 1 any artificial still basic sits at zero: pivot it out on
   * a structural column, or drop its (redundant) row. */
  void purge_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_ && col < 0; ++j)
        if (!T_[i][j].is_zero()) col = j;
      if (col >= 0) {
        pivot(i, col);
      } else {
        T_.erase(T_.begin() + i);
        rhs_.erase(rhs_.begin() + i);
        basis_.erase(basis_.begin() + i);
        --m_;
        --i;
      }
    }
  }
};

}  // namespace detail

/** max c.x subject to A x >= b for free x, with rows listed in eq_rows held
 * at equality. Free variables are split into differences of nonnegatives
 * before the standard-form solve. */
inline LpResult solve_lp(const std::vector<Rational>& c, const std::vector<std::vector<Rational>>& A,
                         const std::vector<Rational>& b, const std::vector<int>& eq_rows = {}) {
  int rows = (int)A.size();
  int nx = (int)c.size();
  std::vector<bool> eq(rows, false);
  for (int r : eq_rows) eq[r] = true;
  int n_ineq = 0;
  for (int i = 0; i < rows; ++i)
    if (!eq[i]) ++n_ineq;
  int nz = 2 * nx + n_ineq;
  std::vector<std::vector<Rational>> M(rows, std::vector<Rational>(nz));
  int slack = 0;
  for (int i = 0; i < rows; ++i) {
    if ((int)A[i].size() != nx) throw ShapeError("LP row arity mismatch");
    for (int j = 0; j < nx; ++j) {
      M[i][j] = A[i][j];
      M[i][nx + j] = -A[i][j];
    }
    if (!eq[i]) M[i][2 * nx + slack++] = Rational(-1);
  }
  std::vector<Rational> cz(nz);
  for (int j = 0; j < nx; ++j) {
    cz[j] = c[j];
    cz[nx + j] = -c[j];
  }
  LpResult res = detail::Simplex(std::move(M), b, std::move(cz)).solve();
  if (res.status != LpResult::Optimal) return res;
  std::vector<Rational> x(nx);
  for (int j = 0; j < nx; ++j) x[j] = res.x[j] - res.x[nx + j];
  res.x = std::move(x);
  return res;
}

inline bool lp_feasible(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                        const std::vector<int>& eq_rows = {}) {
  int nx = A.empty() ? 0 : (int)A[0].size();
  return solve_lp(std::vector<Rational>(nx), A, b, eq_rows).status == LpResult::Optimal;
}

/** Convex polyhedron {x : Ax >= b} in H-representation with facet labels.
 * Construction validates that no two rows cut the same hyperplane and that
 * the polyhedron is full-dimensional (interior-point LP). */
struct Polyhedron {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<std::string> labels;

  Polyhedron() = default;
  Polyhedron(std::vector<std::vector<Rational>> A_, std::vector<Rational> b_, std::vector<std::string> labels_)
      : A(std::move(A_)), b(std::move(b_)), labels(std::move(labels_)) {
    if (A.size() != b.size() || A.size() != labels.size()) throw ShapeError("polyhedron row count mismatch");
    validate();
  }

  int dim() const { return A.empty() ? ambient_dim_hint : (int)A[0].size(); }
  int rows() const { return (int)A.size(); }
  int ambient_dim_hint = 0;  // used only by the A-empty (whole space) case

  static Polyhedron whole_space(int n) {
    Polyhedron p;
    p.ambient_dim_hint = n;
    return p;
  }

  /** Unit box [0,1]^n with faces lo1..lon, hi1..hin. */
  static Polyhedron box(int n) {
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> lo(n), hi(n);
      lo[i] = Rational(1);
      hi[i] = Rational(-1);
      A.push_back(lo);
      b.push_back(Rational(0));
      labels.push_back("lo" + std::to_string(i + 1));
      A.push_back(hi);
      b.push_back(Rational(-1));
      labels.push_back("hi" + std::to_string(i + 1));
    }
    return Polyhedron(std::move(A), std::move(b), std::move(labels));
  }

  /** The model H^<m|k>: one constraint x_i >= 0 per unmarked coordinate. */
  static Polyhedron orthant(int m, int k) {
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<std::string> labels;
    for (int i = k; i < m; ++i) {
      std::vector<Rational> row(m);
      row[i] = Rational(1);
      A.push_back(row);
      b.push_back(Rational(0));
      labels.push_back("x" + std::to_string(i + 1));
    }
    Polyhedron p(std::move(A), std::move(b), std::move(labels));
    p.ambient_dim_hint = m;
    return p;
  }

  bool contains(const std::vector<Rational>& x) const {
    for (int i = 0; i < rows(); ++i) {
      Rational lhs(0);
      for (int j = 0; j < dim(); ++j) lhs += A[i][j] * x[j];
      if (lhs < b[i]) return false;
    }
    return true;
  }

  Rational slack(int row, const std::vector<Rational>& x) const {
    Rational lhs(0);
    for (int j = 0; j < dim(); ++j) lhs += A[row][j] * x[j];
    return lhs - b[row];
  }

 private:
  void validate() const {
    if (A.empty()) return;
    int n = (int)A[0].size();
    for (auto& row : A)
      if ((int)row.size() != n) throw ShapeError("polyhedron ragged rows");
    for (int i = 0; i < rows(); ++i)
      for (int j = i + 1; j < rows(); ++j)
        if (same_hyperplane(i, j))
          throw ValidationError("rows '" + labels[i] + "' and '" + labels[j] + "' define the same hyperplane");
    // full-dimensionality: max t s.t. Ax >= b + t, t <= 1 must give t > 0
    std::vector<std::vector<Rational>> A2;
    std::vector<Rational> b2;
    for (int i = 0; i < rows(); ++i) {
      auto row = A[i];
      row.push_back(Rational(-1));
      A2.push_back(row);
      b2.push_back(b[i]);
    }
    std::vector<Rational> trow(n + 1);
    trow[n] = Rational(-1);
    A2.push_back(trow);
    b2.push_back(Rational(-1));
    std::vector<Rational> c(n + 1);
    c[n] = Rational(1);
    LpResult r = solve_lp(c, A2, b2);
    if (r.status != LpResult::Optimal || r.objective.sign() <= 0)
      throw ValidationError("polyhedron is empty or not full-dimensional");
  }

  bool same_hyperplane(int i, int j) const {
    int n = (int)A[i].size();
    int pivot = -1;
    for (int t = 0; t < n; ++t)
      if (!A[i][t].is_zero()) {
        pivot = t;
        break;
      }
    if (pivot < 0) return false;
    if (A[j][pivot].is_zero()) return false;
    Rational lambda = A[j][pivot] / A[i][pivot];
    for (int t = 0; t < n; ++t)
      if (A[j][t] != lambda * A[i][t]) return false;
    return b[j] == lambda * b[i];
  }
};

/** Exact feasibility of the face with tight set sigma. */
inline bool face_nonempty(const Polyhedron& P, uint32_t sigma) {
  std::vector<int> eq;
  for (int i = 0; i < P.rows(); ++i)
    if ((sigma >> i) & 1) eq.push_back(i);
  return lp_feasible(P.A, P.b, eq);
}

/** A point of the face over sigma with maximal uniform slack on the other
 * constraints (capped at 1); exact LP. Throws on an empty face. */
inline std::vector<Rational> relative_interior_point(const Polyhedron& P, uint32_t sigma) {
  int n = P.dim();
  if (P.rows() == 0) return std::vector<Rational>(n, Rational(0));
  std::vector<std::vector<Rational>> A2;
  std::vector<Rational> b2;
  std::vector<int> eq;
  for (int i = 0; i < P.rows(); ++i) {
    auto row = P.A[i];
    row.push_back(((sigma >> i) & 1) ? Rational(0) : Rational(-1));
    A2.push_back(row);
    b2.push_back(P.b[i]);
    if ((sigma >> i) & 1) eq.push_back(i);
  }
  std::vector<Rational> trow(n + 1);
  trow[n] = Rational(-1);
  A2.push_back(trow);
  b2.push_back(Rational(-1));
  std::vector<Rational> c(n + 1);
  c[n] = Rational(1);
  LpResult r = solve_lp(c, A2, b2, eq);
  if (r.status != LpResult::Optimal) throw DomainError("relative interior of an empty face");
  r.x.pop_back();
  return r.x;
}

/** Face structure of a polyhedron: sigma is nonempty iff the system with the
 * sigma-rows tight stays feasible, decided by exact LP. Subset closure is
 * automatic (more equalities only shrink); the codimension cap is what can
 * genuinely fail, on non-simple polyhedra. */
inline FaceStructure polyhedron_faces(const Polyhedron& P) {
  int k = P.rows();
  if (k > 16) throw ShapeError("too many facets for explicit face enumeration");
  std::vector<char> feas(1u << k, 0);
  std::vector<uint32_t> n;
  for (uint32_t sigma = 0; sigma < (1u << k); ++sigma) {
    // prune: all one-smaller subsets must already be feasible
    bool candidate = true;
    uint32_t live = sigma;
    while (live && candidate) {
      uint32_t sub = sigma & ~(live & -live);
      live &= live - 1;
      if (!feas[sub]) candidate = false;
    }
    if (candidate && face_nonempty(P, sigma)) {
      feas[sigma] = 1;
      n.push_back(sigma);
    }
  }
  return FaceStructure(P.labels, P.dim(), std::move(n));
}

/** Exact membership of a point in the convex hull of finitely many points:
 * LP feasibility for the barycentric weights. */
inline bool in_convex_hull(const std::vector<Rational>& x, const std::vector<std::vector<Rational>>& pts) {
  if (pts.empty()) return false;
  int n = (int)x.size();
  int k = (int)pts.size();
  // weights w >= 0, sum w = 1, sum w * pts = x  — solved as equalities
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<int> eq;
  for (int j = 0; j < n; ++j) {
    std::vector<Rational> row(k);
    for (int i = 0; i < k; ++i) row[i] = pts[i][j];
    A.push_back(row);
    b.push_back(x[j]);
    eq.push_back((int)A.size() - 1);
  }
  A.push_back(std::vector<Rational>(k, Rational(1)));
  b.push_back(Rational(1));
  eq.push_back((int)A.size() - 1);
  for (int i = 0; i < k; ++i) {
    std::vector<Rational> row(k);
    row[i] = Rational(1);
    A.push_back(row);
    b.push_back(Rational(0));
  }
  return lp_feasible(A, b, eq);
}

}  // namespace corners
