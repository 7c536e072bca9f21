#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "corners/poly.hpp"

namespace corners {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // rows = target, cols = source

inline Mat zero_mat(int r, int c) { return Mat(r, Vec(c, 0.0)); }

/** Radial bump profile: 1 inside the inner radius, 0 outside the outer one,
 * exp(1 - 1/(1-t^2)) in between with t the normalized radial coordinate.
 * Values in [0,1]; the gradient is continuous and in closed form. */
struct BumpProfile {
  Vec center;
  double inner = 0, outer = 1;

  double radial(double d) const {
    if (d <= inner) return 1.0;
    if (d >= outer) return 0.0;
    double t = (d - inner) / (outer - inner);
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  }

  double radial_derivative(double d) const {
    if (d <= inner || d >= outer) return 0.0;
    double t = (d - inner) / (outer - inner);
    double u = 1.0 - t * t;
    return std::exp(1.0 - 1.0 / u) * (-2.0 * t / (u * u)) / (outer - inner);
  }

  double value(const Vec& p) const { return radial(dist(p)); }

  Vec gradient(const Vec& p) const {
    Vec g(p.size(), 0.0);
    double d = dist(p);
    if (d <= inner || d >= outer || d == 0.0) return g;
    double s = radial_derivative(d) / d;
    for (size_t i = 0; i < p.size(); ++i) g[i] = s * (p[i] - center[i]);
    return g;
  }

 private:
  double dist(const Vec& p) const {
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) {
      double d = p[i] - (i < center.size() ? center[i] : 0.0);
      s += d * d;
    }
    return std::sqrt(s);
  }
};

/** Smooth monotone step: 0 for u <= 0, 1 for u >= 1, built from exp(-1/u).
 * All derivatives vanish at both ends. */
inline double smoothstep(double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

inline double smoothstep_derivative(double u) {
  if (u <= 0 || u >= 1) return 0.0;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  double da = a / (u * u);
  double db = -b / ((1.0 - u) * (1.0 - u));
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

/** Node of a closed composition tree over polynomial maps and bump-type
 * profiles. Values and Jacobians are both exact per node (chain rule); no
 * numerical differentiation happens on this path. */
class EvaluableMap {
 public:
  virtual ~EvaluableMap() = default;
  virtual int source_dim() const = 0;
  virtual int target_dim() const = 0;
  virtual Vec value(const Vec& p) const = 0;
  virtual Mat jacobian(const Vec& p) const = 0;
};

using EvalPtr = std::shared_ptr<const EvaluableMap>;

class PolyNode final : public EvaluableMap {
 public:
  explicit PolyNode(TruncatedPolyMap f) : f_(std::move(f)) {
    for (auto& c : f_.comp)
      for (int i = 0; i < f_.source_vars; ++i) grads_.push_back(c.partial_derivative(i));
  }
  int source_dim() const override { return f_.source_vars; }
  int target_dim() const override { return f_.target_dim(); }
  Vec value(const Vec& p) const override { return f_.eval_double(p); }
  Mat jacobian(const Vec& p) const override {
    Mat J = zero_mat(target_dim(), source_dim());
    for (int j = 0; j < target_dim(); ++j)
      for (int i = 0; i < source_dim(); ++i) J[j][i] = grads_[j * source_dim() + i].eval_double(p);
    return J;
  }
  const TruncatedPolyMap& poly() const { return f_; }

 private:
  TruncatedPolyMap f_;
  std::vector<TruncatedPoly> grads_;
};

class ConstNode final : public EvaluableMap {
 public:
  ConstNode(int src, Vec v) : src_(src), v_(std::move(v)) {}
  int source_dim() const override { return src_; }
  int target_dim() const override { return (int)v_.size(); }
  Vec value(const Vec&) const override { return v_; }
  Mat jacobian(const Vec&) const override { return zero_mat(target_dim(), src_); }

 private:
  int src_;
  Vec v_;
};

class SumNode final : public EvaluableMap {
 public:
  SumNode(EvalPtr a, EvalPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int source_dim() const override { return a_->source_dim(); }
  int target_dim() const override { return a_->target_dim(); }
  Vec value(const Vec& p) const override {
    Vec v = a_->value(p), w = b_->value(p);
    for (size_t i = 0; i < v.size(); ++i) v[i] += w[i];
    return v;
  }
  Mat jacobian(const Vec& p) const override {
    Mat J = a_->jacobian(p), K = b_->jacobian(p);
    for (size_t i = 0; i < J.size(); ++i)
      for (size_t j = 0; j < J[i].size(); ++j) J[i][j] += K[i][j];
    return J;
  }

 private:
  EvalPtr a_, b_;
};

/** scalar(p) * vec(p) with the product-rule Jacobian. */
class ScaledNode final : public EvaluableMap {
 public:
  ScaledNode(EvalPtr scalar, EvalPtr vec) : s_(std::move(scalar)), v_(std::move(vec)) {}
  int source_dim() const override { return v_->source_dim(); }
  int target_dim() const override { return v_->target_dim(); }
  Vec value(const Vec& p) const override {
    double s = s_->value(p)[0];
    Vec v = v_->value(p);
    for (auto& x : v) x *= s;
    return v;
  }
  Mat jacobian(const Vec& p) const override {
    double s = s_->value(p)[0];
    Vec v = v_->value(p);
    Mat Js = s_->jacobian(p);
    Mat Jv = v_->jacobian(p);
    Mat J = zero_mat(target_dim(), source_dim());
    for (int r = 0; r < target_dim(); ++r)
      for (int c = 0; c < source_dim(); ++c) J[r][c] = v[r] * Js[0][c] + s * Jv[r][c];
    return J;
  }

 private:
  EvalPtr s_, v_;
};

class ComposeNode final : public EvaluableMap {
 public:
  ComposeNode(EvalPtr outer, EvalPtr inner) : g_(std::move(outer)), f_(std::move(inner)) {}
  int source_dim() const override { return f_->source_dim(); }
  int target_dim() const override { return g_->target_dim(); }
  Vec value(const Vec& p) const override { return g_->value(f_->value(p)); }
  Mat jacobian(const Vec& p) const override {
    Vec fp = f_->value(p);
    Mat Jg = g_->jacobian(fp);
    Mat Jf = f_->jacobian(p);
    Mat J = zero_mat(target_dim(), source_dim());
    for (int r = 0; r < target_dim(); ++r)
      for (int c = 0; c < source_dim(); ++c)
        for (int k = 0; k < f_->target_dim(); ++k) J[r][c] += Jg[r][k] * Jf[k][c];
    return J;
  }

 private:
  EvalPtr g_, f_;
};

class ConcatNode final : public EvaluableMap {
 public:
  ConcatNode(std::vector<EvalPtr> parts) : parts_(std::move(parts)) {}
  int source_dim() const override { return parts_[0]->source_dim(); }
  int target_dim() const override {
    int t = 0;
    for (auto& p : parts_) t += p->target_dim();
    return t;
  }
  Vec value(const Vec& p) const override {
    Vec out;
    for (auto& part : parts_) {
      Vec v = part->value(p);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
  Mat jacobian(const Vec& p) const override {
    Mat out;
    for (auto& part : parts_) {
      Mat J = part->jacobian(p);
      out.insert(out.end(), J.begin(), J.end());
    }
    return out;
  }

 private:
  std::vector<EvalPtr> parts_;
};

class BumpNode final : public EvaluableMap {
 public:
  BumpNode(int src, BumpProfile b) : src_(src), b_(std::move(b)) {}
  int source_dim() const override { return src_; }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override { return {b_.value(p)}; }
  Mat jacobian(const Vec& p) const override { return {b_.gradient(p)}; }

 private:
  int src_;
  BumpProfile b_;
};

/** Scalar smoothstep of an affine functional: h((a.p - b)/width). Vanishes
 * flat where the slack is <= 0 and is identically 1 past the width. */
class FacetStepNode final : public EvaluableMap {
 public:
  FacetStepNode(Vec a, double b, double width) : a_(std::move(a)), b_(b), w_(width) {}
  int source_dim() const override { return (int)a_.size(); }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override { return {smoothstep(slack(p) / w_)}; }
  Mat jacobian(const Vec& p) const override {
    double d = smoothstep_derivative(slack(p) / w_) / w_;
    Vec g(a_.size());
    for (size_t i = 0; i < a_.size(); ++i) g[i] = d * a_[i];
    return {g};
  }

 private:
  Vec a_;
  double b_, w_;
  double slack(const Vec& p) const {
    double s = -b_;
    for (size_t i = 0; i < a_.size(); ++i) s += a_[i] * p[i];
    return s;
  }
};

/** 1 - smoothstep(slack/width): identically 1 on the facet, fading to 0 once
 * the slack passes the width. */
class FacetBumpNode final : public EvaluableMap {
 public:
  FacetBumpNode(Vec a, double b, double width) : a_(std::move(a)), b_(b), w_(width) {}
  int source_dim() const override { return (int)a_.size(); }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override { return {1.0 - smoothstep(slack(p) / w_)}; }
  Mat jacobian(const Vec& p) const override {
    double d = -smoothstep_derivative(slack(p) / w_) / w_;
    Vec g(a_.size());
    for (size_t i = 0; i < a_.size(); ++i) g[i] = d * a_[i];
    return {g};
  }

 private:
  Vec a_;
  double b_, w_;
  double slack(const Vec& p) const {
    double s = -b_;
    for (size_t i = 0; i < a_.size(); ++i) s += a_[i] * p[i];
    return s;
  }
};

/** Affine scalar a.p - b (a facet slack, exact for exact inputs). */
class AffineSlackNode final : public EvaluableMap {
 public:
  AffineSlackNode(Vec a, double b) : a_(std::move(a)), b_(b) {}
  int source_dim() const override { return (int)a_.size(); }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override {
    double s = -b_;
    for (size_t i = 0; i < a_.size(); ++i) s += a_[i] * p[i];
    return {s};
  }
  Mat jacobian(const Vec&) const override { return {a_}; }

 private:
  Vec a_;
  double b_;
};

class ProductScalarNode final : public EvaluableMap {
 public:
  ProductScalarNode(std::vector<EvalPtr> factors) : f_(std::move(factors)) {}
  int source_dim() const override { return f_[0]->source_dim(); }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override {
    double v = 1;
    for (auto& f : f_) v *= f->value(p)[0];
    return {v};
  }
  Mat jacobian(const Vec& p) const override {
    int n = source_dim();
    std::vector<double> vals;
    for (auto& f : f_) vals.push_back(f->value(p)[0]);
    Vec g(n, 0.0);
    for (size_t i = 0; i < f_.size(); ++i) {
      double rest = 1;
      for (size_t j = 0; j < f_.size(); ++j)
        if (j != i) rest *= vals[j];
      Mat Ji = f_[i]->jacobian(p);
      for (int c = 0; c < n; ++c) g[c] += rest * Ji[0][c];
    }
    return {g};
  }

 private:
  std::vector<EvalPtr> f_;
};

class SquaredNormNode final : public EvaluableMap {
 public:
  explicit SquaredNormNode(int src) : src_(src) {}
  int source_dim() const override { return src_; }
  int target_dim() const override { return 1; }
  Vec value(const Vec& p) const override {
    double s = 0;
    for (double x : p) s += x * x;
    return {s};
  }
  Mat jacobian(const Vec& p) const override {
    Vec g(p.size());
    for (size_t i = 0; i < p.size(); ++i) g[i] = 2 * p[i];
    return {g};
  }

 private:
  int src_;
};

/** Normalized convex combination sum_i w_i(p) v_i / sum_i w_i(p). The
 * denominator must stay positive on the domain (cover precondition). */
class ConvexCombinationNode final : public EvaluableMap {
 public:
  ConvexCombinationNode(std::vector<EvalPtr> weights, std::vector<Vec> points)
      : w_(std::move(weights)), v_(std::move(points)) {}
  int source_dim() const override { return w_[0]->source_dim(); }
  int target_dim() const override { return (int)v_[0].size(); }

  Vec weights_at(const Vec& p) const {
    Vec w;
    for (auto& f : w_) w.push_back(f->value(p)[0]);
    return w;
  }
  const std::vector<Vec>& points() const { return v_; }

  Vec value(const Vec& p) const override {
    Vec w = weights_at(p);
    double total = 0;
    for (double x : w) total += x;
    Vec out(target_dim(), 0.0);
    for (size_t i = 0; i < w.size(); ++i)
      for (int j = 0; j < target_dim(); ++j) out[j] += (w[i] / total) * v_[i][j];
    return out;
  }

  Mat jacobian(const Vec& p) const override {
    Vec w = weights_at(p);
    double total = 0;
    for (double x : w) total += x;
    std::vector<Vec> gw;
    Vec gtotal(source_dim(), 0.0);
    for (auto& f : w_) {
      Mat J = f->jacobian(p);
      gw.push_back(J[0]);
      for (int c = 0; c < source_dim(); ++c) gtotal[c] += J[0][c];
    }
    Mat J = zero_mat(target_dim(), source_dim());
    // d/dp [w_i/total] = (gw_i * total - w_i * gtotal) / total^2
    for (size_t i = 0; i < w.size(); ++i)
      for (int r = 0; r < target_dim(); ++r)
        for (int c = 0; c < source_dim(); ++c)
          J[r][c] += v_[i][r] * (gw[i][c] * total - w[i] * gtotal[c]) / (total * total);
    return J;
  }

 private:
  std::vector<EvalPtr> w_;
  std::vector<Vec> v_;
};

/** Selects a contiguous coordinate block [lo, lo+len) of the input. */
class SliceNode final : public EvaluableMap {
 public:
  SliceNode(int src, int lo, int len) : src_(src), lo_(lo), len_(len) {}
  int source_dim() const override { return src_; }
  int target_dim() const override { return len_; }
  Vec value(const Vec& p) const override { return Vec(p.begin() + lo_, p.begin() + lo_ + len_); }
  Mat jacobian(const Vec&) const override {
    Mat J = zero_mat(len_, src_);
    for (int i = 0; i < len_; ++i) J[i][lo_ + i] = 1.0;
    return J;
  }

 private:
  int src_, lo_, len_;
};

inline EvalPtr make_poly(TruncatedPolyMap f) { return std::make_shared<PolyNode>(std::move(f)); }
inline EvalPtr make_sum(EvalPtr a, EvalPtr b) { return std::make_shared<SumNode>(std::move(a), std::move(b)); }
inline EvalPtr make_scaled(EvalPtr s, EvalPtr v) {
  return std::make_shared<ScaledNode>(std::move(s), std::move(v));
}
inline EvalPtr make_concat(std::vector<EvalPtr> parts) { return std::make_shared<ConcatNode>(std::move(parts)); }

/** Whitney rho at k <= 1 for evaluable maps: value and Jacobian entries form
 * the 1-jet coefficient vector. */
inline double whitney_rho_eval(const EvaluableMap& F, const EvaluableMap& G, int k,
                               const std::vector<Vec>& grid) {
  if (grid.empty()) throw DomainError("whitney_rho: empty grid");
  if (k < 0 || k > 1) throw DomainError("whitney_rho on evaluable maps supports k <= 1");
  double best = 0;
  for (auto& p : grid) {
    double d2 = 0;
    Vec vf = F.value(p), vg = G.value(p);
    for (size_t i = 0; i < vf.size(); ++i) d2 += (vf[i] - vg[i]) * (vf[i] - vg[i]);
    if (k >= 1) {
      Mat Jf = F.jacobian(p), Jg = G.jacobian(p);
      for (size_t r = 0; r < Jf.size(); ++r)
        for (size_t c = 0; c < Jf[r].size(); ++c) d2 += (Jf[r][c] - Jg[r][c]) * (Jf[r][c] - Jg[r][c]);
    }
    double d = std::sqrt(d2);
    best = std::max(best, d / (1 + d));
  }
  return best;
}

}  // namespace corners
