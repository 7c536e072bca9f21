#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "corners/edging.hpp"
#include "corners/evaluable.hpp"

namespace corners {

/** Axis-aligned polytope model: coordinates 0..m-1, a lower facet x_i = 0
 * where the lower bit is set and an upper facet x_i = 1 where the upper bit
 * is set. Covers the box [0,1]^m and the models H^<m|k>. */
struct BoxModel {
  int m = 0;
  uint32_t lower = 0, upper = 0;

  static BoxModel box(int m) {
    uint32_t all = m == 0 ? 0u : (1u << m) - 1;
    return BoxModel{m, all, all};
  }
  static BoxModel orthant(int m, int k) {  // H^<m|k>: first k coordinates free
    uint32_t all = m == 0 ? 0u : (1u << m) - 1;
    uint32_t marked = k == 0 ? 0u : (1u << k) - 1;
    return BoxModel{m, all & ~marked, 0u};
  }

  struct Facet {
    int coord;
    bool is_upper;
    std::string label() const { return (is_upper ? "up" : "lo") + std::to_string(coord + 1); }
  };

  std::vector<Facet> facets() const {
    std::vector<Facet> out;
    for (int i = 0; i < m; ++i)
      if ((lower >> i) & 1) out.push_back({i, false});
    for (int i = 0; i < m; ++i)
      if ((upper >> i) & 1) out.push_back({i, true});
    return out;
  }

  /** Subsets of facets meet iff they never pair a lower with an upper facet
   * of the same coordinate. */
  FaceStructure structure() const {
    auto fs = facets();
    std::vector<std::string> labels;
    for (auto& f : fs) labels.push_back(f.label());
    std::vector<uint32_t> n;
    for (uint32_t mask = 0; mask < (1u << fs.size()); ++mask) {
      bool ok = true;
      for (size_t a = 0; a < fs.size() && ok; ++a)
        for (size_t b = a + 1; b < fs.size() && ok; ++b)
          if (((mask >> a) & 1) && ((mask >> b) & 1) && fs[a].coord == fs[b].coord) ok = false;
      if (ok) n.push_back(mask);
    }
    return FaceStructure(std::move(labels), m, std::move(n));
  }
};

/** Vector field on a box model built from per-coordinate profile terms.
 * A term contributes sign * weight * profile(s) * e_coord, where s is the
 * distance to the term's facet; the "plateau" profile is 1 on [0, a] and
 * fades to 0 at b (supported in [0, b)), and the "constant" profile is 1
 * everywhere. Components never mix coordinates, so tangency to the
 * untouched facets is structural, not numerical. */
struct FlowField {
  struct Term {
    int coord = 0;
    bool from_upper = false;
    bool constant_profile = false;
    double inner = 0.15, outer = 0.45;
    double weight = 1.0;
  };

  int dim = 0;
  std::vector<Term> terms;

  Vec value(const Vec& p) const {
    Vec v(dim, 0.0);
    for (auto& t : terms) {
      double s = t.from_upper ? 1.0 - p[t.coord] : p[t.coord];
      double rho = t.constant_profile ? 1.0 : plateau(s, t.inner, t.outer);
      v[t.coord] += (t.from_upper ? -1.0 : 1.0) * t.weight * rho;
    }
    return v;
  }

  static double plateau(double s, double a, double b) {
    return 1.0 - smoothstep((s - a) / (b - a));
  }

  bool touches_coord(int i) const {
    for (auto& t : terms)
      if (t.coord == i) return true;
    return false;
  }

  FlowField operator+(const FlowField& o) const {
    FlowField out = *this;
    for (auto& t : o.terms) out.terms.push_back(t);
    return out;
  }

  /** Two terms have overlapping supports iff they act on the same coordinate
   * and their support intervals intersect. */
  static bool supports_overlap(const Term& a, const Term& b) {
    if (a.coord != b.coord) return false;
    if (a.constant_profile || b.constant_profile) return true;
    auto interval = [](const Term& t) {
      double lo = t.from_upper ? 1.0 - t.outer : 0.0;
      double hi = t.from_upper ? 1.0 : t.outer;
      return std::pair<double, double>(lo, hi);
    };
    auto [alo, ahi] = interval(a);
    auto [blo, bhi] = interval(b);
    return alo < bhi && blo < ahi;
  }
};

/** C-collaring field on the model: transversal to C (unit inward component
 * on the facet), tangent to every other facet, inward-pointing everywhere.
 * The support truncation keeps it away from the opposite facet. */
inline FlowField build_collaring_field(const BoxModel& model, const BoxModel::Facet& C) {
  bool has_facet = C.is_upper ? ((model.upper >> C.coord) & 1) : ((model.lower >> C.coord) & 1);
  if (!has_facet) throw DomainError("build_collaring_field: no such facet on the model");
  FlowField f;
  f.dim = model.m;
  f.terms.push_back({C.coord, C.is_upper, false, 0.15, 0.45, 1.0});
  return f;
}

struct FlowResult {
  std::vector<Vec> trajectory;
  double h = 0;
  double error_estimate = 0;  // endpoint deviation against a half-step rerun
  double clamp_total = 0;     // total magnitude clamped back into the model
  const Vec& end() const { return trajectory.back(); }
};

namespace detail {
inline Vec rk4_step(const FlowField& f, const Vec& p, double h) {
  Vec k1 = f.value(p);
  Vec q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[i] = p[i] + 0.5 * h * k1[i];
  Vec k2 = f.value(q);
  for (size_t i = 0; i < p.size(); ++i) q[i] = p[i] + 0.5 * h * k2[i];
  Vec k3 = f.value(q);
  for (size_t i = 0; i < p.size(); ++i) q[i] = p[i] + h * k3[i];
  Vec k4 = f.value(q);
  Vec out(p.size());
  for (size_t i = 0; i < p.size(); ++i)
    out[i] = p[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}
}  // namespace detail

/** Classical fourth-order integration of the flow for time t with fixed step
 * h (plus one partial final step). Unmarked coordinates that dip below zero
 * by rounding are clamped back, with the clamped magnitude logged. */
inline FlowResult flow(const FlowField& f, const BoxModel& model, Vec p, double t, double h,
                       bool record_trajectory = true) {
  if (t < 0) throw DomainError("flow: negative time");
  if (h <= 0) throw IntegrationError("flow: step must be positive");
  if (!(t / h < 1e8)) throw IntegrationError("flow: step underflow");
  FlowResult res;
  res.h = h;
  res.trajectory.push_back(p);
  double remaining = t;
  auto advance = [&](Vec& state, double step) {
    state = detail::rk4_step(f, state, step);
    for (int i = 0; i < model.m; ++i) {
      bool lower_bound = (model.lower >> i) & 1;
      if (lower_bound && state[i] < 0) {
        if (state[i] < -1e-9) throw IntegrationError("flow left the model");
        res.clamp_total += -state[i];
        state[i] = 0;
      }
      if (std::abs(state[i]) > 1e9) throw IntegrationError("flow blowup");
    }
  };
  while (remaining > 0) {
    double step = std::min(h, remaining);
    advance(p, step);
    remaining -= step;
    if (record_trajectory) res.trajectory.push_back(p);
  }
  if (!record_trajectory) res.trajectory.push_back(p);
  // error estimate by halving the step once
  Vec probe = res.trajectory.front();
  double rem = t;
  FlowResult half;
  half.h = h / 2;
  while (rem > 0) {
    double step = std::min(h / 2, rem);
    probe = detail::rk4_step(f, probe, step);
    rem -= step;
  }
  for (size_t i = 0; i < probe.size(); ++i)
    res.error_estimate = std::max(res.error_estimate, std::abs(probe[i] - res.end()[i]));
  return res;
}

inline Vec flow_point(const FlowField& f, const BoxModel& model, const Vec& p, double t, double h) {
  return flow(f, model, p, t, h, false).end();
}

/** Central finite-difference Lie bracket [X,Y](p) = DY.X - DX.Y. */
inline Vec lie_bracket_fd(const FlowField& X, const FlowField& Y, const Vec& p, double delta = 1e-5) {
  size_t n = p.size();
  Vec xp = X.value(p), yp = Y.value(p);
  Vec out(n, 0.0);
  auto shift = [&](const Vec& base, const Vec& dir, double s) {
    Vec q(base);
    for (size_t i = 0; i < n; ++i) q[i] += s * dir[i];
    return q;
  };
  Vec y_plus = Y.value(shift(p, xp, delta)), y_minus = Y.value(shift(p, xp, -delta));
  Vec x_plus = X.value(shift(p, yp, delta)), x_minus = X.value(shift(p, yp, -delta));
  for (size_t i = 0; i < n; ++i)
    out[i] = (y_plus[i] - y_minus[i]) / (2 * delta) - (x_plus[i] - x_minus[i]) / (2 * delta);
  return out;
}

struct CollarReport {
  bool well_defined = true;       // merged fields have disjoint supports
  double max_commutator = 0;      // finite-difference Lie bracket, max norm
  double max_order_defect = 0;    // composed flows in the two orders
  bool identity_at_zero = true;   // flow at t = 0 is the identity, exactly
  uint64_t samples = 0;
};

/** Compatibility of the beta-collaring family: for every pair of target
 * faces D != D', the merged fields xi^beta_D must commute (numerically) and
 * their flows must compose order-independently; the t = 0 flow must be the
 * identity on the nose. */
inline CollarReport beta_collaring_check(const BoxModel& model, const Edging& beta, int target_faces,
                                         const std::vector<Vec>& samples, double t1 = 0.2, double t2 = 0.3,
                                         double h = 1e-3) {
  auto facets = model.facets();
  if (beta.beta.source_size != (int)facets.size() || beta.beta.target_size != target_faces)
    throw ShapeError("beta_collaring_check: edging does not match the model");
  CollarReport rep;
  std::vector<FlowField> merged(target_faces);
  for (auto& f : merged) f.dim = model.m;
  for (int c = 0; c < (int)facets.size(); ++c) {
    if (!beta.beta.defined(c)) continue;
    merged[beta.beta.images[c]] = merged[beta.beta.images[c]] + build_collaring_field(model, facets[c]);
  }
  for (auto& field : merged)
    for (size_t a = 0; a < field.terms.size(); ++a)
      for (size_t b = a + 1; b < field.terms.size(); ++b)
        if (FlowField::supports_overlap(field.terms[a], field.terms[b])) rep.well_defined = false;

  for (int d1 = 0; d1 < target_faces; ++d1)
    for (int d2 = d1 + 1; d2 < target_faces; ++d2) {
      if (merged[d1].terms.empty() || merged[d2].terms.empty()) continue;
      for (auto& p : samples) {
        ++rep.samples;
        Vec br = lie_bracket_fd(merged[d1], merged[d2], p);
        for (double v : br) rep.max_commutator = std::max(rep.max_commutator, std::abs(v));
        Vec a = flow_point(merged[d2], model, flow_point(merged[d1], model, p, t1, h), t2, h);
        Vec b = flow_point(merged[d1], model, flow_point(merged[d2], model, p, t2, h), t1, h);
        for (size_t i = 0; i < a.size(); ++i)
          rep.max_order_defect = std::max(rep.max_order_defect, std::abs(a[i] - b[i]));
      }
    }
  for (auto& p : samples)
    for (auto& field : merged) {
      if (field.terms.empty()) continue;
      if (flow_point(field, model, p, 0.0, h) != p) rep.identity_at_zero = false;
    }
  return rep;
}

}  // namespace corners
