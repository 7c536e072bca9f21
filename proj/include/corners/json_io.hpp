#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corners/arrangement.hpp"
#include "corners/edging.hpp"
#include "corners/lattice.hpp"
#include "corners/perturb.hpp"
#include "corners/poly.hpp"
#include "corners/polyhedron.hpp"

namespace corners {

using Json = nlohmann::ordered_json;

struct ManifestError : Error {
  std::string pointer;
  ManifestError(std::string ptr, const std::string& msg) : Error(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

inline Rational rational_from_json(const Json& j, const std::string& ptr) {
  if (j.is_number_integer()) return Rational((long long)j.get<int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  throw ManifestError(ptr, "expected a rational as integer or \"p/q\" string");
}

inline Json rational_to_json(const Rational& r) { return Json(r.str()); }

// ---- posets / lattices: {"elements":[...], "leq":[[0/1,...],...]} ----
// Derived meet/join tables are never serialized; they are recomputed on load.

inline Json poset_to_json(const FinitePoset& p) {
  Json j;
  j["elements"] = p.names;
  Json rows = Json::array();
  for (int i = 0; i < p.n; ++i) {
    Json row = Json::array();
    for (int k = 0; k < p.n; ++k) row.push_back(p.leq(i, k) ? 1 : 0);
    rows.push_back(row);
  }
  j["leq"] = rows;
  return j;
}

inline FinitePoset poset_from_json(const Json& j, const std::string& ptr) {
  if (!j.contains("elements") || !j.contains("leq")) throw ManifestError(ptr, "poset needs elements and leq");
  std::vector<std::string> names = j["elements"].get<std::vector<std::string>>();
  int n = (int)names.size();
  if (n > 64) throw ManifestError(ptr, "poset too large");
  std::vector<uint64_t> rows(n, 0);
  const Json& leq = j["leq"];
  if (!leq.is_array() || (int)leq.size() != n) throw ManifestError(ptr + "/leq", "relation must be an n x n matrix");
  for (int i = 0; i < n; ++i) {
    if ((int)leq[i].size() != n) throw ManifestError(ptr + "/leq", "relation must be an n x n matrix");
    for (int k = 0; k < n; ++k)
      if (leq[i][k].get<int>() != 0) rows[i] |= 1ull << k;
  }
  return FinitePoset(n, rows, names);
}

inline Json lattice_to_json(const FiniteLattice& L) { return poset_to_json(L.poset()); }

inline FiniteLattice lattice_from_json(const Json& j, const std::string& ptr) {
  return FiniteLattice::from_poset(poset_from_json(j, ptr));
}

// ---- marked sets: {"m":2,"k":1} (normal form <m|k>) ----

inline Json marked_set_to_json(const MarkedFiniteSet& I) {
  return Json{{"m", I.m}, {"k", I.k()}};
}

inline MarkedFiniteSet marked_set_from_json(const Json& j, const std::string& ptr) {
  if (!j.contains("m") || !j.contains("k")) throw ManifestError(ptr, "marked set needs m and k");
  return MarkedFiniteSet::mk(j["m"].get<int>(), j["k"].get<int>());
}

// ---- arrangements: {"shape":"name","ambient":{"m":..,"k":..},"assign":{"s":[1-based coords]}} ----

inline Json arrangement_to_json(const SetArrangement& A, const std::string& shape_name) {
  Json j;
  j["shape"] = shape_name;
  j["ambient"] = marked_set_to_json(A.ambient);
  Json assign;
  for (int s = 0; s < A.shape.size(); ++s) {
    Json coords = Json::array();
    for (int i = 0; i < A.ambient.m; ++i)
      if ((A.at(s) >> i) & 1) coords.push_back(i + 1);
    assign[A.shape.name(s)] = coords;
  }
  j["assign"] = assign;
  return j;
}

inline SetArrangement arrangement_from_json(const Json& j, const FiniteLattice& shape, const std::string& ptr) {
  MarkedFiniteSet ambient = marked_set_from_json(j.at("ambient"), ptr + "/ambient");
  std::vector<uint32_t> assign(shape.size(), 0);
  const Json& as = j.at("assign");
  for (int s = 0; s < shape.size(); ++s) {
    if (!as.contains(shape.name(s))) throw ManifestError(ptr + "/assign", "missing element " + shape.name(s));
    for (auto& c : as[shape.name(s)]) {
      int coord = c.get<int>();
      if (coord < 1 || coord > ambient.m) throw ManifestError(ptr + "/assign", "coordinate out of range");
      assign[s] |= 1u << (coord - 1);
    }
  }
  return SetArrangement(shape, ambient, std::move(assign));
}

// ---- face structures: {"faces":[...],"nonempty":[[labels]],"dim":m} ----

inline Json face_structure_to_json(const FaceStructure& X) {
  Json j;
  j["faces"] = X.faces;
  Json n = Json::array();
  for (uint32_t mask : X.nonempty) {
    Json subset = Json::array();
    for (int i = 0; i < X.count(); ++i)
      if ((mask >> i) & 1) subset.push_back(X.faces[i]);
    n.push_back(subset);
  }
  j["nonempty"] = n;
  j["dim"] = X.ambient_dim;
  return j;
}

inline FaceStructure face_structure_from_json(const Json& j, const std::string& ptr) {
  std::vector<std::string> faces = j.at("faces").get<std::vector<std::string>>();
  int dim = j.at("dim").get<int>();
  std::vector<uint32_t> nonempty{0};
  for (auto& subset : j.at("nonempty")) {
    uint32_t mask = 0;
    for (auto& label : subset) {
      auto it = std::find(faces.begin(), faces.end(), label.get<std::string>());
      if (it == faces.end()) throw ManifestError(ptr + "/nonempty", "unknown face label");
      mask |= 1u << (it - faces.begin());
    }
    nonempty.push_back(mask);
  }
  return FaceStructure(std::move(faces), dim, std::move(nonempty));
}

// ---- edgings: {"source":"X","target":"Y","map":{"C":"D"}} ----

struct EdgingEntry {
  std::string source, target;
  Edging edging;
};

inline Json edging_to_json(const EdgingEntry& e, const FaceStructure& X, const FaceStructure& Y) {
  Json j;
  j["source"] = e.source;
  j["target"] = e.target;
  Json m;
  for (int c = 0; c < e.edging.beta.source_size; ++c)
    if (e.edging.beta.defined(c)) m[X.faces[c]] = Y.faces[e.edging.beta.images[c]];
  j["map"] = m;
  return j;
}

inline EdgingEntry edging_from_json(const Json& j, const FaceStructure& X, const FaceStructure& Y,
                                    const std::string& ptr) {
  EdgingEntry out;
  out.source = j.at("source").get<std::string>();
  out.target = j.at("target").get<std::string>();
  uint32_t dom = 0;
  std::vector<int> img(X.count(), -1);
  for (auto& [from, to] : j.at("map").items()) {
    int c = X.face_index(from);
    int d = Y.face_index(to.get<std::string>());
    dom |= 1u << c;
    img[c] = d;
  }
  out.edging = Edging{PartialMap(X.count(), Y.count(), dom, img)};
  (void)ptr;
  return out;
}

// ---- polyhedra: {"A":[[rationals]],"b":[rationals],"labels":[...]} ----

inline Json polyhedron_to_json(const Polyhedron& P) {
  Json j;
  Json A = Json::array();
  for (auto& row : P.A) {
    Json r = Json::array();
    for (auto& v : row) r.push_back(rational_to_json(v));
    A.push_back(r);
  }
  j["A"] = A;
  Json b = Json::array();
  for (auto& v : P.b) b.push_back(rational_to_json(v));
  j["b"] = b;
  j["labels"] = P.labels;
  if (P.A.empty()) j["dim"] = P.ambient_dim_hint;
  return j;
}

inline Polyhedron polyhedron_from_json(const Json& j, const std::string& ptr) {
  std::vector<std::vector<Rational>> A;
  for (size_t i = 0; i < j.at("A").size(); ++i) {
    std::vector<Rational> row;
    for (size_t k = 0; k < j["A"][i].size(); ++k)
      row.push_back(rational_from_json(j["A"][i][k], ptr + "/A"));
    A.push_back(row);
  }
  std::vector<Rational> b;
  for (auto& v : j.at("b")) b.push_back(rational_from_json(v, ptr + "/b"));
  std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
  Polyhedron P(std::move(A), std::move(b), std::move(labels));
  if (j.contains("dim")) P.ambient_dim_hint = j["dim"].get<int>();
  return P;
}

// ---- polynomial maps: {"r":..,"vars":[..],"components":[{"terms":[{"alpha":[..],"coef":".."}]}]} ----

inline Json poly_to_json_terms(const TruncatedPoly& p) {
  Json terms = Json::array();
  for (auto& [a, c] : p.terms()) {
    Json t;
    t["alpha"] = a;
    t["coef"] = rational_to_json(c);
    terms.push_back(t);
  }
  return terms;
}

inline Json poly_map_to_json(const TruncatedPolyMap& f) {
  Json j;
  j["r"] = f.bound;
  Json vars = Json::array();
  for (int i = 0; i < f.source_vars; ++i) vars.push_back("x" + std::to_string(i + 1));
  j["vars"] = vars;
  Json comps = Json::array();
  for (auto& c : f.comp) comps.push_back(Json{{"terms", poly_to_json_terms(c)}});
  j["components"] = comps;
  return j;
}

inline TruncatedPolyMap poly_map_from_json(const Json& j, const std::string& ptr) {
  int r = j.at("r").get<int>();
  int nvars = (int)j.at("vars").size();
  auto read_poly = [&](const Json& terms) {
    TruncatedPoly p(nvars, r);
    for (auto& t : terms) {
      Monomial a = t.at("alpha").get<Monomial>();
      if ((int)a.size() != nvars) throw ManifestError(ptr, "alpha arity mismatch");
      if (total_degree(a) > r) throw ManifestError(ptr, "term above the degree bound");
      p.set_coeff(a, rational_from_json(t.at("coef"), ptr));
    }
    return p;
  };
  std::vector<TruncatedPoly> comps;
  if (j.contains("components")) {
    for (auto& cj : j["components"]) comps.push_back(read_poly(cj.at("terms")));
  } else if (j.contains("terms")) {
    comps.push_back(read_poly(j["terms"]));  // single-polynomial shorthand
  } else {
    throw ManifestError(ptr, "polynomial needs components or terms");
  }
  return TruncatedPolyMap(nvars, r, std::move(comps));
}

// ---- scenarios for the perturb subcommand ----

struct ScenarioEntry {
  std::string map_name, source_arr, target_arr;
  Rational delta = Rational(1);
  std::vector<JetPin> pins;
  std::vector<Point> grid;
};

inline Json scenario_to_json(const ScenarioEntry& s) {
  Json j;
  j["map"] = s.map_name;
  j["source_arrangement"] = s.source_arr;
  j["target_arrangement"] = s.target_arr;
  j["delta"] = rational_to_json(s.delta);
  Json pins = Json::array();
  for (auto& p : s.pins) {
    Json pj;
    pj["component"] = p.component + 1;
    pj["alpha"] = p.alpha;
    pj["value"] = rational_to_json(p.value);
    pins.push_back(pj);
  }
  j["pins"] = pins;
  Json grid = Json::array();
  for (auto& pt : s.grid) {
    Json row = Json::array();
    for (auto& v : pt) row.push_back(rational_to_json(v));
    grid.push_back(row);
  }
  j["grid"] = grid;
  return j;
}

inline ScenarioEntry scenario_from_json(const Json& j, const std::string& ptr) {
  ScenarioEntry out;
  out.map_name = j.at("map").get<std::string>();
  out.source_arr = j.at("source_arrangement").get<std::string>();
  out.target_arr = j.at("target_arrangement").get<std::string>();
  if (j.contains("delta")) out.delta = rational_from_json(j["delta"], ptr + "/delta");
  for (auto& pj : j.at("pins")) {
    JetPin p;
    p.component = pj.at("component").get<int>() - 1;
    p.alpha = pj.at("alpha").get<Monomial>();
    p.value = rational_from_json(pj.at("value"), ptr + "/pins");
    out.pins.push_back(p);
  }
  for (auto& row : j.at("grid")) {
    Point pt;
    for (auto& v : row) pt.push_back(rational_from_json(v, ptr + "/grid"));
    out.grid.push_back(pt);
  }
  return out;
}

/** Named entities of one input file. Cross-references are resolved at load;
 * entities whose own validation fails are recorded rather than dropped so
 * the validate subcommand can report them. */
struct Manifest {
  std::string version = "1";
  std::map<std::string, FiniteLattice> lattices;
  std::map<std::string, SetArrangement> arrangements;
  std::map<std::string, MarkedFiniteSet> models;
  std::map<std::string, FaceStructure> face_structures;
  std::map<std::string, EdgingEntry> edgings;
  std::map<std::string, Polyhedron> polyhedra;
  std::map<std::string, TruncatedPolyMap> poly_maps;
  std::map<std::string, ScenarioEntry> scenarios;
  std::vector<std::pair<std::string, std::string>> entity_errors;  // (pointer, message)
};

inline Manifest manifest_from_json(const Json& j) {
  Manifest m;
  if (j.contains("version")) m.version = j["version"].get<std::string>();
  auto record = [&](const std::string& ptr, const std::string& msg) { m.entity_errors.emplace_back(ptr, msg); };
  if (j.contains("lattices"))
    for (auto& [name, lj] : j["lattices"].items()) {
      try {
        m.lattices.emplace(name, lattice_from_json(lj, "/lattices/" + name));
      } catch (const Error& e) {
        record("/lattices/" + name, e.what());
      }
    }
  if (j.contains("models"))
    for (auto& [name, mj] : j["models"].items()) {
      try {
        m.models.emplace(name, marked_set_from_json(mj, "/models/" + name));
      } catch (const Error& e) {
        record("/models/" + name, e.what());
      }
    }
  if (j.contains("arrangements"))
    for (auto& [name, aj] : j["arrangements"].items()) {
      std::string ptr = "/arrangements/" + name;
      try {
        std::string shape = aj.at("shape").get<std::string>();
        auto it = m.lattices.find(shape);
        if (it == m.lattices.end()) throw ManifestError(ptr, "unknown shape lattice '" + shape + "'");
        m.arrangements.emplace(name, arrangement_from_json(aj, it->second, ptr));
      } catch (const Error& e) {
        record(ptr, e.what());
      }
    }
  if (j.contains("face_structures"))
    for (auto& [name, fj] : j["face_structures"].items()) {
      try {
        m.face_structures.emplace(name, face_structure_from_json(fj, "/face_structures/" + name));
      } catch (const Error& e) {
        record("/face_structures/" + name, e.what());
      }
    }
  if (j.contains("polyhedra"))
    for (auto& [name, pj] : j["polyhedra"].items()) {
      try {
        m.polyhedra.emplace(name, polyhedron_from_json(pj, "/polyhedra/" + name));
      } catch (const Error& e) {
        record("/polyhedra/" + name, e.what());
      }
    }
  if (j.contains("edgings"))
    for (auto& [name, ej] : j["edgings"].items()) {
      std::string ptr = "/edgings/" + name;
      try {
        std::string src = ej.at("source").get<std::string>();
        std::string tgt = ej.at("target").get<std::string>();
        const FaceStructure* X = m.face_structures.count(src) ? &m.face_structures.at(src) : nullptr;
        const FaceStructure* Y = m.face_structures.count(tgt) ? &m.face_structures.at(tgt) : nullptr;
        // model references carry the model's face structure
        FaceStructure xm, ym;
        if (!X && m.models.count(src)) {
          xm = FaceStructure::model(m.models.at(src));
          X = &xm;
        }
        if (!Y && m.models.count(tgt)) {
          ym = FaceStructure::model(m.models.at(tgt));
          Y = &ym;
        }
        if (!X && m.polyhedra.count(src)) {
          xm = polyhedron_faces(m.polyhedra.at(src));
          X = &xm;
        }
        if (!Y && m.polyhedra.count(tgt)) {
          ym = polyhedron_faces(m.polyhedra.at(tgt));
          Y = &ym;
        }
        if (!X) throw ManifestError(ptr, "unknown source '" + src + "'");
        if (!Y) throw ManifestError(ptr, "unknown target '" + tgt + "'");
        m.edgings.emplace(name, edging_from_json(ej, *X, *Y, ptr));
      } catch (const Error& e) {
        record(ptr, e.what());
      }
    }
  if (j.contains("poly_maps"))
    for (auto& [name, pj] : j["poly_maps"].items()) {
      try {
        m.poly_maps.emplace(name, poly_map_from_json(pj, "/poly_maps/" + name));
      } catch (const Error& e) {
        record("/poly_maps/" + name, e.what());
      }
    }
  if (j.contains("scenarios"))
    for (auto& [name, sj] : j["scenarios"].items()) {
      try {
        m.scenarios.emplace(name, scenario_from_json(sj, "/scenarios/" + name));
      } catch (const Error& e) {
        record("/scenarios/" + name, e.what());
      }
    }
  return m;
}

/** Face structure a manifest edging refers to (by name, model, or polyhedron). */
inline FaceStructure resolve_face_structure(const Manifest& m, const std::string& name) {
  if (m.face_structures.count(name)) return m.face_structures.at(name);
  if (m.models.count(name)) return FaceStructure::model(m.models.at(name));
  if (m.polyhedra.count(name)) return polyhedron_faces(m.polyhedra.at(name));
  throw ManifestError("/" + name, "no face structure, model, or polyhedron named '" + name + "'");
}

inline Json manifest_to_json(const Manifest& m) {
  Json j;
  j["version"] = m.version;
  Json lat;
  for (auto& [name, L] : m.lattices) lat[name] = lattice_to_json(L);
  j["lattices"] = lat;
  Json mods;
  for (auto& [name, I] : m.models) mods[name] = marked_set_to_json(I);
  j["models"] = mods;
  Json arrs;
  for (auto& [name, A] : m.arrangements) {
    std::string shape_name;
    for (auto& [ln, L] : m.lattices)
      if (L.same_shape(A.shape)) shape_name = ln;
    arrs[name] = arrangement_to_json(A, shape_name);
  }
  j["arrangements"] = arrs;
  Json fss;
  for (auto& [name, X] : m.face_structures) fss[name] = face_structure_to_json(X);
  j["face_structures"] = fss;
  Json eds;
  for (auto& [name, e] : m.edgings)
    eds[name] = edging_to_json(e, resolve_face_structure(m, e.source), resolve_face_structure(m, e.target));
  j["edgings"] = eds;
  Json pols;
  for (auto& [name, P] : m.polyhedra) pols[name] = polyhedron_to_json(P);
  j["polyhedra"] = pols;
  Json pms;
  for (auto& [name, f] : m.poly_maps) pms[name] = poly_map_to_json(f);
  j["poly_maps"] = pms;
  Json scs;
  for (auto& [name, s] : m.scenarios) scs[name] = scenario_to_json(s);
  j["scenarios"] = scs;
  return j;
}

}  // namespace corners
