#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corners/collar.hpp"
#include "corners/json_io.hpp"
#include "corners/perturb.hpp"
#include "corners/transversality.hpp"

namespace corners {

/** Single-binary front end. Every subcommand reads one manifest, runs its
 * checks, and prints a JSON report on stdout. Exit code 0 means every check
 * passed, 1 means some check failed, 2 means the input was unusable.
 * Reports embed the seed and every flag they depend on; identical inputs
 * produce byte-identical reports. */
namespace cli {

struct Flags {
  uint64_t seed = 2026;
  int samples = 500;
  std::string epsilon_schedule = "1/5,1/10,1/20,1/50";
  int grid = 4;
  double tolerance = 1e-9;
  bool stream = false;
};

inline std::vector<Rational> parse_schedule(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
  if (out.empty()) throw DomainError("empty epsilon schedule");
  return out;
}

inline Json flags_json(const Flags& f) {
  Json j;
  j["seed"] = f.seed;
  j["samples"] = f.samples;
  j["epsilon_schedule"] = f.epsilon_schedule;
  j["grid"] = f.grid;
  j["tolerance"] = f.tolerance;
  return j;
}

inline void emit(const Json& report, const Flags& f, std::ostream& out) {
  if (f.stream) {
    for (auto& [key, value] : report.items()) {
      Json line;
      line[key] = value;
      out << line.dump() << "\n";
    }
  } else {
    out << report.dump(2) << "\n";
  }
}

inline Manifest load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("/", "cannot open manifest '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ManifestError("/", std::string("JSON parse error: ") + e.what());
  }
  return manifest_from_json(j);
}

inline std::string face_list(const FaceStructure& X, uint32_t mask) {
  std::string s;
  for (int i = 0; i < X.count(); ++i)
    if ((mask >> i) & 1) s += (s.empty() ? "" : ",") + X.faces[i];
  return s.empty() ? "-" : s;
}

inline Json point_json(const Point& p) {
  Json a = Json::array();
  for (auto& x : p) a.push_back(x.str());
  return a;
}

// ---- validate ----

inline int cmd_validate(const std::string& path, const Flags& f, std::ostream& out) {
  Manifest m = load(path);
  Json violations = Json::array();
  for (auto& [ptr, msg] : m.entity_errors) violations.push_back(Json{{"at", ptr}, {"message", msg}});
  for (auto& [name, A] : m.arrangements)
    for (auto& v : validate(A))
      violations.push_back(Json{{"at", "/arrangements/" + name},
                                {"message", v.kind + ": " + v.detail}});
  for (auto& [name, P] : m.polyhedra) {
    try {
      polyhedron_faces(P);  // exercises the codimension cap on face subsets
    } catch (const Error& err) {
      violations.push_back(Json{{"at", "/polyhedra/" + name}, {"message", err.what()}});
    }
  }
  for (auto& [name, e] : m.edgings) {
    try {
      FaceStructure X = resolve_face_structure(m, e.source);
      FaceStructure Y = resolve_face_structure(m, e.target);
      for (auto& v : validate_edging(e.edging, X, Y))
        violations.push_back(Json{{"at", "/edgings/" + name},
                                  {"message", v.kind + " fails at sigma={" + face_list(X, v.sigma) + "}"}});
    } catch (const Error& err) {
      violations.push_back(Json{{"at", "/edgings/" + name}, {"message", err.what()}});
    }
  }
  Json report;
  report["command"] = "validate";
  report["manifest"] = path;
  report["violations"] = violations;
  report["pass"] = violations.empty();
  emit(report, f, out);
  return violations.empty() ? 0 : 1;
}

// ---- dims ----

inline int cmd_dims(const std::string& path, const Flags& f, const std::string& source,
                    const std::string& target, int r, const std::vector<std::string>& multi,
                    std::ostream& out) {
  Manifest m = load(path);
  if (!m.arrangements.count(source)) throw ManifestError("/arrangements/" + source, "unknown arrangement");
  if (!m.arrangements.count(target)) throw ManifestError("/arrangements/" + target, "unknown arrangement");
  const SetArrangement& I = m.arrangements.at(source);
  const SetArrangement& J = m.arrangements.at(target);
  RelativeJetBasis B = relative_basis(I, J, r);
  Json report;
  report["command"] = "dims";
  report["manifest"] = path;
  report["flags"] = Json{{"source", source}, {"target", target}, {"r", r}};
  report["relative_dim"] = B.dim();
  Json by_degree = Json::array();
  for (int d = 0; d <= r; ++d) by_degree.push_back(B.dim_homogeneous(d));
  report["by_degree"] = by_degree;
  report["origin_preserving_dim"] = B.dim0();
  bool formula_ok = B.dim_homogeneous(1) == rel1jet_dim_formula(I, J);
  report["degree1_formula"] = rel1jet_dim_formula(I, J);
  report["degree1_formula_check"] = formula_ok;
  report["ambient_jet_dim"] = (long long)J.ambient.m * jet_algebra_dim(I.ambient.m, r);
  if (!multi.empty()) {
    std::map<std::pair<int, int>, int> n;
    for (auto& pair_arg : multi) {
      int lo, hi, count;
      if (sscanf(pair_arg.c_str(), "%d:%d:%d", &lo, &hi, &count) != 3)
        throw ManifestError("/", "bad --pair '" + pair_arg + "', expected lo:hi:count");
      n[{lo, hi}] += count;
    }
    MultijetIndex M = multijet_index(I, J, r, n);
    Json mj;
    mj["index_size"] = M.index.size();
    mj["fiber_dim"] = M.fiber_dim;
    Json per = Json::array();
    for (auto& [kappa, d] : M.interval_dims)
      per.push_back(Json{{"interval", Json::array({kappa.first, kappa.second})}, {"dim0", d}});
    mj["per_interval"] = per;
    report["multijet"] = mj;
  }
  report["pass"] = formula_ok;
  emit(report, f, out);
  return formula_ok ? 0 : 1;
}

// ---- edging ----

inline int cmd_edging(const std::string& path, const Flags& f, const std::string& name, std::ostream& out) {
  Manifest m = load(path);
  if (!m.edgings.count(name)) throw ManifestError("/edgings/" + name, "unknown edging");
  const EdgingEntry& e = m.edgings.at(name);
  FaceStructure X = resolve_face_structure(m, e.source);
  FaceStructure Y = resolve_face_structure(m, e.target);
  auto violations = validate_edging(e.edging, X, Y);
  Json report;
  report["command"] = "edging";
  report["manifest"] = path;
  report["edging"] = name;
  Json viol = Json::array();
  for (auto& v : violations)
    viol.push_back(Json{{"kind", v.kind}, {"sigma", face_list(X, v.sigma)}, {"tau", face_list(X, v.tau)}});
  report["violations"] = viol;
  bool ok = violations.empty();
  if (ok && Y.count() <= 6) {
    Json decomp;
    for (uint32_t tau = 0; tau < (1u << Y.count()); ++tau) {
      Json comps = Json::array();
      for (uint32_t sigma : boundary_decomposition(e.edging, X, Y, tau))
        comps.push_back(face_list(X, sigma));
      decomp["{" + face_list(Y, tau) + "}"] = comps;
    }
    report["decomposition"] = decomp;
    Json wedge = Json::array();
    bool wedge_ok = true;
    for (uint32_t t1 = 0; t1 < (1u << Y.count()); ++t1) {
      Json row = Json::array();
      for (uint32_t t2 = 0; t2 < (1u << Y.count()); ++t2) {
        bool w = wedge_check(e.edging, X, Y, t1, t2);
        wedge_ok = wedge_ok && w;
        row.push_back(w);
      }
      wedge.push_back(row);
    }
    report["wedge_matrix"] = wedge;
    ok = ok && wedge_ok;
  }
  report["pass"] = ok;
  emit(report, f, out);
  return ok ? 0 : 1;
}

// ---- admissible ----

inline int cmd_admissible(const std::string& path, const Flags& f, const std::string& map_name,
                          const std::string& edging_name, const std::string& x_model,
                          const std::string& y_model, std::ostream& out) {
  Manifest m = load(path);
  if (!m.poly_maps.count(map_name)) throw ManifestError("/poly_maps/" + map_name, "unknown map");
  if (!m.edgings.count(edging_name)) throw ManifestError("/edgings/" + edging_name, "unknown edging");
  if (!m.models.count(x_model)) throw ManifestError("/models/" + x_model, "unknown model");
  if (!m.models.count(y_model)) throw ManifestError("/models/" + y_model, "unknown model");
  const TruncatedPolyMap& F = m.poly_maps.at(map_name);
  MarkedFiniteSet X = m.models.at(x_model), Y = m.models.at(y_model);
  FaceStructure Xf = FaceStructure::model(X);

  std::vector<Point> samples;
  // dyadic grid on [0,1]^m intersected with the model
  std::vector<int> idx(X.m, 0);
  if (X.m > 0 && f.grid >= 1) {
    for (;;) {
      Point p(X.m);
      for (int i = 0; i < X.m; ++i) p[i] = Rational(idx[i], 1) / Rational(f.grid);
      samples.push_back(p);
      int carry = 0;
      while (carry < X.m && ++idx[carry] > f.grid) idx[carry++] = 0;
      if (carry == X.m) break;
    }
  }
  AdmissibilityReport rep = admissibility_check(F, m.edgings.at(edging_name).edging.beta, X, Y, samples);
  Json report;
  report["command"] = "admissible";
  report["manifest"] = path;
  report["flags"] = Json{{"map", map_name}, {"edging", edging_name}, {"x", x_model}, {"y", y_model},
                          {"grid", f.grid}};
  Json entries = Json::array();
  for (auto& e : rep.entries) {
    Json ej;
    ej["condition"] = e.condition;
    ej["stratum"] = "{" + face_list(Xf, e.stratum) + "}";
    ej["ok"] = e.ok;
    ej["provenance"] = e.provenance;
    if (e.witness) ej["witness"] = point_json(*e.witness);
    if (!e.detail.empty()) ej["detail"] = e.detail;
    entries.push_back(ej);
  }
  report["entries"] = entries;
  report["along"] = rep.along;
  report["admissible"] = rep.admissible;
  report["pass"] = rep.admissible;
  emit(report, f, out);
  return rep.admissible ? 0 : 1;
}

// ---- perturb ----

inline int cmd_perturb(const std::string& path, const Flags& f, const std::string& scenario_name,
                       double min_rate, std::ostream& out) {
  Manifest m = load(path);
  if (!m.scenarios.count(scenario_name)) throw ManifestError("/scenarios/" + scenario_name, "unknown scenario");
  const ScenarioEntry& se = m.scenarios.at(scenario_name);
  if (!m.poly_maps.count(se.map_name)) throw ManifestError("/poly_maps/" + se.map_name, "unknown map");
  if (!m.arrangements.count(se.source_arr))
    throw ManifestError("/arrangements/" + se.source_arr, "unknown arrangement");
  if (!m.arrangements.count(se.target_arr))
    throw ManifestError("/arrangements/" + se.target_arr, "unknown arrangement");
  McScenario sc;
  sc.name = scenario_name;
  sc.F = m.poly_maps.at(se.map_name);
  sc.I = m.arrangements.at(se.source_arr);
  sc.J = m.arrangements.at(se.target_arr);
  sc.delta = se.delta;
  sc.pins = se.pins;
  sc.grid = se.grid;
  McReport rep = mc_transversality(sc, parse_schedule(f.epsilon_schedule), f.samples, f.seed);
  Json report;
  report["command"] = "perturb";
  report["manifest"] = path;
  report["scenario"] = scenario_name;
  report["flags"] = flags_json(f);
  report["provenance"] = "statistical(" + std::to_string(f.samples) + ", seed=" + std::to_string(f.seed) + ")";
  Json per = Json::array();
  bool pass = true;
  for (auto& pe : rep.per_eps) {
    Json witnesses = Json::array();
    for (auto& w : pe.witnesses) witnesses.push_back(point_json(w));
    per.push_back(Json{{"epsilon", pe.eps.str()}, {"trials", pe.trials}, {"successes", pe.successes},
                       {"rate", pe.rate()}, {"witnesses", witnesses}});
  }
  if (!rep.per_eps.empty()) pass = rep.per_eps.back().rate() >= min_rate;
  report["per_epsilon"] = per;
  report["min_rate"] = min_rate;
  report["pass"] = pass;
  emit(report, f, out);
  return pass ? 0 : 1;
}

// ---- collar ----

inline int cmd_collar(const std::string& path, const Flags& f, int box_dim, const std::string& edging_name,
                      const std::string& trajectory_csv, std::ostream& out) {
  Manifest m = load(path);
  BoxModel box = BoxModel::box(box_dim);
  auto facets = box.facets();
  Edging beta{PartialMap::identity((int)facets.size())};
  int target_faces = (int)facets.size();
  if (!edging_name.empty()) {
    if (!m.edgings.count(edging_name)) throw ManifestError("/edgings/" + edging_name, "unknown edging");
    const EdgingEntry& e = m.edgings.at(edging_name);
    beta = e.edging;
    target_faces = beta.beta.target_size;
    if (beta.beta.source_size != (int)facets.size())
      throw ManifestError("/edgings/" + edging_name, "edging does not match the box facet count");
  }
  Rng rng(f.seed);
  std::vector<Vec> samples;
  int count = std::max(4, f.samples / 25);
  for (int i = 0; i < count; ++i) {
    Vec p(box_dim);
    for (int j = 0; j < box_dim; ++j) p[j] = rng.uniform(0.05, 0.45);
    samples.push_back(p);
  }
  CollarReport rep = beta_collaring_check(box, beta, target_faces, samples);
  bool pass = rep.well_defined && rep.identity_at_zero && rep.max_commutator < 1e-6 &&
              rep.max_order_defect < 1e-5;
  if (!trajectory_csv.empty()) {
    // dump the flow of the first facet's collaring field from the origin
    std::ofstream csv(trajectory_csv);
    csv << "t";
    for (int j = 0; j < box_dim; ++j) csv << ",x" << (j + 1);
    csv << "\n";
    FlowField xi = build_collaring_field(box, facets[0]);
    FlowResult traj = flow(xi, box, Vec(box_dim, 0.0), 1.0, 1e-2);
    for (size_t s = 0; s < traj.trajectory.size(); ++s) {
      csv << (s * 1e-2);
      for (double v : traj.trajectory[s]) csv << "," << v;
      csv << "\n";
    }
  }
  Json report;
  report["command"] = "collar";
  report["manifest"] = path;
  report["flags"] = Json{{"box", box_dim}, {"edging", edging_name}, {"seed", f.seed},
                          {"sample_points", count}};
  report["well_defined"] = rep.well_defined;
  report["max_commutator"] = rep.max_commutator;
  report["max_order_defect"] = rep.max_order_defect;
  report["identity_at_zero"] = rep.identity_at_zero;
  report["h"] = 1e-3;
  report["thresholds"] = Json{{"commutator", 1e-6}, {"order_defect", 1e-5}};
  report["provenance"] = "sampled(" + std::to_string(rep.samples) + ")";
  report["pass"] = pass;
  emit(report, f, out);
  return pass ? 0 : 1;
}

// ---- embed ----

inline int cmd_embed(const std::string& path, const Flags& f, const std::string& domain,
                     const std::string& target, const std::string& edging_name, int n, int rounds,
                     double eps, std::ostream& out) {
  Manifest m = load(path);
  if (!m.polyhedra.count(domain)) throw ManifestError("/polyhedra/" + domain, "unknown polyhedron");
  if (!m.polyhedra.count(target)) throw ManifestError("/polyhedra/" + target, "unknown polyhedron");
  if (!m.edgings.count(edging_name)) throw ManifestError("/edgings/" + edging_name, "unknown edging");
  EmbeddingOptions opts;
  opts.max_rounds = rounds;
  opts.eps = eps;
  opts.grid_resolution = f.grid * 2;
  opts.tol = f.tolerance;
  EmbeddingReport rep = embedding_demo(m.polyhedra.at(domain), m.edgings.at(edging_name).edging,
                                       m.polyhedra.at(target), n, f.seed, opts);
  Json report;
  report["command"] = "embed";
  report["manifest"] = path;
  report["flags"] = Json{{"domain", domain}, {"target", target}, {"edging", edging_name},
                          {"n", n}, {"seed", f.seed}, {"rounds", rounds}, {"eps", eps}};
  report["rejected"] = rep.rejected;
  if (rep.rejected) report["reason"] = rep.reject_reason;
  report["ok"] = rep.ok;
  report["rounds_used"] = rep.rounds;
  report["whitney_to_base"] = rep.whitney_to_base;
  Json hist = Json::array();
  for (auto& r : rep.history)
    hist.push_back(Json{{"round", r.round}, {"stratum", r.stratum_ok}, {"transversal", r.transversal_ok},
                        {"corank0", r.corank_ok}, {"injective", r.injective_ok}});
  report["history"] = hist;
  report["pass"] = rep.ok;
  emit(report, f, out);
  return rep.ok ? 0 : 1;
}

// ---- metric ----

inline int cmd_metric(const std::string& path, const Flags& f, const std::string& maps_csv, int k,
                      std::ostream& out) {
  Manifest m = load(path);
  std::vector<std::string> names;
  std::stringstream ss(maps_csv);
  std::string item;
  while (std::getline(ss, item, ',')) names.push_back(item);
  if (names.size() < 2) throw ManifestError("/", "metric needs at least two map names");
  std::vector<const TruncatedPolyMap*> maps;
  for (auto& n : names) {
    if (!m.poly_maps.count(n)) throw ManifestError("/poly_maps/" + n, "unknown map");
    maps.push_back(&m.poly_maps.at(n));
  }
  int nvars = maps[0]->source_vars;
  std::vector<Point> grid;
  std::vector<int> idx(nvars, 0);
  for (;;) {
    Point p(nvars);
    for (int i = 0; i < nvars; ++i) p[i] = Rational(idx[i], 1) / Rational(std::max(1, f.grid));
    grid.push_back(p);
    int carry = 0;
    while (carry < nvars && ++idx[carry] > f.grid) idx[carry++] = 0;
    if (carry == nvars) break;
  }
  Json report;
  report["command"] = "metric";
  report["manifest"] = path;
  report["flags"] = Json{{"maps", maps_csv}, {"k", k}, {"grid", f.grid}};
  report["note"] = "grid max of d/(1+d); a lower bound for the sup metric";
  Json table;
  for (size_t i = 0; i < maps.size(); ++i) {
    Json row;
    for (size_t j = 0; j < maps.size(); ++j)
      row[names[j]] = whitney_rho(*maps[i], *maps[j], k, grid);
    table[names[i]] = row;
  }
  report["table"] = table;
  report["pass"] = true;
  emit(report, f, out);
  return 0;
}

/** Entry point shared by the binary and the tests. */
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"arrangements of manifolds with corners: desk-scale checks"};
  app.require_subcommand(1);
  Flags flags;

  std::string manifest;
  std::string source, target, edging_name, map_name, x_model, y_model, scenario, maps_csv, domain;
  int r = 1, k = 1, box_dim = 2, n = 2, rounds = 50;
  double min_rate = 0.95, eps = 0.05;
  std::vector<std::string> pairs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("manifest", manifest, "input manifest (JSON)")->required();
    cmd->add_option("--seed", flags.seed, "root RNG seed")->capture_default_str();
    cmd->add_option("--samples", flags.samples, "Monte-Carlo trials / sample budget")->capture_default_str();
    cmd->add_option("--epsilon-schedule", flags.epsilon_schedule, "comma list of rational scales")
        ->capture_default_str();
    cmd->add_option("--grid", flags.grid, "grid resolution per axis")->capture_default_str();
    cmd->add_option("--tolerance", flags.tolerance, "floating-point check tolerance")->capture_default_str();
    cmd->add_flag("--stream", flags.stream, "line-delimited JSON output");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "run every validator in the manifest");
  add_common(validate_cmd);
  CLI::App* dims_cmd = app.add_subcommand("dims", "jet and relative-jet dimensions");
  add_common(dims_cmd);
  dims_cmd->add_option("--source", source)->required();
  dims_cmd->add_option("--target", target)->required();
  dims_cmd->add_option("--r", r);
  dims_cmd->add_option("--pair", pairs, "multijet interval lo:hi:count (repeatable)");
  CLI::App* edging_cmd = app.add_subcommand("edging", "validate + decompose + wedge matrix");
  add_common(edging_cmd);
  edging_cmd->add_option("--edging", edging_name)->required();
  CLI::App* adm_cmd = app.add_subcommand("admissible", "admissibility report for a map along an edging");
  add_common(adm_cmd);
  adm_cmd->add_option("--map", map_name)->required();
  adm_cmd->add_option("--edging", edging_name)->required();
  adm_cmd->add_option("--x", x_model)->required();
  adm_cmd->add_option("--y", y_model)->required();
  CLI::App* pert_cmd = app.add_subcommand("perturb", "Monte-Carlo transversality of a scenario");
  add_common(pert_cmd);
  pert_cmd->add_option("--scenario", scenario)->required();
  pert_cmd->add_option("--min-rate", min_rate);
  std::string trajectory_csv;
  CLI::App* collar_cmd = app.add_subcommand("collar", "beta-collaring compatibility on a box model");
  add_common(collar_cmd);
  collar_cmd->add_option("--box", box_dim)->capture_default_str();
  collar_cmd->add_option("--edging", edging_name);
  collar_cmd->add_option("--trajectory-csv", trajectory_csv, "write one sample trajectory as CSV");
  CLI::App* embed_cmd = app.add_subcommand("embed", "embedding pipeline");
  add_common(embed_cmd);
  embed_cmd->add_option("--domain", domain)->required();
  embed_cmd->add_option("--target", target)->required();
  embed_cmd->add_option("--edging", edging_name)->required();
  embed_cmd->add_option("--n", n);
  embed_cmd->add_option("--rounds", rounds);
  embed_cmd->add_option("--eps", eps);
  CLI::App* metric_cmd = app.add_subcommand("metric", "pairwise Whitney distances on a grid");
  add_common(metric_cmd);
  metric_cmd->add_option("--maps", maps_csv)->required();
  metric_cmd->add_option("--k", k);

  args.insert(args.begin(), "corners");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(manifest, flags, out);
    if (dims_cmd->parsed()) return cmd_dims(manifest, flags, source, target, r, pairs, out);
    if (edging_cmd->parsed()) return cmd_edging(manifest, flags, edging_name, out);
    if (adm_cmd->parsed()) return cmd_admissible(manifest, flags, map_name, edging_name, x_model, y_model, out);
    if (pert_cmd->parsed()) return cmd_perturb(manifest, flags, scenario, min_rate, out);
    if (collar_cmd->parsed())
      return cmd_collar(manifest, flags, box_dim, edging_name, trajectory_csv, out);
    if (embed_cmd->parsed())
      return cmd_embed(manifest, flags, domain, target, edging_name, n, rounds, eps, out);
    if (metric_cmd->parsed()) return cmd_metric(manifest, flags, maps_csv, k, out);
  } catch (const ManifestError& e) {
    Json j;
    j["error"] = e.what();
    j["at"] = e.pointer;
    err << j.dump(2) << "\n";
    return 2;
  } catch (const Error& e) {
    Json j;
    j["error"] = e.what();
    err << j.dump(2) << "\n";
    return 2;
  }
  return 2;
}

}  // namespace cli
}  // namespace corners
