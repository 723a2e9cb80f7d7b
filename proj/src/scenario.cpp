#include "scenario.h"

#include "ncgft.h"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ncaf {

namespace fs = std::filesystem;
using nlohmann::json;

static std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("short write: " + path);
}

static std::string fmt9(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

static std::string fmt3(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

static std::string resolve(const std::string& base, const std::string& rel) {
  const fs::path p(rel);
  if (p.is_absolute() || base.empty()) return rel;
  return (fs::path(base) / p).string();
}

Scenario load_scenario(const std::string& json_text, const std::string& base_dir) {
  const json j = json::parse(json_text);
  Scenario sc;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "basis")
    sc.kind = ScenarioKind::basis;
  else if (kind == "embed")
    sc.kind = ScenarioKind::embed;
  else if (kind == "sweep")
    sc.kind = ScenarioKind::sweep;
  else if (kind == "table")
    sc.kind = ScenarioKind::table;
  else if (kind == "krajewski-check")
    sc.kind = ScenarioKind::krajewski_check;
  else
    throw std::invalid_argument("unknown scenario kind: " + kind);
  sc.name = j.value("name", kind);

  if (j.contains("step")) {
    const json& st = j.at("step");
    const std::string text =
        st.is_string() ? read_file(resolve(base_dir, st.get<std::string>())) : st.dump();
    sc.step = load_step_json(text);
    sc.has_step = true;
  }
  if (j.contains("shape")) sc.shape.dims = j.at("shape").get<std::vector<int>>();
  if (j.contains("path")) {
    const json& p = j.at("path");
    const std::string pk = p.value("kind", "diagonal");
    if (pk == "diagonal")
      sc.path.kind = PathKind::diagonal;
    else if (pk == "antidiagonal")
      sc.path.kind = PathKind::antidiagonal;
    else if (pk == "grid")
      sc.path.kind = PathKind::grid;
    else
      throw std::invalid_argument("unknown path kind: " + pk);
    if (p.contains("range")) {
      const json& r = p.at("range");
      if (!r.is_array() || r.size() != 2)
        throw std::invalid_argument("path range must be [lo, hi]");
      sc.path.lo = r[0].get<double>();
      sc.path.hi = r[1].get<double>();
    }
    sc.path.samples = p.value("samples", sc.path.samples);
    sc.path.offset = p.value("offset", sc.path.offset);
    if (!std::isfinite(sc.path.lo) || !std::isfinite(sc.path.hi) ||
        !std::isfinite(sc.path.offset))
      throw std::invalid_argument("path range must be finite");
  }
  if (j.contains("minimizer")) {
    const json& m = j.at("minimizer");
    sc.minimizer.restarts = m.value("restarts", sc.minimizer.restarts);
    sc.minimizer.scale = m.value("scale", sc.minimizer.scale);
    sc.minimizer.maxiter = m.value("maxiter", sc.minimizer.maxiter);
    sc.minimizer.gtol = m.value("gtol", sc.minimizer.gtol);
    sc.minimizer.threads = m.value("threads", sc.minimizer.threads);
  }
  sc.detect = j.value("detect", true);
  sc.seed = j.value("seed", static_cast<uint64_t>(1));
  sc.out = j.value("out", std::string("."));
  if (j.contains("diagram")) {
    const json& d = j.at("diagram");
    const std::string text =
        d.is_string() ? read_file(resolve(base_dir, d.get<std::string>())) : d.dump();
    sc.diagram = load_diagram_json(text);
    sc.has_diagram = true;
  }
  return sc;
}

static void point_lambdas(const PointResult& p, double* l1, double* l2) {
  *l1 = p.lambda.size() > 0 ? p.lambda(0) : 0.0;
  *l2 = p.lambda.size() > 0 ? p.lambda(p.lambda.size() - 1) : 0.0;
}

static std::string masses_csv(const std::vector<PointResult>& pts) {
  std::string s = "lambda1,lambda2,label,mass,degeneracy\n";
  for (const PointResult& p : pts) {
    double l1, l2;
    point_lambdas(p, &l1, &l2);
    for (const MassLine& ln : p.lines)
      s += fmt9(l1) + "," + fmt9(l2) + "," + ln.label + "," + fmt9(ln.mass) + "," +
           std::to_string(ln.degeneracy) + "\n";
  }
  return s;
}

static std::string vmin_csv(const std::vector<PointResult>& pts) {
  std::string s = "lambda1,lambda2,vmin,converged\n";
  for (const PointResult& p : pts) {
    double l1, l2;
    point_lambdas(p, &l1, &l2);
    s += fmt9(l1) + "," + fmt9(l2) + "," + fmt9(p.vmin) + "," + (p.converged ? "1" : "0") + "\n";
  }
  return s;
}

static std::string disc_csv(const std::vector<TableRow>& rows) {
  std::string s = "case,n_ndof,n_idof,r_dof,lambda_first,lambda_second\n";
  for (const TableRow& r : rows) {
    s += r.name + "," + std::to_string(r.n_ndof) + "," + std::to_string(r.n_idof) + "," +
         fmt3(r.r_dof) + ",";
    s += (r.lambda_first ? fmt9(*r.lambda_first) : std::string()) + ",";
    s += (r.lambda_second ? fmt9(*r.lambda_second) : std::string()) + "\n";
  }
  return s;
}

static json points_json(const std::vector<PointResult>& pts) {
  json arr = json::array();
  for (const PointResult& p : pts) {
    double l1, l2;
    point_lambdas(p, &l1, &l2);
    json lines = json::array();
    for (const MassLine& ln : p.lines)
      lines.push_back({{"label", ln.label}, {"mass", ln.mass}, {"degeneracy", ln.degeneracy}});
    arr.push_back({{"lambda1", l1},
                   {"lambda2", l2},
                   {"vmin", p.vmin},
                   {"converged", p.converged},
                   {"lines", std::move(lines)}});
  }
  return arr;
}

static json rows_json(const std::vector<TableRow>& rows) {
  json arr = json::array();
  for (const TableRow& r : rows) {
    json row = {{"case", r.name},
                {"n_ndof", r.n_ndof},
                {"n_idof", r.n_idof},
                {"r_dof", r.r_dof},
                {"converged", r.converged}};
    row["lambda_first"] = r.lambda_first ? json(*r.lambda_first) : json();
    row["lambda_second"] = r.lambda_second ? json(*r.lambda_second) : json();
    arr.push_back(std::move(row));
  }
  return arr;
}

static int run_basis(const Scenario& sc) {
  if (sc.shape.dims.empty())
    throw std::invalid_argument("basis scenarios need a shape");
  const GeneratorBasis gb = build_basis(sc.shape);
  const Frame fr = frame_of(gb);
  const ConnectionConfig conn = ConnectionConfig::basis(fr);
  const MassSpectrum sp = mass_spectrum(conn);
  const PotentialSplit v = higgs_potential(conn);

  PointResult p;
  p.lambda = Eigen::VectorXd::Ones(sc.shape.factors());
  p.vmin = v.total;
  p.converged = true;
  p.lines = sp.lines;
  const std::vector<PointResult> pts{p};

  write_file(sc.out + "/masses.csv", masses_csv(pts));
  write_file(sc.out + "/vmin.csv", vmin_csv(pts));
  const json rep = {{"kind", "basis"},
                    {"name", sc.name},
                    {"shape", sc.shape.dims},
                    {"potential", v.total},
                    {"offdiag_residual", sp.offdiag_residual},
                    {"points", points_json(pts)}};
  write_file(sc.out + "/result.json", rep.dump(2) + "\n");
  return kExitOk;
}

static int run_embed(const Scenario& sc) {
  if (!sc.has_step) throw std::invalid_argument("embed scenarios need a step");
  const GeneratorBasis gb = build_basis(sc.step.shapeA);
  const AdaptedBasis ab = adapted_basis(sc.step, gb);

  json factors = json::array();
  int idof = 0, ndof = 0, total = 0;
  for (int k = 0; k < sc.step.shapeB.factors(); ++k) {
    const int m = sc.step.shapeB.dims[k];
    json labels = json::array();
    for (const DirLabel& l : ab.frame.labels[k]) labels.push_back(label_str(l));
    const auto& fam = ab.family_sizes[k];
    factors.push_back({{"factor", k},
                       {"m", m},
                       {"inherited", ab.inherited_count(k)},
                       {"complement", ab.complement_count(k)},
                       {"family_sizes", std::vector<int>(fam.begin(), fam.end())},
                       {"labels", std::move(labels)}});
    idof += ab.inherited_count(k);
    ndof += ab.complement_count(k);
    total += m * m - 1;
  }

  json mult = json::array();
  for (int k = 0; k < sc.step.mult.rows(); ++k) {
    json row = json::array();
    for (int i = 0; i < sc.step.mult.cols(); ++i) row.push_back(sc.step.mult(k, i));
    mult.push_back(std::move(row));
  }

  const json rep = {{"kind", "embed"},
                    {"name", sc.name},
                    {"shapeA", sc.step.shapeA.dims},
                    {"shapeB", sc.step.shapeB.dims},
                    {"mult", std::move(mult)},
                    {"slack", sc.step.slack},
                    {"inherited_total", idof},
                    {"complement_total", ndof},
                    {"direction_total", total},
                    {"factors", std::move(factors)}};
  write_file(sc.out + "/result.json", rep.dump(2) + "\n");
  return kExitOk;
}

static int run_sweep(const Scenario& sc, std::string* err_json) {
  if (!sc.has_step) throw std::invalid_argument("sweep scenarios need a step");
  const GeneratorBasis gb = build_basis(sc.step.shapeA);
  const AdaptedBasis ab = adapted_basis(sc.step, gb);
  SweepSpec spec = sc.path;
  spec.seed = sc.seed;
  const SweepResult res = sweep(ab, spec, sc.minimizer, 0);
  std::vector<double> events;
  if (sc.detect && spec.kind != PathKind::grid)
    events = detect_discontinuities(ab, res, spec, sc.minimizer, 0);

  int idof = 0, ndof = 0;
  for (int k = 0; k < sc.step.shapeB.factors(); ++k) {
    idof += ab.inherited_count(k);
    ndof += ab.complement_count(k);
  }
  TableRow row;
  row.name = sc.name;
  row.n_ndof = ndof;
  row.n_idof = idof;
  row.r_dof = idof > 0 ? static_cast<double>(ndof) / idof : 0.0;
  if (!events.empty()) row.lambda_first = events[0];
  if (events.size() > 1) row.lambda_second = events[1];
  bool all_conv = true;
  for (const PointResult& p : res.points) all_conv = all_conv && p.converged;
  row.converged = all_conv;

  write_file(sc.out + "/masses.csv", masses_csv(res.points));
  write_file(sc.out + "/vmin.csv", vmin_csv(res.points));
  write_file(sc.out + "/discontinuities.csv", disc_csv({row}));
  const json rep = {{"kind", "sweep"},
                    {"name", sc.name},
                    {"seed", sc.seed},
                    {"n_ndof", ndof},
                    {"n_idof", idof},
                    {"r_dof", row.r_dof},
                    {"discontinuities", events},
                    {"converged", all_conv},
                    {"points", points_json(res.points)}};
  write_file(sc.out + "/result.json", rep.dump(2) + "\n");
  if (!all_conv) {
    if (err_json)
      *err_json =
          json{{"code", kExitNoConverge},
               {"error", "minimizer failed to converge at one or more sweep points"}}
              .dump();
    return kExitNoConverge;
  }
  return kExitOk;
}

static int run_table_scenario(const Scenario& sc, std::string* err_json) {
  const std::vector<TableRow> rows = run_table(sc.minimizer, sc.seed);
  write_file(sc.out + "/discontinuities.csv", disc_csv(rows));
  bool all_conv = true;
  for (const TableRow& r : rows) all_conv = all_conv && r.converged;
  const json rep = {{"kind", "table"},
                    {"name", sc.name},
                    {"seed", sc.seed},
                    {"converged", all_conv},
                    {"rows", rows_json(rows)}};
  write_file(sc.out + "/result.json", rep.dump(2) + "\n");
  if (!all_conv) {
    if (err_json)
      *err_json = json{{"code", kExitNoConverge},
                       {"error", "minimizer failed to converge in one or more table rows"}}
                      .dump();
    return kExitNoConverge;
  }
  return kExitOk;
}

static int run_kcheck(const Scenario& sc, std::string* err_json) {
  if (!sc.has_diagram) throw std::invalid_argument("krajewski-check scenarios need a diagram");
  const std::vector<std::string> viol = validate_diagram(sc.diagram);
  json ko = json();
  try {
    const KOSigns ks = ko_signs(sc.diagram.ko);
    ko = json{{"eps", ks.eps}, {"eps_prime", ks.eps_prime}};
    ko["eps_dprime"] = ks.has_dprime ? json(ks.eps_dprime) : json();
  } catch (const std::exception&) {
    // invalid KO dimension is already in the violation list
  }
  const json rep = {{"kind", "krajewski-check"},
                    {"name", sc.name},
                    {"ok", viol.empty()},
                    {"ko", std::move(ko)},
                    {"violations", viol}};
  write_file(sc.out + "/result.json", rep.dump(2) + "\n");
  if (!viol.empty()) {
    if (err_json)
      *err_json = json{{"code", kExitInvalid},
                       {"error", "diagram failed validation"},
                       {"violations", viol}}
                      .dump();
    return kExitInvalid;
  }
  return kExitOk;
}

int run_scenario(const Scenario& sc, std::string* err_json) {
  try {
    fs::create_directories(sc.out);
    switch (sc.kind) {
      case ScenarioKind::basis:
        return run_basis(sc);
      case ScenarioKind::embed:
        return run_embed(sc);
      case ScenarioKind::sweep:
        return run_sweep(sc, err_json);
      case ScenarioKind::table:
        return run_table_scenario(sc, err_json);
      case ScenarioKind::krajewski_check:
        return run_kcheck(sc, err_json);
    }
  } catch (const std::exception& ex) {
    if (err_json) *err_json = json{{"code", kExitInvalid}, {"error", ex.what()}}.dump();
    return kExitInvalid;
  }
  if (err_json)
    *err_json = json{{"code", kExitInvalid}, {"error", "unknown scenario kind"}}.dump();
  return kExitInvalid;
}

int run_scenario_file(const std::string& path, const RunOverrides& ov, std::string* err_json) {
  Scenario sc;
  try {
    const std::string text = read_file(path);
    sc = load_scenario(text, fs::path(path).parent_path().string());
  } catch (const std::exception& ex) {
    if (err_json) *err_json = json{{"code", kExitInvalid}, {"error", ex.what()}}.dump();
    return kExitInvalid;
  }
  if (ov.seed) sc.seed = *ov.seed;
  if (ov.out) sc.out = *ov.out;
  if (ov.threads) sc.minimizer.threads = *ov.threads;
  if (ov.no_warm_start) sc.minimizer.warm_start = false;
  return run_scenario(sc, err_json);
}

}  // namespace ncaf
