#include "minkcmc/meshio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace minkcmc {

using nlohmann::json;

namespace {

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  throw Error(ErrorCode::SchemaError, "expected number or [re, im] pair");
}

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* cell_tag_name(CellTag t) {
  switch (t) {
    case CellTag::BigCell: return "big_cell";
    case CellTag::P1: return "P1";
    case CellTag::P2: return "P2";
    case CellTag::HigherOrUnknown: return "higher_or_unknown";
  }
  return "?";
}

static CellTag cell_tag_from_name(const std::string& s) {
  if (s == "big_cell") return CellTag::BigCell;
  if (s == "P1") return CellTag::P1;
  if (s == "P2") return CellTag::P2;
  return CellTag::HigherOrUnknown;
}

MatrixLoop loop_from_json(const json& doc) {
  if (!doc.contains("band") || !doc.contains("coeffs")) {
    throw Error(ErrorCode::SchemaError, "loop document needs band and coeffs");
  }
  int lo = doc["band"][0].get<int>(), hi = doc["band"][1].get<int>();
  if (lo > 0 || hi < 0 || hi - lo > 4096) {
    throw Error(ErrorCode::SchemaError, "loop band must contain 0 and stay finite");
  }
  MatrixLoop L(lo, hi);
  for (const auto& item : doc["coeffs"]) {
    int p = item["power"].get<int>();
    if (p < lo || p > hi) throw Error(ErrorCode::SchemaError, "coefficient power outside band");
    const auto& m = item["m"];
    if (!m.is_array() || m.size() != 4) {
      throw Error(ErrorCode::SchemaError, "coefficient needs 4 entries row-major");
    }
    Mat2 mm;
    mm << cplx_from_json(m[0]), cplx_from_json(m[1]), cplx_from_json(m[2]), cplx_from_json(m[3]);
    L[p] += mm;
  }
  return L;
}

json loop_to_json(const MatrixLoop& L) {
  json coeffs = json::array();
  for (int j = L.lo(); j <= L.hi(); ++j) {
    if (L[j].isZero(0.0)) continue;
    json m = json::array();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m.push_back(cplx_to_json(L[j](r, c)));
    coeffs.push_back({{"power", j}, {"m", m}});
  }
  return json{{"band", {L.lo(), L.hi()}}, {"coeffs", coeffs}};
}

MatrixLoop load_loop(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path);
  json doc = json::parse(in);
  return loop_from_json(doc);
}

RunSpec parse_run_spec(const json& doc) {
  RunSpec spec;
  Potential& p = spec.potential;
  if (!doc.contains("H")) throw Error(ErrorCode::SchemaError, "potential needs H");
  p.H = doc["H"].get<double>();
  if (doc.contains("lambda_band")) {
    p.lam_lo = doc["lambda_band"][0].get<int>();
    p.lam_hi = doc["lambda_band"][1].get<int>();
  }
  if (!doc.contains("entries")) throw Error(ErrorCode::SchemaError, "potential needs entries");
  for (const auto& e : doc["entries"]) {
    int r = e.at("row").get<int>(), c = e.at("col").get<int>(), pow = e.at("power").get<int>();
    if (r < 0 || r > 1 || c < 0 || c > 1) {
      throw Error(ErrorCode::SchemaError, "entry row/col must be 0 or 1");
    }
    Polynomial poly;
    for (const auto& coef : e.at("poly")) poly.c.push_back(cplx_from_json(coef));
    auto& slot = p.terms[pow][static_cast<size_t>(2 * r + c)];
    if (!slot.c.empty()) throw Error(ErrorCode::SchemaError, "duplicate potential entry");
    slot = poly;
    // keep the diagonal trace-free automatically when only one side is given
  }
  for (auto& [pow, e] : p.terms) {
    if (!e[0].c.empty() && e[3].c.empty()) {
      e[3].c = e[0].c;
      for (auto& v : e[3].c) v = -v;
    }
  }
  p.name = doc.value("name", "");
  p.symmetry_order = doc.value("symmetry_order", 0);
  p.smyth_c = doc.value("smyth_c", -1.0);
  p.smyth_k = doc.value("smyth_k", -1);
  p.validate();

  if (doc.contains("policy")) {
    spec.policy.max_band = doc["policy"].value("max_band", spec.policy.max_band);
    spec.policy.tail_tol = doc["policy"].value("tail_tol", spec.policy.tail_tol);
  }
  if (doc.contains("lambda0_angle")) {
    spec.lambda0 = unit_circle(doc["lambda0_angle"].get<double>());
  }

  GridSpec& g = spec.grid;
  json domain = doc.value("domain", json::object());
  json grid = doc.value("grid", json::object());
  std::string type = domain.value("type", grid.value("type", std::string("rect")));
  if (type == "rect" || type == "disk") {
    g.kind = GridSpec::Kind::Rect;
    if (type == "disk") {
      double R = domain.value("radius", 1.0);
      g.x0 = -R;
      g.x1 = R;
      g.y0 = -R;
      g.y1 = R;
      g.mask_radius = R;
    } else {
      g.x0 = domain.value("x0", -0.5);
      g.x1 = domain.value("x1", 0.5);
      g.y0 = domain.value("y0", -0.5);
      g.y1 = domain.value("y1", 0.5);
    }
    g.nx = grid.value("nx", 41);
    g.ny = grid.value("ny", 41);
  } else if (type == "polar") {
    g.kind = GridSpec::Kind::Polar;
    g.rmin = domain.value("rmin", grid.value("rmin", 0.02));
    g.rmax = domain.value("radius", domain.value("rmax", 1.0));
    g.nr = grid.value("nr", 50);
    g.ntheta = grid.value("ntheta", 48);
  } else {
    throw Error(ErrorCode::SchemaError, "domain type must be rect, disk or polar");
  }
  if (grid.contains("rtol")) g.rtol = grid["rtol"].get<double>();
  if (grid.contains("atol")) g.atol = grid["atol"].get<double>();
  if (grid.contains("max_step")) g.max_step = grid["max_step"].get<double>();
  if (doc.contains("z0")) g.z0 = cplx_from_json(doc["z0"]);
  g.validate();

  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    if (init.is_string()) {
      std::string s = init.get<std::string>();
      if (s == "identity") spec.initial = MatrixLoop::identity();
      else if (s == "omega1") spec.initial = omega_loop(1);
      else if (s == "omega2") spec.initial = omega_loop(2);
      else throw Error(ErrorCode::SchemaError, "unknown initial frame " + s);
    } else {
      spec.initial = loop_from_json(init);
    }
  }
  return spec;
}

RunSpec load_run_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path);
  json doc = json::parse(in);
  return parse_run_spec(doc);
}

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ostringstream os;
  const GridSpec& g = mesh.grid;
  std::vector<int> vid(static_cast<size_t>(g.size()), 0);
  int next = 1;
  os << "# minkcmc surface mesh, coordinates x1 x2 x0\n";
  for (int j = 0; j < g.nj(); ++j) {
    for (int i = 0; i < g.ni(); ++i) {
      const SurfaceSample& s = mesh.at(i, j);
      if (!s.valid_point) continue;
      vid[static_cast<size_t>(g.index(i, j))] = next++;
      os << "v " << fmt_double(s.point.x1) << " " << fmt_double(s.point.x2) << " "
         << fmt_double(s.point.x0) << "\n";
      os << "vn " << fmt_double(s.normal.x1) << " " << fmt_double(s.normal.x2) << " "
         << fmt_double(s.normal.x0) << "\n";
    }
  }
  auto quad = [&](int i0, int j0) {
    int jwrap = (j0 + 1) % g.nj();
    bool wrap = g.kind == GridSpec::Kind::Polar;
    int j1 = j0 + 1 < g.nj() ? j0 + 1 : (wrap ? jwrap : -1);
    if (j1 < 0 || i0 + 1 >= g.ni()) return;
    int a = vid[static_cast<size_t>(g.index(i0, j0))];
    int b = vid[static_cast<size_t>(g.index(i0 + 1, j0))];
    int c = vid[static_cast<size_t>(g.index(i0 + 1, j1))];
    int d = vid[static_cast<size_t>(g.index(i0, j1))];
    if (a && b && c) os << "f " << a << "//" << a << " " << b << "//" << b << " " << c << "//" << c << "\n";
    if (a && c && d) os << "f " << a << "//" << a << " " << c << "//" << c << " " << d << "//" << d << "\n";
  };
  for (int j = 0; j < g.nj(); ++j) {
    for (int i = 0; i + 1 < g.ni(); ++i) quad(i, j);
  }
  write_text(path, os.str());
}

void export_ply(const SurfaceMesh& mesh, const std::string& path) {
  const GridSpec& g = mesh.grid;
  std::vector<int> vid(static_cast<size_t>(g.size()), -1);
  std::ostringstream verts, faces;
  int nv = 0, nf = 0;
  for (int j = 0; j < g.nj(); ++j) {
    for (int i = 0; i < g.ni(); ++i) {
      const SurfaceSample& s = mesh.at(i, j);
      if (!s.valid_point) continue;
      vid[static_cast<size_t>(g.index(i, j))] = nv++;
      verts << fmt_double(s.point.x1) << " " << fmt_double(s.point.x2) << " "
            << fmt_double(s.point.x0) << " " << fmt_double(s.normal.x1) << " "
            << fmt_double(s.normal.x2) << " " << fmt_double(s.normal.x0) << "\n";
    }
  }
  for (int j = 0; j < g.nj(); ++j) {
    int j1 = j + 1 < g.nj() ? j + 1 : (g.kind == GridSpec::Kind::Polar ? 0 : -1);
    if (j1 < 0) continue;
    for (int i = 0; i + 1 < g.ni(); ++i) {
      int a = vid[static_cast<size_t>(g.index(i, j))];
      int b = vid[static_cast<size_t>(g.index(i + 1, j))];
      int c = vid[static_cast<size_t>(g.index(i + 1, j1))];
      int d = vid[static_cast<size_t>(g.index(i, j1))];
      if (a >= 0 && b >= 0 && c >= 0) {
        faces << "3 " << a << " " << b << " " << c << "\n";
        ++nf;
      }
      if (a >= 0 && c >= 0 && d >= 0) {
        faces << "3 " << a << " " << c << " " << d << "\n";
        ++nf;
      }
    }
  }
  std::ostringstream os;
  os << "ply\nformat ascii 1.0\nelement vertex " << nv
     << "\nproperty double x\nproperty double y\nproperty double z\nproperty double nx\n"
        "property double ny\nproperty double nz\nelement face "
     << nf << "\nproperty list uchar int vertex_indices\nend_header\n"
     << verts.str() << faces.str();
  write_text(path, os.str());
}

json mesh_to_json(const SurfaceMesh& mesh) {
  const GridSpec& g = mesh.grid;
  json grid;
  if (g.kind == GridSpec::Kind::Rect) {
    grid = {{"type", "rect"}, {"x0", g.x0}, {"x1", g.x1}, {"y0", g.y0}, {"y1", g.y1},
            {"nx", g.nx},     {"ny", g.ny}, {"mask_radius", g.mask_radius}};
  } else {
    grid = {{"type", "polar"}, {"rmin", g.rmin}, {"rmax", g.rmax}, {"nr", g.nr},
            {"ntheta", g.ntheta}};
  }
  json verts = json::array();
  for (const auto& s : mesh.samples) {
    json v;
    v["z"] = cplx_to_json(s.z);
    v["masked"] = s.masked;
    v["valid"] = s.valid_point;
    v["cell"] = cell_tag_name(s.cell.tag);
    if (s.valid_point) {
      v["p"] = {s.point.x1, s.point.x2, s.point.x0};
      v["n"] = {s.normal.x1, s.normal.x2, s.normal.x0};
      v["rho"] = s.rho;
      v["u"] = s.u;
      v["component_sign"] = s.component_sign;
    }
    if (!s.masked) {
      v["q"] = cplx_to_json(s.q);
      v["dwdz"] = cplx_to_json(s.dwdz);
      v["residuals"] = {{"tau", s.tau_resid},
                        {"recon", s.recon_resid},
                        {"det_drift", s.det_drift},
                        {"dropped", s.dropped}};
      if (s.cell.tag != CellTag::BigCell) {
        v["evidence"] = {{"kernel_dim", s.cell.evidence.kernel_dim},
                         {"det_w", s.cell.evidence.det_w},
                         {"conditioning", s.cell.evidence.conditioning},
                         {"rho_slope", s.cell.evidence.rho_slope},
                         {"rho_samples", s.cell.evidence.rho_samples}};
      }
    }
    verts.push_back(v);
  }
  return json{{"format", "minkcmc-mesh-1"},
              {"H", mesh.H},
              {"lambda0", cplx_to_json(mesh.lambda0)},
              {"potential_name", mesh.potential_name},
              {"smyth_c", mesh.smyth_c},
              {"smyth_k", mesh.smyth_k},
              {"symmetry_order", mesh.symmetry_order},
              {"grid", grid},
              {"vertices", verts}};
}

void export_mesh_json(const SurfaceMesh& mesh, const std::string& path) {
  write_text(path, mesh_to_json(mesh).dump(1));
}

SurfaceMesh mesh_from_json(const json& doc) {
  if (doc.value("format", "") != std::string("minkcmc-mesh-1")) {
    throw Error(ErrorCode::SchemaError, "not a minkcmc mesh document");
  }
  SurfaceMesh mesh;
  mesh.H = doc["H"].get<double>();
  mesh.lambda0 = cplx_from_json(doc["lambda0"]);
  mesh.potential_name = doc.value("potential_name", "");
  mesh.smyth_c = doc.value("smyth_c", -1.0);
  mesh.smyth_k = doc.value("smyth_k", -1);
  mesh.symmetry_order = doc.value("symmetry_order", 0);
  const json& grid = doc["grid"];
  GridSpec& g = mesh.grid;
  if (grid["type"] == "rect") {
    g.kind = GridSpec::Kind::Rect;
    g.x0 = grid["x0"].get<double>();
    g.x1 = grid["x1"].get<double>();
    g.y0 = grid["y0"].get<double>();
    g.y1 = grid["y1"].get<double>();
    g.nx = grid["nx"].get<int>();
    g.ny = grid["ny"].get<int>();
    g.mask_radius = grid.value("mask_radius", 0.0);
  } else {
    g.kind = GridSpec::Kind::Polar;
    g.rmin = grid["rmin"].get<double>();
    g.rmax = grid["rmax"].get<double>();
    g.nr = grid["nr"].get<int>();
    g.ntheta = grid["ntheta"].get<int>();
  }
  const json& verts = doc["vertices"];
  if (static_cast<int>(verts.size()) != g.size()) {
    throw Error(ErrorCode::SchemaError, "vertex count does not match grid");
  }
  mesh.samples.resize(verts.size());
  for (size_t k = 0; k < verts.size(); ++k) {
    const json& v = verts[k];
    SurfaceSample& s = mesh.samples[k];
    s.z = cplx_from_json(v["z"]);
    s.masked = v.value("masked", false);
    s.valid_point = v.value("valid", false);
    s.cell.tag = cell_tag_from_name(v.value("cell", "higher_or_unknown"));
    if (s.valid_point) {
      s.point = {v["p"][0].get<double>(), v["p"][1].get<double>(), v["p"][2].get<double>()};
      s.normal = {v["n"][0].get<double>(), v["n"][1].get<double>(), v["n"][2].get<double>()};
      s.rho = v["rho"].get<double>();
      s.u = v["u"].get<double>();
      s.component_sign = v.value("component_sign", 1);
    }
    if (v.contains("q")) s.q = cplx_from_json(v["q"]);
    if (v.contains("dwdz")) s.dwdz = cplx_from_json(v["dwdz"]);
  }
  return mesh;
}

SurfaceMesh load_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path);
  json doc = json::parse(in);
  return mesh_from_json(doc);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IOError, "short write to " + path);
}

}  // namespace minkcmc
