// Command-line front end: surface generation, loop factorization, explicit
// families, cell / moduli classification and mesh validation.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "minkcmc/families.hpp"
#include "minkcmc/geomcheck.hpp"
#include "minkcmc/meshio.hpp"

using namespace minkcmc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string out_dir = "out";
  double lambda0_angle = std::numeric_limits<double>::quiet_NaN();
  bool no_scan = false;
  bool ply = false;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot create " + dir);
}

int emit_mesh_and_report(const SurfaceMesh& mesh, const CommonOpts& c) {
  ensure_dir(c.out_dir);
  export_obj(mesh, c.out_dir + "/surface.obj");
  if (c.ply) export_ply(mesh, c.out_dir + "/surface.ply");
  export_mesh_json(mesh, c.out_dir + "/mesh.json");
  ValidationReport rep = standard_report(mesh);
  rep.print(std::cout);
  json jrep = json::array();
  for (const auto& ch : rep.checks) {
    jrep.push_back({{"name", ch.name},
                    {"max_residual", ch.max_residual},
                    {"tolerance", ch.tolerance},
                    {"pass", ch.pass},
                    {"excluded", ch.excluded},
                    {"note", ch.note}});
  }
  write_text(c.out_dir + "/report.json", json{{"checks", jrep}}.dump(1));
  std::cout << "wrote " << c.out_dir << "/surface.obj, mesh.json, report.json\n";
  std::cout << "flagged vertices: " << mesh.flagged_count() << "\n";
  return rep.all_pass() ? 0 : 1;
}

int cmd_surface(const std::string& path, const CommonOpts& c) {
  RunSpec spec = load_run_spec(path);
  if (!std::isnan(c.lambda0_angle)) spec.lambda0 = unit_circle(c.lambda0_angle);
  ScanOptions scan;
  scan.enabled = !c.no_scan;
  SurfaceMesh mesh =
      build_surface(spec.potential, spec.grid, spec.initial, spec.lambda0, spec.policy,
                    FactorizeOptions{}, scan);
  return emit_mesh_and_report(mesh, c);
}

int cmd_factor(const std::string& path, const std::string& out_file) {
  MatrixLoop X = load_loop(path);
  IwasawaResult r = iwasawa_kernel(X);
  json doc{{"F", loop_to_json(r.F)},
           {"B", loop_to_json(r.B)},
           {"component_sign", r.component_sign},
           {"rho0", r.rho0},
           {"conditioning", r.conditioning},
           {"residual", r.residual}};
  std::string text = doc.dump(1);
  if (out_file.empty()) {
    std::cout << text << "\n";
  } else {
    write_text(out_file, text);
    std::cout << "wrote " << out_file << "\n";
  }
  std::cout << "component_sign " << r.component_sign << "  rho0 " << r.rho0 << "  residual "
            << r.residual << "\n";
  return 0;
}

int cmd_revolution(double a, double b, double cc, double xmin, double xmax, int nx, int ny,
                   const CommonOpts& c) {
  RevolutionParams params{a, b, cc};
  ProfileSolution prof = solve_profile_v(params, xmin - 0.05, xmax + 0.05);
  double x0 = std::max(xmin, prof.xmin + 1e-6), x1 = std::min(xmax, prof.xmax - 1e-6);
  if (!(x1 > x0)) throw Error(ErrorCode::LeftMaximalInterval, "empty usable x interval");
  cplx lambda0 = std::isnan(c.lambda0_angle) ? cplx(1, 0) : unit_circle(c.lambda0_angle);

  GridSpec grid;
  grid.kind = GridSpec::Kind::Rect;
  grid.x0 = x0;
  grid.x1 = x1;
  grid.y0 = 0;
  grid.y1 = (x1 - x0) * (ny - 1.0) / (nx - 1.0);
  grid.nx = nx;
  grid.ny = ny;
  grid.z0 = cplx(x0, 0);

  SurfaceMesh mesh;
  mesh.grid = grid;
  mesh.H = params.H();
  mesh.lambda0 = lambda0;
  mesh.potential_name = "revolution";
  mesh.samples.assign(static_cast<size_t>(grid.size()), SurfaceSample{});
  Potential pot = revolution_potential(params);
  SymOptions so;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      SurfaceSample& s = mesh.at(i, j);
      s.z = grid.vertex(i, j);
      RevolutionFrame fr = revolution_frame(params, prof, s.z);
      s.point = sym_point(fr.F, lambda0, params.H(), so);
      s.normal = normal_vec(fr.F, lambda0, so);
      MetricData md = metric_rho(fr.B);
      s.rho = md.rho;
      s.u = md.u;
      s.q = hopf_q(pot, s.z);
      s.dwdz = cplx(0, 1) / pot.H * pot.a_minus1().eval(s.z);
      s.cell.tag = CellTag::BigCell;
      s.tau_resid = fr.tau_residual;
      s.recon_resid = fr.split_residual;
      s.valid_point = true;
    }
  }
  AxisClass axis = axis_classify(a, b, cc);
  std::cout << "axis: " << axis_name(axis) << "  ((a+b)^2 - c^2 = "
            << (a + b) * (a + b) - cc * cc << ")\nH = " << params.H() << "\n";
  return emit_mesh_and_report(mesh, c);
}

int cmd_classify(double p, double q, double v0) {
  ModuliPoint rep = moduli_normalize({p, q, v0});
  json doc{{"input", {{"p", p}, {"q", q}, {"v0", v0}}},
           {"canonical", {{"p", rep.p}, {"q", rep.q}, {"v0", rep.v0}}}};
  std::cout << doc.dump(1) << "\n";
  return 0;
}

int cmd_classify_loop(const std::string& path) {
  MatrixLoop X = load_loop(path);
  CellClass cls = classify_cell(X);
  json doc{{"cell", cell_tag_name(cls.tag)},
           {"evidence",
            {{"kernel_dim", cls.evidence.kernel_dim},
             {"det_w", cls.evidence.det_w},
             {"sigma_ratio", cls.evidence.sigma_ratio},
             {"conditioning", cls.evidence.conditioning},
             {"note", cls.evidence.note}}}};
  std::cout << doc.dump(1) << "\n";
  return 0;
}

int cmd_smyth(double cval, int k, const std::string& init, double rmin, double rmax, int nr,
              int ntheta, const CommonOpts& c) {
  Potential pot = smyth_potential(cval, k);
  GridSpec grid;
  grid.kind = GridSpec::Kind::Polar;
  grid.rmin = rmin;
  grid.rmax = rmax;
  grid.nr = nr;
  grid.ntheta = ntheta;
  grid.z0 = 0;
  MatrixLoop phi0 = MatrixLoop::identity();
  if (init == "omega1") phi0 = omega_loop(1);
  else if (init == "omega2") phi0 = omega_loop(2);
  else if (init != "identity") throw Error(ErrorCode::SchemaError, "unknown --init " + init);
  BandPolicy policy;
  policy.max_band = 40;
  cplx lambda0 = std::isnan(c.lambda0_angle) ? cplx(1, 0) : unit_circle(c.lambda0_angle);
  ScanOptions scan;
  scan.enabled = !c.no_scan;
  SurfaceMesh mesh = build_surface(pot, grid, phi0, lambda0, policy, FactorizeOptions{}, scan);
  return emit_mesh_and_report(mesh, c);
}

int cmd_validate(const std::string& path) {
  std::string file = path;
  if (fs::is_directory(path)) file = path + "/mesh.json";
  SurfaceMesh mesh = load_mesh_json(file);
  ValidationReport rep = standard_report(mesh);
  rep.print(std::cout);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spacelike CMC surfaces in Minkowski 3-space via loop group factorization"};
  app.require_subcommand(1);
  CommonOpts common;

  std::string potential_path, loop_path, out_file, mesh_path;
  double a = 1, b = 0.25, cc = 0;
  double p = 2, q = 1, v0 = 1;
  double xmin = -0.15, xmax = 0.15;
  int nx = 25, ny = 25;
  double smyth_c = 1;
  int smyth_k = 1;
  std::string init = "identity";
  double rmin = 0.05, rmax = 0.6;
  int nr = 56, ntheta = 48;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--lambda0", common.lambda0_angle,
                    "evaluation point as angle theta, lambda0 = e^{i theta}");
    cmd->add_flag("--no-scan", common.no_scan, "disable the singular-set edge scan");
    cmd->add_flag("--ply", common.ply, "also write a binary-free ascii PLY");
  };

  CLI::App* surface = app.add_subcommand("surface", "potential.json -> mesh + report");
  surface->add_option("potential", potential_path)->required();
  add_common(surface);

  CLI::App* factor = app.add_subcommand("factor", "loop.json -> Iwasawa factors");
  factor->add_option("loop", loop_path)->required();
  factor->add_option("--out", out_file, "output JSON file (stdout otherwise)");

  CLI::App* revolution = app.add_subcommand("revolution", "explicit rotational surface");
  revolution->add_option("--a", a)->required();
  revolution->add_option("--b", b)->required();
  revolution->add_option("--c", cc)->required();
  revolution->add_option("--xmin", xmin);
  revolution->add_option("--xmax", xmax);
  revolution->add_option("--nx", nx);
  revolution->add_option("--ny", ny);
  add_common(revolution);

  CLI::App* classify = app.add_subcommand("classify", "moduli canonical representative");
  classify->add_option("--p", p)->required();
  classify->add_option("--q", q)->required();
  classify->add_option("--v0", v0)->required();

  CLI::App* classify_loop = app.add_subcommand("classify-loop", "Iwasawa cell of a loop");
  classify_loop->add_option("loop", loop_path)->required();

  CLI::App* smyth = app.add_subcommand("smyth", "rotational-metric surface family");
  smyth->add_option("--c", smyth_c);
  smyth->add_option("--k", smyth_k);
  smyth->add_option("--init", init, "identity | omega1 | omega2");
  smyth->add_option("--rmin", rmin);
  smyth->add_option("--rmax", rmax);
  smyth->add_option("--nr", nr);
  smyth->add_option("--ntheta", ntheta);
  add_common(smyth);

  CLI::App* validate = app.add_subcommand("validate", "re-run checks on an exported mesh");
  validate->add_option("mesh", mesh_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (surface->parsed()) return cmd_surface(potential_path, common);
    if (factor->parsed()) return cmd_factor(loop_path, out_file);
    if (revolution->parsed()) return cmd_revolution(a, b, cc, xmin, xmax, nx, ny, common);
    if (classify->parsed()) return cmd_classify(p, q, v0);
    if (classify_loop->parsed()) return cmd_classify_loop(loop_path);
    if (smyth->parsed()) return cmd_smyth(smyth_c, smyth_k, init, rmin, rmax, nr, ntheta, common);
    if (validate->parsed()) return cmd_validate(mesh_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
