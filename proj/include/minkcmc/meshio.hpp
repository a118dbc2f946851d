#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "minkcmc/symsurface.hpp"

namespace minkcmc {

// Potential document: potential + grid + policy + initial frame + lambda0.
struct RunSpec {
  Potential potential;
  GridSpec grid;
  BandPolicy policy;
  MatrixLoop initial = MatrixLoop::identity();
  cplx lambda0{1, 0};
};

RunSpec parse_run_spec(const nlohmann::json& doc);
RunSpec load_run_spec(const std::string& path);

MatrixLoop loop_from_json(const nlohmann::json& doc);
nlohmann::json loop_to_json(const MatrixLoop& L);
MatrixLoop load_loop(const std::string& path);

// OBJ: `v x1 x2 x0` + `vn` records; faces skip flagged/masked vertices.
void export_obj(const SurfaceMesh& mesh, const std::string& path);
void export_ply(const SurfaceMesh& mesh, const std::string& path);
// JSON sidecar with per-vertex z, rho, u, cell, component_sign, residuals.
nlohmann::json mesh_to_json(const SurfaceMesh& mesh);
void export_mesh_json(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh mesh_from_json(const nlohmann::json& doc);
SurfaceMesh load_mesh_json(const std::string& path);

void write_text(const std::string& path, const std::string& text);

const char* cell_tag_name(CellTag t);

}  // namespace minkcmc
