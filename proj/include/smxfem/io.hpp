#pragma once

#include "smxfem/config.hpp"
#include "smxfem/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace smx {

/// "# smxfem <what> config_hash=<hex>" followed by the column line.
std::string csv_header(const std::string& what, std::uint64_t config_hash, const std::string& columns);

/// Legacy ASCII VTK unstructured grid of the mesh. Point data: nodal
/// displacement and phi; cell data: phase (0 matrix, 1 particle, 2 cut) and
/// mean bulk energy density.
void write_vtk(const std::string& path, const Discretization& disc, const Eigen::VectorXd& u, const MaterialSet& mat,
               const std::string& title);

/// Rows (x, y, segment_id), one polyline per segment_id, closed polylines
/// repeat their first point at the end.
void write_contour_csv(const std::string& path, const LevelSetField& field, const std::string& header);

/// Rows (element_id, cell_id, phase, area, vertices) with vertices as
/// "x y" pairs separated by ';'.
void write_cells_csv(const std::string& path, const Discretization& disc, const std::string& header);

/// Oracle fields (r, phase, u_r, e_rr, e_tt) at `samples` radii in (0, r_max].
void write_oracle_csv(const std::string& path, const CircularInclusionOracle& oracle, int samples, double r_max,
                      const std::string& header);

void write_text(const std::string& path, const std::string& text);

}  // namespace smx
