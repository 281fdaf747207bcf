#include "smxfem/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace smx {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << std::setprecision(12);
  return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) fail(ErrorKind::Io, "error while writing '" + path + "'");
}

}  // namespace

std::string csv_header(const std::string& what, std::uint64_t config_hash, const std::string& columns) {
  return "# smxfem " + what + " config_hash=" + hex_hash(config_hash) + "\n" + columns + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  close_checked(out, path);
}

void write_vtk(const std::string& path, const Discretization& disc, const Eigen::VectorXd& u, const MaterialSet& mat,
               const std::string& title) {
  const Mesh& mesh = disc.mesh;
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& x : mesh.nodes()) out << x.x() << " " << x.y() << " 0\n";
  out << "CELLS " << mesh.num_elements() << " " << 5 * mesh.num_elements() << "\n";
  for (const auto& e : mesh.elements()) out << "4 " << e[0] << " " << e[1] << " " << e[2] << " " << e[3] << "\n";
  out << "CELL_TYPES " << mesh.num_elements() << "\n";
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) out << "9\n";

  out << "POINT_DATA " << mesh.num_nodes() << "\nVECTORS displacement double\n";
  // Enrichment vanishes at the nodes, so nodal values are the standard dofs.
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) out << u[2 * n] << " " << u[2 * n + 1] << " 0\n";
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (double p : disc.phi) out << p << "\n";

  out << "CELL_DATA " << mesh.num_elements() << "\nSCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (const auto& ed : disc.elements) {
    int phase = static_cast<int>(ed.partition.cells.front().phase);
    if (is_cut(ed.phi)) phase = 2;
    out << phase << "\n";
  }
  out << "SCALARS energy_density double 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < disc.elements.size(); ++e) {
    const ElementData& ed = disc.elements[e];
    double energy = 0.0, area = 0.0;
    for (std::size_t c = 0; c < ed.partition.cells.size(); ++c) {
      const SmoothingCell& cell = ed.partition.cells[c];
      const Voigt3 eps = cell_strain(disc, u, static_cast<int>(e), static_cast<int>(c));
      energy += cell.area * bulk_energy_density(mat.stiffness(cell.phase), eps, mat.eigenstrain_of(cell.phase));
      area += cell.area;
    }
    out << energy / area << "\n";
  }
  close_checked(out, path);
}

void write_contour_csv(const std::string& path, const LevelSetField& field, const std::string& header) {
  std::ofstream out = open_out(path);
  out << header;
  const auto lines = zero_contour_polylines(field);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    for (const auto& p : lines[k].points) out << p.x() << "," << p.y() << "," << k << "\n";
    if (lines[k].closed && !lines[k].points.empty())
      out << lines[k].points.front().x() << "," << lines[k].points.front().y() << "," << k << "\n";
  }
  close_checked(out, path);
}

void write_cells_csv(const std::string& path, const Discretization& disc, const std::string& header) {
  std::ofstream out = open_out(path);
  out << header;
  for (std::size_t e = 0; e < disc.elements.size(); ++e) {
    const auto& cells = disc.elements[e].partition.cells;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << e << "," << c << "," << static_cast<int>(cells[c].phase) << "," << cells[c].area << ",";
      for (std::size_t v = 0; v < cells[c].polygon.size(); ++v)
        out << (v ? ";" : "") << cells[c].polygon[v].x() << " " << cells[c].polygon[v].y();
      out << "\n";
    }
  }
  close_checked(out, path);
}

void write_oracle_csv(const std::string& path, const CircularInclusionOracle& oracle, int samples, double r_max,
                      const std::string& header) {
  if (samples <= 0 || !(r_max > 0.0)) fail(ErrorKind::InvalidArgument, "write_oracle_csv: bad sampling");
  std::ofstream out = open_out(path);
  out << header;
  for (int k = 1; k <= samples; ++k) {
    const double r = r_max * k / samples;
    const auto e = oracle.radial_strains(r);
    out << r << "," << (r <= oracle.p.radius ? "particle" : "matrix") << "," << oracle.radial_displacement(r) << ","
        << e[0] << "," << e[1] << "\n";
  }
  close_checked(out, path);
}

}  // namespace smx
