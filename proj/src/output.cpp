#include "chdg/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chdg {

const char* const kCsvHeader =
    "step,time,energy,mass,min_sample,max_sample,min_avg,max_avg,newton_iters,residual,violation";

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void check_written(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<Vec2> reference_corners(CellType t) {
  if (t == CellType::Quad) return {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  return {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
}

}  // namespace

std::string format_csv_row(const DiagnosticsRow& r) {
  std::string s = std::to_string(r.step);
  for (double v : {r.time, r.energy, r.mass, r.min_sample, r.max_sample, r.min_avg, r.max_avg}) s += "," + num(v);
  s += "," + std::to_string(r.newton_iters);
  s += "," + num(r.residual);
  s += "," + num(r.violation);
  return s;
}

void write_csv(const std::vector<DiagnosticsRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_csv_row(r) << '\n';
}

void write_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path) {
  auto out = open_out(path);
  write_csv(rows, out);
  check_written(out, path);
}

std::vector<DiagnosticsRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("read_csv: missing or wrong header");
  std::vector<DiagnosticsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[11];
    for (int i = 0; i < 11; ++i) {
      if (!std::getline(ss, f[i], ',')) throw std::runtime_error("read_csv: short row '" + line + "'");
    }
    DiagnosticsRow r;
    r.step = std::stoi(f[0]);
    r.time = std::stod(f[1]);
    r.energy = std::stod(f[2]);
    r.mass = std::stod(f[3]);
    r.min_sample = std::stod(f[4]);
    r.max_sample = std::stod(f[5]);
    r.min_avg = std::stod(f[6]);
    r.max_avg = std::stod(f[7]);
    r.newton_iters = std::stoi(f[8]);
    r.residual = std::stod(f[9]);
    r.violation = std::stod(f[10]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<DiagnosticsRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_vtk(const CoupledState& state, std::ostream& out) {
  const auto& space = state.phi.space();
  const auto& mesh = space.mesh();
  const auto corners = reference_corners(mesh.cell_type());
  const std::size_t nc = mesh.num_cells();
  const std::size_t nv = corners.size();

  out << "# vtk DataFile Version 3.0\nphase field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nc * nv << " double\n";
  for (std::size_t k = 0; k < nc; ++k) {
    for (const auto& r : corners) {
      const Vec2 x = mesh.cell(k).map_to_physical(r);
      out << num(x.x()) << ' ' << num(x.y()) << " 0\n";
    }
  }
  out << "CELLS " << nc << ' ' << nc * (nv + 1) << '\n';
  for (std::size_t k = 0; k < nc; ++k) {
    out << nv;
    for (std::size_t i = 0; i < nv; ++i) out << ' ' << k * nv + i;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  const int vtk_type = mesh.cell_type() == CellType::Quad ? 9 : 5;
  for (std::size_t k = 0; k < nc; ++k) out << vtk_type << '\n';

  out << "CELL_DATA " << nc << '\n';
  for (const auto* name : {"phi_avg", "mu_avg"}) {
    const DiscreteField& f = name[0] == 'p' ? state.phi : state.mu;
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < nc; ++k) out << num(f(k, 0)) << '\n';
  }
  if (space.order() >= 1) {
    out << "POINT_DATA " << nc * nv << '\n';
    for (const auto* name : {"phi", "mu"}) {
      const DiscreteField& f = name[0] == 'p' ? state.phi : state.mu;
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (std::size_t k = 0; k < nc; ++k) {
        for (const auto& r : corners) out << num(evaluate(f, k, r)) << '\n';
      }
    }
  }
}

void write_vtk(const CoupledState& state, const std::string& path) {
  auto out = open_out(path);
  write_vtk(state, out);
  check_written(out, path);
}

std::string format_eoc(const EocTable& t) {
  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "# p = %d, A = %g, limiter = %s\n", t.p, t.amplitude, t.limiter ? "on" : "off");
  s += buf;
  std::snprintf(buf, sizeof buf, "%6s %12s %6s %12s %7s %12s %7s\n", "N", "tau", "steps", "L2 error", "EOC",
                "H1 error", "EOC");
  s += buf;
  auto eoc = [](double v) {
    char b[16];
    if (std::isnan(v)) return std::string("      -");
    std::snprintf(b, sizeof b, "%7.3f", v);
    return std::string(b);
  };
  for (const auto& r : t.rows) {
    if (r.failed) {
      std::snprintf(buf, sizeof buf, "%6d %12.4e %6d  FAILED: ", r.n, r.tau, r.steps);
      s += buf + r.error + "\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%6d %12.4e %6d %12.4e %s %12.4e %s\n", r.n, r.tau, r.steps, r.l2,
                  eoc(r.l2_eoc).c_str(), r.h1, eoc(r.h1_eoc).c_str());
    s += buf;
  }
  return s;
}

void write_eoc(const EocTable& table, const std::string& path) {
  auto out = open_out(path);
  out << format_eoc(table);
  check_written(out, path);
}

}  // namespace chdg
