#include "fblab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fblab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

[[noreturn]] void bad_dump(const std::string& path, const char* why) {
  throw std::runtime_error("bad field dump " + path + ": " + why);
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(const std::string& path, const Field& u) {
  const Grid& g = u.grid;
  std::ofstream f = open_out(path);
  f << "FBLAB-FIELD v1\n";
  if (g.dim == 1)
    f << "1 " << g.nx << ' ' << format_g17(g.h) << ' ' << format_g17(g.ox) << ' '
      << shape_name(g.shape) << '\n';
  else
    f << "2 " << g.nx << ' ' << g.ny << ' ' << format_g17(g.h) << ' '
      << format_g17(g.ox) << ' ' << format_g17(g.oy) << ' ' << shape_name(g.shape)
      << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) f << ' ';
      const int idx = g.node_index(i, j);
      if (g.mask[idx] == NodeClass::Exterior)
        f << "nan";
      else
        f << format_g17(u.v[idx]);
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

Field read_field(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(f, line) || line != "FBLAB-FIELD v1") bad_dump(path, "bad magic");
  if (!std::getline(f, line)) bad_dump(path, "missing header");
  std::istringstream hdr(line);
  int dim = 0;
  hdr >> dim;
  Grid g;
  if (dim == 1) {
    int nx;
    double h, ox;
    std::string shape;
    if (!(hdr >> nx >> h >> ox >> shape)) bad_dump(path, "short 1D header");
    if (shape != "interval") bad_dump(path, "unknown 1D shape");
    g = make_interval(nx, ox, ox + (nx - 1) * h);
  } else if (dim == 2) {
    int nx, ny;
    double h, ox, oy;
    std::string shape;
    if (!(hdr >> nx >> ny >> h >> ox >> oy >> shape)) bad_dump(path, "short 2D header");
    if (shape == "rectangle")
      g = make_rectangle(nx, ny, ox, oy, ox + (nx - 1) * h, oy + (ny - 1) * h);
    else if (shape == "disk") {
      // Disk grids span the bounding square; center and radius follow.
      const double r = 0.5 * (nx - 1) * h;
      g = make_disk(nx, ox + r, oy + r, r);
    } else
      bad_dump(path, "unknown 2D shape");
  } else
    bad_dump(path, "bad dim");

  Field u(g);
  std::string tok;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!(f >> tok)) bad_dump(path, "truncated values");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) bad_dump(path, "unparsable value");
      const int idx = g.node_index(i, j);
      if (std::isnan(v)) {
        if (g.mask[idx] != NodeClass::Exterior)
          bad_dump(path, "nan marker on an active node");
        u.v[idx] = 0.0;
      } else {
        if (g.mask[idx] == NodeClass::Exterior)
          bad_dump(path, "numeric value on an exterior node");
        u.v[idx] = v;
      }
    }
  return u;
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows) {
  std::ofstream f = open_out(path);
  f << "iter,eps,energy,m2,step\n";
  for (const HistoryRow& r : rows)
    f << r.iter << ',' << format_g17(r.eps) << ',' << format_g17(r.energy) << ','
      << format_g17(r.m2) << ',' << format_g17(r.step) << '\n';
}

void write_free_boundary_csv(const std::string& path, const FreeBoundary& fb) {
  std::ofstream f = open_out(path);
  f << "x,y,nx,ny,alpha,beta,residual\n";
  for (const FBPoint& p : fb.points)
    f << format_g17(p.x) << ',' << format_g17(p.y) << ',' << format_g17(p.nx) << ','
      << format_g17(p.ny) << ',' << format_g17(p.alpha) << ',' << format_g17(p.beta)
      << ',' << format_g17(p.residual) << '\n';
}

void write_density_csv(const std::string& path, const DensityReport& rep) {
  std::ofstream f = open_out(path);
  f << "radius,min_volume_fraction,min_nondeg_ratio,max_clean_c1,min_clean_c1\n";
  for (size_t k = 0; k < rep.radii.size(); ++k) {
    auto cell = [&](const std::vector<double>& v) {
      return k < v.size() ? format_g17(v[k]) : std::string();
    };
    f << format_g17(rep.radii[k]) << ',' << cell(rep.min_volume_fraction) << ','
      << cell(rep.min_nondeg_ratio) << ',' << cell(rep.max_clean_c1) << ','
      << cell(rep.min_clean_c1) << '\n';
  }
}

void write_blowup_csv(const std::string& path, const BlowupSequence& seq) {
  std::ofstream f = open_out(path);
  f << "k,rho,sup_diff,hausdorff\n";
  for (size_t k = 0; k < seq.sup_diff.size(); ++k)
    f << k << ',' << format_g17(seq.rhos[k]) << ',' << format_g17(seq.sup_diff[k])
      << ',' << format_g17(seq.hausdorff[k]) << '\n';
}

void write_monitor_csv(const std::string& path, const std::vector<MonitorRow>& rows) {
  std::ofstream f = open_out(path);
  f << "r,value,mode\n";
  for (const MonitorRow& r : rows)
    f << format_g17(r.r) << ',' << format_g17(r.value) << ',' << r.mode << '\n';
}

void write_oracle_csv(const std::string& path, const std::vector<OracleRow>& rows) {
  std::ofstream f = open_out(path);
  f << "pattern,energy,feasible\n";
  for (const OracleRow& r : rows)
    f << r.pattern << ',' << format_g17(r.energy) << ',' << (r.feasible ? 1 : 0)
      << '\n';
}

}  // namespace fblab
