#pragma once
// File formats: the FBLAB-FIELD v1 ASCII dump and the CSV reports. All
// numbers go out with 17 significant digits so single-threaded re-runs are
// bit-identical.

#include <string>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/fbgeom.hpp"
#include "fblab/field.hpp"
#include "fblab/oracle.hpp"
#include "fblab/solve.hpp"

namespace fblab {

// %.17g, round-trip exact for doubles.
std::string format_g17(double v);

// Line 1 "FBLAB-FIELD v1"; line 2 "dim nx [ny] h ox [oy] shape"; then
// row-major node values, one grid row per line, exterior nodes as "nan".
void write_field(const std::string& path, const Field& u);
Field read_field(const std::string& path);

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows);
void write_free_boundary_csv(const std::string& path, const FreeBoundary& fb);
void write_density_csv(const std::string& path, const DensityReport& rep);
void write_blowup_csv(const std::string& path, const BlowupSequence& seq);

struct MonitorRow {
  double r = 0.0;
  double value = 0.0;
  std::string mode;
};
void write_monitor_csv(const std::string& path, const std::vector<MonitorRow>& rows);
void write_oracle_csv(const std::string& path, const std::vector<OracleRow>& rows);

}  // namespace fblab
