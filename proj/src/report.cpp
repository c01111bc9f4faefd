#include "dfrelay/report.hpp"

#include <cstdio>
#include <fstream>

namespace dfrelay::report {

namespace {

// printf-style formatting is locale-independent here: the library never calls setlocale.
std::string format_g(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

} // namespace

std::string csv_row(const sim::BerRecord& rec) {
  std::string row;
  row += sim::to_string(rec.scheme) + ',';
  row += sim::to_string(rec.power_alloc) + ',';
  row += std::to_string(rec.n_r) + ',';
  row += std::to_string(rec.n_d) + ',';
  row += std::to_string(rec.l_h) + ',';
  row += std::to_string(rec.l_g) + ',';
  row += format_g(rec.sigma_t, 10) + ',';
  row += format_g(rec.snr_db, 10) + ',';
  row += std::to_string(rec.trials) + ',';
  row += std::to_string(rec.bits) + ',';
  row += std::to_string(rec.bit_errors) + ',';
  row += format_g(rec.ber, 6) + ',';
  row += format_g(rec.ci95_halfwidth, 6) + ',';
  row += std::to_string(rec.opa_nonconvergence_count);
  return row;
}

void write_csv(std::ostream& out, const std::vector<sim::BerRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& rec : records)
    out << csv_row(rec) << '\n';
}

void write_csv_file(const std::string& path, const std::vector<sim::BerRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  write_csv(out, records);
  out.flush();
  if (!out)
    throw IoError("write to " + path + " failed");
}

} // namespace dfrelay::report
