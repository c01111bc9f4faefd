#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dfrelay/link_sim.hpp"

namespace dfrelay::report {

class IoError : public Error {
public:
  using Error::Error;
};

inline constexpr const char* kCsvHeader =
    "scheme,power_alloc,n_r,n_d,l_h,l_g,sigma_t,snr_db,trials,bits,bit_errors,ber,ci95,opa_nonconv";

// One CSV line (no trailing newline). BER and CI carry 6 significant digits.
std::string csv_row(const sim::BerRecord& rec);

void write_csv(std::ostream& out, const std::vector<sim::BerRecord>& records);

// Writes header and rows with LF endings. Throws IoError on failure.
void write_csv_file(const std::string& path, const std::vector<sim::BerRecord>& records);

} // namespace dfrelay::report
