#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "schwinger/fluctuation.hpp"
#include "schwinger/lattice.hpp"
#include "schwinger/rydberg.hpp"

namespace schwinger {

using json = nlohmann::json;

json params_echo(const LatticeParams& p);
json params_echo(const RydbergParams& p);
json params_echo(const DiracParams& p);

// Writes via a temporary file in the same directory, then renames.
void atomic_write_file(const std::string& path, const std::string& content);

// CSV with one header row; numbers printed with 17 significant digits.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

std::string format_g17(double x);

// Prepends SCHWINGER_OUTPUT_DIR to relative paths when it is set.
std::string resolve_output_path(const std::string& path);

}  // namespace schwinger
