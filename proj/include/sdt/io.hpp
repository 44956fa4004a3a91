#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdt/sample.hpp"

namespace sdt {

inline constexpr const char* kToolVersion = "0.1.0";

// Single numeric column; a non-numeric first row is treated as a header and
// skipped.  Parse failures report the 1-based row number.
Sample ingest_csv(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);

// First line of every CSV the tool writes:
//   # sdt <version> config=<fnv1a hex> seed=<seed> conventions=<flags>
// The conventions field names the choices that are not forced by the math
// (contamination sequence shape, dropped cross-covariance term, table-fit
// estimating equation) so outputs are self-describing.
std::string metadata_header(const std::string& config_text, std::uint64_t seed);
std::string convention_flags();

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const std::string& header_line, const CsvTable& table);
void write_text_file(const std::string& path, const std::string& text);

// Shortest round-trip-safe decimal form, so equal doubles always print the
// same bytes and reruns diff clean.
std::string format_double(double v);

}  // namespace sdt
