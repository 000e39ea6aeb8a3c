#pragma once

#include "dynmkw/observations.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace dynmkw {

struct CsvData {
    ObservationMatrix matrix;
    std::vector<std::string> labels;  // empty unless the file has a header
};

// RFC-4180-style reader: rows are time points, columns are coordinates.
// Quoted fields, doubled quotes and CRLF line ends are accepted; blank lines
// are skipped. Ragged rows, non-numeric cells and NaN/inf are rejected with
// a std::runtime_error of the form "<source>:<line>: <reason>".
CsvData parse_csv(std::istream& in, bool has_header, char delimiter = ',',
                  std::string_view source = "<input>");
CsvData read_csv(const std::filesystem::path& path, bool has_header, char delimiter = ',');

}  // namespace dynmkw
