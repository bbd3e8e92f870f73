// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace mvanc {

// Minimal numeric CSV. Files start with a '# schema: <name> v<n>' comment
// line, then a header row, then data. Values are written with %.10g for
// traces and %.17g where exact round-trip matters; both are deterministic.
struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const; // -1 when absent
};

void write_csv(const std::string& path, const CsvTable& table, const char* value_format = "%.10g");
CsvTable read_csv(const std::string& path);

} // namespace mvanc
