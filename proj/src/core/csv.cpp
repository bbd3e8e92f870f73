// SPDX-License-Identifier: Apache-2.0
#include "core/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace mvanc {

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

void write_csv(const std::string& path, const CsvTable& table, const char* value_format) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << "# schema: " << table.schema << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) os << ',';
        os << table.columns[c];
    }
    os << '\n';
    char buf[48];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw IoError("csv row width mismatch writing '" + path + "'");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            if (std::isnan(row[c])) {
                // blank cell: value undefined at this sample
            } else {
                std::snprintf(buf, sizeof(buf), value_format, row[c]);
                os << buf;
            }
        }
        os << '\n';
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    long line_no = 0;
    bool header_done = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# schema: ";
            if (line.rfind(tag, 0) == 0) t.schema = line.substr(tag.size());
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ls, cell, ',')) t.columns.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(t.columns.size());
        while (std::getline(ls, cell, ',')) {
            if (cell.empty()) {
                row.push_back(std::nan(""));
            } else {
                try {
                    row.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    throw IoError("csv parse error at " + path + ":" + std::to_string(line_no) +
                                  " field '" + cell + "'");
                }
            }
        }
        // trailing empty field
        if (!line.empty() && line.back() == ',') row.push_back(std::nan(""));
        if (row.size() != t.columns.size())
            throw IoError("csv row width mismatch at " + path + ":" + std::to_string(line_no));
        t.rows.push_back(std::move(row));
    }
    if (!header_done) throw IoError("csv '" + path + "' has no header");
    return t;
}

} // namespace mvanc
