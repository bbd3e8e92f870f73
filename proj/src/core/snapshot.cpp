// SPDX-License-Identifier: Apache-2.0
#include "core/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mvanc {

namespace {

std::string format_coeff(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(const std::string& context, const std::string& line) {
    throw IoError("snapshot parse error " + context + (line.empty() ? "" : ": '" + line + "'"));
}

std::string next_line(std::istream& is, const std::string& context) {
    std::string line;
    if (!std::getline(is, line)) parse_fail(context + " (unexpected end of file)", "");
    return line;
}

void expect_keyword(std::istream& is, const std::string& keyword, long& value) {
    const std::string line = next_line(is, "reading '" + keyword + "'");
    std::istringstream ls(line);
    std::string word;
    ls >> word >> value;
    if (word != keyword || ls.fail()) parse_fail("expected '" + keyword + " <n>'", line);
}

} // namespace

void write_filter_bank(std::ostream& os, const std::string& label, const FilterBank& bank) {
    os << "mvanc-filterbank v1\n";
    os << "label " << label << '\n';
    os << "rows " << bank.rows() << '\n';
    os << "cols " << bank.cols() << '\n';
    os << "taps " << bank.tap_len() << '\n';
    for (int r = 0; r < bank.rows(); ++r)
        for (int c = 0; c < bank.cols(); ++c) {
            os << "filter " << r << ' ' << c << '\n';
            const FirFilter& f = bank.at(r, c);
            for (int i = 0; i < f.length(); ++i) {
                if (i) os << ' ';
                os << format_coeff(f[i]);
            }
            os << '\n';
        }
    os << "end\n";
}

FilterBank read_filter_bank(std::istream& is, std::string* label_out) {
    std::string line = next_line(is, "reading bank header");
    // tolerate the blank separating banks inside a plant file
    while (line.empty()) line = next_line(is, "reading bank header");
    if (line != "mvanc-filterbank v1") parse_fail("expected 'mvanc-filterbank v1'", line);

    line = next_line(is, "reading label");
    if (line.rfind("label ", 0) != 0) parse_fail("expected 'label <name>'", line);
    if (label_out) *label_out = line.substr(6);

    long rows = 0, cols = 0, taps = 0;
    expect_keyword(is, "rows", rows);
    expect_keyword(is, "cols", cols);
    expect_keyword(is, "taps", taps);
    if (rows < 1 || cols < 1 || taps < 1) parse_fail("bad bank dimensions", "");

    FilterBank bank(static_cast<int>(rows), static_cast<int>(cols), static_cast<int>(taps));
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            line = next_line(is, "reading filter header");
            std::istringstream ls(line);
            std::string word;
            long fr = -1, fc = -1;
            ls >> word >> fr >> fc;
            if (word != "filter" || fr != r || fc != c)
                parse_fail("expected 'filter " + std::to_string(r) + " " + std::to_string(c) + "'",
                           line);
            line = next_line(is, "reading coefficients");
            std::istringstream cs(line);
            FirFilter& f = bank.at(static_cast<int>(r), static_cast<int>(c));
            for (long i = 0; i < taps; ++i) {
                double v;
                if (!(cs >> v))
                    parse_fail("filter " + std::to_string(r) + "," + std::to_string(c) +
                                   " has fewer than " + std::to_string(taps) + " coefficients",
                               "");
                f[static_cast<int>(i)] = v;
            }
            double extra;
            if (cs >> extra)
                parse_fail("filter " + std::to_string(r) + "," + std::to_string(c) +
                               " has more than " + std::to_string(taps) + " coefficients",
                           "");
        }
    line = next_line(is, "reading bank terminator");
    if (line != "end") parse_fail("expected 'end'", line);
    return bank;
}

void save_filter_bank(const std::string& path, const std::string& label, const FilterBank& bank) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_filter_bank(os, label, bank);
    if (!os) throw IoError("write failed for '" + path + "'");
}

FilterBank load_filter_bank(const std::string& path, std::string* label_out) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_filter_bank(is, label_out);
}

void write_pathset(std::ostream& os, const PathSet& plant) {
    os << "mvanc-plant v1\n";
    os << "dims " << plant.dims.refs << ' ' << plant.dims.sources << ' ' << plant.dims.phys_mics
       << ' ' << plant.dims.virt_mics << '\n';
    os << "sample_rate " << format_coeff(plant.sample_rate) << '\n';
    write_filter_bank(os, "primary_physical", plant.primary_physical);
    write_filter_bank(os, "primary_virtual", plant.primary_virtual);
    write_filter_bank(os, "secondary_physical", plant.secondary_physical);
    write_filter_bank(os, "secondary_physical_est", plant.secondary_physical_est);
    write_filter_bank(os, "secondary_virtual", plant.secondary_virtual);
    write_filter_bank(os, "secondary_virtual_est", plant.secondary_virtual_est);
    os << "end\n";
}

PathSet read_pathset(std::istream& is) {
    std::string line = next_line(is, "reading plant header");
    if (line != "mvanc-plant v1") parse_fail("expected 'mvanc-plant v1'", line);

    PathSet ps;
    line = next_line(is, "reading dims");
    {
        std::istringstream ls(line);
        std::string word;
        ls >> word >> ps.dims.refs >> ps.dims.sources >> ps.dims.phys_mics >> ps.dims.virt_mics;
        if (word != "dims" || ls.fail()) parse_fail("expected 'dims J K M Q'", line);
    }
    line = next_line(is, "reading sample_rate");
    {
        std::istringstream ls(line);
        std::string word;
        ls >> word >> ps.sample_rate;
        if (word != "sample_rate" || ls.fail()) parse_fail("expected 'sample_rate <hz>'", line);
    }

    auto read_named = [&](const char* want) {
        std::string label;
        FilterBank bank = read_filter_bank(is, &label);
        if (label != want)
            parse_fail(std::string("expected bank '") + want + "', found '" + label + "'", "");
        return bank;
    };
    ps.primary_physical = read_named("primary_physical");
    ps.primary_virtual = read_named("primary_virtual");
    ps.secondary_physical = read_named("secondary_physical");
    ps.secondary_physical_est = read_named("secondary_physical_est");
    ps.secondary_virtual = read_named("secondary_virtual");
    ps.secondary_virtual_est = read_named("secondary_virtual_est");

    line = next_line(is, "reading plant terminator");
    if (line != "end") parse_fail("expected 'end'", line);
    ps.validate();
    return ps;
}

void save_pathset(const std::string& path, const PathSet& plant) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_pathset(os, plant);
    if (!os) throw IoError("write failed for '" + path + "'");
}

PathSet load_pathset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_pathset(is);
}

} // namespace mvanc
