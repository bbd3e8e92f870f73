// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "core/acoustics.hpp"
#include "core/dsp.hpp"

namespace mvanc {

// Plain-text snapshot schema shared by filter banks and whole plants, so
// tuned filters and synthetic plants can be pinned across runs. Coefficients
// are printed with %.17g and round-trip exactly.
//
//   mvanc-filterbank v1
//   label <name>
//   rows <r>
//   cols <c>
//   taps <t>
//   filter <row> <col>
//   <t coefficients on one line>
//   ...
//   end
//
// A plant file is a small header followed by six bank blocks:
//
//   mvanc-plant v1
//   dims <J> <K> <M> <Q>
//   sample_rate <hz>
//   <bank blocks: primary_physical, primary_virtual, secondary_physical,
//    secondary_physical_est, secondary_virtual, secondary_virtual_est>
//   end

void write_filter_bank(std::ostream& os, const std::string& label, const FilterBank& bank);
FilterBank read_filter_bank(std::istream& is, std::string* label_out = nullptr);

void save_filter_bank(const std::string& path, const std::string& label, const FilterBank& bank);
FilterBank load_filter_bank(const std::string& path, std::string* label_out = nullptr);

void write_pathset(std::ostream& os, const PathSet& plant);
PathSet read_pathset(std::istream& is);

void save_pathset(const std::string& path, const PathSet& plant);
PathSet load_pathset(const std::string& path);

} // namespace mvanc
