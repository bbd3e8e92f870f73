// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/dsp.hpp"

namespace mvanc {

// Magnitude response in dB on a uniform grid from DC to Nyquist inclusive.
// Zero magnitude is floored at -120 dB rather than -inf.
struct MagnitudeResponse {
    std::vector<double> freq_hz;
    std::vector<double> mag_db;
};

constexpr double kSpectrumFloorDb = -120.0;

MagnitudeResponse magnitude_response(const FirFilter& filter, double sample_rate,
                                     int grid_points = 512);

// Mean of |a - b| in dB over grid points with f_lo <= f <= f_hi.
double mean_abs_db_difference(const MagnitudeResponse& a, const MagnitudeResponse& b,
                              double f_lo, double f_hi);

// Mean dB level over a band.
double mean_band_level_db(const MagnitudeResponse& r, double f_lo, double f_hi);

} // namespace mvanc
