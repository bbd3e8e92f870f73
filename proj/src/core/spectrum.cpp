// SPDX-License-Identifier: Apache-2.0
#include "core/spectrum.hpp"

#include <cmath>
#include <complex>

namespace mvanc {

MagnitudeResponse magnitude_response(const FirFilter& filter, double sample_rate,
                                     int grid_points) {
    if (grid_points < 2) throw ConfigError("magnitude_response: need at least 2 grid points");
    if (sample_rate <= 0.0) throw ConfigError("magnitude_response: bad sample rate");

    MagnitudeResponse r;
    r.freq_hz.resize(static_cast<std::size_t>(grid_points));
    r.mag_db.resize(static_cast<std::size_t>(grid_points));
    const double nyquist = sample_rate / 2.0;
    for (int g = 0; g < grid_points; ++g) {
        const double f = nyquist * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        const double w = 2.0 * 3.14159265358979323846 * f / sample_rate;
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < filter.length(); ++i)
            acc += filter[i] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(i)));
        const double mag = std::abs(acc);
        r.freq_hz[static_cast<std::size_t>(g)] = f;
        r.mag_db[static_cast<std::size_t>(g)] =
            mag > 0.0 ? std::max(20.0 * std::log10(mag), kSpectrumFloorDb) : kSpectrumFloorDb;
    }
    return r;
}

double mean_abs_db_difference(const MagnitudeResponse& a, const MagnitudeResponse& b,
                              double f_lo, double f_hi) {
    if (a.freq_hz.size() != b.freq_hz.size())
        throw ConfigError("mean_abs_db_difference: grids differ");
    double acc = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < a.freq_hz.size(); ++i) {
        if (a.freq_hz[i] < f_lo || a.freq_hz[i] > f_hi) continue;
        acc += std::fabs(a.mag_db[i] - b.mag_db[i]);
        ++count;
    }
    if (count == 0) throw ConfigError("mean_abs_db_difference: empty band");
    return acc / static_cast<double>(count);
}

double mean_band_level_db(const MagnitudeResponse& r, double f_lo, double f_hi) {
    double acc = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < r.freq_hz.size(); ++i) {
        if (r.freq_hz[i] < f_lo || r.freq_hz[i] > f_hi) continue;
        acc += r.mag_db[i];
        ++count;
    }
    if (count == 0) throw ConfigError("mean_band_level_db: empty band");
    return acc / static_cast<double>(count);
}

} // namespace mvanc
