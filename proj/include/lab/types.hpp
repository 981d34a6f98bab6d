#pragma once
//
// Result carrier shared by every evaluated sum/integral: value, a rigorous
// truncation + roundoff bound, the number of terms actually summed, and
// free-form provenance (ranges, constants, omissions).
//
#include <complex>
#include <cstdint>
#include <string>

namespace lab {

struct ExpSumResult {
    std::complex<double> value{0.0, 0.0};
    double abs_err = 0.0;
    std::int64_t terms = 0;
    std::string meta;
};

} // namespace lab
