#pragma once
//
// Two-sided numerical evaluation of the first spectral trace formula:
// the Bessel transform f_plus in two representations (power-series J_{2ir}
// and the rotated-contour companion integral), and kuznetsov_check, which
// evaluates discrete + continuous spectrum against delta term + Kloosterman
// sum and reports the residual with a full truncation breakdown.
//
#include <string>

#include "lab/motohashi.hpp"
#include "lab/quadrature.hpp"
#include "lab/spectral_data.hpp"

namespace lab {

struct TraceCaps {
    long long ell_cap = 500; // Kloosterman ell-sum cap (Weil-bounded tail)
    double r_window = 20.0;  // half-width cap for the r-integrals
    double tail_tol = 0.01;  // discrete + r-window tail bounds must stay
                             // below tail_tol * max(|lhs|, |rhs|, 1); the
                             // ell tail is reported but not gated

};

struct TraceTruncation {
    long long ell_cap = 0;
    double ell_tail_bound = 0.0;      // Weil-termwise majorant, ell > cap
    double r_window = 0.0;            // realized r-integration half-width
    double r_tail_bound = 0.0;        // delta + continuous mass beyond it
    double dataset_cutoff = 0.0;      // kappa completeness of the dataset
    double discrete_tail_bound = 0.0; // heuristic envelope beyond the cutoff
    std::string note;
};

struct TraceReport {
    long long m = 0, n = 0;
    double discrete = 0.0;
    double continuous = 0.0;
    double delta_term = 0.0;
    double kloosterman_sum = 0.0;
    double lhs = 0.0; // discrete + continuous
    double rhs = 0.0; // delta_term + kloosterman_sum
    double residual = 0.0;
    TraceTruncation truncation;
    std::string to_json() const;
};

// f_plus(x) = (2i/pi) int r/cosh(pi r) J_{2ir}(x) f(r) dr.  Real for even
// real kernels; an imaginary residue above 1e-8 of scale is a numeric
// failure.  Domain x in (0, 30] (power-series validity).
double f_plus(const KernelFunction& fker, double x, const QuadratureSpec& quad);
// Same value through the companion representation of J_{2ir} - J_{-2ir}
// (truncated cosine integral after contour rotation); cross-check path.
double f_plus_contour(const KernelFunction& fker, double x,
                      const QuadratureSpec& quad);

// Both sides of the trace identity for (m, n) with kernel fker.  The report
// is always fully populated; the throwing overload raises validation_error
// (after filling `report`) when the dataset's completeness flag is unset or
// the combined tail bounds exceed caps.tail_tol of the result scale.
void kuznetsov_check(const SpectralDataset& dataset, long long m, long long n,
                     const KernelFunction& fker, const TraceCaps& caps,
                     const QuadratureSpec& quad, TraceReport& report);
TraceReport kuznetsov_check(const SpectralDataset& dataset, long long m,
                            long long n, const KernelFunction& fker,
                            const TraceCaps& caps, const QuadratureSpec& quad);

} // namespace lab
