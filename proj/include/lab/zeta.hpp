#pragma once
//
// Riemann zeta on and near the critical line (Euler-Maclaurin primary path,
// Riemann-Siegel cross-check), the fourth moment and E2(T), the smoothed
// fourth moment, and the Lemma-2-style approximate functional equation for
// |zeta(1/2+ir)|^2 built on the arithmetic module.
//
#include <complex>
#include <string>
#include <vector>

#include "lab/arithmetic.hpp"
#include "lab/quadrature.hpp"
#include "lab/specfun.hpp"
#include "lab/types.hpp"

namespace lab {

enum class ZetaMethod { euler_maclaurin, riemann_siegel };

struct ZetaSample {
    double t = 0.0;
    cplx value{0.0, 0.0};
    ZetaMethod method = ZetaMethod::euler_maclaurin;
    double err_bound = 0.0;
};

struct MomentCoefficients {
    double a4 = 0.0;
    double a3 = 0.0;
    double a2 = 0.0, a1 = 0.0, a0 = 0.0;
    std::string provenance = "a4,a3 fixed; a2,a1,a0 unset";
    static MomentCoefficients defaults();
    double p4(double x) const {
        return (((a4 * x + a3) * x + a2) * x + a1) * x + a0;
    }
};

inline constexpr double kZetaTCeiling = 1e5;

ZetaSample zeta_critical(double t);
// Riemann-Siegel |zeta(1/2+it)| (main sum + first correction); cross-check
// path, accurate to ~1e-3 absolute for t >= 50.
double zeta_critical_rs_abs(double t);
cplx zeta_one_line(double r);

ExpSumResult fourth_moment(double T, const QuadratureSpec& quad);
double e2(double T, const MomentCoefficients& coeffs, const QuadratureSpec& quad);
double smoothed_fourth_moment(double T, double G, const QuadratureSpec& quad);

cplx sigma_zeta_partial(const DivisorTable& table, double r, double K);
double approx_zeta_square(const DivisorTable& table, double r,
                          const WeightParams& params);

// Zeta sample cache: CSV rows `t,re,im,err` (append-only, single writer).
void append_zeta_samples_csv(const std::string& path,
                             const std::vector<ZetaSample>& samples);
std::vector<ZetaSample> load_zeta_samples_csv(const std::string& path);

} // namespace lab
