#pragma once
//
// Adaptive Gauss-Kronrod 7-15 quadrature for real and complex integrands of a
// real variable.  The 15-point Kronrod extension of the 7-point Gauss rule
// gives the local error estimate |K15 - G7|; intervals whose estimate exceeds
// their share of the tolerance are bisected depth-first in a fixed order, so
// the evaluation sequence (and hence the result, bit for bit) is deterministic.
//
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "lab/accum.hpp"
#include "lab/errors.hpp"

namespace lab {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_depth = 28;
    std::int64_t max_evals = 40000000;
};

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double abs_err = 0.0;
    std::int64_t evals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes on [0,1] (even nodes are the embedded Gauss-7
// abscissae); standard QUADPACK values.
inline constexpr double gk_xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk_wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15_panel(F&& f, double a, double b, std::complex<double>& value,
                double& err, double* resabs_out = nullptr) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const std::complex<double> fc = f(c);
    std::complex<double> resg = gk_wg[3] * fc;
    std::complex<double> resk = gk_wgk[7] * fc;
    double resabs = gk_wgk[7] * std::abs(fc);
    std::complex<double> fv[15];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk_xgk[j];
        const std::complex<double> f1 = f(c - dx);
        const std::complex<double> f2 = f(c + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        const std::complex<double> fsum = f1 + f2;
        if (j % 2 == 1) resg += gk_wg[j / 2] * fsum;
        resk += gk_wgk[j] * fsum;
        resabs += gk_wgk[j] * (std::abs(f1) + std::abs(f2));
    }
    const std::complex<double> reskh = resk * 0.5;
    double resasc = gk_wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk_wgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    value = resk * h;
    err = std::abs(resk - resg) * std::abs(h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * 2.220446049250313e-16;
    if (resabs > 1e-290) err = std::max(err, eps50 * resabs);
    if (resabs_out) *resabs_out = resabs;
}

template <class F>
void adapt(F&& f, double a, double b, double tol, int depth,
           const QuadratureSpec& spec, KahanC& acc, Kahan& errsum,
           std::int64_t& evals) {
    std::complex<double> v;
    double e, resabs;
    gk15_panel(f, a, b, v, e, &resabs);
    evals += 15;
    if (evals > spec.max_evals)
        throw numeric_failure("quadrature evaluation budget exhausted on [" +
                              std::to_string(a) + "," + std::to_string(b) + "]");
    // A panel whose error sits at the roundoff floor of its own |f| mass
    // cannot be improved by subdividing further.
    const bool roundoff_limited = e <= 1.0e-13 * resabs;
    if (e <= tol || roundoff_limited || depth >= spec.max_depth) {
        if (e > tol && !roundoff_limited && depth >= spec.max_depth && e > 1e3 * tol)
            throw numeric_failure("quadrature failed to converge: local error " +
                                  std::to_string(e) + " vs tolerance " +
                                  std::to_string(tol));
        acc.add(v);
        errsum.add(e);
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, spec, acc, errsum, evals);
    adapt(f, m, b, 0.5 * tol, depth + 1, spec, acc, errsum, evals);
}

} // namespace detail

// Single non-adaptive GK15 panel (used as a building block by oscillatory_quad).
template <class F>
QuadResult gk15(F&& f, double a, double b) {
    QuadResult r;
    detail::gk15_panel(f, a, b, r.value, r.abs_err);
    r.evals = 15;
    return r;
}

// Adaptive integration of f over [a,b].  initial_panels > 1 forces an initial
// uniform split, which matters for integrands whose features the first coarse
// panel would otherwise miss (narrow bumps, oscillation).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                     int initial_panels = 1) {
    QuadResult out;
    if (!(a < b)) {
        if (a == b) return out;
        throw invalid_argument("integrate: requires a <= b");
    }
    if (initial_panels < 1) initial_panels = 1;

    // First pass to scale the relative tolerance.
    double coarse = 0.0;
    {
        const double w = (b - a) / initial_panels;
        for (int p = 0; p < initial_panels; ++p) {
            std::complex<double> v;
            double e;
            detail::gk15_panel(f, a + p * w, a + (p + 1) * w, v, e);
            coarse += std::abs(v);
        }
        out.evals += 15 * initial_panels;
    }
    const double tol = std::max(spec.abs_tol, spec.rel_tol * coarse);

    KahanC acc;
    Kahan errsum;
    const double w = (b - a) / initial_panels;
    for (int p = 0; p < initial_panels; ++p)
        detail::adapt(f, a + p * w, a + (p + 1) * w, tol / initial_panels, 0,
                      spec, acc, errsum, out.evals);
    out.value = acc.value();
    out.abs_err = errsum.value();
    return out;
}

} // namespace lab
