#pragma once
//
// Complex special functions and weight functions: log Gamma (reference path
// and the separately testable Stirling asymptotic), digamma, Gaussian moment
// integrals with their P_j polynomials, the hypergeometric function
// F(1/2+ir, 1/2+ir; 1+2ir; -1/x) with its large-argument asymptotic, Bessel
// functions of imaginary order 2ir in two representations, and the spectral
// weights q_N(r) and h_l(r; T, K, G).
//
#include <complex>
#include <vector>

#include "lab/quadrature.hpp"

namespace lab {

using cplx = std::complex<double>;

struct PolynomialReal {
    std::vector<double> coeffs; // ascending degree
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx eval(cplx z) const;
    PolynomialReal derivative() const;
};

struct WeightParams {
    double T = 5000.0;
    double K = 30.0;
    double G = 3.0;
    int ell = 0;        // index l of h_l
    int N = 3;          // order in q_N
    int L = 6;          // Taylor cutoff
    double C_lambda = 3.0;   // lambda = C * log K
    double delta = 0.5;      // Lemma 2 delta
    double C_lemma2 = 2.0;   // Lemma 2 h = C * log K
    double q_pole_push = 100.0; // the 100 in (r^2 + 100 N^2)^N, exposed
};

// Reference log Gamma: principal branch, relative error <= 1e-12 for
// |s| <= 1e3 off the nonpositive real axis (recurrence shifts + Stirling
// with 12 Bernoulli terms).
cplx log_gamma(cplx s);
cplx gamma_fn(cplx s);

// Truncated Stirling series with `order` Bernoulli correction terms,
// evaluated directly at s (no shifting).  Requires Im s >= 10.
// Relative error <= c * t^{-order-1} with c <= 2 on the tested range.
cplx stirling_gamma(cplx s, int order);

cplx digamma(cplx s);

// Integral of u^j e^{Au - Bu^2} over the real line, Re B > 0.
cplx gaussian_moment(int j, cplx A, cplx B);
// The polynomial P_j of gaussian_moment with B = 1:
// integral = P_j(A) e^{A^2/4}; P_0 = sqrt(pi), P_j = P'_{j-1} + (A/2) P_{j-1}.
PolynomialReal gauss_pj(int j);

// F(1/2+ir, 1/2+ir; 1+2ir; -1/x) by the quadratic transformation
// F(a,a;2a;z) = ((1+sqrt(1-z))/2)^{-2a} F(a, 1/2; a+1/2; w^2),
// w = (1-sqrt(1-z))/(1+sqrt(1-z)), followed by the Gauss series.
cplx hyp2f1_central(double r, double x);

// Two-term large-y asymptotic of F(1/2+ir,1/2+ir;1+2ir;-1/y^2).
// Validity window y >= 2, r >= 30.
cplx hyp_asymptotic(double r, double y);
// Modulus of its leading oscillatory factor, (y^2/(1+y^2))^{1/4}.
double hyp_asymptotic_modulus(double y);

// J_{2ir}(x) by power series.  Domain x <= 30, |r| <= 20 (beyond that the
// alternating series loses ~e^x in cancellation -> numeric_failure).
cplx bessel_J_imag_order(double r, double x);
inline constexpr double kBesselMaxX = 30.0;
inline constexpr double kBesselMaxR = 20.0;

// Companion representation of J_{2ir}(x) - J_{-2ir}(x) from the truncated
// integral of cos(x cosh u) cos(2ru) over |u| <= U, evaluated after an exact
// contour rotation that removes the oscillatory cancellation.
cplx bessel_J_diff_contour(double r, double x, double U,
                           const QuadratureSpec& quad = {});
// Same difference from the power series: 2i Im J_{2ir}(x).
cplx bessel_J_diff_series(double r, double x);

cplx q_weight(cplx r, int N, double pole_push = 100.0);
cplx h_weight(const WeightParams& params, cplx r);

} // namespace lab
