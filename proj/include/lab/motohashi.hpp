#pragma once
//
// Transformation-formula kernel machinery: the integral transform h_hat(s),
// the Psi+ / Psi- special functions in their integral and hypergeometric
// representations, the seven terms H_1..H_7 of the divisor-side expansion,
// and the leading arithmetic right-hand side assembled over f.
//
#include <complex>
#include <functional>

#include "lab/quadrature.hpp"
#include "lab/specfun.hpp"
#include "lab/types.hpp"

namespace lab {

// An even kernel r -> h(r), regular in |Im r| <= strip_half_width, with
// Gaussian mass near |r| = center of scale `width` and a built-in
// oscillation exp(+-ir*phase_rate) (0 for plain Gaussians).  The window
// |r -+ center| <= 7*width carries all but ~1e-21 of the mass.
struct KernelFunction {
    std::function<cplx(cplx)> h;
    double center = 0.0;
    double width = 1.0;
    double phase_rate = 0.0;
    double strip_half_width = 1.0;
    WeightParams params{}; // truncation policies (T, K, C_lambda, ...)
    cplx operator()(cplx r) const { return h(r); }
};

// h_l(r; T, K, G) from WeightParams: center K, width G, rate log(4T/K).
KernelFunction kernel_from_weight(const WeightParams& params);
// exp(-((r-c)/w)^2) + exp(-((r+c)/w)^2); even, entire, positive on R.
KernelFunction gaussian_kernel(double center, double width);
KernelFunction zero_kernel();
KernelFunction scale_kernel(const KernelFunction& k, cplx a);
KernelFunction reflect_kernel(const KernelFunction& k); // r -> h(-r)

struct HTermValue {
    int k = 0;
    long long f = 0;
    cplx value{0.0, 0.0};
    double truncation_error = 0.0; // bound on discarded/unavailable mass
};

// h_hat(s) = int r h(r) Gamma(s+ir)/Gamma(1-s+ir) dr over the real line.
cplx h_hat(const KernelFunction& h, cplx s, const QuadratureSpec& quad);

struct HhatDerivatives {
    cplx d1{0.0, 0.0};
    cplx d2{0.0, 0.0};
};
// (h_hat)'(1/2), (h_hat)''(1/2) by central differences along `direction`
// (step 1e-3 with one Richardson extrapolation).  direction = 1 or i gives
// the two independent paths of the dual-method check.
HhatDerivatives h_hat_derivatives(const KernelFunction& h,
                                  const QuadratureSpec& quad,
                                  cplx direction = cplx(1.0, 0.0));

// Psi+(x;h), double-integral representation (y over (0,1), r over the
// kernel window).  tanh_to_sgn replaces tanh(pi r) by sgn(r) (sensitivity
// probe; shifts the value at the e^{-2 pi center} level only).
cplx psi_plus_integral(double x, const KernelFunction& h,
                       const QuadratureSpec& quad, bool tanh_to_sgn = false);
// Psi+(x;h), single r-integral through F(1/2+ir,1/2+ir;1+2ir;-1/x).
cplx psi_plus_hypergeom(double x, const KernelFunction& h,
                        const QuadratureSpec& quad);
// Both representations, cross-checked; disagreement beyond 10x the 1e-3
// working tolerance -> numeric_failure reporting both values.
cplx psi_plus(double x, const KernelFunction& h, const QuadratureSpec& quad);

// Psi-(x;h): x > 1 via the double integral; 0 < x < 1 via the triple
// integral (s-line at beta = -3/4); x = 1 -> domain_error (closed form
// unavailable here).
cplx psi_minus(double x, const KernelFunction& h, const QuadratureSpec& quad);
// Second path for x > 1: inner r-contour shifted to Im r = -1 (uses the
// kernel's zero at r = -i/2 against the cosh pole).
cplx psi_minus_shifted(double x, const KernelFunction& h,
                       const QuadratureSpec& quad);

// Magnitude envelopes used in tail accounting (documented overestimates).
double psi_plus_envelope(double x, const KernelFunction& h);
double psi_minus_envelope(const KernelFunction& h);

// k-th term H_k(f;h), k = 1..7.  `trunc` caps the m-sums of k = 2,3; the
// k = 5 closed form is unavailable: value 0 with the envelope reported in
// truncation_error (flagged, not silent).
HTermValue h_term(int k, long long f, const KernelFunction& h,
                  const QuadratureSpec& quad, long long trunc);

// sum_{f <= 3K} f^{-1/2} exp(-(f/K)^lambda) H(f;h), lambda = C_lambda log K.
// The U_nu correction sum is not included (recorded in meta); per-f m-sums
// are truncated at min(max(2f, f*T*K^{-0.8}), trunc_cap) with tails bounded
// in abs_err.
ExpSumResult spectral_rhs(const KernelFunction& h, double K,
                          const QuadratureSpec& quad, long long trunc_cap = 64);

} // namespace lab
