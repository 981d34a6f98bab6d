#pragma once
//
// Oscillatory-integral toolkit: an oscillation-resolving brute-force
// quadrature (the oracle), leading-order stationary-phase evaluation
// specialized to the divisor-side phase f(K) = K log(4eT/(K s^2)) with
// s = sqrt(x) + sqrt(1+x), and first/second derivative test bounds.
//
#include <functional>

#include "lab/quadrature.hpp"
#include "lab/specfun.hpp"

namespace lab {

// Phase/amplitude pair for integrals of the form int g(K) e^{i f(K)} dK.
// The built-in kind carries the analytic phase above with amplitude
// g(K) = K^{1/2} exp(-(G^2/4) log^2(4T/(K s^2))); custom phases supply
// callables (f_second may be empty when only first-derivative information
// is needed).
struct PhaseSpec {
    enum class Kind { theorem1_phase, custom };
    Kind kind = Kind::theorem1_phase;
    double T = 1.0e4;
    double x = 200.0;
    double G = 5.0;
    std::function<double(double)> g;        // amplitude (custom)
    std::function<double(double)> f;        // phase (custom)
    std::function<double(double)> f_prime;  // phase derivative (custom)
    std::function<double(double)> f_second; // phase curvature (custom)
};

PhaseSpec theorem1_phase(double T, double x, double G);

// Amplitude and phase evaluators valid for both kinds.
double phase_g(const PhaseSpec& spec, double K);
double phase_f(const PhaseSpec& spec, double K);
double phase_f_prime(const PhaseSpec& spec, double K);
double phase_f_second(const PhaseSpec& spec, double K);

// Stationary point of the phase on (a, b): analytic 4T/s^2 for the built-in
// kind, guarded Newton with bisection fallback for custom phases.  Throws
// domain_error when no stationary point lies inside the interval.
double saddle_point(const PhaseSpec& spec, double a, double b);

// int_a^b g(K) e^{i f(K)} dK with panel size capped at one eighth of the
// local period 2 pi / |f'|; the absolute error estimate comes from panel
// halving.  Exhausting the refinement budget raises numeric_failure.
cplx oscillatory_quad(const PhaseSpec& spec, double a, double b,
                      const QuadratureSpec& quad);

// Leading-order stationary-phase value
//   g(K1) e^{i f(K1) + i pi/4 sgn f''(K1)} sqrt(2 pi / |f''(K1)|)
// at the saddle K1 in (a, b); no second-order corrections.
cplx saddle_eval(const PhaseSpec& spec, double a, double b);

// Rigorous upper bound for |int_a^b g e^{if}|: the smaller of the
// first-derivative test max|g| * 2/min|f'| and the second-derivative test
// max|g| * c / sqrt(min|f''|).  Requires f' monotone on [a, b] (checked
// numerically); nonmonotone f' raises domain_error.
double derivative_test_bounds(const PhaseSpec& spec, double a, double b);

} // namespace lab
