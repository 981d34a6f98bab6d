#include "lab/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lab/errors.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_2 .. B_24.
constexpr double kBernoulli[12] = {
    1.0 / 6.0,       -1.0 / 30.0,       1.0 / 42.0,       -1.0 / 30.0,
    5.0 / 66.0,      -691.0 / 2730.0,   7.0 / 6.0,        -3617.0 / 510.0,
    43867.0 / 798.0, -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0};

bool is_nonpositive_integer(cplx s) {
    return s.imag() == 0.0 && s.real() <= 0.0 &&
           s.real() == std::floor(s.real());
}

// Stirling-Bernoulli core, valid for Re s large (or |s| large away from the
// negative axis).
cplx stirling_core(cplx s, int terms) {
    cplx out = (s - 0.5) * std::log(s) - s + kHalfLog2Pi;
    const cplx s2 = s * s;
    cplx spow = s;
    for (int n = 1; n <= terms; ++n) {
        out += kBernoulli[n - 1] / (2.0 * n * (2.0 * n - 1.0) * spow);
        spow *= s2;
    }
    return out;
}

} // namespace

cplx PolynomialReal::eval(cplx z) const {
    cplx v(0.0, 0.0);
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * z + coeffs[i];
    return v;
}

PolynomialReal PolynomialReal::derivative() const {
    PolynomialReal d;
    for (std::size_t i = 1; i < coeffs.size(); ++i)
        d.coeffs.push_back(coeffs[i] * static_cast<double>(i));
    if (d.coeffs.empty()) d.coeffs.push_back(0.0);
    return d;
}

cplx log_gamma(cplx s) {
    if (is_nonpositive_integer(s))
        throw domain_error("log_gamma: pole at s = " + std::to_string(s.real()));
    // Shift until Re s >= 25; on the right half-plane the recurrence with
    // principal logs agrees with the canonical branch.
    cplx shift(0.0, 0.0);
    while (s.real() < 25.0) {
        shift += std::log(s);
        s += 1.0;
    }
    return stirling_core(s, 12) - shift;
}

cplx gamma_fn(cplx s) { return std::exp(log_gamma(s)); }

cplx stirling_gamma(cplx s, int order) {
    if (s.imag() < 10.0)
        throw domain_error("stirling_gamma: requires Im s >= 10, got " +
                           std::to_string(s.imag()));
    if (order < 0 || order > 12)
        throw invalid_argument("stirling_gamma: order must be in [0, 12]");
    return std::exp(stirling_core(s, order));
}

cplx digamma(cplx s) {
    if (is_nonpositive_integer(s))
        throw domain_error("digamma: pole at s = " + std::to_string(s.real()));
    cplx shift(0.0, 0.0);
    while (s.real() < 25.0) {
        shift += 1.0 / s;
        s += 1.0;
    }
    cplx out = std::log(s) - 0.5 / s;
    const cplx s2 = s * s;
    cplx spow = s2;
    for (int n = 1; n <= 12; ++n) {
        out -= kBernoulli[n - 1] / (2.0 * n * spow);
        spow *= s2;
    }
    return out - shift;
}

PolynomialReal gauss_pj(int j) {
    if (j < 0) throw invalid_argument("gauss_pj: j must be >= 0");
    PolynomialReal p;
    p.coeffs = {std::sqrt(kPi)};
    for (int k = 1; k <= j; ++k) {
        // P_k = P'_{k-1} + (A/2) P_{k-1}
        PolynomialReal d = p.derivative();
        PolynomialReal next;
        next.coeffs.assign(p.coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < d.coeffs.size(); ++i) next.coeffs[i] += d.coeffs[i];
        for (std::size_t i = 0; i < p.coeffs.size(); ++i)
            next.coeffs[i + 1] += 0.5 * p.coeffs[i];
        p = std::move(next);
    }
    return p;
}

cplx gaussian_moment(int j, cplx A, cplx B) {
    if (j < 0) throw invalid_argument("gaussian_moment: j must be >= 0");
    if (B.real() <= 0.0)
        throw domain_error("gaussian_moment: requires Re B > 0");
    // u = v / sqrt(B) normalizes to B = 1 (contour rotation is legitimate
    // because Re B > 0 keeps Gaussian decay along the rotated ray).
    const cplx sqrtB = std::sqrt(B);
    const cplx Ahat = A / sqrtB;
    const cplx pj = gauss_pj(j).eval(Ahat);
    return std::exp(-0.5 * (j + 1) * std::log(B)) * pj *
           std::exp(Ahat * Ahat * 0.25);
}

cplx hyp2f1_central(double r, double x) {
    if (!(x > 0.0)) throw invalid_argument("hyp2f1_central: requires x > 0");
    if (r < 0.0) throw invalid_argument("hyp2f1_central: requires r >= 0");
    // z = -1/x; w = (1 - sqrt(1-z)) / (1 + sqrt(1-z)) has |w| < 1 for all
    // x > 0 and |w^2| < 0.03 for x >= 1 -> fast geometric convergence.
    const double sq = std::sqrt(1.0 + 1.0 / x);
    const double w = (1.0 - sq) / (1.0 + sq);
    const double w2 = w * w;
    const cplx a(0.5, r);        // alpha = 1/2 + ir
    const cplx c(1.0, r);        // gamma = 1 + ir
    // Prefactor ((1 + sqrt(1-z))/2)^{-2a}.
    const cplx pref = std::exp(-2.0 * a * std::log(0.5 * (1.0 + sq)));

    cplx sum(1.0, 0.0), term(1.0, 0.0);
    const double beta = 0.5;
    int k = 0;
    for (; k < 500; ++k) {
        const cplx ratio = (a + static_cast<double>(k)) * (beta + k) /
                           ((c + static_cast<double>(k)) * (k + 1.0)) * w2;
        term *= ratio;
        sum += term;
        // Ratio magnitude is eventually <= |w2| (<= 0.04 on the domain of
        // interest); tail <= |term| * q/(1-q).
        const double q = std::min(0.9, std::abs(w2) * (1.0 + 1.0 / (k + 1.0)));
        if (std::abs(term) * q / (1.0 - q) < 1e-14 * std::abs(sum) &&
            std::abs(term) < 1e-14 * std::abs(sum))
            break;
    }
    if (k >= 500)
        throw numeric_failure("hyp2f1_central: series did not converge; last term " +
                              std::to_string(std::abs(term)));
    return pref * sum;
}

double hyp_asymptotic_modulus(double y) {
    return std::pow(y * y / (1.0 + y * y), 0.25);
}

cplx hyp_asymptotic(double r, double y) {
    if (y < 2.0 || r < 30.0)
        throw domain_error("hyp_asymptotic: validity window is y >= 2, r >= 30");
    const double s = std::sqrt(1.0 + y * y);
    // Leading unimodular factor (2y)^{2ir} (y + sqrt(1+y^2))^{-2ir}.
    const double phase = 2.0 * r * (std::log(2.0 * y) - std::log(y + s));
    const cplx lead = std::polar(hyp_asymptotic_modulus(y), phase);
    // Next-order correction 1 - (1/(8ir)) * ((2y^2+1)/(2y sqrt(1+y^2)) - 1);
    // the subtracted 1 is required for the limit F -> 1 as y -> infinity.
    const double u = (2.0 * y * y + 1.0) / (2.0 * y * s) - 1.0;
    const cplx corr = 1.0 - u / (cplx(0.0, 8.0 * r));
    return lead * corr;
}

cplx bessel_J_imag_order(double r, double x) {
    if (!(x > 0.0)) throw invalid_argument("bessel_J_imag_order: requires x > 0");
    if (x > kBesselMaxX || std::abs(r) > kBesselMaxR)
        throw numeric_failure(
            "bessel_J_imag_order: outside the series domain x <= 30, |r| <= 20 "
            "(cancellation ~ e^x would silently destroy the result)");
    // J_{2ir}(x) = sum_k (-1)^k exp((2k+2ir) log(x/2) - lgamma(k+1)
    //                                 - logGamma(k+1+2ir)).
    const double lx = std::log(0.5 * x);
    const cplx nu(0.0, 2.0 * r);
    KahanC acc;
    double lk = 0.0; // log k!
    for (int k = 0;; ++k) {
        if (k > 0) lk += std::log(static_cast<double>(k));
        const cplx term = std::exp(cplx(2.0 * k * lx - lk, 0.0) + nu * lx -
                                   log_gamma(cplx(k + 1.0, 2.0 * r)));
        acc.add((k % 2 == 0) ? term : -term);
        // Terms decay factorially once 2k > x; geometric tail bound with
        // ratio (x/2)^2 / (k+1)^2.
        if (2.0 * k > x) {
            const double q = (0.25 * x * x) / ((k + 1.0) * (k + 1.0));
            if (std::abs(term) * q / (1.0 - q) < 1e-18 * (1.0 + std::abs(acc.value())))
                break;
        }
        if (k > 200)
            throw numeric_failure("bessel_J_imag_order: series stalled");
    }
    return acc.value();
}

cplx bessel_J_diff_series(double r, double x) {
    const cplx j = bessel_J_imag_order(r, x);
    return cplx(0.0, 2.0 * j.imag());
}

cplx bessel_J_diff_contour(double r, double x, double U,
                           const QuadratureSpec& quad) {
    if (!(x > 0.0) || U <= 0.0)
        throw invalid_argument("bessel_J_diff_contour: requires x > 0, U > 0");
    // Mehler-Sonine: J_{2ir}(x) - J_{-2ir}(x)
    //   = -(4i/pi) sinh(pi r) * C(U) + tail,   C(U) = int_0^U cos(x cosh u)
    //     cos(2ru) du.  C(U) is evaluated after rotating the contour onto the
    //     rectangle 0 -> i pi/2 -> U + i pi/2 -> U, where the integrand stops
    //     oscillating:  int_0^U e^{ix cosh u} cos(2ru) du = V(0) - V(U) + H(U).
    auto V = [&](double a2) {
        // |integrand| <= e^{-x sinh(a) sin v} e^{2|r|v}; past
        // x sinh(a) sin v = 60 + pi|r| the remainder is negligible, and
        // restricting to that layer keeps the adaptive quadrature from having
        // to discover it (the layer width is ~1/(x sinh U) at large U).
        double v_hi = 0.5 * kPi;
        const double damp = x * std::sinh(a2);
        if (damp > 0.0) {
            const double s_cut = (60.0 + kPi * std::abs(r)) / damp;
            if (s_cut < 1.0) v_hi = std::asin(s_cut);
        }
        // Phase variation of x cosh(a) cos v over [0, v_hi] sets the panel count.
        const double swing = x * std::cosh(a2) * (1.0 - std::cos(v_hi));
        const int panels = static_cast<int>(std::min(5000.0, 8.0 + swing));
        return integrate(
            [&](double v) {
                const cplx w(a2, v);
                return cplx(0.0, 1.0) * std::exp(cplx(0.0, x) * std::cosh(w)) *
                       std::cos(2.0 * r * w);
            },
            0.0, v_hi, quad, panels);
    };
    // Top edge: e^{-x sinh t} kills everything past sinh t ~ 50/x.
    const double t_cut = std::min(U, std::asinh(50.0 / x));
    QuadResult H{};
    if (t_cut > 0.0)
        H = integrate(
            [&](double t) {
                return std::exp(-x * std::sinh(t)) *
                       std::cos(cplx(2.0 * r * t, kPi * r));
            },
            0.0, t_cut, quad, 4);
    const cplx cU = V(0.0).value - V(U).value + H.value;
    return cplx(0.0, -4.0 / kPi) * std::sinh(kPi * r) * cU.real();
}

cplx q_weight(cplx r, int N, double pole_push) {
    if (N < 1) throw invalid_argument("q_weight: N must be >= 1");
    const cplx r2 = r * r;
    cplx num(1.0, 0.0);
    for (int k = 1; k <= N; ++k) {
        const double half_odd = (2.0 * k - 1.0) / 2.0;
        num *= r2 + half_odd * half_odd;
    }
    return num / std::pow(r2 + pole_push * N * N, N);
}

cplx h_weight(const WeightParams& params, cplx r) {
    const double logTK = std::log(4.0 * params.T / params.K);
    auto L = [&](cplx rr) {
        const cplx poly = std::pow(params.K - rr, params.ell) *
                          std::pow(params.K, 1.0 - params.ell);
        const cplx osc = std::exp(cplx(0.0, 1.0) * rr * logTK);
        const cplx dk = (rr - params.K) / params.G;
        return poly * osc * std::exp(-dk * dk);
    };
    return q_weight(r, params.N, params.q_pole_push) * (L(r) + L(-r));
}

} // namespace lab
