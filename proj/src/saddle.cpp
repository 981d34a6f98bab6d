//
// Oscillatory-integral toolkit.  oscillatory_quad resolves every local
// period with at least eight panels of Gauss-Kronrod 15 and certifies the
// result by global panel halving; saddle_eval is the leading-order
// stationary-phase value at the analytic saddle K1 = 4T/s^2 (guarded
// Newton for custom phases); derivative_test_bounds turns first/second
// derivative information into a rigorous majorant.
//
#include "lab/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "lab/accum.hpp"
#include "lab/errors.hpp"

namespace lab {

namespace {

using std::numbers::pi;

double s_squared(double x) {
    const double s = std::sqrt(x) + std::sqrt(1.0 + x);
    return s * s;
}

void require_theorem1(const PhaseSpec& spec) {
    if (!(spec.T > 0.0) || !(spec.x > 0.0) || !(spec.G > 0.0))
        throw invalid_argument("theorem1_phase: requires T > 0, x > 0, G > 0");
}

void require_positive_K(double K) {
    if (!(K > 0.0))
        throw domain_error("theorem1_phase: evaluation requires K > 0");
}

} // namespace

PhaseSpec theorem1_phase(double T, double x, double G) {
    PhaseSpec spec;
    spec.kind = PhaseSpec::Kind::theorem1_phase;
    spec.T = T;
    spec.x = x;
    spec.G = G;
    require_theorem1(spec);
    return spec;
}

double phase_g(const PhaseSpec& spec, double K) {
    if (spec.kind == PhaseSpec::Kind::custom) {
        if (!spec.g) throw invalid_argument("custom phase: amplitude g not set");
        return spec.g(K);
    }
    require_theorem1(spec);
    require_positive_K(K);
    const double u = std::log(4.0 * spec.T / (K * s_squared(spec.x)));
    return std::sqrt(K) * std::exp(-0.25 * spec.G * spec.G * u * u);
}

double phase_f(const PhaseSpec& spec, double K) {
    if (spec.kind == PhaseSpec::Kind::custom) {
        if (!spec.f) throw invalid_argument("custom phase: phase f not set");
        return spec.f(K);
    }
    require_theorem1(spec);
    require_positive_K(K);
    // K log(4eT/(K s^2)) = K (1 + log(4T/(K s^2))).
    return K * (1.0 + std::log(4.0 * spec.T / (K * s_squared(spec.x))));
}

double phase_f_prime(const PhaseSpec& spec, double K) {
    if (spec.kind == PhaseSpec::Kind::custom) {
        if (!spec.f_prime)
            throw invalid_argument("custom phase: derivative f' not set");
        return spec.f_prime(K);
    }
    require_theorem1(spec);
    require_positive_K(K);
    return std::log(4.0 * spec.T / (K * s_squared(spec.x)));
}

double phase_f_second(const PhaseSpec& spec, double K) {
    if (spec.kind == PhaseSpec::Kind::custom) {
        if (!spec.f_second)
            throw invalid_argument("custom phase: curvature f'' not set");
        return spec.f_second(K);
    }
    require_theorem1(spec);
    require_positive_K(K);
    return -1.0 / K;
}

double saddle_point(const PhaseSpec& spec, double a, double b) {
    if (!(a < b)) throw invalid_argument("saddle_point: requires a < b");
    if (spec.kind == PhaseSpec::Kind::theorem1_phase) {
        require_theorem1(spec);
        const double K1 = 4.0 * spec.T / s_squared(spec.x);
        if (!(a < K1 && K1 < b))
            throw domain_error("saddle_point: stationary point outside (a, b)");
        return K1;
    }
    if (!spec.f_prime)
        throw invalid_argument("custom phase: derivative f' not set");

    // Bracket a sign change of f' on a uniform scan, then guarded Newton
    // (when f'' is available) with bisection fallback.
    const int scan = 128;
    double lo = a, hi = b, flo = spec.f_prime(a);
    bool found = false;
    for (int i = 1; i <= scan && !found; ++i) {
        const double t = a + (b - a) * i / scan;
        const double ft = spec.f_prime(t);
        if (flo == 0.0) {
            return lo;
        }
        if ((flo < 0.0) != (ft < 0.0)) {
            hi = t;
            found = true;
        } else {
            lo = t;
            flo = ft;
        }
    }
    if (!found)
        throw domain_error("saddle_point: no stationary point inside (a, b)");

    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fz = spec.f_prime(z);
        if (fz == 0.0) return z;
        if ((flo < 0.0) != (fz < 0.0))
            hi = z;
        else
            lo = z;
        double next = 0.5 * (lo + hi);
        if (spec.f_second) {
            const double fpp = spec.f_second(z);
            if (fpp != 0.0) {
                const double newton = z - fz / fpp;
                if (std::isfinite(newton) && newton > lo && newton < hi)
                    next = newton;
            }
        }
        if (std::abs(next - z) <= 1e-15 * (std::abs(z) + 1.0)) return next;
        z = next;
    }
    return z;
}

cplx oscillatory_quad(const PhaseSpec& spec, double a, double b,
                      const QuadratureSpec& quad) {
    if (a == b) return cplx(0.0, 0.0);
    if (!(a < b)) throw invalid_argument("oscillatory_quad: requires a <= b");

    const auto integrand = [&](double K) {
        return phase_g(spec, K) * std::exp(cplx(0.0, phase_f(spec, K)));
    };

    // Base panels: at most an eighth of the interval and of the fastest
    // local period 2 pi / |f'| (sampled at ends and midpoint).
    std::vector<std::pair<double, double>> panels;
    std::vector<std::pair<double, double>> stack{{a, b}};
    const double width_floor = 1e-7 * (b - a);
    while (!stack.empty()) {
        const auto [u, v] = stack.back();
        stack.pop_back();
        const double w = v - u;
        const double rate =
            std::max({std::abs(phase_f_prime(spec, u)),
                      std::abs(phase_f_prime(spec, 0.5 * (u + v))),
                      std::abs(phase_f_prime(spec, v))});
        const bool resolved = w <= (b - a) / 8.0 && w * rate <= pi / 4.0;
        if (resolved || w <= width_floor) {
            panels.emplace_back(u, v);
        } else {
            const double m = 0.5 * (u + v);
            stack.emplace_back(m, v);
            stack.emplace_back(u, m);
        }
        if (15 * (panels.size() + stack.size()) > (size_t)quad.max_evals)
            throw numeric_failure(
                "oscillatory_quad: panel budget exhausted while resolving "
                "the local period");
    }
    std::sort(panels.begin(), panels.end());

    // Global halving until two consecutive levels agree.
    std::int64_t evals = 0;
    const auto level_sum = [&](int level) {
        KahanC acc;
        const int parts = 1 << level;
        for (const auto& [u, v] : panels) {
            const double h = (v - u) / parts;
            for (int i = 0; i < parts; ++i) {
                acc.add(gk15(integrand, u + i * h, u + (i + 1) * h).value);
                evals += 15;
                if (evals > quad.max_evals)
                    throw numeric_failure(
                        "oscillatory_quad: refinement budget exhausted");
            }
        }
        return acc.value();
    };
    cplx prev = level_sum(0);
    for (int level = 1; level <= 12; ++level) {
        const cplx cur = level_sum(level);
        const double err = std::abs(cur - prev);
        if (err <= std::max(quad.abs_tol, quad.rel_tol * std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw numeric_failure("oscillatory_quad: panel halving did not converge");
}

cplx saddle_eval(const PhaseSpec& spec, double a, double b) {
    const double K1 = saddle_point(spec, a, b);
    const double fpp = phase_f_second(spec, K1);
    if (fpp == 0.0 || !std::isfinite(fpp))
        throw numeric_failure("saddle_eval: degenerate saddle (f'' = 0)");
    const double sgn = fpp > 0.0 ? 1.0 : -1.0;
    const double arg = phase_f(spec, K1) + 0.25 * pi * sgn;
    return phase_g(spec, K1) * std::exp(cplx(0.0, arg)) *
           std::sqrt(2.0 * pi / std::abs(fpp));
}

double derivative_test_bounds(const PhaseSpec& spec, double a, double b) {
    if (!(a < b))
        throw invalid_argument("derivative_test_bounds: requires a < b");
    const int n = 256;
    std::vector<double> fp(n + 1), g(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double K = a + (b - a) * i / n;
        fp[i] = phase_f_prime(spec, K);
        g[i] = std::abs(phase_g(spec, K));
    }
    double fp_scale = 0.0;
    for (double v : fp) fp_scale = std::max(fp_scale, std::abs(v));
    const double slack = 1e-12 * (fp_scale + 1.0);
    bool up = true, down = true;
    for (int i = 0; i < n; ++i) {
        if (fp[i + 1] < fp[i] - slack) up = false;
        if (fp[i + 1] > fp[i] + slack) down = false;
    }
    if (!up && !down)
        throw domain_error(
            "derivative_test_bounds: f' is not monotone on [a, b]");

    const double gmax = *std::max_element(g.begin(), g.end());
    if (gmax == 0.0) return 0.0;

    // First-derivative test: inapplicable when f' changes sign.
    double min_fp = std::abs(fp[0]);
    bool sign_change = false;
    for (int i = 0; i <= n; ++i) {
        min_fp = std::min(min_fp, std::abs(fp[i]));
        if (i > 0 && (fp[i] < 0.0) != (fp[i - 1] < 0.0)) sign_change = true;
    }
    const double inf = std::numeric_limits<double>::infinity();
    const double bound1 =
        (!sign_change && min_fp > 0.0) ? gmax * 2.0 / min_fp : inf;

    // Second-derivative test with the safe van der Corput constant c = 8.
    double min_fpp = inf;
    const bool have_fpp =
        spec.kind == PhaseSpec::Kind::theorem1_phase || bool(spec.f_second);
    for (int i = 0; i <= n; ++i) {
        const double K = a + (b - a) * i / n;
        double fpp;
        if (have_fpp) {
            fpp = phase_f_second(spec, K);
        } else {
            const double h = (b - a) / (4.0 * n);
            fpp = (phase_f_prime(spec, std::min(K + h, b)) -
                   phase_f_prime(spec, std::max(K - h, a))) /
                  (std::min(K + h, b) - std::max(K - h, a));
        }
        min_fpp = std::min(min_fpp, std::abs(fpp));
    }
    const double bound2 =
        min_fpp > 0.0 ? gmax * 8.0 / std::sqrt(min_fpp) : inf;

    const double bound = std::min(bound1, bound2);
    if (!std::isfinite(bound))
        throw numeric_failure(
            "derivative_test_bounds: neither derivative test applies");
    return bound;
}

} // namespace lab
