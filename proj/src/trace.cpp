#include "lab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "lab/accum.hpp"
#include "lab/arithmetic.hpp"
#include "lab/errors.hpp"
#include "lab/specfun.hpp"
#include "lab/zeta.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;
// Truncation of the companion cosine integral; e^{-U} scale remainder.
constexpr double kContourU = 21.0;

double divisor_count_direct(long long n) {
    long long c = 0;
    for (long long d = 1; d * d <= n; ++d)
        if (n % d == 0) c += (d * d == n) ? 1 : 2;
    return static_cast<double>(c);
}

// sigma_{2ir}(m) m^{-ir} = sum_{d|m} cos(r (2 log d - log m)); real, even.
double sigma_ratio(double r, long long m) {
    const double lm = std::log(static_cast<double>(m));
    Kahan acc;
    for (long long d = 1; d * d <= m; ++d)
        if (m % d == 0) {
            acc.add(std::cos(r * (2.0 * std::log(static_cast<double>(d)) - lm)));
            if (d * d != m)
                acc.add(std::cos(
                    r * (2.0 * std::log(static_cast<double>(m / d)) - lm)));
        }
    return acc.value();
}

// Overestimate of int_X^inf r e^{-((r-c)/w)^2} dr (uses erfc(u) <= e^{-u^2}).
double gauss_r_tail(double c, double w, double X) {
    const double u = (X - c) / w;
    if (u <= 0.0) return c * w * std::sqrt(kPi) + 0.5 * w * w;
    return std::exp(-u * u) * (c * w + 0.5 * w * w);
}

double kernel_max(const KernelFunction& f) {
    double m = 0.0;
    for (double r : {0.0, f.center, f.center - f.width, f.center + f.width})
        m = std::max(m, std::abs(f.h(cplx(r, 0.0))));
    return m;
}

double f_plus_core(const KernelFunction& fker, double x,
                   const QuadratureSpec& quad, bool contour) {
    if (!(x > 0.0)) throw domain_error("f_plus: requires x > 0");
    if (x > kBesselMaxX)
        throw domain_error("f_plus: x = " + std::to_string(x) +
                           " beyond the power-series window x <= " +
                           std::to_string(kBesselMaxX));
    const double R =
        std::min(fker.center + 7.0 * fker.width, kBesselMaxR);
    // Even kernel folds the line integral onto [0, R] with the J-difference.
    auto g = [&](double r) -> cplx {
        const cplx diff = contour ? bessel_J_diff_contour(r, x, kContourU, quad)
                                  : bessel_J_diff_series(r, x);
        return r / std::cosh(kPi * r) * diff * fker.h(cplx(r, 0.0));
    };
    const double rate = 2.0 * std::abs(std::log(0.5 * x)) +
                        std::abs(fker.phase_rate) + 2.0;
    const int n = 16 + 8 * static_cast<int>(std::ceil(R * rate / (2.0 * kPi)));
    const cplx val =
        cplx(0.0, 2.0 / kPi) * integrate(g, 0.0, R, quad, n).value;
    const double scale = std::max(1.0, std::abs(val.real()));
    if (std::abs(val.imag()) > 1e-8 * scale)
        throw numeric_failure("f_plus: imaginary residue " +
                              std::to_string(val.imag()) +
                              " exceeds 1e-8 of scale at x = " +
                              std::to_string(x));
    return val.real();
}

} // namespace

double f_plus(const KernelFunction& fker, double x, const QuadratureSpec& quad) {
    return f_plus_core(fker, x, quad, false);
}

double f_plus_contour(const KernelFunction& fker, double x,
                      const QuadratureSpec& quad) {
    return f_plus_core(fker, x, quad, true);
}

std::string TraceReport::to_json() const {
    nlohmann::json j;
    j["m"] = m;
    j["n"] = n;
    j["discrete"] = discrete;
    j["continuous"] = continuous;
    j["delta_term"] = delta_term;
    j["kloosterman_sum"] = kloosterman_sum;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["residual"] = residual;
    j["truncation"] = {{"ell_cap", truncation.ell_cap},
                       {"ell_tail_bound", truncation.ell_tail_bound},
                       {"r_window", truncation.r_window},
                       {"r_tail_bound", truncation.r_tail_bound},
                       {"dataset_cutoff", truncation.dataset_cutoff},
                       {"discrete_tail_bound", truncation.discrete_tail_bound},
                       {"note", truncation.note}};
    return j.dump();
}

void kuznetsov_check(const SpectralDataset& dataset, long long m, long long n,
                     const KernelFunction& fker, const TraceCaps& caps,
                     const QuadratureSpec& quad, TraceReport& report) {
    if (m < 1 || n < 1)
        throw invalid_argument("kuznetsov_check: m, n must be >= 1");
    if (static_cast<std::size_t>(std::max(m, n)) > dataset.M_min)
        throw resource_limit("kuznetsov_check: dataset Hecke length " +
                             std::to_string(dataset.M_min) +
                             " below requested index " +
                             std::to_string(std::max(m, n)));
    if (caps.ell_cap < 1 || !(caps.r_window > 0.0) || !(caps.tail_tol > 0.0))
        throw invalid_argument("kuznetsov_check: caps must be positive");

    report = TraceReport{};
    report.m = m;
    report.n = n;
    const double W = std::min(caps.r_window, fker.center + 7.0 * fker.width);
    const double fmax = kernel_max(fker);
    const double dmn = divisor_count_direct(m) * divisor_count_direct(n);

    // Discrete spectrum: sum over the dataset's forms.
    {
        Kahan acc;
        for (const auto& f : dataset.forms)
            acc.add(f.alpha * f.t(static_cast<std::size_t>(m)) *
                    f.t(static_cast<std::size_t>(n)) *
                    fker.h(cplx(f.kappa, 0.0)).real());
        report.discrete = acc.value();
    }

    // Continuous spectrum: (2/pi) int_0^W sigma-ratio product / |zeta(1+2ir)|^2.
    {
        auto g = [&](double r) -> cplx {
            if (std::abs(r) < 1e-6) return cplx(0.0, 0.0); // ~ r^2 near 0
            const double z1sq = std::norm(zeta_one_line(r));
            return sigma_ratio(r, m) * sigma_ratio(r, n) / z1sq *
                   fker.h(cplx(r, 0.0)).real();
        };
        const double rate = std::abs(fker.phase_rate) +
                            std::log(2.0 + static_cast<double>(m * n)) + 2.0;
        const int np =
            16 + 8 * static_cast<int>(std::ceil(W * rate / (2.0 * kPi)));
        report.continuous =
            2.0 / kPi * integrate(g, 0.0, W, quad, np).value.real();
    }

    // Delta term: exactly zero off the diagonal.
    if (m == n) {
        auto g = [&](double r) -> cplx {
            return r * std::tanh(kPi * r) * fker.h(cplx(r, 0.0)).real();
        };
        const int np = 16 + 8 * static_cast<int>(std::ceil(
                                W * (std::abs(fker.phase_rate) + 1.0) /
                                (2.0 * kPi)));
        report.delta_term =
            2.0 / (kPi * kPi) * integrate(g, 0.0, W, quad, np).value.real();
    }

    // Kloosterman side with the Weil-bound tail accounting.
    const double sqrt_gcd =
        std::sqrt(static_cast<double>(std::gcd(m, n)));
    const double xnum = 4.0 * kPi * std::sqrt(static_cast<double>(m * n));
    auto weil = [&](long long ell) {
        return divisor_count_direct(ell) * sqrt_gcd /
               std::sqrt(static_cast<double>(ell));
    };
    double ell_tail = 0.0;
    {
        Kahan acc;
        for (long long ell = 1; ell <= caps.ell_cap; ++ell) {
            const auto S = kloosterman(static_cast<std::uint64_t>(m),
                                       static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(ell));
            acc.add(S.value / static_cast<double>(ell) *
                    f_plus(fker, xnum / static_cast<double>(ell), quad));
        }
        report.kloosterman_sum = acc.value();
    }
    // Tail over (cap, 4 cap] in two dyadic blocks, each bounded termwise by
    // Weil times a sampled majorant of |f_plus|, then continued geometrically.
    // f_plus(x) ~ c x as x -> 0 (the cosh pole at r = -i/2), so the blocks
    // decay like 2^{-k/2}: polynomial, honestly reported, not gated.
    {
        auto fbound = [&](long long ell) {
            const double x = xnum / static_cast<double>(ell);
            return 1.5 * std::abs(f_plus(fker, x, quad)) + 1e-300;
        };
        auto block = [&](long long lo, long long hi) { // (lo, hi]
            double fb = std::max({fbound(lo + 1), fbound((lo + hi) / 2),
                                  fbound(hi)});
            Kahan mass;
            for (long long ell = lo + 1; ell <= hi; ++ell)
                mass.add(weil(ell));
            return mass.value() * fb;
        };
        const double b1 = block(caps.ell_cap, 2 * caps.ell_cap);
        const double b2 = block(2 * caps.ell_cap, 4 * caps.ell_cap);
        double cont = b2;
        if (b1 > 0.0) {
            const double ratio = b2 / b1;
            cont = ratio < 0.9 ? b2 * ratio / (1.0 - ratio) : 10.0 * b2;
        }
        ell_tail += b1 + b2 + cont;
    }

    // r-window tail: delta integrand (tanh <= 1) plus continuous integrand
    // bounded with d(m)d(n) and 1/zeta(1+2ir) << log.
    const double zslack = 9.0 * std::pow(std::log(2.0 + W), 2.0);
    const double r_tail =
        fmax * (2.0 / (kPi * kPi) * gauss_r_tail(fker.center, fker.width, W) +
                2.0 / kPi * dmn * zslack * fker.width *
                    std::exp(-std::pow(
                        std::max(0.0, (W - fker.center) / fker.width), 2.0)));

    // Discrete mass above the dataset cutoff: Weyl-law alpha density 2k/pi^2
    // and the heuristic bound |t_j(m)| <= 2 d(m) m^{1/4} (envelope only).
    const double cutoff = dataset.kappa_complete_up_to;
    const double discrete_tail =
        2.0 / (kPi * kPi) * 4.0 * dmn *
        std::pow(static_cast<double>(m * n), 0.25) * fmax *
        gauss_r_tail(fker.center, fker.width, cutoff);

    report.lhs = report.discrete + report.continuous;
    report.rhs = report.delta_term + report.kloosterman_sum;
    report.residual = std::abs(report.lhs - report.rhs);
    report.truncation.ell_cap = caps.ell_cap;
    report.truncation.ell_tail_bound = ell_tail;
    report.truncation.r_window = W;
    report.truncation.r_tail_bound = r_tail;
    report.truncation.dataset_cutoff = cutoff;
    report.truncation.discrete_tail_bound = discrete_tail;

    const double scale = std::max({std::abs(report.lhs), std::abs(report.rhs),
                                   1.0});
    if (!dataset.completeness_flag_set) {
        report.truncation.note =
            "flagged: dataset completeness flag unset; the discrete tail "
            "cannot be bounded";
        throw validation_error("kuznetsov_check: " + report.truncation.note);
    }
    if (r_tail + discrete_tail > caps.tail_tol * scale) {
        report.truncation.note =
            "flagged: discrete/r-window tail bounds " +
            std::to_string(r_tail + discrete_tail) +
            " exceed tail_tol * scale = " +
            std::to_string(caps.tail_tol * scale) +
            "; the dataset cutoff or r-window does not capture the kernel";
        throw validation_error("kuznetsov_check: " + report.truncation.note);
    }
    report.truncation.note = "ok";
}

TraceReport kuznetsov_check(const SpectralDataset& dataset, long long m,
                            long long n, const KernelFunction& fker,
                            const TraceCaps& caps, const QuadratureSpec& quad) {
    TraceReport report;
    kuznetsov_check(dataset, m, n, fker, caps, quad, report);
    return report;
}

} // namespace lab
