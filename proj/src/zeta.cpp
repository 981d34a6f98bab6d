#include "lab/zeta.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>

#include "lab/accum.hpp"
#include "lab/errors.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240;
constexpr double kZetaPrime2 = -0.93754825431584375370257409456787;

// B_{2k}/(2k)! for k = 1..11.
constexpr double kB2kOverFact[11] = {
    8.3333333333333333333e-02,  -1.3888888888888888889e-03,
    3.3068783068783068783e-05,  -8.2671957671957671958e-07,
    2.0876756987868098979e-08,  -5.2841901386874931848e-10,
    1.3382536530684678833e-11,  -3.3896802963225828668e-13,
    8.5860620562778445639e-15,  -2.1748686985580618730e-16,
    5.5090028283602295152e-18};

// Shared precomputed log n and 1/sqrt(n) tables for the critical-line sum.
std::vector<double> g_logn{0.0, 0.0};   // g_logn[n] = log n
std::vector<double> g_rsqrt{0.0, 1.0};  // g_rsqrt[n] = n^{-1/2}
std::mutex g_tab_mutex;

void ensure_tables(std::size_t n_max) {
    std::lock_guard<std::mutex> lock(g_tab_mutex);
    for (std::size_t n = g_logn.size(); n <= n_max; ++n) {
        g_logn.push_back(std::log(static_cast<double>(n)));
        g_rsqrt.push_back(1.0 / std::sqrt(static_cast<double>(n)));
    }
}

// Euler-Maclaurin zeta for general s, N leading terms, M corrections.
cplx em_zeta(cplx s, std::size_t N, int M, double* err_bound) {
    KahanC head;
    for (std::size_t n = 1; n < N; ++n)
        head.add(std::exp(-s * std::log(static_cast<double>(n))));
    const double Nd = static_cast<double>(N);
    const cplx NmS = std::exp(-s * std::log(Nd));
    cplx out = head.value() + NmS * Nd / (s - 1.0) + 0.5 * NmS;
    cplx rising(1.0, 0.0); // s(s+1)...(s+2k-2)
    cplx npow = NmS / Nd;  // N^{-s-2k+1} at k = 1
    double last = 0.0;
    for (int k = 1; k <= M; ++k) {
        rising *= (k == 1) ? s : (s + cplx(2.0 * k - 3.0, 0.0)) * (s + cplx(2.0 * k - 2.0, 0.0));
        const cplx term = kB2kOverFact[k - 1] * rising * npow;
        out += term;
        last = std::abs(term);
        npow /= Nd * Nd;
    }
    if (err_bound) {
        // The remainder is bounded by |first omitted term| * |s+2M+1|/(sigma+2M+1).
        const double sigma = s.real();
        *err_bound = std::max(last / (Nd * Nd), 1e-16 * std::abs(out)) *
                     (std::abs(s + cplx(2.0 * M + 1.0, 0.0)) / (sigma + 2.0 * M + 1.0));
    }
    return out;
}

// Fast critical-line path: sum n^{-1/2} e^{-it log n} with cached tables.
cplx em_zeta_half(double t, std::size_t N, int M, double* err_bound) {
    ensure_tables(N);
    const cplx s(0.5, t);
    KahanC head;
    for (std::size_t n = 1; n < N; ++n) {
        const double ph = -t * g_logn[n];
        head.add(cplx(g_rsqrt[n] * std::cos(ph), g_rsqrt[n] * std::sin(ph)));
    }
    const double Nd = static_cast<double>(N);
    const double phN = -t * std::log(Nd);
    const cplx NmS = (1.0 / std::sqrt(Nd)) * cplx(std::cos(phN), std::sin(phN));
    cplx out = head.value() + NmS * Nd / (s - 1.0) + 0.5 * NmS;
    cplx rising(1.0, 0.0);
    cplx npow = NmS / Nd;
    double last = 0.0;
    for (int k = 1; k <= M; ++k) {
        rising *= (k == 1) ? s : (s + cplx(2.0 * k - 3.0, 0.0)) * (s + cplx(2.0 * k - 2.0, 0.0));
        const cplx term = kB2kOverFact[k - 1] * rising * npow;
        out += term;
        last = std::abs(term);
        npow /= Nd * Nd;
    }
    if (err_bound)
        *err_bound = std::max(last / (Nd * Nd), 1e-16 * std::abs(out)) *
                     (std::abs(s + cplx(21.0, 0.0)) / 21.5);
    return out;
}

double zeta4(double t) {
    const double a = std::abs(zeta_critical(t).value);
    return a * a * a * a;
}

} // namespace

MomentCoefficients MomentCoefficients::defaults() {
    MomentCoefficients c;
    c.a4 = 1.0 / (2.0 * kPi * kPi);
    c.a3 = 2.0 *
           (4.0 * kEulerGamma - 1.0 - std::log(2.0 * kPi) -
            12.0 * kZetaPrime2 / (kPi * kPi)) /
           (kPi * kPi);
    return c;
}

ZetaSample zeta_critical(double t) {
    if (std::abs(t) > kZetaTCeiling)
        throw resource_limit("zeta_critical: |t| exceeds desk-scale ceiling 1e5");
    ZetaSample out;
    out.t = t;
    out.method = ZetaMethod::euler_maclaurin;
    const std::size_t N =
        static_cast<std::size_t>(std::ceil(3.0 * std::abs(t))) + 20;
    out.value = em_zeta_half(t, N, 10, &out.err_bound);
    return out;
}

double zeta_critical_rs_abs(double t) {
    if (t < 50.0)
        throw domain_error("zeta_critical_rs_abs: Riemann-Siegel path needs t >= 50");
    const double tau = t / (2.0 * kPi);
    const std::size_t N = static_cast<std::size_t>(std::floor(std::sqrt(tau)));
    const double theta = 0.5 * t * std::log(tau) - 0.5 * t - kPi / 8.0 +
                         1.0 / (48.0 * t) + 7.0 / (5760.0 * t * t * t);
    Kahan z;
    for (std::size_t n = 1; n <= N; ++n)
        z.add(std::cos(theta - t * std::log(static_cast<double>(n))) /
              std::sqrt(static_cast<double>(n)));
    double Z = 2.0 * z.value();
    // First Riemann-Siegel correction term.
    const double p = std::sqrt(tau) - static_cast<double>(N);
    const double psi =
        std::cos(2.0 * kPi * (p * p - p - 1.0 / 16.0)) / std::cos(2.0 * kPi * p);
    Z += ((N % 2 == 0) ? -1.0 : 1.0) * std::pow(tau, -0.25) * psi;
    return std::abs(Z);
}

cplx zeta_one_line(double r) {
    if (r == 0.0) throw domain_error("zeta_one_line: pole of zeta(1) at r = 0");
    const std::size_t N =
        static_cast<std::size_t>(std::ceil(6.0 * std::abs(r))) + 20;
    const cplx value = em_zeta(cplx(1.0, 2.0 * r), N, 10, nullptr);
    // Sanity: 1/zeta(1+2ir) << log(|2r|+2).
    if (1.0 / std::abs(value) > 20.0 * std::log(std::abs(2.0 * r) + 2.0))
        throw numeric_failure("zeta_one_line: |1/zeta(1+2ir)| sanity bound violated");
    return value;
}

ExpSumResult fourth_moment(double T, const QuadratureSpec& quad) {
    if (T < 0.0) throw invalid_argument("fourth_moment: T must be >= 0");
    if (T > 5e3) throw resource_limit("fourth_moment: desk-scale ceiling is T = 5e3");
    ExpSumResult out;
    out.meta = "integral of |zeta(1/2+it)|^4 over [0,T]";
    if (T == 0.0) return out;
    const int panels = static_cast<int>(std::min(8192.0, std::max(8.0, T)));
    const auto q = integrate([](double t) { return cplx(zeta4(t), 0.0); }, 0.0, T,
                             quad, panels);
    out.value = q.value.real();
    out.abs_err = q.abs_err;
    out.terms = q.evals;
    return out;
}

double e2(double T, const MomentCoefficients& coeffs, const QuadratureSpec& quad) {
    const double m4 = fourth_moment(T, quad).value.real();
    return m4 - T * coeffs.p4(std::log(T));
}

double smoothed_fourth_moment(double T, double G, const QuadratureSpec& quad) {
    if (G <= 0.0) throw invalid_argument("smoothed_fourth_moment: G must be > 0");
    const double W = G * std::sqrt(std::log(1e16)); // Gaussian mass cut ~1e-16
    if (T - W < -kZetaTCeiling || T + W > kZetaTCeiling)
        throw resource_limit("smoothed_fourth_moment: window exceeds zeta ceiling");
    const int panels = static_cast<int>(std::min(8192.0, std::max(8.0, 2.0 * W)));
    const auto q = integrate(
        [&](double u) {
            const double g = std::exp(-(u / G) * (u / G));
            return cplx(zeta4(T + u) * g, 0.0);
        },
        -W, W, quad, panels);
    return q.value.real() / (std::sqrt(kPi) * G);
}

cplx sigma_zeta_partial(const DivisorTable& table, double r, double K) {
    if (K < 1.0 / 3.0) return {0.0, 0.0};
    const std::uint64_t F = static_cast<std::uint64_t>(std::floor(3.0 * K));
    if (F > table.limit)
        throw resource_limit("sigma_zeta_partial: required table limit " +
                             std::to_string(F));
    const cplx a(0.0, 2.0 * r);
    KahanC acc;
    for (std::uint64_t f = 1; f <= F; ++f) {
        const double lf = std::log(static_cast<double>(f));
        acc.add(sigma_power(table, f, a) *
                std::exp(cplx(-0.5 * lf, -r * lf)));
    }
    return acc.value();
}

double approx_zeta_square(const DivisorTable& table, double r,
                          const WeightParams& params) {
    r = std::abs(r); // |zeta(1/2+ir)|^2 is even in r
    if (r < 5.0)
        throw domain_error("approx_zeta_square: requires |r| >= 5");
    const double Y = (1.0 + params.delta) * r * r / (4.0 * kPi * kPi);
    const double h = params.C_lemma2 * std::log(r);
    const std::uint64_t M =
        static_cast<std::uint64_t>(std::floor((1.0 + params.delta) * Y));
    if (M > table.limit)
        throw resource_limit("approx_zeta_square: required table limit " +
                             std::to_string(M));
    const cplx a(0.0, 2.0 * r);
    KahanC acc;
    for (std::uint64_t m = 1; m <= M; ++m) {
        const double md = static_cast<double>(m);
        const double smooth = std::exp(-std::pow(md / Y, h));
        acc.add(sigma_power(table, m, a) *
                std::exp(cplx(0.0, -r * std::log(md))) * (smooth / std::sqrt(md)));
    }
    const cplx v = acc.value();
    if (std::abs(v.imag()) > 1e-6 * (1.0 + std::abs(v.real())))
        throw numeric_failure("approx_zeta_square: imaginary residue " +
                              std::to_string(v.imag()));
    return v.real();
}

void append_zeta_samples_csv(const std::string& path,
                             const std::vector<ZetaSample>& samples) {
    std::FILE* fp = std::fopen(path.c_str(), "a");
    if (!fp) throw format_error("append_zeta_samples_csv: cannot open " + path);
    for (const auto& s : samples)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.value.real(),
                     s.value.imag(), s.err_bound);
    std::fclose(fp);
}

std::vector<ZetaSample> load_zeta_samples_csv(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "r");
    if (!fp) throw format_error("load_zeta_samples_csv: cannot open " + path);
    std::vector<ZetaSample> out;
    char line[512];
    int lineno = 0;
    while (std::fgets(line, sizeof line, fp)) {
        ++lineno;
        ZetaSample s;
        double re = 0, im = 0;
        if (std::sscanf(line, "%lf,%lf,%lf,%lf", &s.t, &re, &im, &s.err_bound) != 4) {
            std::fclose(fp);
            throw format_error("load_zeta_samples_csv: parse failure at line " +
                               std::to_string(lineno));
        }
        s.value = cplx(re, im);
        out.push_back(s);
    }
    std::fclose(fp);
    return out;
}

} // namespace lab
