//
// Acceptance harness: one line per criterion, PASS / FAIL / INCONCLUSIVE,
// with the measured numbers printed next to the pinned tolerance so a
// failure is diagnosable from the log alone.  Exit status is the number of
// failed criteria (0 = all pass).
//
// Oracles follow the unit suites: exact integer identities, long-double
// brute-force loops, adaptive quadrature, and closed forms; nothing here is
// gated on the code path it is checking.
//
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lab/arithmetic.hpp"
#include "lab/errors.hpp"
#include "lab/expsum.hpp"
#include "lab/motohashi.hpp"
#include "lab/saddle.hpp"
#include "lab/specfun.hpp"
#include "lab/spectral_data.hpp"
#include "lab/trace.hpp"
#include "lab/zeta.hpp"

using lab::cplx;
using std::numbers::pi;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, int status,
            const std::string& detail) {
    // status: 0 pass, 1 fail, 2 inconclusive
    const char* tag = status == 0 ? "PASS" : (status == 1 ? "FAIL" : "INCONCLUSIVE");
    std::printf("criterion %02d %-12s %s — %s\n", idx, tag, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (status == 1) ++g_failures;
}

template <class Fn>
void run(int idx, const std::string& name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(idx, name, 1, std::string("exception: ") + e.what());
    }
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

lab::MaassForm delta_form(double kappa, double alpha, std::size_t M) {
    lab::MaassForm f;
    f.kappa = kappa;
    f.parity = 1;
    f.alpha = alpha;
    f.hecke.assign(M, 0.0);
    f.hecke[0] = 1.0;
    f.source_id = "delta-series";
    return f;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

// ---------------------------------------------------------------- 1
static void crit1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = lab::build_divisor_table(1000000);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool ok = secs < 1.0;
    std::uint64_t spot = 0;
    std::vector<std::uint64_t> xs = {1000, 100000, 1000000};
    std::uint64_t run = 0;
    std::size_t xi = 0;
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
        run += table.d[n];
        if (n == 100) spot = run;
        if (xi < xs.size() && n == xs[xi]) {
            if (run != lab::hyperbola_count(n)) ok = false;
            ++xi;
        }
    }
    ok = ok && spot == 482;
    report(1, "hyperbola identity + sieve timing", ok ? 0 : 1,
           "sum d(n), n<=100: " + std::to_string(spot) +
               " (expect 482); identity at x=1e3,1e5,1e6; sieve 1e6 in " +
               fmt(secs) + " s (gate < 1 s)");
}

// ---------------------------------------------------------------- 2
static void crit2() {
    const auto table = lab::build_divisor_table(500);
    double worst = 0.0;
    for (std::uint64_t m = 1; m <= 20; ++m)
        for (std::uint64_t n = 1; n <= 20; ++n)
            for (std::uint64_t l = 1; l <= 500; ++l) {
                const double bound = std::sqrt(double(std::gcd(std::gcd(m, n), l))) *
                                     table.d[l] * std::sqrt(double(l));
                const double v = std::abs(lab::kloosterman(m, n, l).value);
                worst = std::max(worst, v - bound);
            }
    const double s3 = lab::kloosterman(1, 1, 3).value;
    const double s4 = lab::kloosterman(1, 1, 4).value;
    const bool ok = worst <= 1e-6 && std::abs(s3 + 1.0) <= 1e-9 &&
                    std::abs(s4 + 2.0) <= 1e-9;
    report(2, "Weil bound + spot Kloosterman values", ok ? 0 : 1,
           "max |S| - bound over 20x20x500: " + fmt(worst) +
               "; S(1,1;3) = " + fmt(s3) + ", S(1,1;4) = " + fmt(s4));
}

// ---------------------------------------------------------------- 3
static void crit3() {
    lab::QuadratureSpec spec;
    spec.abs_tol = 1e-30;
    spec.rel_tol = 1e-12;
    double worst = 0.0;
    const std::vector<double> areal = {-10.0, -3.0, 0.5, 3.7, 10.0};
    const std::vector<cplx> bs = {{0.5, 0.0}, {4.0, 0.0}, {2.0, 1.5}};
    for (int j = 0; j <= 6; ++j)
        for (double ar : areal)
            for (const cplx& B : bs) {
                cplx A(ar, 0.0);
                // Strongly complex B at large |A| exceeds what a double
                // quadrature oracle can certify at 1e-10; cap as documented.
                if (B.imag() != 0.0 && std::abs(A) > 3.0)
                    A *= 3.0 / std::abs(A);
                const double u0 = A.real() / (2.0 * B.real());
                const double w = std::sqrt((50.0 + 6.0 * j) / B.real());
                const auto q = lab::integrate(
                    [&](double u) {
                        return std::pow(cplx(u, 0.0), j) *
                               std::exp(A * u - B * u * u);
                    },
                    u0 - w - 5.0, u0 + w + 5.0, spec, 8);
                const cplx closed = lab::gaussian_moment(j, A, B);
                worst = std::max(worst,
                                 std::abs(closed - q.value) / std::abs(closed));
            }
    // P1, P2 from the recurrence.
    const auto p1 = lab::gauss_pj(1);
    const auto p2 = lab::gauss_pj(2);
    const bool pok =
        p1.coeffs.size() == 2 && std::abs(p1.coeffs[0]) < 1e-14 &&
        std::abs(p1.coeffs[1] - std::sqrt(pi) / 2.0) < 1e-14 &&
        p2.coeffs.size() == 3 &&
        std::abs(p2.coeffs[0] - std::sqrt(pi) / 2.0) < 1e-14 &&
        std::abs(p2.coeffs[2] - std::sqrt(pi) / 4.0) < 1e-14;
    const bool ok = worst <= 1e-10 && pok;
    report(3, "Gaussian moments vs quadrature", ok ? 0 : 1,
           "max rel err over j<=6 grid: " + fmt(worst) +
               " (gate 1e-10); P1, P2 recurrence " + (pok ? "ok" : "BAD"));
}

// ---------------------------------------------------------------- 4
static void crit4() {
    double worst = 0.0;
    double at_corner = 0.0;
    for (double y : {2.0, 5.0, 10.0})
        for (double r : {30.0, 60.0, 120.0}) {
            const cplx exact = lab::hyp2f1_central(r, y * y);
            const cplx approx = lab::hyp_asymptotic(r, y);
            const double rel = std::abs(approx - exact) / std::abs(exact);
            worst = std::max(worst, rel);
            if (y == 10.0 && r == 120.0) at_corner = rel;
        }
    const bool ok = worst <= 5e-4 && at_corner <= 1e-5;
    report(4, "hypergeometric asymptotic", ok ? 0 : 1,
           "max rel err on {2,5,10}x{30,60,120}: " + fmt(worst) +
               " (gate 5e-4); at (10,120): " + fmt(at_corner) + " (gate 1e-5)");
}

// ---------------------------------------------------------------- 5
static void crit5() {
    double worst = 0.0;
    for (double sigma : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (double t : {20.0, 50.0, 200.0}) {
            const cplx s(sigma, t);
            const cplx ref = std::exp(lab::log_gamma(s));
            const cplx st = lab::stirling_gamma(s, 3);
            worst = std::max(worst, std::abs(st - ref) / std::abs(ref));
        }
    report(5, "Stirling with 3 corrections", worst <= 1e-8 ? 0 : 1,
           "max rel err, sigma in [0,2], t in {20,50,200}: " + fmt(worst) +
               " (gate 1e-8)");
}

// ---------------------------------------------------------------- 6
static void crit6() {
    const auto table = lab::build_divisor_table(2000);
    lab::WeightParams p;
    double worst_abs = 0.0;
    std::string per_r;
    for (double r : {10.0, 20.0, 40.0}) {
        const double approx = lab::approx_zeta_square(table, r, p);
        const double z = std::abs(lab::zeta_critical(r).value);
        const double err = std::abs(approx - z * z);
        worst_abs = std::max(worst_abs, err);
        per_r += (per_r.empty() ? "" : ", ") + fmt(err);
    }
    const bool zok = worst_abs <= 1e-3;

    const auto ds =
        lab::load_spectral_dataset(std::string(LAB_DATA_DIR) + "/maass_kappa30.jsonl");
    double min_h = 0.0;
    double worst_delta = 0.0;
    int negative = 0;
    std::string first_neg;
    lab::WeightParams pa = p; // delta = 0.5
    lab::WeightParams pb = p;
    pb.delta = 0.45;
    for (const auto& f : ds.forms) {
        double ha = 0.0;
        try {
            ha = lab::hecke_central_value(f, pa);
        } catch (const lab::numeric_failure& e) {
            // The evaluator itself enforces nonnegativity beyond 1e-6.
            ++negative;
            if (first_neg.empty()) first_neg = e.what();
            continue;
        }
        min_h = std::min(min_h, ha);
        const double hb = lab::hecke_central_value(f, pb);
        worst_delta = std::max(worst_delta,
                               std::abs(ha - hb) / (1.0 + std::abs(ha)));
    }
    const bool hok = negative == 0 && min_h >= -1e-6;
    const bool dok = worst_delta <= 1e-6;
    report(6, "Lemma 2 identities", (zok && hok && dok) ? 0 : 1,
           "abs err of approx |zeta(1/2+ir)|^2 at r=10,20,40: " + per_r +
               " (gate 1e-3 each); min H(1/2) over fixture: " + fmt(min_h) +
               " with " + std::to_string(negative) +
               " negative-H rejections (gate >= -1e-6" +
               (first_neg.empty() ? "" : "; first: " + first_neg) +
               "); delta-stability (0.5 vs 0.45): " + fmt(worst_delta) +
               " rel (gate 1e-6)");
}

// ---------------------------------------------------------------- 7
static void crit7() {
    double worst = 0.0;
    for (double r : {0.5, 1.0, 2.0})
        for (double x : {0.5, 1.0, 2.0, 5.0}) {
            const cplx a = lab::bessel_J_diff_series(r, x);
            const cplx b = lab::bessel_J_diff_contour(r, x, 21.0);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
    report(7, "Bessel cross-representation", worst <= 1e-6 ? 0 : 1,
           "max rel disagreement on {0.5,1,2}x{0.5,1,2,5}: " + fmt(worst) +
               " (gate 1e-6)");
}

// ---------------------------------------------------------------- 8
static void crit8() {
    lab::QuadratureSpec spec;
    spec.rel_tol = 1e-7;
    spec.abs_tol = 1e-13;
    double worst = 0.0;
    for (double K : {20.0, 30.0, 40.0})
        for (double x : {10.0, 20.0, 50.0}) {
            lab::WeightParams wp;
            wp.K = K;
            const auto k = lab::kernel_from_weight(wp);
            const cplx a = lab::psi_plus_integral(x, k, spec);
            const cplx b = lab::psi_plus_hypergeom(x, k, spec);
            worst = std::max(worst,
                             std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
        }
    // H-term linearity and evenness invariants.
    const auto g = lab::gaussian_kernel(0.0, 3.0);
    const auto g3 = lab::scale_kernel(g, cplx(3.0, 0.0));
    const auto rg = lab::reflect_kernel(g);
    double lin = 0.0, even = 0.0;
    for (int k : {1, 2, 6, 7}) {
        const auto a = lab::h_term(k, 2, g, spec, 4);
        const auto b = lab::h_term(k, 2, g3, spec, 4);
        const auto c = lab::h_term(k, 2, rg, spec, 4);
        lin = std::max(lin, std::abs(b.value - 3.0 * a.value) /
                                (1.0 + std::abs(a.value)));
        even = std::max(even,
                        std::abs(c.value - a.value) / (1.0 + std::abs(a.value)));
    }
    const bool ok = worst <= 1e-3 && lin <= 1e-10 && even <= 1e-12;
    report(8, "Psi+ cross-representation", ok ? 0 : 1,
           "max rel disagreement on 3x3 (x,K) grid: " + fmt(worst) +
               " (gate 1e-3); H-term linearity " + fmt(lin) +
               " (1e-10), evenness " + fmt(even) + " (1e-12)");
}

// ---------------------------------------------------------------- 9
static void crit9() {
    const lab::QuadratureSpec quad{};
    const auto ph200 = lab::theorem1_phase(1.0e4, 200.0, 5.0);
    const double K1_200 = lab::saddle_point(ph200, 1.0, 1000.0);
    const bool kok = std::abs(K1_200 - 49.88) < 0.005;
    const bool fok = std::abs(lab::phase_f(ph200, K1_200) - K1_200) <=
                     1e-9 * K1_200;
    std::string errs;
    bool within = true, monotone = true;
    double prev = 0.0;
    for (double x : {100.0, 200.0, 400.0}) {
        const auto ph = lab::theorem1_phase(1.0e4, x, 5.0);
        const double K1 = lab::saddle_point(ph, 1.0, 1000.0);
        const cplx oracle = lab::oscillatory_quad(ph, K1 / 5.0, 5.0 * K1, quad);
        const double e =
            std::abs(lab::saddle_eval(ph, K1 / 5.0, 5.0 * K1) - oracle) /
            std::abs(oracle);
        errs += (errs.empty() ? "" : ", ") + fmt(e);
        if (e > 0.05) within = false;
        if (e < prev) monotone = false; // error must not grow with K1
        prev = e;
    }
    const bool ok = kok && fok && within && monotone;
    report(9, "stationary phase vs oscillatory quadrature", ok ? 0 : 1,
           "K1(1e4,200) = " + fmt(K1_200) + " (expect 49.88 +- 0.005); f(K1)=K1 " +
               (fok ? "ok" : "BAD") + "; rel err at x=100,200,400: " + errs +
               " (gate 0.05 each, monotone nonincreasing in K1: " +
               (monotone ? "yes" : "no") + ")");
}

// ---------------------------------------------------------------- 10
static void crit10() {
    const lab::QuadratureSpec quad{};
    const auto m2000 = lab::fourth_moment(2000.0, quad);
    const double L = std::log(2000.0);
    const auto coeffs = lab::MomentCoefficients::defaults();
    const double main_term =
        2000.0 * (coeffs.a4 * L * L * L * L + coeffs.a3 * L * L * L);
    const double ratio = m2000.value.real() / main_term;
    // Additivity: M(300) = M(120) + int_{120}^{300}, independent quadrature.
    const auto m300 = lab::fourth_moment(300.0, quad);
    const auto m120 = lab::fourth_moment(120.0, quad);
    const auto mid = lab::integrate(
        [](double t) {
            const double a = std::abs(lab::zeta_critical(t).value);
            return a * a * a * a;
        },
        120.0, 300.0, quad, 64);
    const double add = std::abs(m300.value.real() - m120.value.real() -
                                mid.value.real()) /
                       m300.value.real();
    const bool ok = ratio >= 0.8 && ratio <= 1.5 && add <= 1e-6;
    report(10, "fourth moment envelope", ok ? 0 : 1,
           "moment(2000)/main = " + fmt(ratio) +
               " (gate [0.8, 1.5]); additivity defect " + fmt(add) +
               " rel (gate 1e-6)");
}

// ---------------------------------------------------------------- 11
static void crit11() {
    const auto ds =
        lab::load_spectral_dataset(std::string(LAB_DATA_DIR) + "/maass_kappa30.jsonl");
    const auto kernel =
        lab::scale_kernel(lab::gaussian_kernel(0.0, 6.0), cplx(0.5, 0.0));
    lab::TraceCaps caps;
    caps.ell_cap = 3000;
    caps.r_window = 32.0;
    const lab::QuadratureSpec quad{};

    if (!ds.completeness_flag_set) {
        report(11, "Kuznetsov trace check", 2,
               "dataset completeness flag unset: residual not gated");
        return;
    }
    lab::TraceReport rep;
    std::string note;
    try {
        lab::kuznetsov_check(ds, 1, 1, kernel, caps, quad, rep);
    } catch (const lab::validation_error& e) {
        note = std::string("; validation: ") + e.what();
    }
    const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    const bool res_ok = std::abs(rep.residual) <= 0.01 * scale;

    lab::TraceReport off1, off2;
    lab::TraceCaps caps2 = caps;
    caps2.ell_cap = 2 * caps.ell_cap;
    try {
        lab::kuznetsov_check(ds, 1, 2, kernel, caps, quad, off1);
        lab::kuznetsov_check(ds, 1, 2, kernel, caps2, quad, off2);
    } catch (const lab::validation_error&) {
    }
    const bool delta_ok = off1.delta_term == 0.0;
    const double moved = std::abs(off2.kloosterman_sum - off1.kloosterman_sum);
    const bool tail_ok = moved < off1.truncation.ell_tail_bound;

    const bool ok = res_ok && delta_ok && tail_ok;
    report(11, "Kuznetsov trace check", ok ? 0 : 1,
           "m=n=1: lhs " + fmt(rep.lhs) + ", rhs " + fmt(rep.rhs) +
               ", residual " + fmt(rep.residual) + " = " +
               fmt(100.0 * std::abs(rep.residual) / scale) +
               "% of scale (gate 1%); m=1,n=2 delta " + fmt(off1.delta_term) +
               " (exact 0), cap-doubling moved ell-sum by " + fmt(moved) +
               " vs tail bound " + fmt(off1.truncation.ell_tail_bound) + note);
}

// ---------------------------------------------------------------- 12
static void crit12() {
    const double T = 1e4;
    const lab::Theorem1Consts consts{};
    const auto table = lab::build_divisor_table(130000);
    double worst_div = 0.0, worst_rhs = 0.0;
    for (double K : {50.0, 60.0}) {
        const auto r = lab::divisor_side_main(K, T, consts, table);
        long double re = 0.0L;
        const long long fmax = (long long)std::floor(3.0 * K);
        for (long long f = 1; f <= fmax; ++f) {
            const long double fd = f;
            long double inner = 0.0L;
            const long long mlo = (long long)std::ceil(consts.C1 * T * f / K);
            const long long mhi = (long long)std::floor(consts.C2 * T * f / K);
            for (long long m = mlo; m <= mhi; ++m) {
                const long double md = m;
                const long double amp = (long double)table.d[(std::size_t)m] *
                                        table.d[(std::size_t)(m + f)] /
                                        (md * std::sqrt(md));
                inner += amp * std::cos((long double)T * fd / md);
            }
            re += std::sqrt(fd) * inner;
        }
        const double oracle = (double)((long double)T * consts.c0 * re);
        worst_div = std::max(worst_div,
                             std::abs(r.value.real() - oracle) / std::abs(oracle));

        const auto t2 = lab::theorem2_rhs(1, K, T, consts, table);
        long double are = 0.0L, aim = 0.0L;
        const long long mlo = (long long)std::ceil(consts.C1 * T / K);
        const long long mhi = (long long)std::floor(consts.C2 * T / K);
        for (long long m = mlo; m <= mhi; ++m) {
            const long double md = m;
            const long double amp = (long double)table.d[(std::size_t)m] *
                                    table.d[(std::size_t)(m + 1)] /
                                    (md * std::sqrt(md));
            are += amp * std::cos((long double)T / md);
            aim += amp * std::sin((long double)T / md);
        }
        const cplx oracle2((double)((long double)T * are),
                           (double)((long double)T * aim));
        worst_rhs = std::max(worst_rhs,
                             std::abs(t2.value - oracle2) / std::abs(oracle2));
    }

    // Mean square of a single synthetic form against A^2 T / 2.
    const double kappa = 60.0, Tm = 500.0;
    lab::SpectralDataset ds;
    ds.forms = {delta_form(kappa, 1.0, 210)};
    ds.kappa_complete_up_to = 65.0;
    ds.completeness_flag_set = true;
    ds.M_min = 210;
    const lab::QuadratureSpec quad{};
    const auto ms = lab::mean_square_S(ds, 3, 35.0, 65.0, Tm, quad, false);
    const double Y = 1.5 * kappa * kappa / (4.0 * pi * pi);
    const double H = std::exp(-std::pow(1.0 / Y, 2.0 * std::log(kappa)));
    const double A = H * H * H;
    const double ms_rel =
        std::abs(ms.value.real() - A * A * Tm / 2.0) / (A * A * Tm / 2.0);

    const bool ok = worst_div <= 1e-9 && worst_rhs <= 1e-9 && ms_rel <= 0.05;
    report(12, "brute-force oracle equivalence", ok ? 0 : 1,
           "divisor_side_main rel err (K=50,60): " + fmt(worst_div) +
               "; theorem2_rhs rel err: " + fmt(worst_rhs) +
               " (gates 1e-9); mean square vs A^2 T/2: " + fmt(ms_rel) +
               " rel (gate 0.05)");
}

// ---------------------------------------------------------------- 13
static void crit13() {
    namespace fs = std::filesystem;
    const fs::path o1 = fs::temp_directory_path() / "acceptance_t1.csv";
    const fs::path o8 = fs::temp_directory_path() / "acceptance_t8.csv";
    const std::string base = std::string(LAB_CLI_PATH) +
                             " divside --K 30 --T 2000 --out ";
    const int s1 = std::system((base + o1.string() + " --threads 1").c_str());
    const int s8 = std::system((base + o8.string() + " --threads 8").c_str());
    const std::string a = slurp(o1), b = slurp(o8);
    const bool ok = s1 == 0 && s8 == 0 && !a.empty() && a == b;
    fs::remove(o1);
    fs::remove(o8);
    report(13, "reproducibility across thread counts", ok ? 0 : 1,
           std::string("divside K=30 T=2000, 1 vs 8 threads: ") +
               (ok ? "byte-identical output" : "outputs differ or run failed") +
               " (" + std::to_string(a.size()) + " bytes)");
}

int main() {
    run(1, "hyperbola identity + sieve timing", crit1);
    run(2, "Weil bound + spot Kloosterman values", crit2);
    run(3, "Gaussian moments vs quadrature", crit3);
    run(4, "hypergeometric asymptotic", crit4);
    run(5, "Stirling with 3 corrections", crit5);
    run(6, "Lemma 2 identities", crit6);
    run(7, "Bessel cross-representation", crit7);
    run(8, "Psi+ cross-representation", crit8);
    run(9, "stationary phase vs oscillatory quadrature", crit9);
    run(10, "fourth moment envelope", crit10);
    run(11, "Kuznetsov trace check", crit11);
    run(12, "brute-force oracle equivalence", crit12);
    run(13, "reproducibility across thread counts", crit13);
    std::printf("%d of 13 criteria passed\n", 13 - g_failures);
    return g_failures;
}
