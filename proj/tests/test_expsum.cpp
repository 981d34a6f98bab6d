//
// Exponential-sum tests.  Oracles: closed-form single-term spectral sums,
// extended-precision (long double) brute-force double loops for the divisor
// side, triangle-inequality majorants, and the closed-form average of cos^2
// for the mean square.
//
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lab/accum.hpp"
#include "lab/errors.hpp"
#include "lab/expsum.hpp"

using lab::cplx;
using std::numbers::e;
using std::numbers::pi;

namespace {

const lab::QuadratureSpec kQuad{};

// Form with t(1) = 1 and t(m) = 0 beyond: H(1/2) has the closed form
// exp(-(1/Y)^h), Y = (1+delta) kappa^2/(4 pi^2), h = C log kappa.
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

double delta_form_H(double kappa) {
    const double Y = 1.5 * kappa * kappa / (4.0 * pi * pi);
    return std::exp(-std::pow(1.0 / Y, 2.0 * std::log(kappa)));
}

lab::SpectralDataset dataset_of(std::vector<lab::MaassForm> forms,
                                double complete_to) {
    lab::SpectralDataset ds;
    ds.forms = std::move(forms);
    ds.M_min = ds.forms.empty() ? 0 : ds.forms.front().hecke_length();
    for (const auto& f : ds.forms)
        ds.M_min = std::min(ds.M_min, f.hecke_length());
    ds.kappa_complete_up_to = complete_to;
    ds.completeness_flag_set = complete_to > 0.0;
    return ds;
}

} // namespace

TEST_SUITE_BEGIN("expsum");

TEST_CASE("spectral_S_m: closed-form single term, window algebra, errors") {
    const auto ds = dataset_of({delta_form(10.0, 1.0, 16)}, 30.0);
    const lab::WeightParams p{};

    SUBCASE("single-term closed form at m = 3") {
        const auto r = lab::spectral_S_m(ds, 3, 8.0, 12.0, 100.0, p);
        const double H = delta_form_H(10.0);
        const double expect =
            H * H * H * std::cos(10.0 * std::log(4.0 * e * 100.0 / 10.0));
        CHECK(r.terms == 1);
        CHECK(r.value.real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(r.value.imag() == 0.0);
    }
    SUBCASE("empty window") {
        const auto r = lab::spectral_S_m(ds, 1, 12.0, 20.0, 100.0, p);
        CHECK(r.value == cplx(0.0, 0.0));
        CHECK(r.terms == 0);
    }
    SUBCASE("triangle inequality") {
        const auto r = lab::spectral_S_m(ds, 2, 8.0, 12.0, 777.0, p);
        const double H = delta_form_H(10.0);
        CHECK(std::abs(r.value) <= H * H + 1e-15);
    }
    SUBCASE("window splits add exactly") {
        const auto ds2 = dataset_of(
            {delta_form(10.0, 0.7, 16), delta_form(14.0, 1.3, 16)}, 30.0);
        const auto whole = lab::spectral_S_m(ds2, 3, 8.0, 16.0, 300.0, p);
        const auto lo = lab::spectral_S_m(ds2, 3, 8.0, 12.0, 300.0, p);
        const auto hi = lab::spectral_S_m(ds2, 3, 12.0, 16.0, 300.0, p);
        CHECK(whole.value.real() ==
              doctest::Approx(lo.value.real() + hi.value.real())
                  .epsilon(1e-15));
    }
    SUBCASE("argument and completeness validation") {
        CHECK_THROWS_AS(lab::spectral_S_m(ds, 4, 8.0, 12.0, 100.0, p),
                        lab::invalid_argument);
        CHECK_THROWS_AS(lab::spectral_S_m(ds, 1, 8.0, 17.0, 100.0, p),
                        lab::invalid_argument); // K2 > 2K
        const auto incomplete = dataset_of({delta_form(10.0, 1.0, 16)}, 0.0);
        CHECK_THROWS_AS(lab::spectral_S_m(incomplete, 1, 8.0, 12.0, 100.0, p),
                        lab::validation_error);
    }
    SUBCASE("insufficient Hecke length propagates as resource_limit") {
        const auto shorty = dataset_of({delta_form(10.0, 1.0, 2)}, 30.0);
        CHECK_THROWS_AS(lab::spectral_S_m(shorty, 1, 8.0, 12.0, 100.0, p),
                        lab::resource_limit);
    }
}

TEST_CASE("divisor_side_main: brute-force oracle and properties") {
    const double T = 1e4, K = 50.0;
    const lab::Theorem1Consts consts{};
    const auto table = lab::build_divisor_table(130000);
    const auto r = lab::divisor_side_main(K, T, consts, table);

    // Extended-precision double loop, identical ranges.
    long double re = 0.0L, mag = 0.0L;
    for (long long f = 1; f <= 150; ++f) {
        const long double fd = f;
        long double inner_re = 0.0L, inner_mag = 0.0L;
        const long long mlo = (long long)std::ceil(1.0 * T * f / K);
        const long long mhi = (long long)std::floor(4.0 * T * f / K);
        for (long long m = mlo; m <= mhi; ++m) {
            const long double md = m;
            const long double amp = (long double)table.d[(std::size_t)m] *
                                    table.d[(std::size_t)(m + f)] /
                                    (md * std::sqrt(md));
            inner_re += amp * std::cos((long double)T * fd / md);
            inner_mag += amp;
        }
        re += std::sqrt(fd) * inner_re;
        mag += std::sqrt(fd) * inner_mag;
    }
    const double oracle = (double)((long double)T * re);
    CHECK(r.value.real() == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(r.value.imag() == 0.0);
    CHECK(std::abs(r.value) <= (double)((long double)T * mag));
    CHECK(r.meta.find("phi_l") != std::string::npos);

    SUBCASE("thread count does not change the value") {
        const auto r8 = lab::divisor_side_main(K, T, consts, table, 8);
        CHECK(r8.value.real() == r.value.real());
    }
    SUBCASE("empty f-range and small table") {
        CHECK(lab::divisor_side_main(0.2, T, consts, table).terms == 0);
        const auto tiny = lab::build_divisor_table(100);
        CHECK_THROWS_AS(lab::divisor_side_main(K, T, consts, tiny),
                        lab::resource_limit);
    }
}

TEST_CASE("S_T_Delta: single-term closed form and the Gaussian spot value") {
    // kappa = 2T/Delta makes the Gaussian factor exactly e^{-1}.
    const double T = 50.0, Delta = 10.0;
    const double cutoff = T * std::log(T) / Delta;
    REQUIRE(cutoff > 10.0);
    const auto ds = dataset_of({delta_form(10.0, 0.8, 8)}, 20.0);
    const auto r = lab::S_T_Delta(ds, T, Delta);
    const double H = delta_form_H(10.0);
    const double expect = pi * std::sqrt(0.5 * T) * 0.8 * H * H * H *
                          std::pow(10.0, -1.5) *
                          std::cos(10.0 * std::log(10.0 / (4.0 * e * T))) *
                          std::exp(-1.0);
    CHECK(r.terms == 1);
    CHECK(r.value.real() == doctest::Approx(expect).epsilon(1e-12));

    SUBCASE("no forms below the cutoff") {
        const auto ds2 = dataset_of({delta_form(25.0, 1.0, 30)}, 25.0);
        const auto r2 = lab::S_T_Delta(ds2, T, Delta);
        CHECK(r2.terms == 0);
        CHECK(r2.value == cplx(0.0, 0.0));
    }
    SUBCASE("completeness below the cutoff") {
        const auto ds3 = dataset_of({delta_form(10.0, 1.0, 8)}, 15.0);
        CHECK_THROWS_AS(lab::S_T_Delta(ds3, T, Delta), lab::validation_error);
    }
}

TEST_CASE("theorem2_rhs: brute-force oracle and trivial bound") {
    const double T = 1e4, K = 60.0;
    const lab::Theorem1Consts consts{};
    const auto table = lab::build_divisor_table(1000);
    const auto r = lab::theorem2_rhs(1, K, T, consts, table);

    long double re = 0.0L, im = 0.0L, mag = 0.0L;
    for (long long m = 167; m <= 666; ++m) {
        const long double md = m;
        const long double amp = (long double)table.d[(std::size_t)m] *
                                table.d[(std::size_t)(m + 1)] /
                                (md * std::sqrt(md));
        re += amp * std::cos((long double)T / md);
        im += amp * std::sin((long double)T / md);
        mag += amp;
    }
    CHECK(r.terms == 500);
    CHECK(r.value.real() == doctest::Approx((double)(T * re)).epsilon(1e-9));
    CHECK(r.value.imag() == doctest::Approx((double)(T * im)).epsilon(1e-9));
    CHECK(std::abs(r.value) <= (double)(T * mag));

    CHECK(lab::theorem2_rhs(2, 60.0, 10.0, consts, table).terms == 0);
    CHECK_THROWS_AS(lab::theorem2_rhs(3, K, T, consts, table),
                    lab::invalid_argument);
}

TEST_CASE("smooth_bump: plateau, support, derivative bound") {
    const double T = 640.0;
    CHECK(lab::smooth_bump(1.5 * T, T) == 1.0);
    CHECK(lab::smooth_bump(T, T) == 1.0);
    CHECK(lab::smooth_bump(2.0 * T, T) == 1.0);
    CHECK(lab::smooth_bump(0.5 * T, T) == 0.0);
    CHECK(lab::smooth_bump(2.5 * T, T) == 0.0);
    CHECK(lab::smooth_bump(3.0 * T, T) == 0.0);
    const double h = 1e-4 * T;
    for (int i = 0; i <= 19; ++i) {
        const double t = 0.4 * T + i * (2.3 * T / 19.0);
        const double phi = lab::smooth_bump(t, T);
        CHECK(phi >= 0.0);
        CHECK(phi <= 1.0);
        const double d =
            (lab::smooth_bump(t + h, T) - lab::smooth_bump(t - h, T)) /
            (2.0 * h);
        CHECK(std::abs(d) <= 10.0 / T);
    }
    CHECK_THROWS_AS(lab::smooth_bump(1.0, 0.0), lab::invalid_argument);
}

TEST_CASE("mean_square_S: cos^2 average, quadratic scaling, positivity") {
    // The cos^2 oscillatory remainder is <= 3/(2 kappa) of the mean, so the
    // 5% comparison needs kappa well above 30.
    const double T = 500.0, kappa = 60.0;
    auto forms = std::vector<lab::MaassForm>{delta_form(kappa, 1.0, 210)};
    const auto ds = dataset_of(forms, 65.0);
    const auto r = lab::mean_square_S(ds, 3, 35.0, 65.0, T, kQuad, false);
    const double H = delta_form_H(kappa);
    const double A = H * H * H;
    CHECK(r.value.real() == doctest::Approx(A * A * T / 2.0).epsilon(0.05));
    CHECK(r.value.real() >= 0.0);

    SUBCASE("alpha -> c alpha scales the mean square by c^2") {
        auto scaled = forms;
        scaled[0].alpha = 3.0;
        const auto ds2 = dataset_of(scaled, 65.0);
        const auto r2 = lab::mean_square_S(ds2, 3, 35.0, 65.0, T, kQuad, false);
        CHECK(r2.value.real() ==
              doctest::Approx(9.0 * r.value.real()).epsilon(1e-10));
    }
    SUBCASE("empty window") {
        const auto r0 = lab::mean_square_S(ds, 1, 14.0, 20.0, T, kQuad, false);
        CHECK(r0.value == cplx(0.0, 0.0));
    }
    SUBCASE("bump-weighted variant dominates the sharp window") {
        const auto rb = lab::mean_square_S(ds, 3, 35.0, 65.0, T, kQuad, true);
        CHECK(rb.value.real() >= r.value.real() - 1e-9);
    }
}

TEST_CASE("moment_check: verdict branches and sign structure") {
    SUBCASE("supported dataset: difference reported inside the log envelope") {
        const auto ds = dataset_of({delta_form(10.0, 1.0, 8)}, 30.0);
        const auto rep = lab::moment_check(ds, 200.0, 40.0, kQuad);
        CHECK(rep.difference == rep.lhs - rep.rhs);
        CHECK(rep.envelope == std::pow(std::log(200.0), 12.0));
        CHECK(rep.lhs > 0.0); // local average of |zeta|^4
        CHECK(rep.verdict == lab::Verdict::within_envelope);
        CHECK(rep.to_json().find("within_envelope") != std::string::npos);
    }
    SUBCASE("completeness flag unset forces inconclusive") {
        const auto ds = dataset_of({delta_form(10.0, 1.0, 8)}, 0.0);
        lab::ComparisonReport rep;
        CHECK_THROWS_AS(lab::moment_check(ds, 200.0, 40.0, kQuad, rep),
                        lab::validation_error);
        CHECK(rep.verdict == lab::Verdict::inconclusive);
        CHECK(rep.lhs > 0.0); // report still populated
    }
}

TEST_CASE("expsum_csv_row layout") {
    lab::ExpSumResult r;
    r.value = cplx(1.5, -2.0);
    r.abs_err = 0.25;
    r.terms = 7;
    CHECK(lab::expsum_csv_row("divside", "K=50;T=10000", r) ==
          "divside,K=50;T=10000,1.5,-2,0.25,7");
}

TEST_SUITE_END();
