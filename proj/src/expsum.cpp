#include "lab/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "lab/accum.hpp"
#include "lab/errors.hpp"
#include "lab/zeta.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

void require_window(const SpectralDataset& ds, double K, double K2) {
    if (!(K > 0.0) || !(K < K2) || !(K2 <= 2.0 * K))
        throw invalid_argument("spectral window must satisfy 0 < K < K2 <= 2K");
    if (!ds.completeness_flag_set || ds.kappa_complete_up_to < K2)
        throw validation_error(
            "dataset completeness " +
            std::to_string(ds.kappa_complete_up_to) +
            " (flag " + (ds.completeness_flag_set ? "set" : "unset") +
            ") does not cover K2 = " + std::to_string(K2));
}

double mollifier_g(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

double mollifier_ramp(double u) { // 0 for u <= 0, 1 for u >= 1, C-infinity
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = mollifier_g(u), b = mollifier_g(1.0 - u);
    return a / (a + b);
}

} // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::within_envelope: return "within_envelope";
    case Verdict::outside_envelope: return "outside_envelope";
    default: return "inconclusive";
    }
}

std::string ComparisonReport::to_json() const {
    nlohmann::json j;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["difference"] = difference;
    j["envelope"] = envelope;
    j["verdict"] = verdict_name(verdict);
    j["meta"] = meta;
    return j.dump();
}

ExpSumResult spectral_S_m(const SpectralDataset& dataset, int m, double K,
                          double K2, double t, const WeightParams& params) {
    if (m < 1 || m > 3)
        throw invalid_argument("spectral_S_m: m must be 1, 2 or 3");
    if (!(t > 0.0)) throw invalid_argument("spectral_S_m: t must be > 0");
    require_window(dataset, K, K2);
    ExpSumResult out;
    Kahan acc, mag;
    for (const auto& f : dataset.forms) {
        if (!(f.kappa > K) || f.kappa > K2) continue;
        const double H = hecke_central_value(f, params);
        const double term = f.alpha * std::pow(H, m) *
                            std::cos(f.kappa * std::log(4.0 * kE * t / f.kappa));
        acc.add(term);
        mag.add(std::abs(term));
        ++out.terms;
    }
    out.value = acc.value();
    out.abs_err = 1e-15 * mag.value() * static_cast<double>(out.terms + 1);
    out.meta = "window (" + std::to_string(K) + ", " + std::to_string(K2) +
               "], m = " + std::to_string(m) + ", t = " + std::to_string(t);
    return out;
}

ExpSumResult divisor_side_main(double K, double T, const Theorem1Consts& consts,
                               const DivisorTable& table, int threads) {
    if (!(K > 0.0) || !(T > 0.0))
        throw invalid_argument("divisor_side_main: K, T must be > 0");
    if (!(consts.C1 > 0.0) || !(consts.C1 < consts.C2))
        throw invalid_argument("divisor_side_main: need 0 < C1 < C2");
    ExpSumResult out;
    const long long fmax = static_cast<long long>(std::floor(3.0 * K));
    if (fmax < 1) {
        out.meta = "empty f-range (K < 1/3)";
        return out;
    }
    const std::uint64_t need = static_cast<std::uint64_t>(
        std::floor(consts.C2 * T * static_cast<double>(fmax) / K)) +
        static_cast<std::uint64_t>(fmax) + 1;
    if (table.limit < need)
        throw resource_limit("divisor_side_main: divisor table limit " +
                             std::to_string(table.limit) + " below required " +
                             std::to_string(need));
    KahanC total;
    Kahan mag;
    for (long long f = 1; f <= fmax; ++f) {
        const double fd = static_cast<double>(f);
        const std::uint64_t mlo = static_cast<std::uint64_t>(
            std::ceil(consts.C1 * T * fd / K));
        const std::uint64_t mhi = static_cast<std::uint64_t>(
            std::floor(consts.C2 * T * fd / K));
        if (mhi < mlo || mlo < 1) continue;
        auto term = [&](std::uint64_t mm) -> cplx {
            const double md = static_cast<double>(mm);
            const double amp =
                static_cast<double>(table.d[static_cast<std::size_t>(mm)]) *
                static_cast<double>(
                    table.d[static_cast<std::size_t>(mm + f)]) *
                std::pow(md, -1.5);
            const double phase = T * fd / md;
            return amp * cplx(std::cos(phase), std::sin(phase));
        };
        const cplx inner = block_sum(mlo, mhi + 1, term, threads);
        auto abs_term = [&](std::uint64_t mm) -> cplx {
            return std::abs(term(mm));
        };
        const double inner_mag = block_sum(mlo, mhi + 1, abs_term, threads).real();
        total.add(std::sqrt(fd) * inner);
        mag.add(std::sqrt(fd) * inner_mag);
        out.terms += static_cast<std::int64_t>(mhi - mlo + 1);
    }
    out.value = T * consts.c0 * total.value().real();
    out.abs_err = 1e-15 * T * consts.c0 * mag.value();
    out.meta = "phi_l corrections (l >= 1) omitted; C1 = " +
               std::to_string(consts.C1) + ", C2 = " + std::to_string(consts.C2) +
               ", c0 = " + std::to_string(consts.c0) + "; real part taken";
    return out;
}

ExpSumResult S_T_Delta(const SpectralDataset& dataset, double T, double Delta) {
    if (!(T > 1.0) || !(Delta > 0.0))
        throw invalid_argument("S_T_Delta: requires T > 1, Delta > 0");
    const double cutoff = T * std::log(T) / Delta;
    if (!dataset.completeness_flag_set || dataset.kappa_complete_up_to < cutoff)
        throw validation_error("S_T_Delta: dataset must be complete to "
                               "T log(T)/Delta = " + std::to_string(cutoff));
    ExpSumResult out;
    const WeightParams params{};
    Kahan acc;
    for (const auto& f : dataset.forms) {
        if (f.kappa > cutoff) break;
        const double H = hecke_central_value(f, params);
        const double g = Delta * f.kappa / T;
        acc.add(f.alpha * H * H * H * std::pow(f.kappa, -1.5) *
                std::cos(f.kappa * std::log(f.kappa / (4.0 * kE * T))) *
                std::exp(-0.25 * g * g));
        ++out.terms;
    }
    out.value = kPi * std::sqrt(0.5 * T) * acc.value();
    const double gc = Delta * cutoff / T; // = log T
    out.abs_err = kPi * std::sqrt(0.5 * T) * std::sqrt(cutoff) *
                  std::exp(-0.25 * gc * gc);
    out.meta = "series truncated at kappa <= T log(T)/Delta = " +
               std::to_string(cutoff) +
               "; tail bounded by the Gaussian factor (heuristic density)";
    return out;
}

ExpSumResult theorem2_rhs(int m_exp, double K, double T,
                          const Theorem1Consts& consts,
                          const DivisorTable& table) {
    if (m_exp != 1 && m_exp != 2)
        throw invalid_argument("theorem2_rhs: m_exp must be 1 or 2");
    if (!(K > 0.0) || !(T > 0.0))
        throw invalid_argument("theorem2_rhs: K, T must be > 0");
    ExpSumResult out;
    const std::uint64_t mlo =
        static_cast<std::uint64_t>(std::ceil(consts.C1 * T / K));
    const std::uint64_t mhi =
        static_cast<std::uint64_t>(std::floor(consts.C2 * T / K));
    if (mhi < mlo || mlo < 1) {
        out.meta = "empty m-range";
        return out;
    }
    if (table.limit < mhi + 1)
        throw resource_limit("theorem2_rhs: divisor table limit " +
                             std::to_string(table.limit) + " below required " +
                             std::to_string(mhi + 1));
    KahanC acc;
    Kahan mag;
    for (std::uint64_t mm = mlo; mm <= mhi; ++mm) {
        const double md = static_cast<double>(mm);
        const double amp =
            static_cast<double>(table.d[static_cast<std::size_t>(mm)]) *
            static_cast<double>(table.d[static_cast<std::size_t>(mm + 1)]) *
            std::pow(md, -1.5);
        acc.add(amp * cplx(std::cos(T / md), std::sin(T / md)));
        mag.add(amp);
        ++out.terms;
    }
    out.value = T * acc.value();
    out.abs_err = 1e-15 * T * mag.value();
    const double envelope = std::pow(T, 0.51) * std::sqrt(K);
    out.meta = "m_exp = " + std::to_string(m_exp) + "; |value| / (T^{0.51} K^{1/2}) = " +
               std::to_string(std::abs(out.value) / envelope) +
               " (envelope advisory, eps = 0.01)";
    return out;
}

double smooth_bump(double t, double T) {
    if (!(T > 0.0)) throw invalid_argument("smooth_bump: T must be > 0");
    if (t <= 0.5 * T || t >= 2.5 * T) return 0.0;
    if (t >= T && t <= 2.0 * T) return 1.0;
    if (t < T) return mollifier_ramp((t - 0.5 * T) / (0.5 * T));
    return mollifier_ramp((2.5 * T - t) / (0.5 * T));
}

ExpSumResult mean_square_S(const SpectralDataset& dataset, int m, double K,
                           double K2, double T, const QuadratureSpec& quad,
                           bool bump) {
    if (m < 1 || m > 3)
        throw invalid_argument("mean_square_S: m must be 1, 2 or 3");
    if (!(T > 0.0)) throw invalid_argument("mean_square_S: T must be > 0");
    require_window(dataset, K, K2);
    ExpSumResult out;
    std::vector<double> amp, kap;
    const WeightParams params{};
    for (const auto& f : dataset.forms) {
        if (!(f.kappa > K) || f.kappa > K2) continue;
        amp.push_back(f.alpha * std::pow(hecke_central_value(f, params), m));
        kap.push_back(f.kappa);
        ++out.terms;
    }
    auto S = [&](double t) {
        Kahan acc;
        for (std::size_t j = 0; j < amp.size(); ++j)
            acc.add(amp[j] * std::cos(kap[j] * std::log(4.0 * kE * t / kap[j])));
        return acc.value();
    };
    const double a = bump ? 0.5 * T : T;
    const double b = bump ? 2.5 * T : 2.0 * T;
    auto f = [&](double t) -> cplx {
        const double s = S(t);
        return (bump ? smooth_bump(t, T) : 1.0) * s * s;
    };
    // Integrand frequency <= 2 K2 / t; panel size <= (2 pi T / K2) / 16.
    const double step = (2.0 * kPi * T / K2) / 16.0;
    const int n = 16 + static_cast<int>(std::ceil((b - a) / step));
    const auto res = integrate(f, a, b, quad, n);
    out.value = res.value.real();
    out.abs_err = res.abs_err;
    out.meta = std::string("mean square over [") + std::to_string(a) + ", " +
               std::to_string(b) + "]" + (bump ? " with smooth bump" : "");
    return out;
}

void moment_check(const SpectralDataset& dataset, double T, double G,
                  const QuadratureSpec& quad, ComparisonReport& report) {
    if (!(T > 1.0) || !(G > 0.0))
        throw invalid_argument("moment_check: requires T > 1, G > 0");
    report = ComparisonReport{};
    report.lhs = smoothed_fourth_moment(T, G, quad);
    const WeightParams params{};
    Kahan acc;
    for (const auto& f : dataset.forms) {
        const double g = G * f.kappa / T;
        acc.add(f.alpha * std::pow(hecke_central_value(f, params), 3) *
                std::pow(f.kappa, -0.5) *
                std::sin(f.kappa * std::log(f.kappa / (4.0 * kE * T))) *
                std::exp(-0.25 * g * g));
    }
    report.rhs = kPi / std::sqrt(2.0 * T) * acc.value();
    report.difference = report.lhs - report.rhs;
    // Error term O(log^{3D+9} T) with the arbitrary constant fixed at D = 1.
    report.envelope = std::pow(std::log(T), 12.0);
    const double gc = G * dataset.kappa_complete_up_to / T;
    const bool supported =
        dataset.completeness_flag_set && std::exp(-0.25 * gc * gc) <= 1e-3;
    if (!supported) {
        report.verdict = Verdict::inconclusive;
        report.meta = "dataset cannot support the Gaussian cutoff (flag " +
                      std::string(dataset.completeness_flag_set ? "set"
                                                                : "unset") +
                      ", cutoff " +
                      std::to_string(dataset.kappa_complete_up_to) + ")";
        throw validation_error("moment_check: " + report.meta);
    }
    report.verdict = std::abs(report.difference) <= report.envelope
                         ? Verdict::within_envelope
                         : Verdict::outside_envelope;
    report.meta = "envelope log^{3D+9} T with D = 1; desk-scale comparison, "
                  "no asymptotic claim";
}

ComparisonReport moment_check(const SpectralDataset& dataset, double T,
                              double G, const QuadratureSpec& quad) {
    ComparisonReport report;
    moment_check(dataset, T, G, quad, report);
    return report;
}

std::string expsum_csv_row(const std::string& name, const std::string& params,
                           const ExpSumResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%lld",
                  r.value.real(), r.value.imag(), r.abs_err,
                  static_cast<long long>(r.terms));
    return name + "," + params + "," + buf;
}

} // namespace lab
