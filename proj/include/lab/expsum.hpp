#pragma once
//
// The headline exponential sums: the spectral sums S_m(K;K',t) over Hecke
// central values, the arithmetic divisor-side main term, the smoothed sum
// S(T,Delta), the f = 1 divisor reduction, the smooth plateau bump, the
// mean square of S_m over a t-window, and the smoothed fourth-moment
// comparison report.
//
#include <string>

#include "lab/arithmetic.hpp"
#include "lab/quadrature.hpp"
#include "lab/spectral_data.hpp"
#include "lab/types.hpp"

namespace lab {

// Defaults for the unspecified constants of the divisor-side evaluation;
// all overridable through the CLI config.
struct Theorem1Consts {
    double C1 = 1.0;
    double C2 = 4.0;
    double c0 = 1.0;
};

enum class Verdict { within_envelope, outside_envelope, inconclusive };
const char* verdict_name(Verdict v);

struct ComparisonReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double difference = 0.0; // lhs - rhs
    double envelope = 0.0;   // desk-scale size of the error term
    Verdict verdict = Verdict::inconclusive;
    std::string meta;
    std::string to_json() const;
};

// sum_{K < kappa_j <= K2} alpha_j H_j^m(1/2) cos(kappa_j log(4 e t / kappa_j)).
// Requires K < K2 <= 2K, m in {1,2,3}, dataset complete to K2.
ExpSumResult spectral_S_m(const SpectralDataset& dataset, int m, double K,
                          double K2, double t, const WeightParams& params);

// Re sum_{f <= 3K} f^{1/2} sum_{C1 T f/K <= m <= C2 T f/K} m^{-3/2} d(m)
// d(m+f) e^{iTf/m}, times T c0.  The correction functions phi_l (l >= 1)
// are omitted (recorded in meta).
ExpSumResult divisor_side_main(double K, double T, const Theorem1Consts& consts,
                               const DivisorTable& table, int threads = 1);

// pi sqrt(T/2) sum alpha_j H_j^3 kappa_j^{-3/2} cos(kappa_j log(kappa_j/(4eT)))
// e^{-(Delta kappa_j / T)^2 / 4}, truncated at kappa <= T log(T) / Delta.
ExpSumResult S_T_Delta(const SpectralDataset& dataset, double T, double Delta);

// T sum_{C1 T/K <= m <= C2 T/K} m^{-3/2} d(m) d(m+1) e^{iT/m} (f = 1
// reduction); meta reports |value| against the T^{1/2+eps} K^{1/2} envelope.
ExpSumResult theorem2_rhs(int m_exp, double K, double T,
                          const Theorem1Consts& consts,
                          const DivisorTable& table);

// Smooth plateau: 1 on [T, 2T], 0 outside [T/2, 5T/2], C-infinity ramps.
double smooth_bump(double t, double T);

// int (S_m(K;K2,t))^2 dt over [T, 2T] (or [T/2, 5T/2] weighted by
// smooth_bump when bump is set); panels resolve the fastest oscillation.
ExpSumResult mean_square_S(const SpectralDataset& dataset, int m, double K,
                           double K2, double T, const QuadratureSpec& quad,
                           bool bump);

// Smoothed fourth moment vs the spectral sine sum; the envelope is the
// desk-scale log-power error term.  The throwing overload raises
// validation_error (report filled, verdict inconclusive) when the dataset
// cannot support the Gaussian cutoff.
void moment_check(const SpectralDataset& dataset, double T, double G,
                  const QuadratureSpec& quad, ComparisonReport& report);
ComparisonReport moment_check(const SpectralDataset& dataset, double T,
                              double G, const QuadratureSpec& quad);

// CSV row `name,params,re,im,abs_err,terms` (params free-form, no commas).
std::string expsum_csv_row(const std::string& name, const std::string& params,
                           const ExpSumResult& r);

} // namespace lab
