#pragma once
//
// Ingestion and validation of Maass-form spectral data (eigenvalue parameter
// kappa, parity, normalizing weight alpha, Hecke eigenvalues t(n)), and the
// smoothed central value H(1/2) via the approximate functional equation.
//
// Dataset file format (JSON lines):
//   header  {"schema":"maass-v1","complete_up_to":<float>}
//   form    {"kappa":<float>,"parity":1|-1,"alpha":<float>,
//            "t":[1.0, t2, t3, ...],"id":"<text>"}
//
#include <string>
#include <vector>

#include "lab/specfun.hpp"

namespace lab {

struct MaassForm {
    double kappa = 0.0;
    int parity = 1;            // epsilon_j = +-1
    double alpha = 0.0;        // |rho(1)|^2 / cosh(pi kappa)
    std::vector<double> hecke; // hecke[0] = t(1) = 1, hecke[n-1] = t(n)
    std::string source_id;
    double t(std::size_t n) const { return hecke.at(n - 1); }
    std::size_t hecke_length() const { return hecke.size(); }
};

struct SpectralDataset {
    std::vector<MaassForm> forms; // sorted by strictly increasing kappa
    double kappa_complete_up_to = 0.0;
    bool completeness_flag_set = false;
    std::size_t M_min = 0; // min Hecke length across forms
};

// Throws validation_error naming the form and the violated relation.
void validate_form(const MaassForm& form, double rel_tol = 1e-6);

SpectralDataset load_spectral_dataset(const std::string& path);

// H(1/2) ~ sum_{m <= (1+delta) Y} t(m) m^{-1/2} e^{-(m/Y)^h},
// Y = (1+delta) kappa^2 / (4 pi^2), h = C_lemma2 log kappa.
double hecke_central_value(const MaassForm& form, const WeightParams& params);

// alpha = rho1_sq / cosh(pi kappa) in log space (survives kappa >> 100).
double alpha_from_rho(double rho1_sq, double kappa);
double alpha_from_rho_log(double log_rho1_sq, double kappa);

} // namespace lab
