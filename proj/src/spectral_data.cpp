#include "lab/spectral_data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "lab/accum.hpp"
#include "lab/errors.hpp"

namespace lab {

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

} // namespace

void validate_form(const MaassForm& form, double rel_tol) {
    const std::string who = "form '" + form.source_id + "' (kappa=" +
                            std::to_string(form.kappa) + "): ";
    if (!(form.kappa > 0.0)) throw validation_error(who + "kappa must be > 0");
    if (form.parity != 1 && form.parity != -1)
        throw validation_error(who + "parity must be +1 or -1");
    if (!(form.alpha > 0.0)) throw validation_error(who + "alpha must be > 0");
    if (form.hecke.empty() || !close_rel(form.hecke[0], 1.0, rel_tol))
        throw validation_error(who + "t(1) must equal 1");
    const std::size_t M = form.hecke.size();
    // Multiplicativity on coprime pairs.
    for (std::size_t m = 2; m * 2 <= M; ++m)
        for (std::size_t n = m + 1; m * n <= M; ++n) {
            if (std::gcd(m, n) != 1) continue;
            if (!close_rel(form.t(m) * form.t(n), form.t(m * n), rel_tol))
                throw validation_error(
                    who + "Hecke multiplicativity violated at (" +
                    std::to_string(m) + "," + std::to_string(n) + ")");
        }
    // Prime-power recursion t(p) t(p^k) = t(p^{k+1}) + t(p^{k-1}).
    for (std::size_t p = 2; p * p <= M; ++p) {
        bool prime = true;
        for (std::size_t q = 2; q * q <= p; ++q)
            if (p % q == 0) { prime = false; break; }
        if (!prime) continue;
        for (std::size_t pk = p; pk * p <= M; pk *= p) {
            const double lhs = form.t(p) * form.t(pk);
            const double rhs = form.t(pk * p) + (pk == p ? 1.0 : form.t(pk / p));
            if (!close_rel(lhs, rhs, rel_tol))
                throw validation_error(who + "Hecke recursion violated at p=" +
                                       std::to_string(p) + ", p^k=" +
                                       std::to_string(pk));
        }
    }
}

SpectralDataset load_spectral_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("load_spectral_dataset: cannot open " + path);
    SpectralDataset ds;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw format_error("load_spectral_dataset: JSON parse failure at line " +
                               std::to_string(lineno) + ": " + e.what());
        }
        try {
            if (!have_header) {
                if (!j.contains("schema") || j["schema"] != "maass-v1")
                    throw format_error(
                        "load_spectral_dataset: line 1 must be the header "
                        "{\"schema\":\"maass-v1\",...}");
                if (j.contains("complete_up_to")) {
                    ds.kappa_complete_up_to = j["complete_up_to"].get<double>();
                    ds.completeness_flag_set = ds.kappa_complete_up_to > 0.0;
                }
                have_header = true;
                continue;
            }
            MaassForm f;
            f.kappa = j.at("kappa").get<double>();
            f.parity = j.at("parity").get<int>();
            f.alpha = j.at("alpha").get<double>();
            f.hecke = j.at("t").get<std::vector<double>>();
            f.source_id = j.value("id", "line " + std::to_string(lineno));
            ds.forms.push_back(std::move(f));
        } catch (const nlohmann::json::exception& e) {
            throw format_error("load_spectral_dataset: bad record at line " +
                               std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header)
        throw format_error("load_spectral_dataset: missing maass-v1 header line");
    if (ds.forms.empty())
        throw validation_error("load_spectral_dataset: dataset must be nonempty");
    ds.M_min = ds.forms.front().hecke_length();
    for (std::size_t i = 0; i < ds.forms.size(); ++i) {
        validate_form(ds.forms[i]);
        ds.M_min = std::min(ds.M_min, ds.forms[i].hecke_length());
        if (i > 0 && !(ds.forms[i].kappa > ds.forms[i - 1].kappa))
            throw validation_error(
                "load_spectral_dataset: forms must be sorted by strictly "
                "increasing kappa (violated at '" + ds.forms[i].source_id + "')");
    }
    const double kmax = ds.forms.back().kappa;
    if (ds.kappa_complete_up_to > kmax)
        throw validation_error(
            "load_spectral_dataset: completeness claim exceeds max kappa");
    return ds;
}

double hecke_central_value(const MaassForm& form, const WeightParams& params) {
    const double kappa = form.kappa;
    if (!(kappa > 1.0))
        throw invalid_argument("hecke_central_value: kappa must exceed 1");
    const double Y = (1.0 + params.delta) * kappa * kappa / (4.0 * kPi * kPi);
    const double h = params.C_lemma2 * std::log(kappa);
    const std::size_t M =
        static_cast<std::size_t>(std::floor((1.0 + params.delta) * Y));
    if (form.hecke.size() < M)
        throw resource_limit("hecke_central_value: form '" + form.source_id +
                             "' needs Hecke length " + std::to_string(M) +
                             ", has " + std::to_string(form.hecke.size()));
    Kahan acc;
    for (std::size_t m = 1; m <= std::max<std::size_t>(M, 1); ++m)
        acc.add(form.t(m) / std::sqrt(static_cast<double>(m)) *
                std::exp(-std::pow(static_cast<double>(m) / Y, h)));
    const double H = acc.value();
    if (H < -1e-6)
        throw numeric_failure("hecke_central_value: H(1/2) = " + std::to_string(H) +
                              " violates Katok-Sarnak nonnegativity beyond 1e-6 "
                              "on form '" + form.source_id + "'");
    return H;
}

double alpha_from_rho(double rho1_sq, double kappa) {
    if (!(rho1_sq > 0.0))
        throw invalid_argument("alpha_from_rho: rho1_sq must be > 0");
    return alpha_from_rho_log(std::log(rho1_sq), kappa);
}

double alpha_from_rho_log(double log_rho1_sq, double kappa) {
    // log cosh(x) = x + log1p(e^{-2x}) - log 2, overflow-free.
    const double x = kPi * std::abs(kappa);
    const double log_cosh = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
    return std::exp(log_rho1_sq - log_cosh);
}

} // namespace lab
