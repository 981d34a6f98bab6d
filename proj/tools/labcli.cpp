//
// Batch command-line front end: one subcommand per public evaluator, CSV or
// JSON output, deterministic for a fixed config regardless of thread count.
// Exit codes: 0 ok; 2 invalid argument / domain / validation; 3 numeric
// failure; 4 resource limit; 5 format error.
//
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lab/arithmetic.hpp"
#include "lab/errors.hpp"
#include "lab/expsum.hpp"
#include "lab/motohashi.hpp"
#include "lab/saddle.hpp"
#include "lab/spectral_data.hpp"
#include "lab/trace.hpp"
#include "lab/zeta.hpp"

namespace {

struct Global {
    std::string spectral;
    std::string out;
    std::string format = "csv";
    std::string config;
    int threads = 1;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// key=value override file; '#' starts a comment.
std::map<std::string, double> load_config(const std::string& path) {
    std::map<std::string, double> kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) throw lab::invalid_argument("config file not readable: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string s;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw lab::format_error("config: expected key=value, got '" +
                                    line + "'");
        try {
            std::size_t used = 0;
            const double v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument("");
            kv[s.substr(0, eq)] = v;
        } catch (const std::exception&) {
            throw lab::format_error("config: bad numeric value in '" + line +
                                    "'");
        }
    }
    return kv;
}

double cfg(const std::map<std::string, double>& kv, const std::string& key,
           double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

void emit(const Global& g, const std::string& text) {
    if (g.out.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw lab::invalid_argument("cannot open output file: " + g.out);
    f << text;
}

void emit_scalar(const Global& g, double v) {
    if (g.format == "json")
        emit(g, std::string("{\"value\":") + num(v) + "}\n");
    else
        emit(g, num(v) + "\n");
}

void emit_expsum(const Global& g, const std::string& name,
                 const std::string& params, const lab::ExpSumResult& r) {
    if (g.format == "json") {
        nlohmann::json j{{"name", name},        {"params", params},
                         {"re", r.value.real()}, {"im", r.value.imag()},
                         {"abs_err", r.abs_err}, {"terms", r.terms},
                         {"meta", r.meta}};
        emit(g, j.dump() + "\n");
    } else {
        emit(g, "name,params,re,im,abs_err,terms\n" +
                    lab::expsum_csv_row(name, params, r) + "\n");
    }
}

lab::SpectralDataset need_dataset(const Global& g) {
    if (g.spectral.empty())
        throw lab::invalid_argument(
            "this subcommand requires --spectral <dataset.jsonl>");
    return lab::load_spectral_dataset(g.spectral);
}

lab::QuadratureSpec quad_from(const std::map<std::string, double>& kv) {
    lab::QuadratureSpec q;
    q.abs_tol = cfg(kv, "quad.abs_tol", q.abs_tol);
    q.rel_tol = cfg(kv, "quad.rel_tol", q.rel_tol);
    if (!(q.abs_tol > 0.0) || !(q.rel_tol > 0.0))
        throw lab::invalid_argument("config: quadrature tolerances must be > 0");
    return q;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for spectral/divisor exponential sums"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--spectral", g.spectral, "Maass spectral dataset (jsonl)");
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--format", g.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", g.threads, "worker threads")
        ->check(CLI::Range(1, 256));
    app.add_option("--config", g.config, "key=value override file");

    // ---- subcommand parameter blocks -------------------------------------
    std::uint64_t sieve_limit = 1000000;
    std::string sieve_save;
    auto* c_sieve = app.add_subcommand("sieve", "build the divisor table");
    c_sieve->add_option("--limit", sieve_limit, "table limit");
    c_sieve->add_option("--save", sieve_save, "write binary cache");

    std::uint64_t ds_x = 0, ds_f = 1;
    std::string ds_table;
    auto* c_divsum =
        app.add_subcommand("divsum", "binary divisor sum d(m)d(m+f), m <= x");
    c_divsum->add_option("--x", ds_x, "range")->required();
    c_divsum->add_option("--f", ds_f, "shift");
    c_divsum->add_option("--table", ds_table, "load table cache instead of sieving");

    std::uint64_t kl_m = 1, kl_n = 1, kl_l = 1;
    auto* c_kl = app.add_subcommand("kloosterman", "Kloosterman sum S(m,n;l)");
    c_kl->add_option("--m", kl_m)->required();
    c_kl->add_option("--n", kl_n)->required();
    c_kl->add_option("--l", kl_l)->required();

    double z_t = 100.0;
    std::string z_cache;
    auto* c_zeta = app.add_subcommand("zeta", "zeta(1/2+it)");
    c_zeta->add_option("--t", z_t)->required();
    c_zeta->add_option("--append-cache", z_cache, "append sample to CSV cache");

    double m4_T = 100.0;
    auto* c_m4 = app.add_subcommand("moment4", "int_0^T |zeta(1/2+it)|^4 dt");
    c_m4->add_option("--T", m4_T)->required();

    double e2_T = 100.0;
    auto* c_e2 = app.add_subcommand("e2", "fourth-moment error term E2(T)");
    c_e2->add_option("--T", e2_T)->required();

    double sm_T = 100.0, sm_G = 5.0;
    auto* c_sm = app.add_subcommand("smoothed-moment",
                                    "Gaussian-smoothed fourth moment at T");
    c_sm->add_option("--T", sm_T)->required();
    c_sm->add_option("--G", sm_G)->required();

    long long hc_index = -1;
    auto* c_hc = app.add_subcommand("hecke-central",
                                    "H_j(1/2) over the dataset forms");
    c_hc->add_option("--index", hc_index, "single form index (default: all)");

    int ss_m = 1;
    double ss_K = 0.0, ss_K2 = 0.0, ss_t = 0.0;
    auto* c_ss = app.add_subcommand("specsum", "spectral sum S_m(K;K2,t)");
    c_ss->add_option("--m", ss_m)->required();
    c_ss->add_option("--K", ss_K)->required();
    c_ss->add_option("--K2", ss_K2)->required();
    c_ss->add_option("--t", ss_t)->required();

    double dv_K = 50.0, dv_T = 1.0e4;
    auto* c_dv = app.add_subcommand("divside", "divisor-side main term");
    c_dv->add_option("--K", dv_K)->required();
    c_dv->add_option("--T", dv_T)->required();

    long long tc_m = 1, tc_n = 1, tc_cap = 500;
    double tc_center = 0.0, tc_width = 6.0, tc_scale = 0.5;
    auto* c_tc = app.add_subcommand("trace-check",
                                    "two-sided trace formula report");
    c_tc->add_option("--m", tc_m)->required();
    c_tc->add_option("--n", tc_n)->required();
    c_tc->add_option("--ell-cap", tc_cap, "Kloosterman ell cap");
    c_tc->add_option("--center", tc_center, "Gaussian kernel center");
    c_tc->add_option("--width", tc_width, "Gaussian kernel width");
    c_tc->add_option("--scale", tc_scale, "kernel scale factor");

    double mc_T = 200.0, mc_G = 40.0;
    auto* c_mc = app.add_subcommand("moment-check",
                                    "smoothed moment vs spectral sine sum");
    c_mc->add_option("--T", mc_T)->required();
    c_mc->add_option("--G", mc_G)->required();

    int ms_m = 3;
    double ms_K = 0.0, ms_K2 = 0.0, ms_T = 0.0;
    bool ms_bump = false;
    auto* c_ms = app.add_subcommand("meansquare",
                                    "mean square of S_m over a t-window");
    c_ms->add_option("--m", ms_m)->required();
    c_ms->add_option("--K", ms_K)->required();
    c_ms->add_option("--K2", ms_K2)->required();
    c_ms->add_option("--T", ms_T)->required();
    c_ms->add_flag("--bump", ms_bump, "smooth-bump weighting");

    double sd_T = 1.0e4, sd_x = 200.0, sd_G = 5.0, sd_a = 0.0, sd_b = 0.0;
    auto* c_sd = app.add_subcommand("saddle",
                                    "stationary phase vs oscillatory quadrature");
    c_sd->add_option("--T", sd_T)->required();
    c_sd->add_option("--x", sd_x)->required();
    c_sd->add_option("--G", sd_G);
    c_sd->add_option("--a", sd_a, "left endpoint (default K1/5)");
    c_sd->add_option("--b", sd_b, "right endpoint (default 5 K1)");

    double ps_x = 2.0, ps_center = 0.0, ps_width = 2.0;
    std::string ps_kind = "plus";
    auto* c_ps = app.add_subcommand("psi", "Psi+ / Psi- kernel transform");
    c_ps->add_option("--x", ps_x)->required();
    c_ps->add_option("--kind", ps_kind)->check(CLI::IsMember({"plus", "minus"}));
    c_ps->add_option("--center", ps_center);
    c_ps->add_option("--width", ps_width);

    // Allow the global flags to appear after the subcommand name.
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n%s", e.what(), app.help().c_str());
        return 2;
    }

    try {
        const auto kv = load_config(g.config);
        const auto quad = quad_from(kv);

        if (*c_sieve) {
            const auto table = lab::build_divisor_table(sieve_limit);
            if (!sieve_save.empty()) lab::save_divisor_table(table, sieve_save);
            std::uint64_t sum = 0;
            for (std::uint64_t n = 1; n <= table.limit; ++n) sum += table.d[n];
            if (g.format == "json") {
                nlohmann::json j{{"limit", table.limit},
                                 {"sum_d", sum},
                                 {"hyperbola", lab::hyperbola_count(table.limit)}};
                emit(g, j.dump() + "\n");
            } else {
                emit(g, "limit,sum_d,hyperbola\n" + std::to_string(table.limit) +
                            "," + std::to_string(sum) + "," +
                            std::to_string(lab::hyperbola_count(table.limit)) +
                            "\n");
            }
        } else if (*c_divsum) {
            const auto table = ds_table.empty()
                                   ? lab::build_divisor_table(ds_x + ds_f)
                                   : lab::load_divisor_table(ds_table);
            const auto v = lab::binary_divisor_sum(table, ds_x, ds_f);
            if (g.format == "json")
                emit(g, "{\"value\":" + std::to_string(v) + "}\n");
            else
                emit(g, std::to_string(v) + "\n");
        } else if (*c_kl) {
            emit_scalar(g, lab::kloosterman(kl_m, kl_n, kl_l).value);
        } else if (*c_zeta) {
            const auto s = lab::zeta_critical(z_t);
            if (!z_cache.empty()) lab::append_zeta_samples_csv(z_cache, {s});
            if (g.format == "json") {
                nlohmann::json j{{"t", s.t},
                                 {"re", s.value.real()},
                                 {"im", s.value.imag()},
                                 {"err", s.err_bound}};
                emit(g, j.dump() + "\n");
            } else {
                emit(g, "t,re,im,err\n" + num(s.t) + "," + num(s.value.real()) +
                            "," + num(s.value.imag()) + "," + num(s.err_bound) +
                            "\n");
            }
        } else if (*c_m4) {
            emit_expsum(g, "moment4", "T=" + num(m4_T),
                        lab::fourth_moment(m4_T, quad));
        } else if (*c_e2) {
            auto coeffs = lab::MomentCoefficients::defaults();
            coeffs.a2 = cfg(kv, "moment.a2", coeffs.a2);
            coeffs.a1 = cfg(kv, "moment.a1", coeffs.a1);
            coeffs.a0 = cfg(kv, "moment.a0", coeffs.a0);
            emit_scalar(g, lab::e2(e2_T, coeffs, quad));
        } else if (*c_sm) {
            emit_scalar(g, lab::smoothed_fourth_moment(sm_T, sm_G, quad));
        } else if (*c_hc) {
            const auto ds = need_dataset(g);
            lab::WeightParams params;
            std::size_t lo = 0, hi = ds.forms.size();
            if (hc_index >= 0) {
                if (static_cast<std::size_t>(hc_index) >= ds.forms.size())
                    throw lab::invalid_argument("--index out of range");
                lo = hc_index;
                hi = hc_index + 1;
            }
            if (g.format == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (std::size_t i = lo; i < hi; ++i)
                    rows.push_back(
                        {{"kappa", ds.forms[i].kappa},
                         {"H", lab::hecke_central_value(ds.forms[i], params)}});
                emit(g, rows.dump() + "\n");
            } else {
                std::string s = "kappa,H\n";
                for (std::size_t i = lo; i < hi; ++i)
                    s += num(ds.forms[i].kappa) + "," +
                         num(lab::hecke_central_value(ds.forms[i], params)) +
                         "\n";
                emit(g, s);
            }
        } else if (*c_ss) {
            const auto ds = need_dataset(g);
            lab::WeightParams params;
            const auto r = lab::spectral_S_m(ds, ss_m, ss_K, ss_K2, ss_t, params);
            emit_expsum(g, "specsum",
                        "m=" + std::to_string(ss_m) + ";K=" + num(ss_K) +
                            ";K2=" + num(ss_K2) + ";t=" + num(ss_t),
                        r);
        } else if (*c_dv) {
            lab::Theorem1Consts consts;
            consts.C1 = cfg(kv, "theorem1.C1", consts.C1);
            consts.C2 = cfg(kv, "theorem1.C2", consts.C2);
            consts.c0 = cfg(kv, "theorem1.c0", consts.c0);
            if (!(dv_K > 0.0) || !(dv_T > 0.0))
                throw lab::invalid_argument("divside: requires K, T > 0");
            const auto fmax = static_cast<std::uint64_t>(3.0 * dv_K);
            const auto need = static_cast<std::uint64_t>(
                                  consts.C2 * dv_T * double(fmax) / dv_K) +
                              fmax + 2;
            const auto table = lab::build_divisor_table(need);
            const auto r =
                lab::divisor_side_main(dv_K, dv_T, consts, table, g.threads);
            emit_expsum(g, "divside", "K=" + num(dv_K) + ";T=" + num(dv_T), r);
        } else if (*c_tc) {
            const auto ds = need_dataset(g);
            lab::TraceCaps caps;
            caps.ell_cap =
                static_cast<long long>(cfg(kv, "trace.ell_cap", double(tc_cap)));
            caps.tail_tol = cfg(kv, "trace.tail_tol", caps.tail_tol);
            if (caps.ell_cap < 1 || !(caps.tail_tol > 0.0))
                throw lab::invalid_argument("trace-check: bad caps");
            const auto kernel = lab::scale_kernel(
                lab::gaussian_kernel(tc_center, tc_width), tc_scale);
            const auto rep =
                lab::kuznetsov_check(ds, tc_m, tc_n, kernel, caps, quad);
            if (g.format == "json") {
                emit(g, rep.to_json() + "\n");
            } else {
                emit(g,
                     "m,n,discrete,continuous,delta,kloosterman,lhs,rhs,"
                     "residual,ell_tail\n" +
                         std::to_string(rep.m) + "," + std::to_string(rep.n) +
                         "," + num(rep.discrete) + "," + num(rep.continuous) +
                         "," + num(rep.delta_term) + "," +
                         num(rep.kloosterman_sum) + "," + num(rep.lhs) + "," +
                         num(rep.rhs) + "," + num(rep.residual) + "," +
                         num(rep.truncation.ell_tail_bound) + "\n");
            }
        } else if (*c_mc) {
            const auto ds = need_dataset(g);
            const auto rep = lab::moment_check(ds, mc_T, mc_G, quad);
            if (g.format == "json") {
                emit(g, rep.to_json() + "\n");
            } else {
                emit(g, "lhs,rhs,difference,envelope,verdict\n" + num(rep.lhs) +
                            "," + num(rep.rhs) + "," + num(rep.difference) +
                            "," + num(rep.envelope) + "," +
                            lab::verdict_name(rep.verdict) + "\n");
            }
        } else if (*c_ms) {
            const auto ds = need_dataset(g);
            const auto r =
                lab::mean_square_S(ds, ms_m, ms_K, ms_K2, ms_T, quad, ms_bump);
            emit_expsum(g, "meansquare",
                        "m=" + std::to_string(ms_m) + ";K=" + num(ms_K) +
                            ";K2=" + num(ms_K2) + ";T=" + num(ms_T) +
                            ";bump=" + (ms_bump ? "1" : "0"),
                        r);
        } else if (*c_sd) {
            const auto ph = lab::theorem1_phase(sd_T, sd_x, sd_G);
            const double K1 = 4.0 * sd_T /
                              std::pow(std::sqrt(sd_x) + std::sqrt(1.0 + sd_x), 2);
            const double a = sd_a != 0.0 ? sd_a : K1 / 5.0;
            const double b = sd_b != 0.0 ? sd_b : 5.0 * K1;
            const auto sp = lab::saddle_eval(ph, a, b);
            const auto oq = lab::oscillatory_quad(ph, a, b, quad);
            const double rel = std::abs(sp - oq) / std::abs(oq);
            if (g.format == "json") {
                nlohmann::json j{{"K1", K1},
                                 {"f_K1", lab::phase_f(ph, K1)},
                                 {"saddle_re", sp.real()},
                                 {"saddle_im", sp.imag()},
                                 {"quad_re", oq.real()},
                                 {"quad_im", oq.imag()},
                                 {"rel_err", rel}};
                emit(g, j.dump() + "\n");
            } else {
                emit(g, "K1,f_K1,saddle_re,saddle_im,quad_re,quad_im,rel_err\n" +
                            num(K1) + "," + num(lab::phase_f(ph, K1)) + "," +
                            num(sp.real()) + "," + num(sp.imag()) + "," +
                            num(oq.real()) + "," + num(oq.imag()) + "," +
                            num(rel) + "\n");
            }
        } else if (*c_ps) {
            const auto kernel = lab::gaussian_kernel(ps_center, ps_width);
            const lab::cplx v = ps_kind == "plus"
                                    ? lab::psi_plus(ps_x, kernel, quad)
                                    : lab::psi_minus(ps_x, kernel, quad);
            if (g.format == "json") {
                nlohmann::json j{{"x", ps_x},
                                 {"kind", ps_kind},
                                 {"re", v.real()},
                                 {"im", v.imag()}};
                emit(g, j.dump() + "\n");
            } else {
                emit(g, "x,kind,re,im\n" + num(ps_x) + "," + ps_kind + "," +
                            num(v.real()) + "," + num(v.imag()) + "\n");
            }
        }
        return 0;
    } catch (const lab::numeric_failure& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const lab::resource_limit& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 4;
    } catch (const lab::format_error& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return 5;
    } catch (const lab::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 2;
    } catch (const lab::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 2;
    } catch (const lab::validation_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
