#include "lab/arithmetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "lab/accum.hpp"
#include "lab/errors.hpp"

namespace lab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Little-endian scalar I/O for the cache file.
void put_u64le(std::FILE* fp, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    std::fwrite(b, 1, 8, fp);
}

bool get_u64le(std::FILE* fp, std::uint64_t& v) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, fp) != 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
}

} // namespace

DivisorTable build_divisor_table(std::uint64_t limit) {
    if (limit == 0) throw invalid_argument("build_divisor_table: limit must be >= 1");
    if (limit > kDivisorTableMaxLimit)
        throw resource_limit("build_divisor_table: limit " + std::to_string(limit) +
                             " exceeds budget " + std::to_string(kDivisorTableMaxLimit));

    DivisorTable t;
    t.limit = limit;
    t.d.assign(limit + 1, 0);
    t.spf.assign(limit + 1, 0);
    t.d[1] = 1;
    if (limit == 1) return t;

    // Linear sieve: cnt[n] = exponent of spf[n] in n, driving the divisor
    // count through d(n * p) = d(n)/(cnt+1)*(cnt+2) when p | n.
    std::vector<std::uint8_t> cnt(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    primes.reserve(static_cast<std::size_t>(
        limit > 16 ? 1.3 * double(limit) / std::log(double(limit)) : 8));
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf[i] == 0) {
            t.spf[i] = static_cast<std::uint32_t>(i);
            t.d[i] = 2;
            cnt[i] = 1;
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            if (p > t.spf[i]) break;
            const std::uint64_t ip = i * p;
            if (ip > limit) break;
            t.spf[ip] = p;
            if (p == t.spf[i]) {
                cnt[ip] = static_cast<std::uint8_t>(cnt[i] + 1);
                t.d[ip] = t.d[i] / (cnt[i] + 1u) * (cnt[i] + 2u);
                break;
            }
            cnt[ip] = 1;
            t.d[ip] = t.d[i] * 2u;
        }
    }
    return t;
}

std::uint32_t divisor_count(const DivisorTable& table, std::uint64_t n) {
    if (n == 0) throw invalid_argument("divisor_count: n must be >= 1");
    if (n > table.limit)
        throw resource_limit("divisor_count: n " + std::to_string(n) +
                             " exceeds table limit " + std::to_string(table.limit) +
                             "; required limit " + std::to_string(n));
    return table.d[n];
}

std::complex<double> sigma_power(const DivisorTable& table, std::uint64_t n,
                                 std::complex<double> a) {
    if (n == 0) throw invalid_argument("sigma_power: n must be >= 1");
    if (n > table.limit)
        throw resource_limit("sigma_power: n exceeds table limit; required limit " +
                             std::to_string(n));
    std::complex<double> result(1.0, 0.0);
    std::uint64_t rest = n;
    while (rest > 1) {
        const std::uint64_t p = table.spf[rest];
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        // sum_{j=0}^{e} p^{ja}; e <= 60, so the explicit sum is cheap and
        // avoids the geometric closed form's p^a ~ 1 instability.
        const std::complex<double> alogp = a * std::log(static_cast<double>(p));
        std::complex<double> factor(0.0, 0.0);
        for (int j = 0; j <= e; ++j)
            factor += std::exp(static_cast<double>(j) * alogp);
        result *= factor;
    }
    return result;
}

KloostermanValue kloosterman(std::uint64_t m, std::uint64_t n, std::uint64_t ell) {
    if (m == 0 || n == 0 || ell == 0)
        throw invalid_argument("kloosterman: m, n, l must be >= 1");
    // Canonical order makes S(m,n;l) = S(n,m;l) hold exactly, not just up to
    // floating-point reassociation (d <-> dbar is a bijection on units).
    KloostermanValue out;
    out.m = m;
    out.n = n;
    out.ell = ell;
    if (m > n) std::swap(m, n);
    const std::uint64_t mr = m % ell, nr = n % ell;

    Kahan re, im;
    for (std::uint64_t d = 1; d <= ell; ++d) {
        if (std::gcd(d, ell) != 1) continue;
        // Extended Euclid for the inverse of d mod ell.
        std::int64_t r0 = static_cast<std::int64_t>(ell), r1 = static_cast<std::int64_t>(d);
        std::int64_t s0 = 0, s1 = 1;
        while (r1 != 0) {
            const std::int64_t q = r0 / r1;
            std::int64_t tmp = r0 - q * r1; r0 = r1; r1 = tmp;
            tmp = s0 - q * s1; s0 = s1; s1 = tmp;
        }
        std::uint64_t dinv = static_cast<std::uint64_t>(
            s0 >= 0 ? s0 : s0 + static_cast<std::int64_t>(ell));
        const std::uint64_t num =
            (static_cast<std::uint64_t>((static_cast<unsigned __int128>(mr) * d +
                                         static_cast<unsigned __int128>(nr) * dinv) %
                                        ell));
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(ell);
        re.add(std::cos(angle));
        im.add(std::sin(angle));
    }
    out.value = re.value();
    out.imag_residue = std::abs(im.value());
    return out;
}

std::uint64_t binary_divisor_sum(const DivisorTable& table, std::uint64_t x,
                                 std::uint64_t f) {
    if (f == 0) throw invalid_argument("binary_divisor_sum: f must be >= 1");
    if (x == 0) return 0;
    if (x + f > table.limit)
        throw resource_limit("binary_divisor_sum: table covers " +
                             std::to_string(table.limit) + ", required limit " +
                             std::to_string(x + f));
    std::uint64_t sum = 0;
    for (std::uint64_t m = 1; m <= x; ++m)
        sum += static_cast<std::uint64_t>(table.d[m]) * table.d[m + f];
    return sum;
}

double dirichlet_residual(const DivisorTable& table, std::uint64_t x) {
    if (x == 0) throw invalid_argument("dirichlet_residual: x must be >= 1");
    if (x > table.limit)
        throw resource_limit("dirichlet_residual: required limit " + std::to_string(x));
    std::uint64_t sum = 0;
    for (std::uint64_t n = 1; n <= x; ++n) sum += table.d[n];
    const double xd = static_cast<double>(x);
    return static_cast<double>(sum) - xd * std::log(xd) - (2.0 * kEulerGamma - 1.0) * xd;
}

std::uint64_t hyperbola_count(std::uint64_t x) {
    std::uint64_t sum = 0;
    for (std::uint64_t k = 1; k <= x; ++k) sum += x / k;
    return sum;
}

void save_divisor_table(const DivisorTable& table, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw format_error("save_divisor_table: cannot open " + path);
    std::fwrite("DIVTBL01", 1, 8, fp);
    put_u64le(fp, table.limit);
    for (std::uint64_t n = 1; n <= table.limit; ++n) {
        const std::uint32_t v = table.d[n];
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        std::fwrite(b, 1, 4, fp);
    }
    if (std::fclose(fp) != 0) throw format_error("save_divisor_table: write failed");
}

DivisorTable load_divisor_table(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw format_error("load_divisor_table: cannot open " + path);
    char magic[8];
    if (std::fread(magic, 1, 8, fp) != 8 || std::string(magic, 8) != "DIVTBL01") {
        std::fclose(fp);
        throw format_error("load_divisor_table: bad magic, expected DIVTBL01");
    }
    std::uint64_t limit = 0;
    if (!get_u64le(fp, limit) || limit == 0 || limit > kDivisorTableMaxLimit) {
        std::fclose(fp);
        throw format_error("load_divisor_table: invalid limit field");
    }
    // Rebuild spf (not stored) with the sieve, then overwrite d from the file.
    DivisorTable t = build_divisor_table(limit);
    for (std::uint64_t n = 1; n <= limit; ++n) {
        unsigned char b[4];
        if (std::fread(b, 1, 4, fp) != 4) {
            std::fclose(fp);
            throw format_error("load_divisor_table: truncated at entry " +
                               std::to_string(n));
        }
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        t.d[n] = v;
    }
    std::fclose(fp);
    return t;
}

} // namespace lab
