#pragma once
//
// Exact integer arithmetic: divisor counts d(n) from a smallest-prime-factor
// linear sieve, generalized divisor sums sigma_a(n) with complex exponent,
// Kloosterman sums S(m,n;l), binary additive divisor correlations
// sum_{m<=x} d(m)d(m+f), and the Dirichlet residual diagnostic.
//
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace lab {

struct DivisorTable {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> d;   // d[n] for 1 <= n <= limit; d[0] unused
    std::vector<std::uint32_t> spf; // smallest prime factor; spf[0..1] = 0
};

struct KloostermanValue {
    std::uint64_t m = 0, n = 0, ell = 0;
    double value = 0.0;
    double imag_residue = 0.0; // |imaginary part| of the accumulated sum
};

// Memory budget: d + spf + sieve scratch is ~9 bytes per entry.
inline constexpr std::uint64_t kDivisorTableMaxLimit = 50000000;

DivisorTable build_divisor_table(std::uint64_t limit);
std::uint32_t divisor_count(const DivisorTable& table, std::uint64_t n);
std::complex<double> sigma_power(const DivisorTable& table, std::uint64_t n,
                                 std::complex<double> a);
KloostermanValue kloosterman(std::uint64_t m, std::uint64_t n, std::uint64_t ell);
std::uint64_t binary_divisor_sum(const DivisorTable& table, std::uint64_t x,
                                 std::uint64_t f);
double dirichlet_residual(const DivisorTable& table, std::uint64_t x);
// Right side of the hyperbola identity, sum_{k<=x} floor(x/k).
std::uint64_t hyperbola_count(std::uint64_t x);

// Flat binary cache: 8-byte magic "DIVTBL01", 8-byte little-endian limit,
// then limit little-endian 32-bit d-values.  spf is recomputed on load.
void save_divisor_table(const DivisorTable& table, const std::string& path);
DivisorTable load_divisor_table(const std::string& path);

} // namespace lab
