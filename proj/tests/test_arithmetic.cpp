//
// Arithmetic module tests.  Oracles: hand-enumerated divisor sums, direct
// Kloosterman enumeration at small moduli, and brute-force loops with a fixed
// RNG seed for the property checks.
//
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lab/arithmetic.hpp"
#include "lab/errors.hpp"

using lab::DivisorTable;

namespace {

// Independent oracle: d(n) by trial division.
std::uint32_t d_oracle(std::uint64_t n) {
    std::uint32_t c = 0;
    for (std::uint64_t k = 1; k * k <= n; ++k)
        if (n % k == 0) c += (k * k == n) ? 1 : 2;
    return c;
}

const DivisorTable& table_1e4() {
    static const DivisorTable t = lab::build_divisor_table(10000);
    return t;
}

} // namespace

TEST_SUITE_BEGIN("arithmetic");

TEST_CASE("divisor table spot values and invariants") {
    const auto& t = table_1e4();
    CHECK(lab::divisor_count(t, 1) == 1);
    CHECK(lab::divisor_count(t, 12) == 6);
    CHECK(lab::divisor_count(t, 9973) == 2); // prime
    std::uint64_t s100 = 0;
    for (int n = 1; n <= 100; ++n) s100 += t.d[n];
    CHECK(s100 == 482);
    CHECK(s100 == lab::hyperbola_count(100));

    // d(p) = 2 for every prime (spf[p] == p).
    for (std::uint64_t p = 2; p <= 1000; ++p)
        if (t.spf[p] == p) CHECK(t.d[p] == 2);

    for (std::uint64_t n = 1; n <= 500; ++n) CHECK(t.d[n] == d_oracle(n));
}

TEST_CASE("hyperbola identity on random x") {
    const auto& t = table_1e4();
    std::mt19937 rng(12345);
    std::uniform_int_distribution<std::uint64_t> dist(1, t.limit);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t x = dist(rng);
        std::uint64_t lhs = 0;
        for (std::uint64_t n = 1; n <= x; ++n) lhs += t.d[n];
        CHECK(lhs == lab::hyperbola_count(x));
    }
}

TEST_CASE("multiplicativity of d and sigma_a on random coprime pairs") {
    const auto& t = table_1e4();
    std::mt19937 rng(777);
    std::uniform_int_distribution<std::uint64_t> dist(1, 99);
    const std::complex<double> a(0.0, 1.7);
    int done = 0;
    while (done < 1000) {
        const std::uint64_t m = dist(rng), n = dist(rng);
        if (std::gcd(m, n) != 1 || m * n > t.limit) continue;
        ++done;
        CHECK(t.d[m * n] == t.d[m] * t.d[n]);
        const auto lhs = lab::sigma_power(t, m * n, a);
        const auto rhs = lab::sigma_power(t, m, a) * lab::sigma_power(t, n, a);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("sigma_power spot values and reflection") {
    const auto& t = table_1e4();
    CHECK(std::abs(lab::sigma_power(t, 6, {-1.0, 0.0}) - 2.0) < 1e-14);
    CHECK(std::abs(lab::sigma_power(t, 1, {0.0, 2.0 * 3.7}) - 1.0) == 0.0);
    CHECK(std::abs(lab::sigma_power(t, 12, {0.0, 0.0}).real() - 6.0) < 1e-14);

    // sigma_{2ir}(n) n^{-2ir} = sigma_{-2ir}(n)
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::uint64_t> ndist(1, 5000);
    std::uniform_real_distribution<double> rdist(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t n = ndist(rng);
        const double r = rdist(rng);
        const std::complex<double> tw(0.0, 2.0 * r);
        const auto lhs = lab::sigma_power(t, n, tw) *
                         std::exp(-tw * std::log(double(n)));
        const auto rhs = lab::sigma_power(t, n, -tw);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
        // |sigma_{2ir}(n)| <= d(n)
        CHECK(std::abs(lab::sigma_power(t, n, tw)) <= t.d[n] + 1e-9);
    }
}

TEST_CASE("kloosterman spot values, symmetry, Weil bound") {
    CHECK(lab::kloosterman(1, 1, 1).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lab::kloosterman(1, 1, 3).value == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(lab::kloosterman(1, 1, 4).value == doctest::Approx(-2.0).epsilon(1e-9));

    const auto big = lab::build_divisor_table(500);
    for (std::uint64_t m = 1; m <= 20; ++m)
        for (std::uint64_t n = m; n <= 20; ++n)
            for (std::uint64_t ell = 1; ell <= 500; ell += 7) {
                const auto s = lab::kloosterman(m, n, ell);
                CHECK(s.imag_residue <= 1e-9);
                const double bound = std::sqrt(double(std::gcd(std::gcd(m, n), ell))) *
                                     big.d[ell] * std::sqrt(double(ell));
                CHECK(std::abs(s.value) <= bound + 1e-9);
                // Exact symmetry by construction.
                CHECK(s.value == lab::kloosterman(n, m, ell).value);
            }
}

TEST_CASE("kloosterman multiplicativity (Chinese remainder twist)") {
    // For coprime A, B: S(m,n;AB) = S(m*Bbar, n*Bbar; A) * S(m*Abar, n*Abar; B)
    // with Bbar the inverse of B mod A and Abar the inverse of A mod B
    // (from 1/(AB) = Bbar/A + Abar/B mod 1).
    std::mt19937 rng(31415);
    std::uniform_int_distribution<std::uint64_t> mdist(1, 12);
    const std::uint64_t l1s[] = {3, 4, 5, 7, 9, 11};
    const std::uint64_t l2s[] = {8, 13, 25, 27, 49};
    int done = 0;
    for (std::uint64_t l1 : l1s)
        for (std::uint64_t l2 : l2s) {
            if (std::gcd(l1, l2) != 1) continue;
            const std::uint64_t m = mdist(rng), n = mdist(rng);
            const auto whole = lab::kloosterman(m, n, l1 * l2);
            auto invmod = [](std::uint64_t a, std::uint64_t mod) {
                std::int64_t r0 = std::int64_t(mod), r1 = std::int64_t(a % mod);
                std::int64_t s0 = 0, s1 = 1;
                while (r1 != 0) {
                    std::int64_t q = r0 / r1, t2;
                    t2 = r0 - q * r1; r0 = r1; r1 = t2;
                    t2 = s0 - q * s1; s0 = s1; s1 = t2;
                }
                return std::uint64_t(s0 >= 0 ? s0 : s0 + std::int64_t(mod));
            };
            const std::uint64_t b1 = invmod(l2, l1), b2 = invmod(l1, l2);
            const auto part1 = lab::kloosterman(std::max<std::uint64_t>(1, (m * b1) % l1 == 0 ? l1 : (m * b1) % l1),
                                                std::max<std::uint64_t>(1, (n * b1) % l1 == 0 ? l1 : (n * b1) % l1), l1);
            const auto part2 = lab::kloosterman(std::max<std::uint64_t>(1, (m * b2) % l2 == 0 ? l2 : (m * b2) % l2),
                                                std::max<std::uint64_t>(1, (n * b2) % l2 == 0 ? l2 : (n * b2) % l2), l2);
            CHECK(whole.value ==
                  doctest::Approx(part1.value * part2.value).epsilon(1e-8));
            ++done;
        }
    CHECK(done >= 25);
}

TEST_CASE("binary divisor sum vs brute force") {
    const auto& t = table_1e4();
    CHECK(lab::binary_divisor_sum(t, 0, 1) == 0);
    CHECK(lab::binary_divisor_sum(t, 4, 1) == 18);
    // Direct loop oracle.
    std::uint64_t oracle = 0;
    for (std::uint64_t m = 1; m <= 10; ++m) oracle += d_oracle(m) * d_oracle(m + 2);
    CHECK(lab::binary_divisor_sum(t, 10, 2) == oracle);
    CHECK_THROWS_AS(lab::binary_divisor_sum(t, t.limit, 5), lab::resource_limit);
}

TEST_CASE("dirichlet residual") {
    const auto& t = table_1e4();
    CHECK(lab::dirichlet_residual(t, 1) == doctest::Approx(0.84557).epsilon(1e-4));
    CHECK(lab::dirichlet_residual(t, 100) == doctest::Approx(6.04).epsilon(1e-2));
    for (std::uint64_t x = 1000; x <= 10000; x += 1000)
        CHECK(std::abs(lab::dirichlet_residual(t, x)) / std::sqrt(double(x)) < 10.0);
}

TEST_CASE("divisor table cache roundtrip") {
    const auto t = lab::build_divisor_table(1000);
    const std::string path = "divtbl_test.bin";
    lab::save_divisor_table(t, path);
    const auto back = lab::load_divisor_table(path);
    CHECK(back.limit == t.limit);
    CHECK(back.d == t.d);
    CHECK(back.spf == t.spf);

    // Corrupt magic -> format_error naming the expected magic.
    {
        std::FILE* fp = std::fopen(path.c_str(), "r+b");
        REQUIRE(fp);
        std::fwrite("BADMAGIC", 1, 8, fp);
        std::fclose(fp);
        CHECK_THROWS_WITH_AS(lab::load_divisor_table(path),
                             doctest::Contains("DIVTBL01"), lab::format_error);
    }
    // Truncated file -> format_error.
    lab::save_divisor_table(t, path);
    {
        std::FILE* fp = std::fopen(path.c_str(), "rb");
        REQUIRE(fp);
        std::fseek(fp, 0, SEEK_END);
        const long full = std::ftell(fp);
        std::fclose(fp);
        std::vector<char> buf(static_cast<std::size_t>(full - 10));
        fp = std::fopen(path.c_str(), "rb");
        REQUIRE(std::fread(buf.data(), 1, buf.size(), fp) == buf.size());
        std::fclose(fp);
        fp = std::fopen(path.c_str(), "wb");
        std::fwrite(buf.data(), 1, buf.size(), fp);
        std::fclose(fp);
        CHECK_THROWS_AS(lab::load_divisor_table(path), lab::format_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("error taxonomy") {
    CHECK_THROWS_AS(lab::build_divisor_table(0), lab::invalid_argument);
    CHECK_THROWS_AS(lab::build_divisor_table(lab::kDivisorTableMaxLimit + 1),
                    lab::resource_limit);
    CHECK_THROWS_AS(lab::kloosterman(0, 1, 3), lab::invalid_argument);
}

TEST_SUITE_END();
