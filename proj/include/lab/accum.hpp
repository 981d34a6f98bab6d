#pragma once
//
// Compensated (error-free-transformation) accumulation and a deterministic
// block-wise parallel reduction.  Every big sum in the library goes through
// these so that results are reproducible bit-for-bit regardless of the
// thread count: terms are summed per fixed-size block in index order, and
// the per-block partial sums are combined in ascending block order.
//
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

namespace lab {

// Neumaier variant of Kahan summation.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct KahanC {
    Kahan re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

// Deterministic ordered reduction of term(i) for i in [lo, hi).
// The partition into blocks and the order of the final combine are fixed;
// only the assignment of blocks to threads varies, which cannot change the
// result.  term must be pure.
template <class Term>
std::complex<double> block_sum(std::uint64_t lo, std::uint64_t hi, Term&& term,
                               int threads = 1, std::uint64_t block = 4096) {
    if (hi <= lo) return {0.0, 0.0};
    const std::uint64_t n = hi - lo;
    const std::uint64_t nblocks = (n + block - 1) / block;
    std::vector<std::complex<double>> partial(nblocks);

    auto do_block = [&](std::uint64_t b) {
        KahanC acc;
        const std::uint64_t b_lo = lo + b * block;
        const std::uint64_t b_hi = std::min(hi, b_lo + block);
        for (std::uint64_t i = b_lo; i < b_hi; ++i) acc.add(term(i));
        partial[b] = acc.value();
    };

    int nt = threads;
    if (nt < 1) nt = 1;
    if (static_cast<std::uint64_t>(nt) > nblocks) nt = static_cast<int>(nblocks);
    if (nt == 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) do_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nt));
        for (int t = 0; t < nt; ++t) {
            pool.emplace_back([&, t]() {
                for (std::uint64_t b = static_cast<std::uint64_t>(t); b < nblocks;
                     b += static_cast<std::uint64_t>(nt))
                    do_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    KahanC total;
    for (std::uint64_t b = 0; b < nblocks; ++b) total.add(partial[b]);
    return total.value();
}

} // namespace lab
