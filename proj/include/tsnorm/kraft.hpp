#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tsnorm/error.hpp"

namespace tsnorm {

/// Exact accumulator for sums of r^(-j), j >= 0, kept as normalized base-r
/// digits. digits[0] counts whole units; digits[j] < r for j >= 1. Comparisons
/// against 1 and against r^(-k) are exact at any depth, with no big integers.
class KraftSum {
public:
    explicit KraftSum(int r);

    void add(long long level, long long count = 1);

    /// -1 / 0 / +1 according to sum <, ==, > 1.
    int compare_one() const;
    bool exceeds_one() const { return compare_one() > 0; }
    bool equals_one() const { return compare_one() == 0; }

    /// True iff the sum equals r^(-k) exactly.
    bool equals_power(long long k) const;

    /// Base-r digits of 1 - sum as (level, count) pairs with counts in [1, r-1];
    /// requires sum <= 1. An empty result means the sum is exactly 1.
    std::vector<std::pair<long long, long long>> residual_digits() const;

private:
    int r_;
    std::vector<long long> digits_; // digits_[j] multiplies r^(-j)

    void carry_up(std::size_t j);
};

/// Exact value sum_i c_i * r^(-e_i) with integer coefficients c_i and integer
/// exponents e_i of either sign. Supports exact comparison via guarded
/// 128-bit evaluation; throws Error("exact_overflow") when the exponent span
/// is too wide to compare exactly.
class PowerSum {
public:
    explicit PowerSum(long long r) : r_(r) {}

    static PowerSum zero(long long r) { return PowerSum(r); }
    static PowerSum one(long long r);
    static PowerSum r_pow(long long r, long long e); // r^(-e)

    long long r() const { return r_; }
    void add_term(long long e, long long c);
    PowerSum& operator+=(const PowerSum& other);
    /// Multiplies by r^k (exponents shift down by k).
    void scale_pow(long long k);

    /// Exact sign of (*this - other): -1, 0, +1.
    int compare(const PowerSum& other) const;
    double to_double() const;

    const std::map<long long, long long>& terms() const { return terms_; }

private:
    long long r_;
    std::map<long long, long long> terms_; // exponent -> coefficient, no zeros
};

} // namespace tsnorm
