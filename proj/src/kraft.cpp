#include "tsnorm/kraft.hpp"

#include <cmath>
#include <string>

namespace tsnorm {

KraftSum::KraftSum(int r) : r_(r), digits_(1, 0) {
    if (r < 2) fail("bad_params", "KraftSum requires r >= 2");
}

void KraftSum::carry_up(std::size_t j) {
    while (j >= 1 && digits_[j] >= r_) {
        digits_[j - 1] += digits_[j] / r_;
        digits_[j] %= r_;
        --j;
    }
}

void KraftSum::add(long long level, long long count) {
    if (level < 0) fail("bad_level", "Kraft levels must be >= 0");
    if (count <= 0) fail("bad_level", "Kraft counts must be positive");
    if (level > 4000000) fail("bad_level", "Kraft level out of range");
    if (digits_.size() <= static_cast<std::size_t>(level))
        digits_.resize(static_cast<std::size_t>(level) + 1, 0);
    digits_[static_cast<std::size_t>(level)] += count;
    carry_up(static_cast<std::size_t>(level));
}

int KraftSum::compare_one() const {
    // Digits are normalized: fractional digits are < r, so their tail is < 1.
    long long units = digits_[0];
    if (units > 1) return 1;
    bool frac = false;
    for (std::size_t j = 1; j < digits_.size(); ++j)
        if (digits_[j] > 0) { frac = true; break; }
    if (units == 1) return frac ? 1 : 0;
    return -1;
}

bool KraftSum::equals_power(long long k) const {
    if (k < 0) return false;
    for (std::size_t j = 0; j < digits_.size(); ++j) {
        long long want = (static_cast<long long>(j) == k) ? 1 : 0;
        if (digits_[j] != want) return false;
    }
    return static_cast<std::size_t>(k) < digits_.size();
}

std::vector<std::pair<long long, long long>> KraftSum::residual_digits() const {
    int cmp = compare_one();
    if (cmp > 0) fail("bad_level", "residual of a sum exceeding 1");
    std::vector<std::pair<long long, long long>> out;
    if (cmp == 0) return out;
    if (digits_[0] != 0) fail("bad_level", "unexpected unit digit");

    long long top = -1;
    for (std::size_t j = digits_.size(); j-- > 1;)
        if (digits_[j] > 0) { top = static_cast<long long>(j); break; }
    if (top < 0) {
        out.emplace_back(0, 1); // empty sum: residual is a full unit
        return out;
    }
    // 1 - 0.d1 d2 ... dL (base r) = digits (r-1-d_j) for j < L and (r - d_L) at L.
    for (long long j = 1; j < top; ++j) {
        long long e = (r_ - 1) - digits_[static_cast<std::size_t>(j)];
        if (e > 0) out.emplace_back(j, e);
    }
    out.emplace_back(top, r_ - digits_[static_cast<std::size_t>(top)]);
    return out;
}

PowerSum PowerSum::one(long long r) {
    PowerSum v(r);
    v.add_term(0, 1);
    return v;
}

PowerSum PowerSum::r_pow(long long r, long long e) {
    PowerSum v(r);
    v.add_term(e, 1);
    return v;
}

void PowerSum::add_term(long long e, long long c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_[e] = c;
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

PowerSum& PowerSum::operator+=(const PowerSum& other) {
    if (other.r_ != r_) fail("bad_params", "PowerSum base mismatch");
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

void PowerSum::scale_pow(long long k) {
    std::map<long long, long long> shifted;
    for (const auto& [e, c] : terms_) shifted[e - k] = c;
    terms_ = std::move(shifted);
}

namespace {

// Checked *r^gap then +c in 128-bit arithmetic.
__int128 horner_step(__int128 acc, long long r, long long gap, long long c) {
    const __int128 limit = (static_cast<__int128>(1)) << 120;
    for (long long g = 0; g < gap; ++g) {
        if (acc > limit / r || acc < -(limit / r))
            fail("exact_overflow", "exponent span too wide for exact comparison");
        acc *= r;
    }
    return acc + c;
}

} // namespace

int PowerSum::compare(const PowerSum& other) const {
    if (other.r_ != r_) fail("bad_params", "PowerSum base mismatch");
    std::map<long long, long long> diff = terms_;
    for (const auto& [e, c] : other.terms_) {
        diff[e] -= c;
        if (diff[e] == 0) diff.erase(e);
    }
    if (diff.empty()) return 0;
    // Evaluate sum c_e * r^(E - e) for E = deepest exponent, by Horner over
    // ascending exponents (largest power first).
    __int128 acc = 0;
    long long prev = diff.begin()->first;
    for (const auto& [e, c] : diff) {
        acc = horner_step(acc, r_, e - prev, c);
        prev = e;
    }
    return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

double PowerSum::to_double() const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_)
        acc += static_cast<double>(c) * std::pow(static_cast<double>(r_),
                                                 -static_cast<double>(e));
    return acc;
}

} // namespace tsnorm
