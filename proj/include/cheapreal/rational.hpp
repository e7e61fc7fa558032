/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cheapreal {

/// Arbitrary-precision integer and rational, always canonical
/// (lowest terms, positive denominator).
using Int = mpz_class;
using Rat = mpq_class;

/// Evaluation ranks are unbounded: shift witnesses routinely push the
/// rank to 2^n and beyond, so the rank parameter is an Int, not a
/// machine word. Budgets and windows stay machine-sized.
using Budget = std::uint64_t;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct totality_error : error {
    using error::error;
};
struct sort_error : error {
    using error::error;
};
struct parse_error : error {
    parse_error(const std::string& what, std::size_t position)
        : error(what + " (at position " + std::to_string(position) + ")"), pos(position) {}
    std::size_t pos;
};
struct domain_error : error {
    using error::error;
};
struct solver_error : error {
    using error::error;
};
struct serialize_error : error {
    using error::error;
};
struct mu_cap_error : error {
    using error::error;
};

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw totality_error("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(long num, long den = 1) { return make_rat(Int(num), Int(den)); }

inline bool is_integral(const Rat& q) { return q.get_den() == 1; }

inline bool is_natural(const Rat& q) { return is_integral(q) && q.get_num() >= 0; }

inline Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int rat_ceil(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// Nearest integer to a/b (b > 0), ties toward the even integer.
inline Int round_ties_even(const Int& a, const Int& b) {
    Int f, r;
    mpz_fdiv_qr(f.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int twice = 2 * r;
    int cmp = mpz_cmp(twice.get_mpz_t(), b.get_mpz_t());
    if (cmp < 0) return f;
    if (cmp > 0) return f + 1;
    return mpz_even_p(f.get_mpz_t()) ? f : f + 1;
}

inline Int round_ties_even(const Rat& q) { return round_ties_even(Int(q.get_num()), Int(q.get_den())); }

inline Rat pow_rat(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    // base canonical => base^e canonical, no gcd pass needed
    return r;
}

inline Int pow2(unsigned long e) {
    Int r = 1;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e);
    return r;
}

/// 2^-e as an exact rational.
inline Rat pow2_neg(unsigned long e) { return make_rat(Int(1), pow2(e)); }

/// Least m with 2^m >= q, for q > 0.
inline long ceil_log2(const Rat& q) {
    if (q <= 0) throw error("ceil_log2 of non-positive value");
    long m = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
    auto ge = [&](long e) {  // 2^e >= q
        if (e >= 0) return Rat(pow2(static_cast<unsigned long>(e))) >= q;
        return Rat(1) >= q * Rat(pow2(static_cast<unsigned long>(-e)));
    };
    while (!ge(m)) ++m;
    while (ge(m - 1)) --m;
    return m;
}

/// Greatest m with 2^m <= q, for q > 0.
inline long floor_log2(const Rat& q) {
    long m = ceil_log2(q);
    auto eq = [&](long e) {
        if (e >= 0) return q == Rat(pow2(static_cast<unsigned long>(e)));
        return q * Rat(pow2(static_cast<unsigned long>(-e))) == 1;
    };
    return eq(m) ? m : m - 1;
}

/// Renders "p/q", or just "p" for integers.
inline std::string rat_to_string(const Rat& q) {
    std::string s = q.get_num().get_str();
    if (!is_integral(q)) {
        s += "/";
        s += q.get_den().get_str();
    }
    return s;
}

inline Rat rat_from_string(const std::string& s) {
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0) throw error("bad rational literal: " + s);
    q.canonicalize();
    if (q.get_den() <= 0) throw error("bad rational literal: " + s);
    return q;
}

inline Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace cheapreal
