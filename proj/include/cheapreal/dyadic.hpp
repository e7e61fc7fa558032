/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/rational.hpp"

namespace cheapreal {

/// A rational with finite binary representation: mantissa * 2^exponent.
/// Canonical form keeps the mantissa odd (or zero with exponent 0), so
/// equal values compare equal memberwise.
struct Dyadic {
    Int mantissa = 0;
    long exponent = 0;

    Dyadic() = default;
    Dyadic(Int m, long e) : mantissa(std::move(m)), exponent(e) { normalize(); }

    void normalize() {
        if (mantissa == 0) {
            exponent = 0;
            return;
        }
        auto shift = mpz_scan1(mantissa.get_mpz_t(), 0);
        if (shift > 0) {
            mpz_fdiv_q_2exp(mantissa.get_mpz_t(), mantissa.get_mpz_t(), shift);
            exponent += static_cast<long>(shift);
        }
    }

    Rat to_rat() const {
        if (exponent >= 0) return Rat(mantissa * pow2(static_cast<unsigned long>(exponent)));
        return make_rat(mantissa, pow2(static_cast<unsigned long>(-exponent)));
    }

    bool is_zero() const { return mantissa == 0; }

    friend Dyadic operator-(const Dyadic& d) { return Dyadic(-d.mantissa, d.exponent); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        long e = std::min(a.exponent, b.exponent);
        Int ma = a.mantissa << static_cast<unsigned long>(a.exponent - e);
        Int mb = b.mantissa << static_cast<unsigned long>(b.exponent - e);
        return Dyadic(ma + mb, e);
    }

    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        return Dyadic(a.mantissa * b.mantissa, a.exponent + b.exponent);
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.exponent == b.exponent && a.mantissa == b.mantissa;
    }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return (a - b).mantissa < 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return (a - b).mantissa <= 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return b < a; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return b <= a; }
};

inline Dyadic abs_dyadic(const Dyadic& d) { return d.mantissa < 0 ? -d : d; }

/// Nearest multiple of 2^e, ties toward even mantissa.
inline Dyadic round_to_exponent(const Rat& q, long e) {
    // q / 2^e as a quotient of integers, then round to nearest integer.
    Int num = q.get_num(), den = q.get_den();
    if (e >= 0)
        den *= pow2(static_cast<unsigned long>(e));
    else
        num *= pow2(static_cast<unsigned long>(-e));
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Dyadic(round_ties_even(num, den), e);
}

inline Dyadic round_to_exponent(const Dyadic& d, long e) {
    if (d.exponent >= e) return d;  // already exact at this granularity
    return round_to_exponent(d.to_rat(), e);
}

inline std::string dyadic_to_string(const Dyadic& d) { return rat_to_string(d.to_rat()); }

}  // namespace cheapreal
