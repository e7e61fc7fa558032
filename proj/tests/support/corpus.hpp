/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/cheap_number.hpp"
#include "cheapreal/rational.hpp"

#include <random>
#include <vector>

namespace cheapreal::testing {

/// 1/(omega+1) as a basis expression.
inline CheapNumber one_over_omega_plus_one_expr() { return lift(1) / (omega() + lift(1)); }

/// 2^-omega as a basis expression.
inline CheapNumber two_pow_minus_omega_expr() { return lift(1) / pow_cheap(lift(2), omega()); }

/// (-1)^omega, the canonical oscillating number.
inline CheapNumber alternating_sign() { return pow_cheap(lift(-1), omega()); }

/// The paper's uncomputable gamma, as an opaque test stub. Any total
/// non-basis generator will do; predictability is irrelevant, opacity
/// is the point.
inline CheapNumber gamma_stub() {
    return CheapNumber::native(
        [](const Int& n) {
            Int h = (n * n * 2654435761u + 97) % 1000003;
            return Rat(h + 1);
        },
        ValueSort::Nat, "gamma");
}

/// Monotone decreasing 1/floor(log2(n+2)), the slowest corpus
/// infinitesimal.
inline CheapNumber inverse_floor_log() {
    return CheapNumber::native(
        [](const Int& n) {
            Rat v(n + 2);
            return make_rat(Int(1), Int(floor_log2(v)));
        },
        ValueSort::Rat, "1/floor_log2(omega+2)");
}

/// Newton iterates for sqrt(2), enough steps per rank that the
/// component error stays below 2^-n (quadratic convergence from 2).
inline CheapNumber sqrt2_newton() {
    return CheapNumber::native(
        [](const Int& n) {
            if (n < 0) throw totality_error("negative rank");
            long steps = ceil_log2(Rat(n + 2)) + 1;
            Rat x(2);
            for (long i = 0; i < steps; ++i) x = (x + 2 / x) / 2;
            return x;
        },
        ValueSort::Rat, "sqrt2 newton");
}

/// floor(sqrt(2) * 2^p) / 2^p: a one-sided dyadic oracle with
/// 0 <= sqrt(2) - value < 2^-p, independent of the CReal machinery.
inline Rat sqrt2_oracle(unsigned long p) {
    Int scaled;
    Int two_shifted = Int(2) << (2 * p);
    mpz_sqrt(scaled.get_mpz_t(), two_shifted.get_mpz_t());
    return make_rat(scaled, pow2(p));
}

struct RandomExpr {
    std::mt19937_64 rng;

    explicit RandomExpr(std::uint64_t seed) : rng(seed) {}

    long small_int(long lo, long hi) {
        return std::uniform_int_distribution<long>(lo, hi)(rng);
    }

    /// Random Nat-sorted index expression with at most linear growth,
    /// so shifted evaluation ranks stay tame.
    CheapNumber index_expr() {
        switch (small_int(0, 4)) {
            case 0: return lift(small_int(0, 8));
            case 1: return omega();
            case 2: return monus(omega(), lift(small_int(1, 8)));
            case 3: return int_div(omega(), lift(small_int(2, 5)));
            default: return omega() + lift(small_int(0, 8));
        }
    }

    /// Random basis expression. Depth-bounded; exponents are kept off
    /// nested powers so components stay representable.
    CheapNumber value_expr(int depth = 3) {
        if (depth <= 0) {
            switch (small_int(0, 2)) {
                case 0: return lift(small_int(-9, 9));
                case 1: return omega();
                default: return make_rat(small_int(-9, 9), small_int(1, 9)) == 0
                                    ? lift(1)
                                    : lift(make_rat(small_int(-9, 9), small_int(1, 9)));
            }
        }
        switch (small_int(0, 7)) {
            case 0: return value_expr(depth - 1) + value_expr(depth - 1);
            case 1: return value_expr(depth - 1) - value_expr(depth - 1);
            case 2: return value_expr(depth - 1) * value_expr(depth - 1);
            case 3: return value_expr(depth - 1) / (pow_cheap(lift(2), omega()) + lift(1));
            case 4: return pow_cheap(lift(small_int(-3, 3)), index_expr());
            case 5: return floor_cheap(value_expr(depth - 1));
            case 6: {
                std::map<Budget, Rat> ov;
                Budget top = static_cast<Budget>(small_int(0, 4));
                for (Budget r = 0; r <= top; ++r) ov.emplace(r, Rat(small_int(-9, 9)));
                auto inner = value_expr(depth - 1);
                if (inner.sort() == ValueSort::Nat)
                    for (auto& [k, v] : ov) v = abs_rat(v);
                return patch(inner, ov);
            }
            default: return shift_binary(value_expr(depth - 1), index_expr());
        }
    }
};

}  // namespace cheapreal::testing
