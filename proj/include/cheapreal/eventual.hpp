/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/cheap_number.hpp"
#include "cheapreal/trilean.hpp"

#include <functional>

namespace cheapreal {

/// First rank of the trailing evidence window: the final
/// ceil(budget/4) ranks of the scan 0..budget.
inline Budget window_start(Budget budget) {
    Budget w = (budget + 3) / 4;
    return budget - w + 1;
}

namespace detail {

struct ScanSummary {
    bool ever_violated = false;
    bool ever_held = false;
    bool violation_in_window = false;
    bool hold_in_window = false;
    Budget last_violation = 0;
    Budget last_violation_in_window = 0;
    Budget last_hold = 0;
};

inline ScanSummary scan(const std::function<bool(Budget)>& holds, Budget budget) {
    if (budget < 1) throw error("budget must be at least 1");
    ScanSummary s;
    Budget ws = window_start(budget);
    for (Budget n = 0; n <= budget; ++n) {
        if (holds(n)) {
            s.ever_held = true;
            s.last_hold = n;
            if (n >= ws) s.hold_in_window = true;
        } else {
            s.ever_violated = true;
            s.last_violation = n;
            if (n >= ws) {
                s.violation_in_window = true;
                s.last_violation_in_window = n;
            }
        }
    }
    return s;
}

}  // namespace detail

/// "Eventually P" for an equality-like predicate. True when the
/// trailing window is violation-free (witness: the stabilization
/// point); False when a disagreement recurs into the window, i.e.
/// every candidate stabilization point is refuted within budget.
inline Trilean eventually_via_recurrence(const std::function<bool(Budget)>& holds, Budget budget) {
    auto s = detail::scan(holds, budget);
    if (!s.violation_in_window) return trilean_true(s.ever_violated ? s.last_violation + 1 : 0, budget);
    return trilean_false(s.last_violation_in_window, budget);
}

/// "Eventually P" for an order-like predicate, where the paper's
/// trichotomy leaves oscillating cases undetermined. True when the
/// window is violation-free, False when the window uniformly refutes P
/// (the opposite relation holds eventually), Unknown on mixed windows.
inline Trilean eventually_via_trichotomy(const std::function<bool(Budget)>& holds, Budget budget) {
    auto s = detail::scan(holds, budget);
    if (!s.violation_in_window) return trilean_true(s.ever_violated ? s.last_violation + 1 : 0, budget);
    if (!s.hold_in_window) return trilean_false(s.ever_held ? s.last_hold + 1 : 0, budget);
    return trilean_unknown(budget);
}

inline Trilean eventually_eq(const CheapNumber& x, const CheapNumber& y, Budget budget) {
    return eventually_via_recurrence([&](Budget n) { return x.at(n) == y.at(n); }, budget);
}

inline Trilean eventually_leq(const CheapNumber& x, const CheapNumber& y, Budget budget) {
    return eventually_via_trichotomy([&](Budget n) { return x.at(n) <= y.at(n); }, budget);
}

inline Trilean eventually_lt(const CheapNumber& x, const CheapNumber& y, Budget budget) {
    return eventually_via_trichotomy([&](Budget n) { return x.at(n) < y.at(n); }, budget);
}

inline Trilean eventually_geq(const CheapNumber& x, const CheapNumber& y, Budget budget) {
    return eventually_leq(y, x, budget);
}

/// Decides, within budget, whether the observed disagreement set
/// {n <= budget : x_n != y_n} is compatible with cofiniteness. Cheap
/// equality is exactly membership of the agreement set in the Frechet
/// filter, so this shares eventually_eq's verdict policy: a finite
/// disagreement set has a cofinite complement, agreement under every
/// free ultrafilter; a disagreement recurring past every candidate
/// stabilization point falsifies some finite prefix forever.
inline Trilean agreement_set_cofinite(const CheapNumber& x, const CheapNumber& y, Budget budget) {
    return eventually_eq(x, y, budget);
}

}  // namespace cheapreal
