/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/rational.hpp"

#include <optional>
#include <string>

namespace cheapreal {

enum class Verdict { True, False, Unknown };

/// Outcome of a budget-bounded semi-decision of an eventual predicate.
/// True/False always carry a witness rank (stabilization or refutation
/// point); Unknown means the budget ran out without a decision.
struct Trilean {
    Verdict verdict = Verdict::Unknown;
    std::optional<Budget> witness_rank;
    Budget budget_used = 0;

    bool is_true() const { return verdict == Verdict::True; }
    bool is_false() const { return verdict == Verdict::False; }
    bool is_unknown() const { return verdict == Verdict::Unknown; }
};

inline Trilean trilean_true(Budget witness, Budget used) { return {Verdict::True, witness, used}; }
inline Trilean trilean_false(Budget witness, Budget used) { return {Verdict::False, witness, used}; }
inline Trilean trilean_unknown(Budget used) { return {Verdict::Unknown, std::nullopt, used}; }

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        default: return "unknown";
    }
}

}  // namespace cheapreal
