/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/cheap_number.hpp"
#include "cheapreal/eventual.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace cheapreal {

/// 1/(omega+1), the comparand every computable infinitesimal is
/// effective against.
inline CheapNumber one_over_omega_plus_one() { return lift(1) / (omega() + lift(1)); }

/// 2^-omega.
inline CheapNumber two_pow_minus_omega() { return lift(1) / pow_cheap(lift(2), omega()); }

enum class NumberKind { InfinitelyLarge, Infinitesimal, Limited, Unknown };

struct Classification {
    NumberKind kind = NumberKind::Unknown;
    Budget checked_up_to = 0;  // largest standard bound k (or 1/k) tested
    Budget budget_used = 0;
};

/// Geometric ladder of standard test bounds 1, 2, 4, ..., up to budget.
inline std::vector<Budget> standard_bound_ladder(Budget budget) {
    std::vector<Budget> ks;
    for (Budget k = 1; k <= budget; k *= 2) {
        ks.push_back(k);
        if (k > budget / 2) break;
    }
    return ks;
}

/// Budgeted classification against the ladder of standard bounds. A
/// verdict never claims more than the bounds actually tested;
/// checked_up_to records how far the ladder went.
inline Classification classify(const CheapNumber& x, Budget budget) {
    auto ladder = standard_bound_ladder(budget);
    Budget top = ladder.back();

    bool infinitely_large = true;
    for (Budget k : ladder) {
        Rat bound(static_cast<unsigned long>(k));
        auto t = eventually_via_trichotomy([&](Budget n) { return x.at(n) >= bound; }, budget);
        if (!t.is_true()) {
            infinitely_large = false;
            break;
        }
    }
    if (infinitely_large) return {NumberKind::InfinitelyLarge, top, budget};

    bool positive = eventually_via_trichotomy([&](Budget n) { return x.at(n) > 0; }, budget).is_true();
    if (positive) {
        bool infinitesimal = true;
        for (Budget k : ladder) {
            Rat bound = make_rat(Int(1), Int(static_cast<unsigned long>(k)));
            auto t = eventually_via_trichotomy([&](Budget n) { return x.at(n) <= bound; }, budget);
            if (!t.is_true()) {
                infinitesimal = false;
                break;
            }
        }
        if (infinitesimal) return {NumberKind::Infinitesimal, top, budget};
    }

    for (Budget k : ladder) {
        Rat bound(static_cast<unsigned long>(k));
        auto t = eventually_via_trichotomy([&](Budget n) { return abs_rat(x.at(n)) <= bound; }, budget);
        if (t.is_true()) return {NumberKind::Limited, k, budget};
    }
    return {NumberKind::Unknown, top, budget};
}

struct MonotoneDecreasing {};

/// Shift-index witnesses to and from a monotone representative:
/// value^{+to} <= representative and representative^{+from} <= value.
struct EquivalenceWitness {
    CheapNumber representative;
    CheapNumber to_representative;
    CheapNumber from_representative;
};

/// A positive computable infinitesimal together with the certificate
/// that makes it effective: either it is monotone itself, or it is
/// computably equivalent to a monotone one.
struct EffectiveInfinitesimal {
    CheapNumber value;
    std::variant<MonotoneDecreasing, EquivalenceWitness> certificate;

    EffectiveInfinitesimal(CheapNumber v, std::variant<MonotoneDecreasing, EquivalenceWitness> cert,
                           Budget sample_window = 64)
        : value(std::move(v)), certificate(std::move(cert)) {
        Budget prefix = patch_prefix(value);
        for (Budget n = prefix; n <= prefix + sample_window; ++n) {
            if (!(value.at(n) > 0)) throw error("infinitesimal has a non-positive component at rank " +
                                                std::to_string(n));
        }
        if (std::holds_alternative<MonotoneDecreasing>(certificate)) {
            for (Budget n = prefix; n < prefix + sample_window; ++n)
                if (!(value.at(n + 1) <= value.at(n)))
                    throw error("monotone certificate refuted at rank " + std::to_string(n));
        } else {
            const auto& eq = std::get<EquivalenceWitness>(certificate);
            if (eq.to_representative.sort() != ValueSort::Nat ||
                eq.from_representative.sort() != ValueSort::Nat)
                throw sort_error("equivalence witnesses must be cheap naturals");
            for (Budget n = prefix; n <= prefix + sample_window; ++n) {
                Int nn(static_cast<unsigned long>(n));
                if (!(value.at(nn + eq.to_representative.at_nat(nn)) <= eq.representative.at(nn)))
                    throw error("to-representative witness refuted at rank " + std::to_string(n));
                if (!(eq.representative.at(nn + eq.from_representative.at_nat(nn)) <= value.at(nn)))
                    throw error("from-representative witness refuted at rank " + std::to_string(n));
            }
        }
    }

    static Budget patch_prefix(const CheapNumber& x) {
        if (x.op() == Op::Patch && !x.overrides().empty()) return x.overrides().rbegin()->first + 1;
        return 0;
    }
};

/// epsilon_n = 2^-n, the canonical monotone infinitesimal.
inline EffectiveInfinitesimal canonical_eps() {
    return EffectiveInfinitesimal(two_pow_minus_omega(), MonotoneDecreasing{});
}

inline EffectiveInfinitesimal one_over_omega_plus_one_eps() {
    return EffectiveInfinitesimal(one_over_omega_plus_one(), MonotoneDecreasing{});
}

/// Ranks n <= upto where eps_{n + w_n} <= target_n fails.
inline std::vector<Budget> witness_violations(const CheapNumber& eps, const CheapNumber& witness,
                                              const CheapNumber& target, Budget upto) {
    std::vector<Budget> bad;
    for (Budget n = 0; n <= upto; ++n) {
        Int nn(static_cast<unsigned long>(n));
        if (!(eps.at(nn + witness.at_nat(nn)) <= target.at(nn))) bad.push_back(n);
    }
    return bad;
}

/// Composition of shift witnesses: from eps^{+a} <= mid and
/// mid^{+b} <= y follows eps^{+w} <= y with w_n = b_n + a_{n + b_n}.
inline CheapNumber compose_witnesses(const CheapNumber& first_hop, const CheapNumber& second_hop) {
    return second_hop + shift_binary(first_hop, second_hop);
}

/// The compEpsilon construction: 1/(omega+1) is effective with respect
/// to any computable infinitesimal y, via m_n = ceil(1/y_n) - 1.
/// Ranks where y is not yet positive read a divisor patched to 1.
inline CheapNumber comp_epsilon_witness(const CheapNumber& y, Budget zero_scan = 1024) {
    std::map<Budget, Rat> fix;
    for (Budget r = 0; r <= zero_scan; ++r)
        if (!(y.at(r) > 0)) fix.emplace(r, Rat(1));
    CheapNumber divisor = fix.empty() ? y : patch(y, std::move(fix));
    return monus(to_nat(ceil_cheap(lift(1) / divisor)), lift(1));
}

inline bool empirically_monotone(const CheapNumber& x, Budget window = 64) {
    Budget prefix = EffectiveInfinitesimal::patch_prefix(x);
    for (Budget n = prefix; n < prefix + window; ++n) {
        if (!(x.at(n) > 0)) return false;
        if (!(x.at(n + 1) <= x.at(n))) return false;
    }
    return x.at(prefix + window) > 0;
}

struct EffectiveWrtOptions {
    Budget mu_cap = 1'000'000;
    Budget validate_upto = 128;
    Budget monotone_window = 64;
};

namespace detail {

inline std::optional<CheapNumber> checked_witness(const CheapNumber& eps, CheapNumber w,
                                                  const CheapNumber& y, Budget upto) {
    // a stabilization prefix is fine; violations into the trailing
    // window mean the construction did not actually apply. Ranks whose
    // components blow past the representation cap end the check.
    Budget ws = window_start(upto);
    for (Budget n = 0; n <= upto; ++n) {
        Int nn(static_cast<unsigned long>(n));
        try {
            if (!(eps.at(nn + w.at_nat(nn)) <= y.at(nn)) && n >= ws) return std::nullopt;
        } catch (const totality_error&) {
            break;
        }
    }
    return w;
}

}  // namespace detail

/// Finds a computable shift index n with eps^{+n} <= y, when one of the
/// implemented constructions applies: reflexivity, compEpsilon from
/// 1/(omega+1), the monotone mu-witness, or their transitive chaining.
/// Absence is a value, not an error.
inline std::optional<CheapNumber> effective_wrt(const CheapNumber& eps, const CheapNumber& y,
                                                const EffectiveWrtOptions& opts = {}) {
    if (structurally_equal(eps, y)) return lift(0);

    const CheapNumber comparand = one_over_omega_plus_one();
    if (structurally_equal(eps, comparand) && is_basis(y))
        return detail::checked_witness(eps, comp_epsilon_witness(y), y, opts.validate_upto);

    if (empirically_monotone(eps, opts.monotone_window)) {
        CheapNumber to_comparand = mu_leq(eps, comparand, opts.mu_cap);
        if (structurally_equal(y, comparand))
            return detail::checked_witness(eps, to_comparand, y, opts.validate_upto);
        if (is_basis(y)) {
            CheapNumber w = compose_witnesses(to_comparand, comp_epsilon_witness(y));
            return detail::checked_witness(eps, w, y, opts.validate_upto);
        }
    }
    return std::nullopt;
}

/// Certificate-aware overload: an equivalence certificate routes the
/// search through the monotone representative.
inline std::optional<CheapNumber> effective_wrt(const EffectiveInfinitesimal& eps, const CheapNumber& y,
                                                const EffectiveWrtOptions& opts = {}) {
    if (const auto* eq = std::get_if<EquivalenceWitness>(&eps.certificate)) {
        if (structurally_equal(eps.value, y)) return lift(0);
        auto rest = effective_wrt(eq->representative, y, opts);
        if (!rest) return std::nullopt;
        CheapNumber w = compose_witnesses(eq->to_representative, *rest);
        return detail::checked_witness(eps.value, w, y, opts.validate_upto);
    }
    return effective_wrt(eps.value, y, opts);
}

/// The mu-witness of the monotone theorem: m'_n = least m with
/// eps_{n+m} <= 1/(n+1), so eps^{+m'} <= 1/(omega+1) at every rank.
/// Safety of the search rests on the monotone certificate; the cap
/// converts a violated obligation into an error naming the rank.
inline CheapNumber monotone_to_canonical(const EffectiveInfinitesimal& eps, Budget mu_cap = 1'000'000) {
    if (!std::holds_alternative<MonotoneDecreasing>(eps.certificate))
        throw error("monotone_to_canonical needs a MonotoneDecreasing certificate");
    return mu_leq(eps.value, one_over_omega_plus_one(), mu_cap);
}

struct DominateOptions {
    Budget classify_budget = 1000;
    Budget search_cap = 1'000'000;
};

/// The rank function of the domination theorem, computed by per-rank
/// search: the least shift making an infinitely large x pass y from
/// above (resp. an infinitesimal x pass a positive y from below). The
/// result is a cheap index but generally not a basis expression.
inline CheapNumber dominate_witness(const CheapNumber& x, const CheapNumber& y,
                                    const DominateOptions& opts = {}) {
    auto cls = classify(x, opts.classify_budget);
    if (cls.kind != NumberKind::InfinitelyLarge && cls.kind != NumberKind::Infinitesimal)
        throw error("dominate_witness: classification precondition unverifiable within budget");
    bool large = cls.kind == NumberKind::InfinitelyLarge;
    if (!large) {
        for (Budget n = 0; n <= 64; ++n)
            if (!(y.at(n) > 0)) throw error("dominate_witness: target must be positive");
    }
    Budget cap = opts.search_cap;
    return CheapNumber::native(
        [x, y, large, cap](const Int& k) -> Rat {
            Rat target = y.at(k);
            for (Budget s = 0; s <= cap; ++s) {
                Rat v = x.at(k + Int(static_cast<unsigned long>(s)));
                if (large ? v >= target : (v > 0 && v <= target)) return Rat(static_cast<unsigned long>(s));
            }
            throw error("dominate_witness: search cap exceeded at rank " + k.get_str());
        },
        ValueSort::Nat, "dominate_witness");
}

}  // namespace cheapreal
