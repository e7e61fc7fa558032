/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/rational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace cheapreal {

enum class ValueSort { Nat, Rat };

/// Expression basis for cheap-number generators. Everything except
/// Native is serializable, which keeps stored numbers certifiably
/// total. Native backs test oracles and proof-constructed witnesses.
enum class Op {
    Constant,
    Omega,
    Add,
    Sub,
    Monus,
    Mul,
    Div,
    IntDiv,
    Pow,
    Floor,
    Ceil,
    ToNat,
    Patch,
    Shift,
    Compose,
    MuLeq,
    RunningMin,
    RunningMax,
    Native,
};

class CheapNumber;

namespace detail {

struct Node {
    Op op;
    ValueSort sort;
    std::vector<CheapNumber> children;
    Rat constant;                      // Constant
    std::map<Budget, Rat> overrides;   // Patch
    Budget mu_cap = 1'000'000;         // MuLeq
    std::function<Rat(const Int&)> native;
    std::string label;

    mutable std::mutex memo_mutex;
    mutable std::map<Int, Rat> memo;
};

}  // namespace detail

/// A cheap non-standard number: a total sequence rank -> exact value,
/// studied in the asymptotic limit. Immutable and cheap to copy;
/// component evaluation is memoized per number and safe to run from
/// several threads at once.
class CheapNumber {
   public:
    static constexpr std::size_t kMemoCap = std::size_t(1) << 16;

    CheapNumber() = delete;

    ValueSort sort() const { return node_->sort; }
    Op op() const { return node_->op; }
    const std::vector<CheapNumber>& children() const { return node_->children; }
    const Rat& constant() const { return node_->constant; }
    const std::map<Budget, Rat>& overrides() const { return node_->overrides; }
    Budget mu_cap() const { return node_->mu_cap; }
    const std::string& label() const { return node_->label; }

    /// Component at the given rank. Overrides win, then the generator;
    /// results are cached up to a size cap so bulk scans cannot pin
    /// unbounded memory.
    Rat at(const Int& rank) const {
        {
            std::lock_guard<std::mutex> lock(node_->memo_mutex);
            auto it = node_->memo.find(rank);
            if (it != node_->memo.end()) return it->second;
        }
        Rat v = evaluate(rank);
        std::lock_guard<std::mutex> lock(node_->memo_mutex);
        if (node_->memo.size() >= kMemoCap) return v;
        auto [it, inserted] = node_->memo.emplace(rank, std::move(v));
        return it->second;
    }

    Rat at(Budget rank) const { return at(Int(static_cast<unsigned long>(rank))); }
    Rat at(int rank) const { return at(Int(rank)); }

    /// Component as a natural number; fails on Rat-sorted numbers with
    /// fractional or negative components.
    Int at_nat(const Int& rank) const {
        Rat v = at(rank);
        if (!is_natural(v)) throw sort_error("component is not a natural number at rank " + rank.get_str());
        return v.get_num();
    }

    friend bool same_node(const CheapNumber& a, const CheapNumber& b) { return a.node_ == b.node_; }

    // --- factories ---------------------------------------------------

    static CheapNumber constant(Rat c) {
        auto n = std::make_shared<detail::Node>();
        n->op = Op::Constant;
        n->sort = is_natural(c) ? ValueSort::Nat : ValueSort::Rat;
        n->constant = std::move(c);
        return CheapNumber(std::move(n));
    }

    static CheapNumber omega_number() {
        auto n = std::make_shared<detail::Node>();
        n->op = Op::Omega;
        n->sort = ValueSort::Nat;
        return CheapNumber(std::move(n));
    }

    static CheapNumber make(Op op, std::vector<CheapNumber> children, std::map<Budget, Rat> overrides = {},
                            Budget mu_cap = 1'000'000) {
        auto n = std::make_shared<detail::Node>();
        n->op = op;
        n->children = std::move(children);
        n->overrides = std::move(overrides);
        n->mu_cap = mu_cap;
        n->sort = infer_sort(*n);
        if (op == Op::Patch) {
            for (const auto& [rank, value] : n->overrides) {
                (void)rank;
                if (n->sort == ValueSort::Nat && !is_natural(value))
                    throw sort_error("patch override is not a natural number");
            }
        }
        return CheapNumber(std::move(n));
    }

    static CheapNumber native(std::function<Rat(const Int&)> fn, ValueSort sort, std::string label) {
        auto n = std::make_shared<detail::Node>();
        n->op = Op::Native;
        n->sort = sort;
        n->native = std::move(fn);
        n->label = std::move(label);
        return CheapNumber(std::move(n));
    }

   private:
    explicit CheapNumber(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

    static ValueSort infer_sort(const detail::Node& n) {
        auto all_nat = [&] {
            for (const auto& c : n.children)
                if (c.sort() != ValueSort::Nat) return false;
            return true;
        };
        auto require_nat = [&](const char* what) {
            if (!all_nat()) throw sort_error(std::string(what) + " requires Nat-sorted operands");
        };
        switch (n.op) {
            case Op::Add:
            case Op::Mul:
                return all_nat() ? ValueSort::Nat : ValueSort::Rat;
            case Op::Monus:
                require_nat("monus");
                return ValueSort::Nat;
            case Op::IntDiv:
                require_nat("integer division");
                return ValueSort::Nat;
            case Op::MuLeq:
                return ValueSort::Nat;
            case Op::ToNat:
                return ValueSort::Nat;
            case Op::Sub:
            case Op::Div:
            case Op::Floor:
            case Op::Ceil:
                return ValueSort::Rat;
            case Op::Pow:
                if (n.children.at(1).sort() != ValueSort::Nat)
                    throw sort_error("exponent must be a cheap natural");
                return n.children.at(0).sort();
            case Op::Patch:
            case Op::RunningMin:
            case Op::RunningMax:
                return n.children.at(0).sort();
            case Op::Shift:
            case Op::Compose:
                if (n.children.at(1).sort() != ValueSort::Nat)
                    throw sort_error("shift index must be a cheap natural");
                return n.children.at(0).sort();
            default:
                return ValueSort::Rat;
        }
    }

    Int index_at(const Int& rank, const CheapNumber& idx) const {
        Rat v = idx.at(rank);
        if (!is_natural(v))
            throw sort_error("index is not natural-valued at rank " + rank.get_str());
        return v.get_num();
    }

    Rat evaluate(const Int& rank) const {
        const detail::Node& n = *node_;
        switch (n.op) {
            case Op::Constant:
                return n.constant;
            case Op::Omega:
                if (rank < 0) throw totality_error("negative rank");
                return Rat(rank);
            case Op::Add:
                return n.children[0].at(rank) + n.children[1].at(rank);
            case Op::Sub:
                return n.children[0].at(rank) - n.children[1].at(rank);
            case Op::Monus: {
                Rat a = n.children[0].at(rank), b = n.children[1].at(rank);
                return a > b ? Rat(a - b) : Rat(0);
            }
            case Op::Mul:
                return n.children[0].at(rank) * n.children[1].at(rank);
            case Op::Div: {
                Rat b = n.children[1].at(rank);
                if (b == 0)
                    throw totality_error("division by zero component at rank " + rank.get_str());
                return n.children[0].at(rank) / b;
            }
            case Op::IntDiv: {
                Rat a = n.children[0].at(rank), b = n.children[1].at(rank);
                if (b == 0)
                    throw totality_error("integer division by zero component at rank " + rank.get_str());
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
                return Rat(q);
            }
            case Op::Pow: {
                Rat base = n.children[0].at(rank);
                Int e = index_at(rank, n.children[1]);
                if (!e.fits_ulong_p()) throw totality_error("exponent too large at rank " + rank.get_str());
                unsigned long ee = e.get_ui();
                std::size_t base_bits = mpz_sizeinbase(base.get_num_mpz_t(), 2) +
                                        mpz_sizeinbase(base.get_den_mpz_t(), 2);
                if (ee > 0 && base_bits * ee > (std::size_t(1) << 27))
                    throw totality_error("power blows past the size cap at rank " + rank.get_str());
                return pow_rat(base, ee);
            }
            case Op::Floor:
                return Rat(rat_floor(n.children[0].at(rank)));
            case Op::Ceil:
                return Rat(rat_ceil(n.children[0].at(rank)));
            case Op::ToNat: {
                Rat v = n.children[0].at(rank);
                if (!is_natural(v))
                    throw sort_error("to_nat of a non-natural component at rank " + rank.get_str());
                return v;
            }
            case Op::Patch: {
                if (rank >= 0 && rank.fits_ulong_p()) {
                    auto it = n.overrides.find(static_cast<Budget>(rank.get_ui()));
                    if (it != n.overrides.end()) return it->second;
                }
                return n.children[0].at(rank);
            }
            case Op::Shift:
                return n.children[0].at(rank + index_at(rank, n.children[1]));
            case Op::Compose:
                return n.children[0].at(index_at(rank, n.children[1]));
            case Op::MuLeq: {
                Rat bound = n.children[1].at(rank);
                for (Budget m = 0; m <= n.mu_cap; ++m) {
                    if (n.children[0].at(rank + Int(static_cast<unsigned long>(m))) <= bound)
                        return Rat(static_cast<unsigned long>(m));
                }
                throw mu_cap_error("mu search exceeded the iteration cap at rank " + rank.get_str());
            }
            case Op::RunningMin:
            case Op::RunningMax: {
                if (rank < 0 || !rank.fits_ulong_p() || rank > 100'000'000)
                    throw totality_error("running extremum rank out of range");
                unsigned long top = rank.get_ui();
                Rat best = n.children[0].at(Int(0));
                for (unsigned long m = 1; m <= top; ++m) {
                    Rat v = n.children[0].at(Int(m));
                    if (n.op == Op::RunningMin ? v < best : v > best) best = v;
                }
                return best;
            }
            case Op::Native: {
                Rat v = n.native(rank);
                if (n.sort == ValueSort::Nat && !is_natural(v))
                    throw sort_error("native generator promised Nat but produced " + rat_to_string(v));
                return v;
            }
        }
        throw error("unreachable");
    }

    std::shared_ptr<const detail::Node> node_;
};

// --- spec operations --------------------------------------------------

inline CheapNumber lift(Rat c) { return CheapNumber::constant(std::move(c)); }
inline CheapNumber lift(long c) { return CheapNumber::constant(Rat(c)); }
inline CheapNumber lift(const Int& c) { return CheapNumber::constant(Rat(c)); }

/// omega_n = n, the canonical infinitely large cheap natural.
inline CheapNumber omega() { return CheapNumber::omega_number(); }

/// Componentwise application of a basis operation.
inline CheapNumber map_total(Op op, std::vector<CheapNumber> xs) {
    switch (op) {
        case Op::Add:
        case Op::Sub:
        case Op::Monus:
        case Op::Mul:
        case Op::Div:
        case Op::IntDiv:
        case Op::Pow:
            if (xs.size() != 2) throw error("binary operation needs two arguments");
            break;
        case Op::Floor:
        case Op::Ceil:
        case Op::ToNat:
            if (xs.size() != 1) throw error("unary operation needs one argument");
            break;
        default:
            throw error("map_total only lifts pointwise basis operations");
    }
    return CheapNumber::make(op, std::move(xs));
}

inline CheapNumber operator+(const CheapNumber& a, const CheapNumber& b) {
    return map_total(Op::Add, {a, b});
}
inline CheapNumber operator-(const CheapNumber& a, const CheapNumber& b) {
    return map_total(Op::Sub, {a, b});
}
inline CheapNumber operator*(const CheapNumber& a, const CheapNumber& b) {
    return map_total(Op::Mul, {a, b});
}
inline CheapNumber monus(const CheapNumber& a, const CheapNumber& b) {
    return map_total(Op::Monus, {a, b});
}
inline CheapNumber int_div(const CheapNumber& a, const CheapNumber& b) {
    return map_total(Op::IntDiv, {a, b});
}
inline CheapNumber pow_cheap(const CheapNumber& base, const CheapNumber& exponent) {
    return map_total(Op::Pow, {base, exponent});
}
inline CheapNumber floor_cheap(const CheapNumber& x) { return map_total(Op::Floor, {x}); }
inline CheapNumber ceil_cheap(const CheapNumber& x) { return map_total(Op::Ceil, {x}); }
inline CheapNumber to_nat(const CheapNumber& x) { return map_total(Op::ToNat, {x}); }

/// Division with a caller-supplied rank bound after which the divisor
/// is certified nonzero; ranks below it read a patched divisor of 1.
inline CheapNumber div_guarded(const CheapNumber& a, const CheapNumber& b, Budget nonzero_from = 0) {
    if (nonzero_from == 0) return map_total(Op::Div, {a, b});
    std::map<Budget, Rat> fill;
    for (Budget r = 0; r < nonzero_from; ++r) fill.emplace(r, Rat(1));
    return map_total(Op::Div, {a, CheapNumber::make(Op::Patch, {b}, std::move(fill))});
}

inline CheapNumber operator/(const CheapNumber& a, const CheapNumber& b) { return div_guarded(a, b); }

inline CheapNumber patch(const CheapNumber& x, std::map<Budget, Rat> overrides) {
    return CheapNumber::make(Op::Patch, {x}, std::move(overrides));
}

/// Binary shift x^{+y}. Nested shifts accumulate their indices at the
/// base rank, which is what makes x^{+(y+z)} = (x^{+y})^{+z} hold
/// componentwise for non-constant indices.
inline CheapNumber shift_binary(const CheapNumber& x, const CheapNumber& y) {
    if (y.sort() != ValueSort::Nat) throw sort_error("shift index must be a cheap natural");
    if (x.op() == Op::Shift)
        return CheapNumber::make(Op::Shift, {x.children()[0], x.children()[1] + y});
    return CheapNumber::make(Op::Shift, {x, y});
}

inline CheapNumber shift_unary(const CheapNumber& x) { return shift_binary(x, lift(1)); }

/// x composed with a cheap index: component at rank n is x_{idx_n}.
inline CheapNumber compose(const CheapNumber& x, const CheapNumber& idx) {
    return CheapNumber::make(Op::Compose, {x, idx});
}

/// Least m with seq_{n+m} <= bound_n, searched per rank with a cap.
/// Total exactly when the predicate is safe; the cap turns silent
/// divergence into a diagnosable error.
inline CheapNumber mu_leq(const CheapNumber& seq, const CheapNumber& bound, Budget cap = 1'000'000) {
    return CheapNumber::make(Op::MuLeq, {seq, bound}, {}, cap);
}

inline CheapNumber running_min(const CheapNumber& x) { return CheapNumber::make(Op::RunningMin, {x}); }
inline CheapNumber running_max(const CheapNumber& x) { return CheapNumber::make(Op::RunningMax, {x}); }

inline bool is_basis(const CheapNumber& x) {
    if (x.op() == Op::Native || x.op() == Op::RunningMin || x.op() == Op::RunningMax) return false;
    for (const auto& c : x.children())
        if (!is_basis(c)) return false;
    return true;
}

inline bool structurally_equal(const CheapNumber& a, const CheapNumber& b) {
    if (same_node(a, b)) return true;
    if (a.op() != b.op() || a.sort() != b.sort()) return false;
    if (a.op() == Op::Native) return false;  // natives only equal themselves
    if (a.op() == Op::Constant && a.constant() != b.constant()) return false;
    if (a.op() == Op::Patch && a.overrides() != b.overrides()) return false;
    if (a.op() == Op::MuLeq && a.mu_cap() != b.mu_cap()) return false;
    if (a.children().size() != b.children().size()) return false;
    for (std::size_t i = 0; i < a.children().size(); ++i)
        if (!structurally_equal(a.children()[i], b.children()[i])) return false;
    return true;
}

}  // namespace cheapreal
