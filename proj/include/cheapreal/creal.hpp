/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/dyadic.hpp"
#include "cheapreal/infinitesimal.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cheapreal {

enum class RealOp { FromRational, FromCheapPair, Neg, Add, Sub, Mul, Div, JoinSides, NativeApprox };

enum class Side { Left, Right };

/// A one-sided description of a standard real: the sup (Left) or inf
/// (Right) of the components of a cheap rational sequence.
struct OneSidedReal {
    Side side;
    CheapNumber seq;

    OneSidedReal(Side s, CheapNumber sequence, const Rat& component_bound, Budget sample_window = 64)
        : side(s), seq(std::move(sequence)) {
        for (Budget n = 0; n <= sample_window; ++n)
            if (!(abs_rat(seq.at(n)) <= component_bound))
                throw error("one-sided sequence exceeds its stated bound at rank " + std::to_string(n));
    }
};

class CReal;
Dyadic approx(const CReal& x, Budget n);

namespace detail {

struct RealNode {
    RealOp op;
    std::vector<CReal> children;
    Rat rational;                                 // FromRational
    std::optional<CheapNumber> pq;                // FromCheapPair
    std::optional<CheapNumber> pair_witness;      // eps^{+w} <= 2^-omega
    Budget nonzero_evidence = 0;                  // Div
    std::optional<OneSidedReal> left, right;      // JoinSides
    Budget mu_cap = 1'000'000;
    std::function<Dyadic(Budget)> native;
    std::string label;

    mutable std::mutex memo_mutex;
    mutable std::map<Budget, Dyadic> memo;
};

}  // namespace detail

/// A computable real in fast dyadic Cauchy form: approx(n) is within
/// 2^-n of the value. The cheap-pair form of the definition is a
/// constructor; this representation fixes the precision bookkeeping.
class CReal {
   public:
    CReal() = delete;

    RealOp op() const { return node_->op; }
    const std::vector<CReal>& children() const { return node_->children; }
    const Rat& rational() const { return node_->rational; }
    const CheapNumber& pair_sequence() const { return *node_->pq; }
    const CheapNumber& pair_witness() const { return *node_->pair_witness; }
    Budget nonzero_evidence() const { return node_->nonzero_evidence; }
    const OneSidedReal& left_side() const { return *node_->left; }
    const OneSidedReal& right_side() const { return *node_->right; }
    const std::string& label() const { return node_->label; }

    friend Dyadic approx(const CReal& x, Budget n) {
        {
            std::lock_guard<std::mutex> lock(x.node_->memo_mutex);
            auto it = x.node_->memo.find(n);
            if (it != x.node_->memo.end()) return it->second;
        }
        Dyadic d = x.compute(n);
        std::lock_guard<std::mutex> lock(x.node_->memo_mutex);
        auto [it, inserted] = x.node_->memo.emplace(n, std::move(d));
        return it->second;
    }

    static CReal make(std::shared_ptr<detail::RealNode> node) { return CReal(std::move(node)); }

   private:
    explicit CReal(std::shared_ptr<detail::RealNode> node) : node_(std::move(node)) {}

    Dyadic compute(Budget n) const;

    std::shared_ptr<detail::RealNode> node_;
};

namespace detail {

inline std::shared_ptr<RealNode> real_node(RealOp op) {
    auto n = std::make_shared<RealNode>();
    n->op = op;
    return n;
}

}  // namespace detail

/// Embeds a standard rational: approx(n) is the nearest dyadic at
/// exponent -n, ties toward even mantissa.
inline CReal from_rational(const Rat& q) {
    auto n = detail::real_node(RealOp::FromRational);
    n->rational = q;
    n->label = rat_to_string(q);
    return CReal::make(std::move(n));
}

/// A real given by a cheap computable rational within an effective
/// infinitesimal. Renormalization follows the independence theorem:
/// read the pair through the effectiveness witness against 2^-omega,
/// then round up at the matching power of two.
inline CReal from_cheap_pair(const CheapNumber& pq, const EffectiveInfinitesimal& eps,
                             const EffectiveWrtOptions& opts = {}) {
    auto w = effective_wrt(eps, two_pow_minus_omega(), opts);
    if (!w) throw error("cannot renormalize: no effectiveness witness against 2^-omega");
    auto n = detail::real_node(RealOp::FromCheapPair);
    n->pq = pq;
    n->pair_witness = *w;
    n->label = "cheap-pair";
    return CReal::make(std::move(n));
}

inline CReal neg(const CReal& x) {
    auto n = detail::real_node(RealOp::Neg);
    n->children = {x};
    return CReal::make(std::move(n));
}

inline CReal add(const CReal& x, const CReal& y) {
    auto n = detail::real_node(RealOp::Add);
    n->children = {x, y};
    return CReal::make(std::move(n));
}

inline CReal sub(const CReal& x, const CReal& y) {
    auto n = detail::real_node(RealOp::Sub);
    n->children = {x, y};
    return CReal::make(std::move(n));
}

inline CReal mul(const CReal& x, const CReal& y) {
    auto n = detail::real_node(RealOp::Mul);
    n->children = {x, y};
    return CReal::make(std::move(n));
}

/// Integer K with |x| <= K, extracted from the rank-0 approximation.
inline Int magnitude_bound(const CReal& x) {
    return rat_ceil(abs_rat(approx(x, 0).to_rat())) + 1;
}

/// Operand precision for multiplication at target 2^-n: the largest
/// power of two below 2^-(n+1) / (2K+1), which keeps the product error
/// inside the paper's (2K+1) eps' budget with room for final rounding.
inline Budget mul_operand_precision(const CReal& x, const CReal& y, Budget n) {
    Int k = std::max(magnitude_bound(x), magnitude_bound(y));
    long b = ceil_log2(Rat(2 * k + 1));
    return n + 1 + static_cast<Budget>(b);
}

/// Division needs certified separation from zero:
/// |y.approx(e)| > 2^{-e+1}, hence |y| > 2^-e.
inline CReal div(const CReal& x, const CReal& y, Budget nonzero_evidence) {
    Dyadic probe = approx(y, nonzero_evidence);
    Dyadic sep(1, -static_cast<long>(nonzero_evidence) + 1);
    if (!(abs_dyadic(probe) > sep))
        throw domain_error("division by possibly-zero: separation evidence fails at rank " +
                           std::to_string(nonzero_evidence));
    auto n = detail::real_node(RealOp::Div);
    n->children = {x, y};
    n->nonzero_evidence = nonzero_evidence;
    return CReal::make(std::move(n));
}

/// Joins bracketing one-sided descriptions of the same real via the
/// safe search mu m [phi'(m) - phi(m) <= 2^-n].
inline CReal join_sides(const OneSidedReal& l, const OneSidedReal& r, Budget mu_cap = 1'000'000) {
    if (l.side != Side::Left || r.side != Side::Right)
        throw error("join_sides expects a Left (sup) and a Right (inf) description");
    Rat lo = l.seq.at(0), hi = r.seq.at(0);
    for (Budget m = 0; m <= 64; ++m) {
        Rat a = l.seq.at(m), b = r.seq.at(m);
        if (a > lo) lo = a;
        if (b < hi) hi = b;
        if (!(lo <= hi)) throw error("brackets cross at rank " + std::to_string(m));
    }
    auto n = detail::real_node(RealOp::JoinSides);
    n->left = l;
    n->right = r;
    n->mu_cap = mu_cap;
    n->label = "join";
    return CReal::make(std::move(n));
}

inline CReal from_approx_fn(std::function<Dyadic(Budget)> fn, std::string label) {
    auto n = detail::real_node(RealOp::NativeApprox);
    n->native = std::move(fn);
    n->label = std::move(label);
    return CReal::make(std::move(n));
}

inline CReal operator+(const CReal& x, const CReal& y) { return add(x, y); }
inline CReal operator-(const CReal& x, const CReal& y) { return sub(x, y); }
inline CReal operator-(const CReal& x) { return neg(x); }
inline CReal operator*(const CReal& x, const CReal& y) { return mul(x, y); }

inline Dyadic CReal::compute(Budget n) const {
    const detail::RealNode& nd = *node_;
    switch (nd.op) {
        case RealOp::FromRational:
            return round_to_exponent(nd.rational, -static_cast<long>(n));
        case RealOp::FromCheapPair: {
            Budget m = n + 1;
            Int idx = nd.pair_witness->at_nat(Int(static_cast<unsigned long>(m)));
            Rat v = nd.pq->at(Int(static_cast<unsigned long>(m)) + idx);
            Int p = rat_ceil(v * Rat(pow2(m)));
            return Dyadic(p, -static_cast<long>(m));
        }
        case RealOp::Neg:
            return -approx(nd.children[0], n);
        case RealOp::Add:
            return round_to_exponent(approx(nd.children[0], n + 2) + approx(nd.children[1], n + 2),
                                     -static_cast<long>(n));
        case RealOp::Sub:
            return round_to_exponent(approx(nd.children[0], n + 2) - approx(nd.children[1], n + 2),
                                     -static_cast<long>(n));
        case RealOp::Mul: {
            Budget m = mul_operand_precision(nd.children[0], nd.children[1], n);
            return round_to_exponent(approx(nd.children[0], m) * approx(nd.children[1], m),
                                     -static_cast<long>(n) - 1);
        }
        case RealOp::Div: {
            Budget e = nd.nonzero_evidence;
            Int kx = magnitude_bound(nd.children[0]);
            Int ky = magnitude_bound(nd.children[1]);
            Rat amplification = Rat(kx + ky) * Rat(pow2(2 * e + 1));
            Budget m = n + 2 + static_cast<Budget>(std::max(0L, ceil_log2(amplification)));
            m = std::max(m, e + 1);
            Rat qx = approx(nd.children[0], m).to_rat();
            Rat qy = approx(nd.children[1], m).to_rat();
            if (qy == 0) throw domain_error("division separation lost during refinement");
            return round_to_exponent(qx / qy, -static_cast<long>(n) - 1);
        }
        case RealOp::JoinSides: {
            Rat eps = pow2_neg(n);
            Rat lo = nd.left->seq.at(0), hi = nd.right->seq.at(0);
            for (Budget m = 0; m <= nd.mu_cap; ++m) {
                Rat a = nd.left->seq.at(m), b = nd.right->seq.at(m);
                if (a > lo) lo = a;
                if (b < hi) hi = b;
                if (hi - lo <= eps) return round_to_exponent(lo, -static_cast<long>(n) - 2);
            }
            throw mu_cap_error("brackets do not close to 2^-" + std::to_string(n) +
                               " within the search cap");
        }
        case RealOp::NativeApprox:
            return nd.native(n);
    }
    throw error("unreachable");
}

/// View of a real as its cheap rational approximation sequence, paired
/// with the canonical 2^-omega error.
inline std::pair<CheapNumber, EffectiveInfinitesimal> to_cheap(const CReal& x) {
    CheapNumber seq = CheapNumber::native(
        [x](const Int& n) -> Rat {
            if (n < 0 || !n.fits_ulong_p() || n > 4'000'000)
                throw totality_error("approximation rank out of range");
            return approx(x, static_cast<Budget>(n.get_ui())).to_rat();
        },
        ValueSort::Rat, "approx(" + x.label() + ")");
    return {std::move(seq), canonical_eps()};
}

/// Decimal enclosure with k fractional digits: "<decimal> ± 10^-k".
/// The print precision is chosen so the dyadic enclosure radius stays
/// below a quarter of the printed radius; digits are never exact claims.
inline std::string digits(const CReal& x, Budget k) {
    if (k < 1) throw error("digits needs at least one fractional digit");
    Budget n = (3322 * k + 999) / 1000 + 2;  // >= k*log2(10) + 2
    Rat d = approx(x, n).to_rat();
    Int scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(k));
    Int scaled = round_ties_even(d * Rat(scale));
    bool negative = scaled < 0;
    Int mag = negative ? Int(-scaled) : scaled;
    Int whole = mag / scale, frac = mag % scale;
    std::string fs = frac.get_str();
    fs.insert(fs.begin(), static_cast<std::size_t>(k) - fs.size(), '0');
    std::string radius = "0." + std::string(static_cast<std::size_t>(k) - 1, '0') + "1";
    return (negative ? "-" : "") + whole.get_str() + "." + fs + " ± " + radius;
}

}  // namespace cheapreal
