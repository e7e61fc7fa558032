/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cheapreal/creal.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace cheapreal {

struct RatInterval {
    Rat lo, hi;

    Rat width() const { return hi - lo; }
    Rat max_abs() const { return std::max(abs_rat(lo), abs_rat(hi)); }
    bool contains(const RatInterval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
    Rat midpoint() const { return (lo + hi) / 2; }
};

inline RatInterval iv_point(const Rat& v) { return {v, v}; }
inline RatInterval iv_add(const RatInterval& a, const RatInterval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline RatInterval iv_sub(const RatInterval& a, const RatInterval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

inline RatInterval iv_mul(const RatInterval& a, const RatInterval& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return {lo, hi};
}

enum class FuncOp { ConstReal, Identity, Add, Sub, Mul, Compose, PolyCoeffs };

/// Expression language for functions on a compact interval: constants
/// are computable reals, so are polynomial coefficients. Compose nodes
/// carry the outer function's declared domain for the range check.
class FuncExpr {
   public:
    struct Node {
        FuncOp op;
        std::vector<FuncExpr> children;
        std::optional<CReal> value;   // ConstReal
        std::vector<CReal> coeffs;    // PolyCoeffs
        Rat outer_lo, outer_hi;       // Compose
    };

    FuncOp op() const { return node_->op; }
    const std::vector<FuncExpr>& children() const { return node_->children; }
    const CReal& value() const { return *node_->value; }
    const std::vector<CReal>& coeffs() const { return node_->coeffs; }
    RatInterval outer_domain() const { return {node_->outer_lo, node_->outer_hi}; }

    static FuncExpr constant(CReal c) {
        Node n{FuncOp::ConstReal, {}, std::move(c), {}, Rat(), Rat()};
        return FuncExpr(std::move(n));
    }
    static FuncExpr identity() { return FuncExpr(Node{FuncOp::Identity, {}, {}, {}, Rat(), Rat()}); }
    static FuncExpr add(FuncExpr a, FuncExpr b) {
        return FuncExpr(Node{FuncOp::Add, {std::move(a), std::move(b)}, {}, {}, Rat(), Rat()});
    }
    static FuncExpr sub(FuncExpr a, FuncExpr b) {
        return FuncExpr(Node{FuncOp::Sub, {std::move(a), std::move(b)}, {}, {}, Rat(), Rat()});
    }
    static FuncExpr mul(FuncExpr a, FuncExpr b) {
        return FuncExpr(Node{FuncOp::Mul, {std::move(a), std::move(b)}, {}, {}, Rat(), Rat()});
    }
    static FuncExpr compose(FuncExpr outer, FuncExpr inner, const Rat& outer_lo, const Rat& outer_hi) {
        return FuncExpr(Node{FuncOp::Compose, {std::move(outer), std::move(inner)}, {}, {}, outer_lo,
                             outer_hi});
    }
    static FuncExpr poly(std::vector<CReal> coefficients) {
        return FuncExpr(Node{FuncOp::PolyCoeffs, {}, {}, std::move(coefficients), Rat(), Rat()});
    }

   private:
    explicit FuncExpr(Node n) : node_(std::make_shared<Node>(std::move(n))) {}
    std::shared_ptr<const Node> node_;
};

inline std::string describe(const FuncExpr& e) {
    switch (e.op()) {
        case FuncOp::ConstReal:
            return e.value().op() == RealOp::FromRational ? rat_to_string(e.value().rational())
                                                          : "<real>";
        case FuncOp::Identity:
            return "x";
        case FuncOp::Add:
            return "(" + describe(e.children()[0]) + " + " + describe(e.children()[1]) + ")";
        case FuncOp::Sub:
            return "(" + describe(e.children()[0]) + " - " + describe(e.children()[1]) + ")";
        case FuncOp::Mul:
            return "(" + describe(e.children()[0]) + " * " + describe(e.children()[1]) + ")";
        case FuncOp::Compose:
            return describe(e.children()[0]) + " o " + describe(e.children()[1]);
        case FuncOp::PolyCoeffs: {
            std::string s = "poly[";
            for (std::size_t i = 0; i < e.coeffs().size(); ++i) {
                if (i) s += ", ";
                s += e.coeffs()[i].op() == RealOp::FromRational ? rat_to_string(e.coeffs()[i].rational())
                                                                : "<real>";
            }
            return s + "]";
        }
    }
    return "?";
}

namespace detail {

inline RatInterval creal_interval(const CReal& c, Budget prec) {
    Rat mid = approx(c, prec).to_rat();
    Rat r = pow2_neg(prec);
    return {mid - r, mid + r};
}

inline RatInterval eval_interval(const FuncExpr& e, const RatInterval& var, Budget const_prec) {
    switch (e.op()) {
        case FuncOp::ConstReal:
            return creal_interval(e.value(), const_prec);
        case FuncOp::Identity:
            return var;
        case FuncOp::Add:
            return iv_add(eval_interval(e.children()[0], var, const_prec),
                          eval_interval(e.children()[1], var, const_prec));
        case FuncOp::Sub:
            return iv_sub(eval_interval(e.children()[0], var, const_prec),
                          eval_interval(e.children()[1], var, const_prec));
        case FuncOp::Mul:
            return iv_mul(eval_interval(e.children()[0], var, const_prec),
                          eval_interval(e.children()[1], var, const_prec));
        case FuncOp::Compose: {
            RatInterval inner = eval_interval(e.children()[1], var, const_prec);
            if (!e.outer_domain().contains(inner))
                throw domain_error("composition range violation in " + describe(e.children()[1]));
            return eval_interval(e.children()[0], inner, const_prec);
        }
        case FuncOp::PolyCoeffs: {
            RatInterval acc = iv_point(Rat(0));
            for (auto it = e.coeffs().rbegin(); it != e.coeffs().rend(); ++it)
                acc = iv_add(creal_interval(*it, const_prec), iv_mul(var, acc));
            return acc;
        }
    }
    throw error("unreachable");
}

struct FuncBounds {
    Rat max_abs;
    Rat lip;
};

inline Rat creal_abs_bound(const CReal& c) {
    return abs_rat(approx(c, 8).to_rat()) + pow2_neg(8);
}

inline FuncBounds func_bounds(const FuncExpr& e, const RatInterval& domain) {
    switch (e.op()) {
        case FuncOp::ConstReal:
            return {creal_abs_bound(e.value()), Rat(0)};
        case FuncOp::Identity:
            return {domain.max_abs(), Rat(1)};
        case FuncOp::Add:
        case FuncOp::Sub: {
            auto a = func_bounds(e.children()[0], domain);
            auto b = func_bounds(e.children()[1], domain);
            return {a.max_abs + b.max_abs, a.lip + b.lip};
        }
        case FuncOp::Mul: {
            auto a = func_bounds(e.children()[0], domain);
            auto b = func_bounds(e.children()[1], domain);
            return {a.max_abs * b.max_abs, a.lip * b.max_abs + a.max_abs * b.lip};
        }
        case FuncOp::Compose: {
            RatInterval inner_range = eval_interval(e.children()[1], domain, 16);
            auto outer = func_bounds(e.children()[0], inner_range);
            auto inner = func_bounds(e.children()[1], domain);
            return {outer.max_abs, outer.lip * inner.lip};
        }
        case FuncOp::PolyCoeffs: {
            Rat r = domain.max_abs();
            if (r < 1) r = 1;  // conservative: keeps r^{i-1} monotone
            Rat value(0), slope(0), rpow(1), prev(1);
            for (std::size_t i = 0; i < e.coeffs().size(); ++i) {
                Rat c = creal_abs_bound(e.coeffs()[i]);
                value += c * rpow;
                if (i >= 1) slope += Rat(static_cast<unsigned long>(i)) * c * prev;
                prev = rpow;
                rpow *= r;
            }
            return {value, slope};
        }
    }
    throw error("unreachable");
}

/// Exact polynomial coefficients, when every constant is an exact
/// rational; the fast evaluation path for solver grid scans.
inline std::optional<std::vector<Rat>> exact_poly(const FuncExpr& e) {
    auto trim = [](std::vector<Rat> v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
        if (v.empty()) v.push_back(Rat(0));
        return v;
    };
    switch (e.op()) {
        case FuncOp::ConstReal:
            if (e.value().op() != RealOp::FromRational) return std::nullopt;
            return std::vector<Rat>{e.value().rational()};
        case FuncOp::Identity:
            return std::vector<Rat>{Rat(0), Rat(1)};
        case FuncOp::Add:
        case FuncOp::Sub: {
            auto a = exact_poly(e.children()[0]);
            auto b = exact_poly(e.children()[1]);
            if (!a || !b) return std::nullopt;
            std::vector<Rat> out(std::max(a->size(), b->size()), Rat(0));
            for (std::size_t i = 0; i < a->size(); ++i) out[i] += (*a)[i];
            for (std::size_t i = 0; i < b->size(); ++i)
                out[i] += e.op() == FuncOp::Add ? (*b)[i] : Rat(-(*b)[i]);
            return trim(std::move(out));
        }
        case FuncOp::Mul: {
            auto a = exact_poly(e.children()[0]);
            auto b = exact_poly(e.children()[1]);
            if (!a || !b) return std::nullopt;
            if (a->size() + b->size() > 64) return std::nullopt;
            std::vector<Rat> out(a->size() + b->size() - 1, Rat(0));
            for (std::size_t i = 0; i < a->size(); ++i)
                for (std::size_t j = 0; j < b->size(); ++j) out[i + j] += (*a)[i] * (*b)[j];
            return trim(std::move(out));
        }
        case FuncOp::PolyCoeffs: {
            std::vector<Rat> out;
            for (const auto& c : e.coeffs()) {
                if (c.op() != RealOp::FromRational) return std::nullopt;
                out.push_back(c.rational());
            }
            return trim(std::move(out));
        }
        case FuncOp::Compose:
            return std::nullopt;
    }
    return std::nullopt;
}

inline Rat horner(const std::vector<Rat>& coeffs, const Rat& x) {
    Rat acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = *it + x * acc;
    return acc;
}

}  // namespace detail

/// A computable function on [a, b]: a uniform rational approximation
/// psi with |psi(d, n) - f(d)| <= 2^-n at dyadic points, plus an
/// effective modulus of continuity.
struct CFunc {
    Rat a, b;
    std::function<Dyadic(const Dyadic&, Budget)> psi;
    std::function<Budget(Budget)> modulus;
    std::optional<FuncExpr> expr;
    std::string label;

    bool contains(const Rat& x) const { return a <= x && x <= b; }
};

/// Builds psi and a Lipschitz-derived modulus for an expression tree.
/// psi evaluates in exact rational interval arithmetic, refining the
/// constants' precision until the enclosure is tight, and rounds once.
inline CFunc synthesize(const FuncExpr& e, const Rat& a, const Rat& b) {
    if (!(a <= b)) throw domain_error("empty function domain");
    RatInterval domain{a, b};
    // surfaces composition range violations at synthesis time
    (void)detail::eval_interval(e, domain, 16);

    Rat lip = detail::func_bounds(e, domain).lip;
    Budget lip_shift = lip <= 1 ? 0 : static_cast<Budget>(ceil_log2(lip));
    auto modulus = [lip_shift](Budget n) { return n + lip_shift; };

    auto poly = detail::exact_poly(e);
    auto psi = [e, poly](const Dyadic& d, Budget n) -> Dyadic {
        if (poly) return round_to_exponent(detail::horner(*poly, d.to_rat()), -static_cast<long>(n) - 1);
        RatInterval var = iv_point(d.to_rat());
        Rat target = pow2_neg(n + 1);
        for (Budget k = n + 4; k <= n + 400; k = 2 * k + 8) {
            RatInterval out = detail::eval_interval(e, var, k);
            if (out.width() <= target)
                return round_to_exponent(out.midpoint(), -static_cast<long>(n) - 1);
        }
        throw error("psi enclosure failed to converge for " + describe(e));
    };
    return CFunc{a, b, std::move(psi), std::move(modulus), e, describe(e)};
}

/// psi at the argument's dyadic approximation, one precision level up:
/// the modulus absorbs the argument error, psi contributes the rest.
inline Dyadic eval(const CFunc& f, const CReal& x, Budget n) {
    Budget m = f.modulus(n + 1);
    Dyadic d = approx(x, m);
    Rat dv = d.to_rat();
    if (!f.contains(dv)) {
        Rat slack = pow2_neg(m);
        if (dv < f.a - slack || dv > f.b + slack)
            throw domain_error("argument enclosure exits the domain of " + f.label);
        long g = static_cast<long>(m) + 2;
        Dyadic inward = dv < f.a ? Dyadic(rat_ceil(f.a * Rat(pow2(static_cast<unsigned long>(g)))), -g)
                                 : Dyadic(rat_floor(f.b * Rat(pow2(static_cast<unsigned long>(g)))), -g);
        d = inward;
    }
    return f.psi(d, n + 1);
}

struct ModulusViolation {
    Budget n;
    Rat x, y;
    Rat observed;
    Rat bound;
};

struct ModulusReport {
    std::vector<ModulusViolation> violations;
    Budget samples_run = 0;
    bool pass() const { return violations.empty(); }
};

/// Samples dyadic pairs within the modulus distance and reports every
/// breach of the 2^-n bound (approximation slack included).
inline ModulusReport check_modulus(const CFunc& f, Budget n_max, Budget samples,
                                   std::uint64_t seed = 0x5eed) {
    ModulusReport report;
    std::mt19937_64 rng(seed);
    Budget per_level = std::max<Budget>(1, samples / (n_max + 1));
    for (Budget n = 0; n <= n_max; ++n) {
        Budget m = f.modulus(n);
        long g = static_cast<long>(m) + 4;
        Int scale = pow2(static_cast<unsigned long>(g));
        Int lo = rat_ceil(f.a * Rat(scale)), hi = rat_floor(f.b * Rat(scale));
        if (hi <= lo) continue;
        Rat bound = pow2_neg(n) + pow2_neg(n + 1);
        for (Budget s = 0; s < per_level; ++s) {
            Int span = hi - lo;
            Int u = lo + Int(rng() % std::max<unsigned long>(1, span.get_ui() + 1));
            long max_off = 16;  // offsets in units of 2^-(m+4), capped at 2^-m
            long off = static_cast<long>(rng() % static_cast<unsigned long>(2 * max_off + 1)) - max_off;
            Int v = u + off;
            if (v < lo) v = lo;
            if (v > hi) v = hi;
            Dyadic dx(u, -g), dy(v, -g);
            Rat observed = abs_rat(f.psi(dx, n + 2).to_rat() - f.psi(dy, n + 2).to_rat());
            ++report.samples_run;
            if (observed > bound)
                report.violations.push_back({n, dx.to_rat(), dy.to_rat(), observed, bound});
        }
    }
    return report;
}

/// Ladder of separation thresholds 1/k for the continuity checkers:
/// powers of two up to roughly sqrt(budget), so O(1/n)-decaying
/// differences settle inside the evidence window before the finest
/// threshold is tested.
inline std::vector<Budget> continuity_ladder(Budget budget) {
    Budget root = 1;
    while ((root + 1) * (root + 1) <= budget) ++root;
    std::vector<Budget> ks;
    for (Budget k = 1; k <= root; k *= 2) ks.push_back(k);
    return ks;
}

/// Budgeted falsification core shared by the continuity checkers:
/// given observed separations per rank, True when they shrink below
/// every tested threshold, False when some threshold is exceeded
/// throughout the evidence window, Unknown on mixed evidence.
inline Trilean separation_verdict(const std::function<Rat(Budget)>& separation, Budget budget) {
    std::vector<Rat> diffs;
    diffs.reserve(budget + 1);
    for (Budget n = 0; n <= budget; ++n) diffs.push_back(separation(n));
    Budget true_witness = 0;
    for (Budget k : continuity_ladder(budget)) {
        Rat threshold = make_rat(Int(1), Int(static_cast<unsigned long>(k)));
        auto t = eventually_via_trichotomy(
            [&](Budget n) { return diffs[static_cast<std::size_t>(n)] <= threshold; }, budget);
        if (t.is_false()) return trilean_false(*t.witness_rank, budget);
        if (t.is_unknown()) return trilean_unknown(budget);
        true_witness = std::max(true_witness, *t.witness_rank);
    }
    return trilean_true(true_witness, budget);
}

/// Continuity at a standard point, via the cheap characterization:
/// y = x + 1/(omega+1) clipped to the domain must have f(y)
/// infinitesimally close to f(x).
inline Trilean check_continuity_at(const CFunc& f, const CReal& x, Budget budget) {
    const Budget prec = 24;
    Dyadic dx = approx(x, prec);
    Rat xv = dx.to_rat();
    if (!f.contains(xv)) throw domain_error("continuity point outside the domain");
    Rat fx = f.psi(dx, prec).to_rat();
    auto separation = [&](Budget n) -> Rat {
        Rat yv = xv + make_rat(Int(1), Int(static_cast<unsigned long>(n) + 1));
        if (yv > f.b) yv = f.b;
        if (yv < f.a) yv = f.a;
        Dyadic dy = round_to_exponent(yv, -static_cast<long>(prec));
        if (dy.to_rat() > f.b) dy = Dyadic(rat_floor(f.b * Rat(pow2(prec))), -static_cast<long>(prec));
        return abs_rat(f.psi(dy, prec).to_rat() - fx);
    };
    return separation_verdict(separation, budget);
}

/// Uniform continuity over the whole domain: the moving pair
/// (x_j, x_j + 1/(n+1)) with x_j traversing a rank-n grid.
inline Trilean check_uniform_continuity(const CFunc& f, Budget budget, Budget grid_cap = 256) {
    const Budget prec = 20;
    Int scale = pow2(prec);
    auto to_dyadic = [&](Rat v) {
        if (v > f.b) v = f.b;
        if (v < f.a) v = f.a;
        Dyadic d = round_to_exponent(v, -static_cast<long>(prec));
        if (d.to_rat() > f.b) d = Dyadic(rat_floor(f.b * Rat(scale)), -static_cast<long>(prec));
        if (d.to_rat() < f.a) d = Dyadic(rat_ceil(f.a * Rat(scale)), -static_cast<long>(prec));
        return d;
    };
    auto separation = [&](Budget n) -> Rat {
        Budget cells = std::min<Budget>(std::max<Budget>(n, 1), grid_cap);
        Rat delta = make_rat(Int(1), Int(static_cast<unsigned long>(n) + 1));
        Rat worst(0);
        for (Budget j = 0; j <= cells; ++j) {
            Rat xj = f.a + (f.b - f.a) * Rat(static_cast<unsigned long>(j)) /
                               Rat(static_cast<unsigned long>(cells));
            Dyadic dx = to_dyadic(xj);
            Dyadic dy = to_dyadic(xj + delta);
            Rat diff = abs_rat(f.psi(dx, prec).to_rat() - f.psi(dy, prec).to_rat());
            if (diff > worst) worst = diff;
        }
        return worst;
    };
    return separation_verdict(separation, budget);
}

// --- round-trip converters between the cheap-side and standard-side
// --- formulations of the effective modulus and the uniform family

/// The cheap discretization bound delta = 2^{-m(omega)} of a modulus.
inline CheapNumber delta_from_modulus(const std::function<Budget(Budget)>& modulus) {
    return CheapNumber::native(
        [modulus](const Int& n) -> Rat {
            if (n < 0 || !n.fits_ulong_p() || n > 4'000'000)
                throw totality_error("modulus rank out of range");
            return pow2_neg(modulus(static_cast<Budget>(n.get_ui())));
        },
        ValueSort::Rat, "2^-m(omega)");
}

/// Recovers a standard modulus from a positive cheap discretization
/// bound: m(n) = ceil(log2(1/delta_n)).
inline std::function<Budget(Budget)> modulus_from_delta(const CheapNumber& delta) {
    return [delta](Budget n) -> Budget {
        Rat d = delta.at(n);
        if (!(d > 0)) throw error("discretization bound is not positive at rank " + std::to_string(n));
        long m = ceil_log2(1 / d);
        return m <= 0 ? 0 : static_cast<Budget>(m);
    };
}

/// The indexed family psi(q) = (psi(q, n))_n as cheap numbers,
/// uniformly computable in q.
inline std::function<CheapNumber(const Dyadic&)> uniform_family(const CFunc& f) {
    return [f](const Dyadic& q) {
        return CheapNumber::native(
            [f, q](const Int& n) -> Rat {
                if (n < 0 || !n.fits_ulong_p() || n > 4'000'000)
                    throw totality_error("family rank out of range");
                return f.psi(q, static_cast<Budget>(n.get_ui())).to_rat();
            },
            ValueSort::Rat, "psi(" + dyadic_to_string(q) + ", omega)");
    };
}

/// Rebuilds a CFunc from the cheap-side data: a uniform family within
/// 2^-omega and a cheap discretization bound.
inline CFunc cfunc_from_family(const std::function<CheapNumber(const Dyadic&)>& family,
                               const CheapNumber& delta, const Rat& a, const Rat& b,
                               std::string label = "family") {
    auto modulus = modulus_from_delta(delta);
    auto psi = [family](const Dyadic& d, Budget n) {
        Rat v = family(d).at(n + 1);
        return round_to_exponent(v, -static_cast<long>(n) - 2);
    };
    return CFunc{a, b, std::move(psi), std::move(modulus), std::nullopt, std::move(label)};
}

}  // namespace cheapreal
