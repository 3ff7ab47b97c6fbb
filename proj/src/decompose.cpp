#include "kmsym/decompose.hpp"

#include <algorithm>

namespace kmsym {

// ------------------------------------------------------------- canonical form

CanonicalForm::CanonicalForm(FieldSpecPtr spec, uint32_t m, uint32_t n,
                             std::map<std::vector<uint32_t>, WittField> coeffs)
    : spec_(std::move(spec)), m_(m), n_(n), coeffs_(std::move(coeffs)) {
    for (const auto& [tuple, w] : coeffs_) {
        if (tuple.size() != n_) throw InternalError("canonical tuple arity mismatch");
        for (size_t i = 0; i + 1 < tuple.size(); ++i)
            if (tuple[i] >= tuple[i + 1])
                throw InternalError("canonical tuple not strictly increasing");
        if (!tuple.empty() && tuple.back() >= spec_->rank())
            throw InternalError("canonical tuple index out of range");
        if (w.is_zero()) throw InternalError("canonical form stores a zero coefficient");
    }
}

ClassExpr CanonicalForm::to_class_expr() const {
    std::vector<SymbolTerm> terms;
    terms.reserve(coeffs_.size());
    for (const auto& [tuple, w] : coeffs_) {
        std::vector<RatFunc> slots;
        slots.reserve(tuple.size());
        for (uint32_t v : tuple) slots.push_back(RatFunc::variable(spec_, v));
        terms.emplace_back(w, std::move(slots));
    }
    return ClassExpr(spec_, m_, n_, std::move(terms));
}

bool CanonicalForm::operator==(const CanonicalForm& o) const {
    return same_spec(spec_, o.spec_) && m_ == o.m_ && n_ == o.n_ && coeffs_ == o.coeffs_;
}

// ----------------------------------------------------------------- coefficients

std::vector<RatFunc> common_slot_coefficients(const RatFunc& a, const Poly& f) {
    if (f.is_zero()) throw ZeroInput("common slot expansion of zero polynomial");
    RatFunc fr((f));
    std::vector<RatFunc> out;
    for (const auto& beta : pbasis_expand(f))
        out.push_back(a * RatFunc(pbasis_term_value(beta)) / fr);
    return out;
}

// ----------------------------------------------------------------- the engine

namespace {

enum class SlotState { Basis, Monomial, Constant, Rational, PolyStrip, PolyCommon };

struct SlotInfo {
    SlotState state = SlotState::Basis;
    // PolyStrip: f = h^p * M.
    std::optional<Poly> h;
    Monomial mono;
};

// Single variable with exponent 1 and coefficient 1.
bool is_basis_variable(const RatFunc& b) {
    if (!b.is_polynomial()) return false;
    const Poly& f = b.num();
    if (f.term_count() != 1 || f.leading_coeff() != 1) return false;
    return f.leading_monomial().total_degree() == 1;
}

size_t basis_variable_index(const RatFunc& b) {
    const Monomial& m = b.num().leading_monomial();
    for (size_t i = 0; i < m.nvars(); ++i)
        if (m.exponent(i) == 1) return i;
    throw InternalError("not a basis variable");
}

SlotInfo classify_slot(const RatFunc& b) {
    SlotInfo info;
    if (!b.is_polynomial()) {
        info.state = SlotState::Rational;
        return info;
    }
    const Poly& f = b.num();
    if (f.is_constant()) {
        info.state = SlotState::Constant;
        return info;
    }
    auto betas = pbasis_expand(f);
    if (betas.size() >= 2) {
        info.state = SlotState::PolyCommon;
        return info;
    }
    if (betas[0].h.is_one()) {
        info.mono = betas[0].m;
        info.state =
            info.mono.total_degree() == 1 ? SlotState::Basis : SlotState::Monomial;
        return info;
    }
    info.state = SlotState::PolyStrip;
    info.h = betas[0].h;
    info.mono = betas[0].m;
    return info;
}

bool slot_pending(SlotState s) {
    return s == SlotState::Constant || s == SlotState::Rational ||
           s == SlotState::PolyStrip || s == SlotState::PolyCommon;
}

class Decomposer {
public:
    explicit Decomposer(const ClassExpr& pi) : tb_(pi) {}

    DecomposeResult run() {
        for (uint32_t d = 0; d < expr().m(); ++d) expand_level(d);
        multilinearize();
        collect();
        return {build_canonical(), std::move(tb_).take()};
    }

private:
    TraceBuilder tb_;

    const ClassExpr& expr() const { return tb_.current(); }
    uint32_t m() const { return expr().m(); }
    uint32_t n() const { return expr().n(); }
    uint32_t p() const { return expr().p(); }
    const FieldSpecPtr& spec() const { return expr().spec(); }
    const SymbolTerm& term(size_t i) const { return expr().terms()[i]; }

    WittField depth_teich(uint32_t d, const RatFunc& a) const {
        std::vector<RatFunc> coords(m(), RatFunc::zero(spec()));
        coords.at(d) = a;
        return WittField(p(), std::move(coords));
    }

    uint64_t p_power(uint32_t e) const {
        uint64_t out = 1;
        for (uint32_t i = 0; i < e; ++i) out *= p();
        return out;
    }

    // ---- level phase: Teichmueller split + slot expansion for depth-d terms

    void expand_level(uint32_t d) {
        size_t i = 0;
        while (i < expr().term_count()) {
            const SymbolTerm& t = term(i);
            if (t.witt.depth() != d) {
                ++i;
                continue;
            }
            size_t j = 0;
            SlotInfo info;
            for (; j < n(); ++j) {
                info = classify_slot(t.slots[j]);
                if (slot_pending(info.state)) break;
            }
            if (j == n()) {
                ++i;
                continue;
            }
            // Witt slot first: w = [a] + V(tail) at this depth.
            const RatFunc a = t.witt.coord(d);
            WittField teich = depth_teich(d, a);
            if (t.witt != teich) {
                WittField tail = witt_sub(t.witt, teich);
                if (tail.depth() <= d) throw InternalError("v-split tail too shallow");
                tb_.apply(WittAddMove{false, i, 0, teich, tail});
                continue;  // revisit: Teichmueller part now sits at i
            }
            switch (info.state) {
                case SlotState::Constant:
                    // c^p = c in F_p, so the slot is its own p-th root.
                    tb_.apply(ShiftIntroMove{i, j, t.slots[j]});
                    break;  // term moved one level deeper (or vanished)
                case SlotState::Rational:
                    expand_rational(i, j, d);
                    break;
                case SlotState::PolyStrip:
                    strip_pth_power(i, j, info);
                    break;
                case SlotState::PolyCommon:
                    expand_common_slot(i, j, d, a);
                    break;
                default:
                    throw InternalError("unexpected slot state");
            }
        }
    }

    // w (x) f/g (x) rest  ->  w (x) f (x) rest + (-w) (x) g (x) rest.
    // The inverse slot dies through g^(-K) with K = p^(m-d), and K-1 copies
    // of the g slot collapse to the Witt-negated term.
    void expand_rational(size_t i, size_t j, uint32_t d) {
        const SymbolTerm t = term(i);
        RatFunc fr{t.slots[j].num()};
        RatFunc gr{t.slots[j].den()};
        uint64_t k = p_power(m() - d);
        tb_.apply(SlotMulMove{i, j, fr, gr.inverse()});
        tb_.apply(SlotMulMove{i + 1, j, gr.pow(static_cast<int64_t>(k - 1)),
                              gr.pow(-static_cast<int64_t>(k))});
        for (uint32_t s = 1; s <= m() - d; ++s) {
            int64_t e = -static_cast<int64_t>(k / p_power(s));
            tb_.apply(ShiftIntroMove{i + 2, j, gr.pow(e)});
        }
        size_t pos = i + 1;
        for (uint64_t e = k - 1; e >= 2; --e) {
            tb_.apply(SlotMulMove{pos, j, gr, gr.pow(static_cast<int64_t>(e - 1))});
            ++pos;
        }
        if (k - 1 >= 2) tb_.apply(PScalarMove{i + 1, k - 1});
    }

    // w (x) h^p*M (x) rest -> w (x) M (x) rest + (0,w_1^p,...) (x) h (x) rest.
    void strip_pth_power(size_t i, size_t j, const SlotInfo& info) {
        RatFunc hr{*info.h};
        RatFunc hp = hr.pow(p());
        if (info.mono.is_one()) {
            tb_.apply(ShiftIntroMove{i, j, hr});
            return;
        }
        RatFunc mono{Poly::monomial(spec(), info.mono, 1)};
        tb_.apply(SlotMulMove{i, j, hp, mono});
        tb_.apply(ShiftIntroMove{i, j, hr});
    }

    // The common-slot expansion of [a] (x) f (x) rest over f = sum_j beta_j:
    // splits the Witt coefficient into the V^d([c_j]) plus a deeper remainder,
    // trades each (c_j, f) pair for (c_j, beta_j) plus slot-a bookkeeping
    // terms, and cancels those against [a] (x) a (the defining relation).
    void expand_common_slot(size_t i, size_t j, uint32_t d, const RatFunc& a) {
        const SymbolTerm t0 = term(i);
        const Poly f = t0.slots[j].num();
        RatFunc fr{f};
        auto betas = pbasis_expand(f);
        size_t k = betas.size();
        std::vector<RatFunc> beta_vals, cs;
        for (const auto& beta : betas) {
            beta_vals.emplace_back(pbasis_term_value(beta));
            cs.push_back(a * beta_vals.back() / fr);
        }
        std::vector<WittField> cw;
        for (const auto& c : cs) cw.push_back(depth_teich(d, c));

        // Peel the Witt coefficient: [a] = C_0 + ... + C_{k-1} + remainder.
        WittField rest = t0.witt;
        bool has_remainder = false;
        for (size_t q = 0; q < k; ++q) {
            if (rest == cw[q]) {
                if (q + 1 != k) throw InternalError("common-slot peel stopped early");
                break;
            }
            WittField next = witt_sub(rest, cw[q]);
            tb_.apply(WittAddMove{false, i + q, 0, cw[q], next});
            rest = next;
            if (q + 1 == k) {
                if (rest.depth() <= d) throw InternalError("common-slot remainder too shallow");
                has_remainder = true;
            }
        }

        // Each batch entry: slot f = beta_q * (a / c_q), then a/c_q = a * (1/c_q),
        // then eliminate the inverse slot against the relation [c_q] (x) c_q.
        uint64_t big_k = p_power(m() - d);
        size_t pos = i;
        for (size_t q = 0; q < k; ++q) {
            tb_.apply(SlotMulMove{pos, j, beta_vals[q], a / cs[q]});
            tb_.apply(SlotMulMove{pos + 1, j, a, cs[q].inverse()});
            // inverse elimination at pos + 2
            tb_.apply(SlotMulMove{pos + 2, j, cs[q].pow(static_cast<int64_t>(big_k - 1)),
                                  cs[q].pow(-static_cast<int64_t>(big_k))});
            for (uint32_t s = 1; s <= m() - d; ++s) {
                int64_t e = -static_cast<int64_t>(big_k / p_power(s));
                tb_.apply(ShiftIntroMove{pos + 3, j, cs[q].pow(e)});
            }
            size_t peel = pos + 2;
            for (uint64_t e = big_k - 1; e >= 2; --e) {
                tb_.apply(SlotMulMove{peel, j, cs[q], cs[q].pow(static_cast<int64_t>(e - 1))});
                ++peel;
            }
            if (big_k - 1 >= 2) tb_.apply(PScalarMove{pos + 2, big_k - 1});
            // (-C_q) (x) c_q now sits at pos + 2; cancel with the inserted relation.
            std::vector<RatFunc> match_slots = term(pos + 2).slots;
            tb_.apply(SlotMatchMove{true, pos + 3, j, d, match_slots});
            tb_.apply(WittAddMove{true, pos + 2, pos + 3});
            pos += 2;
        }

        // Merge the slot-a terms and cancel them against [a] (x) a.
        for (size_t s = 1; s < k; ++s) tb_.apply(WittAddMove{true, i + 1, i + s + 2});
        if (has_remainder) {
            WittField neg_rest = witt_neg(rest);
            tb_.apply(WittAddMove{false, i + 1, 0, t0.witt, neg_rest});
            tb_.apply(SlotMatchMove{false, i + 1, j, d, {}});
        } else {
            tb_.apply(SlotMatchMove{false, i + 1, j, d, {}});
        }
    }

    // ---- multilinear phase: monomial slots to sorted distinct variables

    void multilinearize() {
        size_t i = 0;
        while (i < expr().term_count()) {
            const SymbolTerm& t = term(i);

            size_t run = 1;
            while (i + run < expr().term_count() && term(i + run) == t) ++run;
            if (run >= 2) {
                tb_.apply(PScalarMove{i, run});
                continue;
            }

            bool acted = false;
            for (size_t j1 = 0; j1 < n() && !acted; ++j1)
                for (size_t j2 = j1 + 1; j2 < n() && !acted; ++j2)
                    if (t.slots[j1] == t.slots[j2]) {
                        tb_.apply(RepeatSlotMove{false, i, j1, j2, std::nullopt, {}});
                        acted = true;
                    }
            if (acted) continue;

            for (size_t j = 0; j < n() && !acted; ++j) {
                if (is_basis_variable(t.slots[j])) continue;
                const Poly& f = t.slots[j].num();
                if (!t.slots[j].is_polynomial() || f.term_count() != 1 ||
                    f.leading_coeff() != 1)
                    throw InternalError("non-monomial slot reached multilinear phase");
                const Monomial& mono = f.leading_monomial();
                size_t v = 0;
                while (mono.exponent(v) == 0) ++v;
                RatFunc var = RatFunc::variable(spec(), v);
                Monomial rest_mono = mono.divide_by(Monomial::variable(mono.nvars(), v));
                RatFunc rest{Poly::monomial(spec(), rest_mono, 1)};
                tb_.apply(SlotMulMove{i, j, var, rest});
                acted = true;
            }
            if (acted) continue;

            for (size_t j = 0; j + 1 < n() && !acted; ++j) {
                if (basis_variable_index(t.slots[j]) > basis_variable_index(t.slots[j + 1])) {
                    swap_adjacent_slots(tb_, i, j);
                    acted = true;
                }
            }
            if (!acted) ++i;
        }
    }

    // ---- collection: merge equal slot tuples

    void collect() {
        size_t i = 0;
        while (i < expr().term_count()) {
            bool merged = false;
            for (size_t i2 = i + 1; i2 < expr().term_count(); ++i2) {
                if (term(i2).slots == term(i).slots) {
                    tb_.apply(WittAddMove{true, i, i2});
                    merged = true;
                    break;
                }
            }
            if (!merged) ++i;
        }
    }

    CanonicalForm build_canonical() {
        std::map<std::vector<uint32_t>, WittField> coeffs;
        for (const auto& t : expr().terms()) {
            std::vector<uint32_t> tuple;
            tuple.reserve(n());
            for (const auto& b : t.slots) {
                if (!is_basis_variable(b)) throw InternalError("non-canonical final slot");
                tuple.push_back(static_cast<uint32_t>(basis_variable_index(b)));
            }
            for (size_t q = 0; q + 1 < tuple.size(); ++q)
                if (tuple[q] >= tuple[q + 1]) throw InternalError("final tuple not increasing");
            if (!coeffs.emplace(std::move(tuple), t.witt).second)
                throw InternalError("duplicate tuple after collection");
        }
        return CanonicalForm(spec(), m(), n(), std::move(coeffs));
    }
};

}  // namespace

DecomposeResult decompose(const ClassExpr& pi) { return Decomposer(pi).run(); }

}  // namespace kmsym
