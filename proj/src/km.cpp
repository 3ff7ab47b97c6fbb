#include "kmsym/km.hpp"

#include <sstream>

namespace kmsym {

// ----------------------------------------------------------------- the class

SymbolTerm::SymbolTerm(WittField w, std::vector<RatFunc> s)
    : witt(std::move(w)), slots(std::move(s)) {
    if (slots.empty()) throw PreconditionFailed("symbol needs at least one slot");
    for (const auto& b : slots)
        if (b.is_zero()) throw ZeroInput("symbol slot must be a unit (nonzero)");
}

ClassExpr::ClassExpr(FieldSpecPtr spec, uint32_t m, uint32_t n, std::vector<SymbolTerm> terms)
    : spec_(std::move(spec)), m_(m), n_(n) {
    if (m_ < 1 || n_ < 1) throw PreconditionFailed("class needs m >= 1 and n >= 1");
    terms_.reserve(terms.size());
    for (auto& t : terms) {
        if (t.witt.p() != spec_->p() || t.witt.length() != m_)
            throw SpecMismatch("term Witt vector disagrees with class (p, m)");
        if (t.slots.size() != n_) throw SpecMismatch("term slot count disagrees with class n");
        for (const auto& c : t.witt.coords()) require_same_spec(c.spec(), spec_, "class term");
        for (const auto& b : t.slots) require_same_spec(b.spec(), spec_, "class term");
        if (t.witt.is_zero()) continue;  // the identity element of the group
        terms_.push_back(std::move(t));
    }
}

ClassExpr ClassExpr::zero(FieldSpecPtr spec, uint32_t m, uint32_t n) {
    return ClassExpr(std::move(spec), m, n, {});
}

bool ClassExpr::operator==(const ClassExpr& o) const {
    return same_spec(spec_, o.spec_) && m_ == o.m_ && n_ == o.n_ && terms_ == o.terms_;
}

// -------------------------------------------------------------- rewrite moves

const char* move_kind_name(const RewriteMove& mv) {
    struct Namer {
        const char* operator()(const ArtinSchreierMove&) { return "artin_schreier"; }
        const char* operator()(const SlotMatchMove&) { return "slot_match"; }
        const char* operator()(const RepeatSlotMove&) { return "repeat_slot"; }
        const char* operator()(const SlotMulMove&) { return "slot_mul"; }
        const char* operator()(const WittAddMove&) { return "witt_add"; }
        const char* operator()(const PScalarMove&) { return "p_scalar"; }
        const char* operator()(const ShiftIntroMove&) { return "shift_intro"; }
    };
    return std::visit(Namer{}, mv);
}

namespace {

void require_term_index(const ClassExpr& e, size_t i, const char* kind) {
    if (i >= e.term_count())
        throw SideConditionFailed(std::string(kind) + ": term index " + std::to_string(i) +
                                  " out of range");
}

void require_insert_index(const ClassExpr& e, size_t i, const char* kind) {
    if (i > e.term_count())
        throw SideConditionFailed(std::string(kind) + ": insert position " + std::to_string(i) +
                                  " out of range");
}

void require_slot_index(const ClassExpr& e, size_t j, const char* kind) {
    if (j >= e.n())
        throw SideConditionFailed(std::string(kind) + ": slot index " + std::to_string(j) +
                                  " out of range");
}

void require_witness_mode(const ClassExpr& e, const WittField& w, const char* kind) {
    if (w.p() != e.p() || w.length() != e.m())
        throw SideConditionFailed(std::string(kind) + ": witness disagrees with class (p, m)");
}

// V^coord([a]): a at coordinate `coord`, zero elsewhere.
WittField coord_teich(const ClassExpr& e, uint32_t coord, const RatFunc& a) {
    std::vector<RatFunc> coords(e.m(), RatFunc::zero(e.spec()));
    coords.at(coord) = a;
    return WittField(e.p(), std::move(coords));
}

std::vector<SymbolTerm> copy_terms(const ClassExpr& e) { return e.terms(); }

ClassExpr rebuild(const ClassExpr& e, std::vector<SymbolTerm> terms) {
    return ClassExpr(e.spec(), e.m(), e.n(), std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const ArtinSchreierMove& mv) {
    require_witness_mode(e, mv.witness, "artin_schreier");
    auto terms = copy_terms(e);
    WittField asv = wp(mv.witness);
    if (mv.insert) {
        require_insert_index(e, mv.index, "artin_schreier");
        if (mv.slots.size() != e.n())
            throw SideConditionFailed("artin_schreier: inserted term has wrong slot count");
        terms.insert(terms.begin() + mv.index, SymbolTerm(asv, mv.slots));
    } else {
        require_term_index(e, mv.index, "artin_schreier");
        if (terms[mv.index].witt != asv)
            throw SideConditionFailed("artin_schreier: P(" + render(mv.witness) +
                                      ") = " + render(asv) + " != " +
                                      render(terms[mv.index].witt));
        terms.erase(terms.begin() + mv.index);
    }
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const SlotMatchMove& mv) {
    require_slot_index(e, mv.slot, "slot_match");
    if (mv.coord >= e.m()) throw SideConditionFailed("slot_match: Witt coordinate out of range");
    auto terms = copy_terms(e);
    if (mv.insert) {
        require_insert_index(e, mv.index, "slot_match");
        if (mv.slots.size() != e.n())
            throw SideConditionFailed("slot_match: inserted term has wrong slot count");
        WittField w = coord_teich(e, mv.coord, mv.slots[mv.slot]);
        terms.insert(terms.begin() + mv.index, SymbolTerm(std::move(w), mv.slots));
    } else {
        require_term_index(e, mv.index, "slot_match");
        const SymbolTerm& t = terms[mv.index];
        WittField expected = coord_teich(e, mv.coord, t.slots[mv.slot]);
        if (t.witt != expected)
            throw SideConditionFailed("slot_match: Witt slot " + render(t.witt) +
                                      " is not V^" + std::to_string(mv.coord) + "([" +
                                      render(t.slots[mv.slot]) + "])");
        terms.erase(terms.begin() + mv.index);
    }
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const RepeatSlotMove& mv) {
    require_slot_index(e, mv.slot1, "repeat_slot");
    require_slot_index(e, mv.slot2, "repeat_slot");
    if (mv.slot1 == mv.slot2)
        throw SideConditionFailed("repeat_slot: needs two distinct slot positions");
    auto terms = copy_terms(e);
    if (mv.insert) {
        require_insert_index(e, mv.index, "repeat_slot");
        if (!mv.witt) throw SideConditionFailed("repeat_slot: insert needs a Witt vector");
        require_witness_mode(e, *mv.witt, "repeat_slot");
        if (mv.slots.size() != e.n())
            throw SideConditionFailed("repeat_slot: inserted term has wrong slot count");
        if (mv.slots[mv.slot1] != mv.slots[mv.slot2])
            throw SideConditionFailed("repeat_slot: inserted slots " + std::to_string(mv.slot1) +
                                      " and " + std::to_string(mv.slot2) + " differ");
        terms.insert(terms.begin() + mv.index, SymbolTerm(*mv.witt, mv.slots));
    } else {
        require_term_index(e, mv.index, "repeat_slot");
        const SymbolTerm& t = terms[mv.index];
        if (t.slots[mv.slot1] != t.slots[mv.slot2])
            throw SideConditionFailed("repeat_slot: slots " + render(t.slots[mv.slot1]) +
                                      " and " + render(t.slots[mv.slot2]) + " differ");
        terms.erase(terms.begin() + mv.index);
    }
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const SlotMulMove& mv) {
    require_term_index(e, mv.index, "slot_mul");
    require_slot_index(e, mv.slot, "slot_mul");
    if (mv.left.is_zero() || mv.right.is_zero())
        throw SideConditionFailed("slot_mul: factors must be units");
    auto terms = copy_terms(e);
    SymbolTerm& t = terms[mv.index];
    RatFunc prod = mv.left * mv.right;
    if (prod != t.slots[mv.slot])
        throw SideConditionFailed("slot_mul: (" + render(mv.left) + ")*(" + render(mv.right) +
                                  ") = " + render(prod) + " != " + render(t.slots[mv.slot]));
    SymbolTerm right_term = t;
    t.slots[mv.slot] = mv.left;
    right_term.slots[mv.slot] = mv.right;
    terms.insert(terms.begin() + mv.index + 1, std::move(right_term));
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const WittAddMove& mv) {
    auto terms = copy_terms(e);
    if (mv.merge) {
        require_term_index(e, mv.index, "witt_add");
        require_term_index(e, mv.index2, "witt_add");
        if (mv.index >= mv.index2)
            throw SideConditionFailed("witt_add: merge needs index < index2");
        if (terms[mv.index].slots != terms[mv.index2].slots)
            throw SideConditionFailed("witt_add: merged terms have different slot lists");
        terms[mv.index].witt = witt_add(terms[mv.index].witt, terms[mv.index2].witt);
        terms.erase(terms.begin() + mv.index2);
    } else {
        require_term_index(e, mv.index, "witt_add");
        if (!mv.left || !mv.right) throw SideConditionFailed("witt_add: split needs two parts");
        require_witness_mode(e, *mv.left, "witt_add");
        require_witness_mode(e, *mv.right, "witt_add");
        SymbolTerm t = terms[mv.index];
        WittField sum = witt_add(*mv.left, *mv.right);
        if (sum != t.witt)
            throw SideConditionFailed("witt_add: " + render(*mv.left) + " + " +
                                      render(*mv.right) + " = " + render(sum) +
                                      " != " + render(t.witt));
        terms.erase(terms.begin() + mv.index);
        terms.insert(terms.begin() + mv.index, SymbolTerm(*mv.right, t.slots));
        terms.insert(terms.begin() + mv.index, SymbolTerm(*mv.left, t.slots));
    }
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const PScalarMove& mv) {
    if (mv.count < 1) throw SideConditionFailed("p_scalar: count must be >= 1");
    require_term_index(e, mv.index, "p_scalar");
    if (mv.index + mv.count > e.term_count())
        throw SideConditionFailed("p_scalar: run of " + std::to_string(mv.count) +
                                  " terms exceeds the expression");
    auto terms = copy_terms(e);
    const SymbolTerm& t0 = terms[mv.index];
    for (size_t i = 1; i < mv.count; ++i)
        if (terms[mv.index + i] != t0)
            throw SideConditionFailed("p_scalar: term " + std::to_string(mv.index + i) +
                                      " differs from term " + std::to_string(mv.index));
    SymbolTerm merged(scalar_mul(BigInt(mv.count), t0.witt), t0.slots);
    terms.erase(terms.begin() + mv.index, terms.begin() + mv.index + mv.count);
    terms.insert(terms.begin() + mv.index, std::move(merged));
    return rebuild(e, std::move(terms));
}

ClassExpr apply_one(const ClassExpr& e, const ShiftIntroMove& mv) {
    require_term_index(e, mv.index, "shift_intro");
    require_slot_index(e, mv.slot, "shift_intro");
    if (mv.root.is_zero()) throw SideConditionFailed("shift_intro: root must be a unit");
    auto terms = copy_terms(e);
    SymbolTerm& t = terms[mv.index];
    RatFunc rp = mv.root.pow(e.p());
    if (rp != t.slots[mv.slot])
        throw SideConditionFailed("shift_intro: (" + render(mv.root) + ")^" +
                                  std::to_string(e.p()) + " = " + render(rp) +
                                  " != " + render(t.slots[mv.slot]));
    t.witt = v_shift_frob(t.witt);
    t.slots[mv.slot] = mv.root;
    return rebuild(e, std::move(terms));
}

}  // namespace

ClassExpr apply_move(const ClassExpr& expr, const RewriteMove& mv) {
    return std::visit([&](const auto& m) { return apply_one(expr, m); }, mv);
}

// ------------------------------------------------------- derivation certificates

Verdict verify_derivation(const DerivationTrace& trace) {
    ClassExpr cur = trace.start;
    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& step = trace.steps[i];
        ClassExpr next = cur;
        try {
            next = apply_move(cur, step.move);
        } catch (const Error& err) {
            return Verdict{false, i, err.what()};
        }
        if (next != step.result)
            return Verdict{false, i,
                           std::string(move_kind_name(step.move)) +
                               ": recorded result differs from replay"};
        cur = std::move(next);
    }
    return Verdict{true, 0, ""};
}

void TraceBuilder::apply(RewriteMove mv) {
    current_ = apply_move(current_, mv);
    steps_.push_back(TraceStep{std::move(mv), current_});
}

// ------------------------------------------------------------------ operations

ClassExpr class_add(const ClassExpr& a, const ClassExpr& b) {
    if (!same_spec(a.spec(), b.spec()) || a.m() != b.m() || a.n() != b.n())
        throw SpecMismatch("class_add: operands live in different groups");
    std::vector<SymbolTerm> terms = a.terms();
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return ClassExpr(a.spec(), a.m(), a.n(), std::move(terms));
}

ClassExpr shift(const ClassExpr& pi, uint32_t target_m) {
    if (target_m <= pi.m())
        throw PreconditionFailed("shift: target level must exceed the current level");
    uint32_t extra = target_m - pi.m();
    std::vector<SymbolTerm> terms;
    terms.reserve(pi.term_count());
    for (const auto& t : pi.terms()) {
        std::vector<RatFunc> coords(extra, RatFunc::zero(pi.spec()));
        for (const auto& c : t.witt.coords()) coords.push_back(c);
        terms.emplace_back(WittField(pi.p(), std::move(coords)), t.slots);
    }
    return ClassExpr(pi.spec(), target_m, pi.n(), std::move(terms));
}

ClassExpr exp_map(const ClassExpr& pi) {
    std::vector<SymbolTerm> terms;
    terms.reserve(pi.term_count());
    for (const auto& t : pi.terms())
        terms.emplace_back(WittField(pi.p(), {t.witt.coord(0)}), t.slots);
    return ClassExpr(pi.spec(), 1, pi.n(), std::move(terms));
}

ClassExpr times_p_power(const ClassExpr& pi, uint32_t e) {
    BigInt k = 1;
    for (uint32_t i = 0; i < e; ++i) k *= pi.p();
    std::vector<SymbolTerm> terms;
    terms.reserve(pi.term_count());
    for (const auto& t : pi.terms()) terms.emplace_back(scalar_mul(k, t.witt), t.slots);
    return ClassExpr(pi.spec(), pi.m(), pi.n(), std::move(terms));
}

size_t swap_adjacent_slots(TraceBuilder& tb, size_t index, size_t j) {
    const ClassExpr& e = tb.current();
    require_term_index(e, index, "swap macro");
    if (j + 1 >= e.n()) throw PreconditionFailed("swap macro: needs adjacent slots");
    const SymbolTerm t = e.terms()[index];
    const RatFunc b1 = t.slots[j], b2 = t.slots[j + 1];
    if (b1 == b2) throw PreconditionFailed("swap macro: slots equal, use repeat_slot");
    RatFunc prod = b1 * b2;
    WittField negw = witt_neg(t.witt);

    std::vector<RatFunc> ins_slots = t.slots;
    ins_slots[j] = prod;
    ins_slots[j + 1] = prod;
    tb.apply(RepeatSlotMove{true, index + 1, j, j + 1, negw, ins_slots});
    tb.apply(SlotMulMove{index + 1, j, b1, b2});
    tb.apply(SlotMulMove{index + 1, j + 1, b1, b2});
    tb.apply(SlotMulMove{index + 3, j + 1, b1, b2});
    tb.apply(RepeatSlotMove{false, index + 1, j, j + 1, std::nullopt, {}});
    tb.apply(RepeatSlotMove{false, index + 3, j, j + 1, std::nullopt, {}});
    tb.apply(WittAddMove{true, index, index + 1});
    return index;
}

DerivationTrace exp_power_reduction(const RatFunc& a, const std::vector<RatFunc>& slots,
                                    uint32_t k) {
    if (a.is_zero()) throw PreconditionFailed("exp_power_reduction: coefficient must be nonzero");
    const FieldSpecPtr& spec = a.spec();
    uint64_t pk = 1;
    for (uint32_t i = 0; i < k; ++i) pk *= spec->p();
    WittField start_witt(spec->p(), {a.pow(static_cast<int64_t>(pk))});
    TraceBuilder tb(ClassExpr(spec, 1, static_cast<uint32_t>(slots.size()),
                              {SymbolTerm(start_witt, slots)}));
    for (uint32_t t = k; t >= 1; --t) {
        uint64_t pe = 1;
        for (uint32_t i = 0; i + 1 < t; ++i) pe *= spec->p();
        WittField u(spec->p(), {a.pow(static_cast<int64_t>(pe))});
        WittField asv = wp(u);
        if (asv.is_zero()) continue;  // a^(p^t) already equals a^(p^(t-1))
        tb.apply(WittAddMove{false, 0, 0, u, asv});
        tb.apply(ArtinSchreierMove{false, 1, u, {}});
    }
    return std::move(tb).take();
}

// ------------------------------------------------------- cyclic presentation

CyclicPresentation present_cyclic(const WittField& w, const RatFunc& b) {
    if (b.is_zero()) throw ZeroInput("present_cyclic: b must be a unit");
    uint32_t m = w.length();
    uint32_t p = w.p();
    CyclicPresentation out{w, b, {}, {}, w.is_zero()};

    auto theta = [&](uint32_t i) {
        return m == 1 ? std::string("theta") : "theta_" + std::to_string(i + 1);
    };
    for (uint32_t i = 0; i < m; ++i) out.generators.push_back(theta(i));
    out.generators.push_back("y");

    auto vec = [&](const std::string& suffix) {
        std::ostringstream os;
        if (m > 1) os << "(";
        for (uint32_t i = 0; i < m; ++i) {
            if (i) os << ", ";
            os << theta(i) << suffix;
        }
        if (m > 1) os << ")";
        return os.str();
    };
    std::string tvec = vec("");
    std::string tvec_p = m == 1 ? "theta^" + std::to_string(p) : vec("^" + std::to_string(p));

    out.relations.push_back(tvec_p + " - " + tvec + " = " +
                            (m == 1 ? render(w.coord(0)) : render(w)));
    BigInt pm = 1;
    for (uint32_t i = 0; i < m; ++i) pm *= p;
    out.relations.push_back("y^" + pm.str() + " = " + render(b));
    std::ostringstream one;
    if (m == 1) {
        one << "1";
    } else {
        one << "(1";
        for (uint32_t i = 1; i < m; ++i) one << ", 0";
        one << ")";
    }
    out.relations.push_back("y*" + tvec + "*y^-1 = " + tvec + " + " + one.str());
    return out;
}

// ----------------------------------------------------------------- generic sum

ClassExpr generic_sum(uint32_t p, uint32_t ell, uint32_t m, uint32_t n) {
    if (ell < 1 || m < 1 || n < 1)
        throw PreconditionFailed("generic_sum: ell, m, n must all be >= 1");
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(ell) * (m + n));
    for (uint32_t i = 1; i <= ell; ++i)
        for (uint32_t j = 1; j <= m; ++j)
            names.push_back("x" + std::to_string(i) + "_" + std::to_string(j));
    for (uint32_t i = 1; i <= ell; ++i)
        for (uint32_t j = 1; j <= n; ++j)
            names.push_back("y" + std::to_string(i) + "_" + std::to_string(j));
    FieldSpecPtr spec = FieldSpec::make(p, std::move(names));

    std::vector<SymbolTerm> terms;
    size_t y_base = static_cast<size_t>(ell) * m;
    for (uint32_t i = 0; i < ell; ++i) {
        std::vector<RatFunc> coords;
        coords.reserve(m);
        for (uint32_t j = 0; j < m; ++j)
            coords.push_back(RatFunc::variable(spec, static_cast<size_t>(i) * m + j));
        std::vector<RatFunc> slots;
        slots.reserve(n);
        for (uint32_t j = 0; j < n; ++j)
            slots.push_back(RatFunc::variable(spec, y_base + static_cast<size_t>(i) * n + j));
        terms.emplace_back(WittField(p, std::move(coords)), std::move(slots));
    }
    return ClassExpr(spec, m, n, std::move(terms));
}

}  // namespace kmsym
