// Formal symbol sums in the Kato-Milne group H^{n+1}_{p^m}(F), with the
// defining relations realized as checkable rewrite moves.
//
// A ClassExpr is a free formal sum of symbols w (x) b_1 (x) ... (x) b_n.  The
// engine never decides equality of arbitrary classes; it only certifies the
// equalities it derives, as DerivationTraces whose every step re-verifies by
// exact arithmetic.  Move kinds:
//
//   ArtinSchreier  (P(u)) (x) b...             = 0        (witness u)
//   SlotMatch      V^k([a]) (x) ...a...        = 0        (a in some slot)
//   RepeatSlot     w (x) ...b...b...           = 0        (two equal slots)
//   SlotMul        w (x) (b'b'') (x) rest      = w(x)b'(x)rest + w(x)b''(x)rest
//   WittAdd        (u+v) (x) rest              = u(x)rest + v(x)rest
//   PScalar        k equal consecutive terms   = (k*w) (x) rest
//   ShiftIntro     w (x) h^p (x) rest          = (0,w_1^p,...) (x) h (x) rest
//
// The first three are the group's defining relations (applied in either
// direction: dropping a relation instance or inserting one); the rest are
// tensor bilinearity and the p-multiple identity p*w = V(F(w)).
//
// Terms with zero Witt coefficient are the group identity and are dropped at
// construction, so the empty term list is the zero class.
#ifndef KMSYM_KM_HPP
#define KMSYM_KM_HPP

#include <optional>
#include <variant>
#include <vector>

#include "kmsym/witt.hpp"

namespace kmsym {

// ----------------------------------------------------------------- the class

struct SymbolTerm {
    WittField witt;
    std::vector<RatFunc> slots;  // n >= 1 entries, all nonzero

    SymbolTerm(WittField w, std::vector<RatFunc> s);
    bool operator==(const SymbolTerm& o) const { return witt == o.witt && slots == o.slots; }
    bool operator!=(const SymbolTerm& o) const { return !(*this == o); }
};

class ClassExpr {
public:
    // Zero-Witt terms are dropped; all terms must share (p, m, n, spec).
    ClassExpr(FieldSpecPtr spec, uint32_t m, uint32_t n, std::vector<SymbolTerm> terms);
    static ClassExpr zero(FieldSpecPtr spec, uint32_t m, uint32_t n);

    const FieldSpecPtr& spec() const { return spec_; }
    uint32_t p() const { return spec_->p(); }
    uint32_t m() const { return m_; }
    uint32_t n() const { return n_; }
    const std::vector<SymbolTerm>& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool operator==(const ClassExpr& o) const;
    bool operator!=(const ClassExpr& o) const { return !(*this == o); }

private:
    FieldSpecPtr spec_;
    uint32_t m_, n_;
    std::vector<SymbolTerm> terms_;
};

// -------------------------------------------------------------- rewrite moves

struct ArtinSchreierMove {
    bool insert = false;  // false: drop term `index` whose Witt slot is P(witness)
    size_t index = 0;     // term index (drop) or insertion position (insert)
    WittField witness;
    std::vector<RatFunc> slots;  // insert only: slots of the inserted term
};

struct SlotMatchMove {
    bool insert = false;
    size_t index = 0;
    size_t slot = 0;     // slot position whose value a appears in the Witt vector
    uint32_t coord = 0;  // witt = V^coord([a])
    std::vector<RatFunc> slots;  // insert only
};

struct RepeatSlotMove {
    bool insert = false;
    size_t index = 0;
    size_t slot1 = 0, slot2 = 0;  // equal slots, slot1 < slot2
    std::optional<WittField> witt;  // insert only
    std::vector<RatFunc> slots;     // insert only
};

struct SlotMulMove {
    size_t index = 0;
    size_t slot = 0;
    RatFunc left, right;  // slot value = left * right
};

struct WittAddMove {
    bool merge = false;  // true: merge terms index < index2 with equal slots
    size_t index = 0;
    size_t index2 = 0;                       // merge only
    std::optional<WittField> left, right;    // split only: witt = left + right
};

struct PScalarMove {
    size_t index = 0;
    uint64_t count = 0;  // that many equal consecutive terms collapse to one
};

struct ShiftIntroMove {
    size_t index = 0;
    size_t slot = 0;
    RatFunc root;  // slot value = root^p
};

using RewriteMove = std::variant<ArtinSchreierMove, SlotMatchMove, RepeatSlotMove, SlotMulMove,
                                 WittAddMove, PScalarMove, ShiftIntroMove>;

const char* move_kind_name(const RewriteMove& mv);

// Verifies the move's side condition by exact arithmetic and returns the
// rewritten expression; throws SideConditionFailed with the violated equation.
ClassExpr apply_move(const ClassExpr& expr, const RewriteMove& mv);

// ------------------------------------------------------- derivation certificates

struct TraceStep {
    RewriteMove move;
    ClassExpr result;
};

struct DerivationTrace {
    ClassExpr start;
    std::vector<TraceStep> steps;

    const ClassExpr& final_expr() const { return steps.empty() ? start : steps.back().result; }
};

struct Verdict {
    bool ok = false;
    size_t failed_step = 0;  // meaningful when !ok
    std::string message;
};

// Replays every move and checks each recorded result; reports the first failure.
Verdict verify_derivation(const DerivationTrace& trace);

// Accumulates a derivation while the engine works.
class TraceBuilder {
public:
    explicit TraceBuilder(ClassExpr start) : start_(start), current_(std::move(start)) {}

    const ClassExpr& current() const { return current_; }
    size_t step_count() const { return steps_.size(); }

    void apply(RewriteMove mv);

    DerivationTrace take() && { return DerivationTrace{std::move(start_), std::move(steps_)}; }
    DerivationTrace trace() const { return DerivationTrace{start_, steps_}; }

private:
    ClassExpr start_;
    ClassExpr current_;
    std::vector<TraceStep> steps_;
};

// ------------------------------------------------------------------ operations

// Formal sum: term-list concatenation.
ClassExpr class_add(const ClassExpr& a, const ClassExpr& b);

// Shift map into level target_m > m: prepend zeros to every Witt coefficient.
ClassExpr shift(const ClassExpr& pi, uint32_t target_m);

// Exp map to level 1: keep the first Witt coordinate of every term.
ClassExpr exp_map(const ClassExpr& pi);

// Termwise multiplication of the Witt coefficient by p^e.
ClassExpr times_p_power(const ClassExpr& pi, uint32_t e);

// Derived alternating macro: swaps slots j and j+1 of term `index` while
// negating its Witt coefficient, via the expansion of the relation
// 0 = (-w) (x) (b1 b2) (x) (b1 b2).  Returns the index of the result term.
// Requires slots[j] != slots[j+1] (use RepeatSlot directly otherwise).
size_t swap_adjacent_slots(TraceBuilder& tb, size_t index, size_t j);

// Level-1 derivation rewriting (a^(p^k)) (x) slots down to (a) (x) slots by k
// rounds of WittAdd-split plus ArtinSchreier-drop with witnesses a^(p^(k-1)),
// a^(p^(k-2)), ..., a.
DerivationTrace exp_power_reduction(const RatFunc& a, const std::vector<RatFunc>& slots,
                                    uint32_t k);

// ------------------------------------------------------- cyclic presentation

// The presentation record of [w, b): generators theta_1..theta_m, y with
//   (theta_1,..,theta_m)^p - (theta_1,..,theta_m) = w,
//   y^(p^m) = b,   y (theta_1,..,theta_m) y^-1 = (theta_1,..,theta_m) + (1,0,..,0).
struct CyclicPresentation {
    WittField witt;
    RatFunc b;
    std::vector<std::string> generators;
    std::vector<std::string> relations;
    bool split = false;  // witt == 0
};

CyclicPresentation present_cyclic(const WittField& w, const RatFunc& b);

// ----------------------------------------------------------------- generic sum

// The generic sum of ell symbols: over F_p(x_{1,1},...,x_{ell,m},
// y_{1,1},...,y_{ell,n}), the class sum_i (x_{i,1},...,x_{i,m}) (x) y_{i,1}
// (x) ... (x) y_{i,n}.  Variable names use the pattern x1_1, y2_1, ...
ClassExpr generic_sum(uint32_t p, uint32_t ell, uint32_t m, uint32_t n);

}  // namespace kmsym

#endif
