// Truncated Witt vectors W_m over two coefficient rings behind one interface:
// Z ("integer mode", the verification oracle, where ghost components make the
// ring structure checkable) and F_p(x_1,...,x_r) ("field mode", production).
//
// Ring operations evaluate universal sum/product/negation polynomials that
// are computed once per (p, m) over Z by recursive ghost inversion, with
// every division asserted exact, then cached; field mode evaluates the same
// polynomials with coefficients reduced mod p.
#ifndef KMSYM_WITT_HPP
#define KMSYM_WITT_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kmsym/arith.hpp"
#include "kmsym/zpoly.hpp"

namespace kmsym {

// Universal polynomials for W_m arithmetic at a fixed prime p.  sum/prod are
// in 2m variables (coordinates of both operands), neg in m.  The *_fp tables
// hold the same polynomials with coefficients reduced mod p (zero terms
// dropped), which is what field mode evaluates.
struct WittTable {
    uint32_t p = 0;
    uint32_t m = 0;
    std::vector<ZPoly> sum, prod, neg;

    struct FpTerm {
        std::vector<uint32_t> exps;
        uint32_t coeff;
    };
    using FpSlice = std::vector<FpTerm>;
    std::vector<FpSlice> sum_fp, prod_fp, neg_fp;
};

// Cached, thread-safe.  If the environment variable KMSYM_TABLE_CACHE names a
// directory, computed tables are serialized there and reloaded on reuse.
const WittTable& witt_table(uint32_t p, uint32_t m);

// Ghost polynomial g_i = sum_{j<=i} p^j X_j^(p^(i-j)) in `nvars` variables
// starting at `offset`.
ZPoly ghost_poly(uint32_t p, uint32_t i, size_t offset, size_t nvars);

namespace wdetail {

inline bool elem_is_zero(const BigInt& v) { return v == 0; }
inline bool elem_is_zero(const RatFunc& v) { return v.is_zero(); }
inline BigInt elem_zero_like(const BigInt&) { return BigInt(0); }
inline RatFunc elem_zero_like(const RatFunc& proto) { return RatFunc::zero(proto.spec()); }

BigInt eval_slice(const ZPoly& poly, std::span<const BigInt> args);
RatFunc eval_slice(const WittTable::FpSlice& slice, std::span<const RatFunc> args,
                   const FieldSpecPtr& spec);

}  // namespace wdetail

template <class Elem>
class WittVector {
public:
    WittVector(uint32_t p, std::vector<Elem> coords) : p_(p), coords_(std::move(coords)) {
        if (coords_.empty()) throw PreconditionFailed("Witt vector length must be >= 1");
        if (!is_prime(p_)) throw PreconditionFailed("Witt vector needs prime p");
    }

    uint32_t p() const { return p_; }
    uint32_t length() const { return static_cast<uint32_t>(coords_.size()); }
    const Elem& coord(size_t i) const { return coords_.at(i); }
    const std::vector<Elem>& coords() const { return coords_; }

    bool is_zero() const {
        for (const auto& c : coords_)
            if (!wdetail::elem_is_zero(c)) return false;
        return true;
    }

    // Index of the first nonzero coordinate, or length() if zero.
    uint32_t depth() const {
        for (uint32_t i = 0; i < length(); ++i)
            if (!wdetail::elem_is_zero(coords_[i])) return i;
        return length();
    }

    WittVector zero_like() const {
        return WittVector(p_, std::vector<Elem>(coords_.size(), wdetail::elem_zero_like(coords_[0])));
    }

    bool operator==(const WittVector& o) const { return p_ == o.p_ && coords_ == o.coords_; }
    bool operator!=(const WittVector& o) const { return !(*this == o); }

private:
    uint32_t p_;
    std::vector<Elem> coords_;
};

using WittInt = WittVector<BigInt>;
using WittField = WittVector<RatFunc>;

namespace wdetail {

template <class Elem>
void require_same_mode(const WittVector<Elem>& u, const WittVector<Elem>& w, const char* op) {
    if (u.p() != w.p() || u.length() != w.length())
        throw ModeMismatch(std::string(op) + ": operands disagree in (p, m)");
}

inline BigInt eval_coord(const WittTable& t, const std::vector<ZPoly>& polys,
                         const std::vector<WittTable::FpSlice>&, size_t i,
                         std::span<const BigInt> args) {
    (void)t;
    return eval_slice(polys[i], args);
}

inline RatFunc eval_coord(const WittTable& t, const std::vector<ZPoly>&,
                          const std::vector<WittTable::FpSlice>& slices, size_t i,
                          std::span<const RatFunc> args) {
    (void)t;
    return eval_slice(slices[i], args, args[0].spec());
}

}  // namespace wdetail

template <class Elem>
WittVector<Elem> witt_add(const WittVector<Elem>& u, const WittVector<Elem>& w) {
    wdetail::require_same_mode(u, w, "witt_add");
    const WittTable& t = witt_table(u.p(), u.length());
    std::vector<Elem> args;
    args.reserve(2 * u.length());
    for (const auto& c : u.coords()) args.push_back(c);
    for (const auto& c : w.coords()) args.push_back(c);
    std::vector<Elem> out;
    out.reserve(u.length());
    for (size_t i = 0; i < u.length(); ++i)
        out.push_back(wdetail::eval_coord(t, t.sum, t.sum_fp, i, std::span<const Elem>(args)));
    return WittVector<Elem>(u.p(), std::move(out));
}

template <class Elem>
WittVector<Elem> witt_mul(const WittVector<Elem>& u, const WittVector<Elem>& w) {
    wdetail::require_same_mode(u, w, "witt_mul");
    const WittTable& t = witt_table(u.p(), u.length());
    std::vector<Elem> args;
    args.reserve(2 * u.length());
    for (const auto& c : u.coords()) args.push_back(c);
    for (const auto& c : w.coords()) args.push_back(c);
    std::vector<Elem> out;
    out.reserve(u.length());
    for (size_t i = 0; i < u.length(); ++i)
        out.push_back(wdetail::eval_coord(t, t.prod, t.prod_fp, i, std::span<const Elem>(args)));
    return WittVector<Elem>(u.p(), std::move(out));
}

template <class Elem>
WittVector<Elem> witt_neg(const WittVector<Elem>& w) {
    const WittTable& t = witt_table(w.p(), w.length());
    std::vector<Elem> out;
    out.reserve(w.length());
    for (size_t i = 0; i < w.length(); ++i)
        out.push_back(
            wdetail::eval_coord(t, t.neg, t.neg_fp, i, std::span<const Elem>(w.coords())));
    return WittVector<Elem>(w.p(), std::move(out));
}

template <class Elem>
WittVector<Elem> witt_sub(const WittVector<Elem>& u, const WittVector<Elem>& w) {
    return witt_add(u, witt_neg(w));
}

// Coordinate-wise p-th power; the Witt-vector Frobenius in characteristic p.
WittField frobenius_pow(const WittField& w);

// The Artin-Schreier map: w^p - w.
WittField wp(const WittField& w);

// (0, w_1^p, ..., w_(m-1)^p): equals p*w in characteristic p.
WittField v_shift_frob(const WittField& w);

// Shift map: prepend a zero coordinate.
template <class Elem>
WittVector<Elem> verschiebung(const WittVector<Elem>& w) {
    std::vector<Elem> out;
    out.reserve(w.length() + 1);
    out.push_back(wdetail::elem_zero_like(w.coord(0)));
    for (const auto& c : w.coords()) out.push_back(c);
    return WittVector<Elem>(w.p(), std::move(out));
}

// Teichmueller representative [a] = (a, 0, ..., 0).
template <class Elem>
WittVector<Elem> teichmuller(uint32_t p, const Elem& a, uint32_t m) {
    std::vector<Elem> out(m, wdetail::elem_zero_like(a));
    out.at(0) = a;
    return WittVector<Elem>(p, std::move(out));
}

// k-fold sum (signed), via double-and-add.
template <class Elem>
WittVector<Elem> scalar_mul(BigInt k, const WittVector<Elem>& w) {
    if (k < 0) return scalar_mul(-k, witt_neg(w));
    WittVector<Elem> acc = w.zero_like();
    WittVector<Elem> base = w;
    while (k > 0) {
        if ((k & 1) != 0) acc = witt_add(acc, base);
        k >>= 1;
        if (k > 0) base = witt_add(base, base);
    }
    return acc;
}

// Splits w as [first] + V(tail) with first = w's first coordinate.  The
// difference w - [first] must have first coordinate zero; asserted.
template <class Elem>
std::pair<Elem, WittVector<Elem>> v_split(const WittVector<Elem>& w) {
    if (w.length() < 2) throw PreconditionFailed("v_split needs length >= 2");
    Elem first = w.coord(0);
    WittVector<Elem> diff = witt_sub(w, teichmuller(w.p(), first, w.length()));
    if (!wdetail::elem_is_zero(diff.coord(0)))
        throw InternalError("v_split: difference has nonzero first coordinate");
    std::vector<Elem> tail(diff.coords().begin() + 1, diff.coords().end());
    return {std::move(first), WittVector<Elem>(w.p(), std::move(tail))};
}

// Ghost components of an integer-mode vector: g_i = sum_{j<=i} p^j w_j^(p^(i-j)).
std::vector<BigInt> ghost(const WittInt& w);

// "(expr, expr, ...)"
std::string render(const WittField& w);

}  // namespace kmsym

#endif
