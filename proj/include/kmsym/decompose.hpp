// Constructive decomposition: rewrites any class over F_p(x_1,...,x_r) into
// the canonical shape
//
//     sum over increasing tuples i_1 < ... < i_n of   w_i (x) x_{i_1} (x) ... (x) x_{i_n}
//
// with a full derivation certificate.  At most binom(r, n) tuples can occur.
//
// The engine works level by level on the Witt coefficients: split off the
// Teichmueller part, expand every slot over the p-basis with the common-slot
// identity (the coefficients c_j = a*beta_j/f of f = sum beta_j), strip p-th
// powers into one-level-deeper carries, then multilinearize monomial slots
// and collect.  Phase order is fixed, so the output is deterministic.
#ifndef KMSYM_DECOMPOSE_HPP
#define KMSYM_DECOMPOSE_HPP

#include <map>

#include "kmsym/km.hpp"

namespace kmsym {

class CanonicalForm {
public:
    CanonicalForm(FieldSpecPtr spec, uint32_t m, uint32_t n,
                  std::map<std::vector<uint32_t>, WittField> coeffs);

    const FieldSpecPtr& spec() const { return spec_; }
    uint32_t m() const { return m_; }
    uint32_t n() const { return n_; }
    // Keyed by strictly increasing 0-based variable index tuples; no zero
    // Witt vectors stored.
    const std::map<std::vector<uint32_t>, WittField>& coeffs() const { return coeffs_; }
    size_t size() const { return coeffs_.size(); }
    bool is_zero() const { return coeffs_.empty(); }

    // Terms in tuple-sorted order.
    ClassExpr to_class_expr() const;

    bool operator==(const CanonicalForm& o) const;
    bool operator!=(const CanonicalForm& o) const { return !(*this == o); }

private:
    FieldSpecPtr spec_;
    uint32_t m_, n_;
    std::map<std::vector<uint32_t>, WittField> coeffs_;
};

struct DecomposeResult {
    CanonicalForm canonical;
    DerivationTrace trace;
};

// Deterministic; the emitted trace always re-verifies and its final
// expression carries exactly the canonical form's terms.
DecomposeResult decompose(const ClassExpr& pi);

// The common-slot coefficients c_j = a * beta_j / f for the p-basis expansion
// f = sum_j beta_j, in pbasis_expand order.  They satisfy sum_j c_j = a.
std::vector<RatFunc> common_slot_coefficients(const RatFunc& a, const Poly& f);

}  // namespace kmsym

#endif
