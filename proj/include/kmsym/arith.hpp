// Exact arithmetic in F_p, F_p[x_1,...,x_r] and the rational function field
// F_p(x_1,...,x_r), together with the p-power structure queries (p-th roots,
// p-basis monomial expansion) everything else is built on.
//
// All values are immutable after construction and safe to share across
// threads.  Polynomials keep a canonical sparse form (no zero coefficients,
// terms ordered graded-lexicographically); rational functions keep num/den
// coprime with a monic denominator, so equality is a structural check.
#ifndef KMSYM_ARITH_HPP
#define KMSYM_ARITH_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmsym/errors.hpp"

namespace kmsym {

// ---------------------------------------------------------------- field spec

// Describes F_p(x_1,...,x_r).  r = 0 describes the prime field F_p itself.
// The variables are the standard p-basis of the field; their order fixes the
// graded-lex monomial order used for normalization and rendering.
class FieldSpec {
public:
    FieldSpec(uint32_t p, std::vector<std::string> variables);

    static std::shared_ptr<const FieldSpec> make(uint32_t p,
                                                 std::vector<std::string> variables);

    uint32_t p() const { return p_; }
    size_t rank() const { return variables_.size(); }
    const std::vector<std::string>& variables() const { return variables_; }
    const std::string& variable_name(size_t i) const { return variables_.at(i); }
    std::optional<size_t> variable_index(std::string_view name) const;

    bool operator==(const FieldSpec& other) const {
        return p_ == other.p_ && variables_ == other.variables_;
    }
    bool operator!=(const FieldSpec& other) const { return !(*this == other); }

private:
    uint32_t p_;
    std::vector<std::string> variables_;
};

using FieldSpecPtr = std::shared_ptr<const FieldSpec>;

// True for equal contents (pointer identity not required).
bool same_spec(const FieldSpecPtr& a, const FieldSpecPtr& b);
void require_same_spec(const FieldSpecPtr& a, const FieldSpecPtr& b,
                       const char* where);

// ------------------------------------------------------------ F_p arithmetic

uint32_t fp_add(uint32_t a, uint32_t b, uint32_t p);
uint32_t fp_sub(uint32_t a, uint32_t b, uint32_t p);
uint32_t fp_mul(uint32_t a, uint32_t b, uint32_t p);
uint32_t fp_neg(uint32_t a, uint32_t p);
uint32_t fp_pow(uint32_t a, uint64_t e, uint32_t p);
uint32_t fp_inv(uint32_t a, uint32_t p);  // throws DivisionByZero on a = 0
bool is_prime(uint32_t n);

// ------------------------------------------------------------------ monomial

// Exponent vector of fixed length r; the trivial monomial has all exponents 0.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<uint32_t> exps) : exps_(std::move(exps)) {}
    static Monomial one(size_t nvars) { return Monomial(std::vector<uint32_t>(nvars, 0)); }
    static Monomial variable(size_t nvars, size_t index);

    size_t nvars() const { return exps_.size(); }
    uint32_t exponent(size_t i) const { return exps_[i]; }
    const std::vector<uint32_t>& exponents() const { return exps_; }
    uint64_t total_degree() const;
    bool is_one() const;

    Monomial operator*(const Monomial& o) const;
    bool divides(const Monomial& o) const;
    Monomial divide_by(const Monomial& o) const;  // exact; caller checks divides()

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
    bool operator!=(const Monomial& o) const { return !(*this == o); }

private:
    std::vector<uint32_t> exps_;
};

// Graded-lexicographic order: first by total degree, ties broken so that a
// higher exponent on an earlier variable makes the monomial larger.
bool graded_lex_less(const Monomial& a, const Monomial& b);

struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return graded_lex_less(a, b);
    }
};

// ---------------------------------------------------------------- polynomial

class Poly {
public:
    using TermMap = std::map<Monomial, uint32_t, GradedLexLess>;

    static Poly zero(FieldSpecPtr spec);
    static Poly constant(FieldSpecPtr spec, int64_t c);
    static Poly variable(FieldSpecPtr spec, size_t index);
    static Poly monomial(FieldSpecPtr spec, Monomial m, uint32_t coeff);

    const FieldSpecPtr& spec() const { return spec_; }
    uint32_t p() const { return spec_->p(); }
    size_t nvars() const { return spec_->rank(); }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    bool is_constant() const;
    // The constant coefficient (0 if absent).
    uint32_t constant_value() const;
    uint64_t total_degree() const;  // 0 for the zero polynomial
    uint64_t degree_in(size_t var) const;
    size_t term_count() const { return terms_.size(); }

    // Largest term under graded-lex.
    const Monomial& leading_monomial() const;
    uint32_t leading_coeff() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly scaled(uint32_t c) const;
    Poly mul_monomial(const Monomial& m, uint32_t c) const;
    Poly pow(uint64_t e) const;

    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Internal: assumes the map is already normalized (no zero coefficients).
    Poly(FieldSpecPtr spec, TermMap terms);

private:
    FieldSpecPtr spec_;
    TermMap terms_;
};

// Monic greatest common divisor (leading coefficient 1); gcd(0, g) = monic g.
Poly poly_gcd(const Poly& a, const Poly& b);

// Exact quotient; throws InternalError if b does not divide a.
Poly poly_divide_exact(const Poly& a, const Poly& b);

// p-th root of f: g with g^p = f.  Over F_p coefficients this exists exactly
// when every exponent of f is divisible by p.  Throws NotAPthPower otherwise.
Poly pth_root(const Poly& f);
std::optional<Poly> try_pth_root(const Poly& f);

// One summand of a p-basis decomposition: represents h^p * M.
struct PBasisTerm {
    Poly h;
    Monomial m;  // all exponents in [0, p-1]
};

// Writes f as sum h_j^p * M_j with pairwise distinct monomials M_j whose
// exponents lie in [0, p-1], grouping the terms of f by exponent residues
// mod p.  Result ordered by M ascending (graded-lex).  Throws ZeroInput on 0.
std::vector<PBasisTerm> pbasis_expand(const Poly& f);

// The value h^p * M of a p-basis term.
Poly pbasis_term_value(const PBasisTerm& t);

// ---------------------------------------------------------- rational function

class RatFunc {
public:
    // Reduces to lowest terms and normalizes the denominator to be monic.
    RatFunc(Poly num, Poly den);
    explicit RatFunc(Poly num);

    static RatFunc zero(FieldSpecPtr spec);
    static RatFunc one(FieldSpecPtr spec);
    static RatFunc constant(FieldSpecPtr spec, int64_t c);
    static RatFunc variable(FieldSpecPtr spec, size_t index);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const FieldSpecPtr& spec() const { return num_.spec(); }
    uint32_t p() const { return num_.p(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    // For constants: the value in [0, p).
    uint32_t constant_value() const { return num_.constant_value(); }

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator-() const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;  // throws DivisionByZero
    RatFunc inverse() const;                    // throws DivisionByZero
    RatFunc pow(int64_t e) const;               // negative e inverts first

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

private:
    struct ReducedTag {};
    RatFunc(Poly num, Poly den, ReducedTag) : num_(std::move(num)), den_(std::move(den)) {}
    RatFunc normalized_monic() const;

    Poly num_, den_;
    void reduce();
};

// ---------------------------------------------------------- parse and render

// Grammar: integer literals, variable names, + - * / ^ and parentheses.
// Integers are reduced mod p; exponents are nonnegative integer literals.
RatFunc parse_ratfunc(std::string_view text, const FieldSpecPtr& spec);

// Deterministic rendering: monomials sorted graded-lex descending; parsing the
// result reproduces the value exactly.
std::string render(const Poly& f);
std::string render(const Monomial& m, const FieldSpec& spec);
std::string render(const RatFunc& f);

}  // namespace kmsym

#endif
