// Calculator for the symbol-length and essential-dimension bound formulas,
// with citation tags and explicit assumption flags on every reported entry.
// All arithmetic is exact; base-p logarithms are reported exactly when the
// argument is a p-power and otherwise as a rational bracket of width < 1e-6
// with an irrationality marker.
#ifndef KMSYM_BOUNDS_HPP
#define KMSYM_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "kmsym/zpoly.hpp"

namespace kmsym {

// Nonnegative rational with exact arithmetic; only what the bound formulas need.
struct Rational {
    BigInt num = 0;
    BigInt den = 1;

    Rational() = default;
    Rational(BigInt n, BigInt d);
    Rational(int64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)

    bool is_integer() const { return den == 1; }
    std::string str() const;
    double approx() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b);
    friend bool operator<(const Rational& a, const Rational& b);
};

// Exact integer if the log argument is a p-power; otherwise an enclosing
// rational interval of width < 1e-6, flagged irrational.
struct LogValue {
    bool exact = false;
    BigInt exact_value = 0;   // when exact
    Rational lo, hi;          // when !exact
    bool irrational = false;  // when !exact (always true in that case)

    std::string str() const;
    double approx() const;
};

// 1 + log_p(q) for rational q >= 1.
LogValue one_plus_log_p(uint32_t p, const Rational& q);

// ---------------------------------------------------------------- formulas

BigInt sl_upper_prank(uint64_t r, uint64_t n);               // binom(r, n)
BigInt sl_upper_step(const BigInt& t, const BigInt& s);      // t + s
BigInt sl_upper_tower(const BigInt& s, uint64_t m);          // m * s
BigInt sl_upper_u(uint64_t u, uint64_t n, uint64_t m);       // m * prod(u/2 - 2^i + 1), p = 2
BigInt sl_upper_cpr(uint32_t p, uint64_t r, uint64_t m);     // m * (p^(r-1) - 1)
BigInt prank_fg_extension(const BigInt& r, const BigInt& t); // r + t
BigInt ed_lower_from_sl(const BigInt& sl, const BigInt& r);  // sl - r
BigInt ed_p_lower_alg(uint64_t ell, const BigInt& r);        // ell + 1 - r, needs ell >= 2
BigInt ed_p_lower_generic(uint64_t ell, uint64_t n);         // ell + n
BigInt ed_upper_symbols(uint64_t m, uint64_t ell, uint64_t n);  // m + ell*n
struct Interval {
    BigInt lo, hi;
};
Interval ed_sandwich(const BigInt& sl, uint64_t m);             // [sl, sl + m]
BigInt ed_upper_deg_exp(uint32_t p, uint64_t n, uint64_t m);    // p^n + m - 1
LogValue ed_lower_cr(uint32_t p, uint64_t m, const BigInt& sl); // 1 + log_p(sl/m + 1)

// ---------------------------------------------------------------- reporting

struct BoundsInput {
    std::optional<uint32_t> p;
    std::optional<uint64_t> m, n, ell, r, t, s, u, sl;
    std::optional<uint64_t> deg;  // degree exponent: the algebra has degree p^deg
    bool cr_field = false;        // r is a C-tilde_{p,r} field index
};

struct BoundEntry {
    std::string quantity;   // "sl", "ed", "ed_p", "rank_p"
    std::string functor;    // which functor the quantity refers to
    std::string relation;   // "<=", ">=", or "in"
    std::string value;      // rendered exact value (or interval)
    double approx = 0.0;
    std::string citation;   // provenance tag
    std::vector<std::string> assumptions;
    bool best = false;      // tightest among entries for (quantity, functor, relation)
};

struct BoundsReport {
    std::vector<BoundEntry> entries;
};

// Applies every formula whose inputs are present, keeps all entries, and
// marks the tightest per (quantity, functor, relation).
BoundsReport best_bounds(const BoundsInput& input);

}  // namespace kmsym

#endif
