#include "kmsym/bounds.hpp"

#include <algorithm>
#include <sstream>

namespace kmsym {

// ------------------------------------------------------------------ rationals

Rational::Rational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

std::string Rational::str() const {
    return is_integer() ? num.str() : num.str() + "/" + den.str();
}

double Rational::approx() const {
    return num.convert_to<double>() / den.convert_to<double>();
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
}

bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
}

bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
}

// ----------------------------------------------------------------- logarithms

std::string LogValue::str() const {
    if (exact) return exact_value.str();
    return "(" + lo.str() + ", " + hi.str() + ") irrational";
}

double LogValue::approx() const {
    if (exact) return exact_value.convert_to<double>();
    return (lo.approx() + hi.approx()) / 2.0;
}

namespace {

// p^(mid.num) <= q^(mid.den) ?
bool pow_le(uint32_t p, const Rational& mid, const Rational& q) {
    BigInt lhs = boost::multiprecision::pow(BigInt(p), mid.num.convert_to<unsigned>());
    BigInt qn = boost::multiprecision::pow(q.num, mid.den.convert_to<unsigned>());
    BigInt qd = boost::multiprecision::pow(q.den, mid.den.convert_to<unsigned>());
    return lhs * qd <= qn;
}

}  // namespace

LogValue one_plus_log_p(uint32_t p, const Rational& q) {
    if (p < 2) throw PreconditionFailed("log base must be >= 2");
    if (q.num <= 0 || q < Rational(1)) throw PreconditionFailed("log argument must be >= 1");
    LogValue out;
    if (q.is_integer()) {
        BigInt v = q.num;
        BigInt k = 0;
        while (v % p == 0) {
            v /= p;
            ++k;
        }
        if (v == 1) {
            out.exact = true;
            out.exact_value = 1 + k;
            return out;
        }
    }
    // Not a p-power: log_p(q) is irrational.  Bracket it by bisection with
    // exact rational endpoints until the interval is narrower than 1e-6.
    out.exact = false;
    out.irrational = true;
    // q is not a p-power here, so p^k = q cannot occur and strict compare is safe.
    BigInt k = 0;
    BigInt pk = 1;
    while (Rational(pk * p, 1) < q) {
        pk *= p;
        ++k;
    }
    Rational lo(k, 1), hi(k + 1, 1);
    for (int iter = 0; iter < 21; ++iter) {
        Rational mid = Rational(lo.num * hi.den + hi.num * lo.den, 2 * lo.den * hi.den);
        if (pow_le(p, mid, q))
            lo = mid;
        else
            hi = mid;
    }
    out.lo = lo + Rational(1);
    out.hi = hi + Rational(1);
    return out;
}

// ------------------------------------------------------------------- formulas

BigInt sl_upper_prank(uint64_t r, uint64_t n) {
    if (n > r) return 0;
    BigInt out = 1;
    for (uint64_t i = 0; i < n; ++i) {
        out *= BigInt(r - i);
        out /= BigInt(i + 1);  // exact: product of j consecutive integers is divisible by j!
    }
    return out;
}

BigInt sl_upper_step(const BigInt& t, const BigInt& s) { return t + s; }

BigInt sl_upper_tower(const BigInt& s, uint64_t m) { return BigInt(m) * s; }

BigInt sl_upper_u(uint64_t u, uint64_t n, uint64_t m) {
    if (u % 2 != 0) throw PreconditionFailed("u-invariant bound needs u even");
    BigInt prod = 1;
    BigInt half(u / 2);
    BigInt two_i = 2;
    for (uint64_t i = 1; i <= n; ++i) {
        BigInt factor = half - two_i + 1;
        if (factor <= 0)
            throw NonPositiveFactor("u/2 - 2^" + std::to_string(i) + " + 1 is not positive");
        prod *= factor;
        two_i *= 2;
    }
    return BigInt(m) * prod;
}

BigInt sl_upper_cpr(uint32_t p, uint64_t r, uint64_t m) {
    if (r < 1) throw PreconditionFailed("cpr bound needs r >= 1");
    BigInt pw = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(r - 1));
    return BigInt(m) * (pw - 1);
}

BigInt prank_fg_extension(const BigInt& r, const BigInt& t) { return r + t; }

BigInt ed_lower_from_sl(const BigInt& sl, const BigInt& r) { return sl - r; }

BigInt ed_p_lower_alg(uint64_t ell, const BigInt& r) {
    if (ell < 2) throw PreconditionFailed("lower bound needs ell >= 2");
    return BigInt(ell) + 1 - r;
}

BigInt ed_p_lower_generic(uint64_t ell, uint64_t n) { return BigInt(ell) + n; }

BigInt ed_upper_symbols(uint64_t m, uint64_t ell, uint64_t n) {
    return BigInt(m) + BigInt(ell) * n;
}

Interval ed_sandwich(const BigInt& sl, uint64_t m) { return Interval{sl, sl + m}; }

BigInt ed_upper_deg_exp(uint32_t p, uint64_t n, uint64_t m) {
    return boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(n)) + m - 1;
}

LogValue ed_lower_cr(uint32_t p, uint64_t m, const BigInt& sl) {
    if (m < 1) throw PreconditionFailed("ed_lower_cr needs m >= 1");
    if (sl < 0) throw PreconditionFailed("ed_lower_cr needs sl >= 0");
    Rational q = Rational(sl, m) + Rational(1);
    return one_plus_log_p(p, q);
}

// ------------------------------------------------------------------ reporting

namespace {

const char* kCharP = "char(k) = p";
const char* kInfPerfect = "k infinite perfect";
const char* kAlgClosed = "k algebraically closed";
const char* kEll2 = "ell >= 2";
const char* kPrankFinite = "rank_p(F) finite";
const char* kStdCase = "char(k) prime to p, k algebraically closed";

void push_int(BoundsReport& rep, std::string quantity, std::string functor,
              std::string relation, const BigInt& value, std::string citation,
              std::vector<std::string> assumptions) {
    BoundEntry e;
    e.quantity = std::move(quantity);
    e.functor = std::move(functor);
    e.relation = std::move(relation);
    e.value = value.str();
    e.approx = value.convert_to<double>();
    e.citation = std::move(citation);
    e.assumptions = std::move(assumptions);
    rep.entries.push_back(std::move(e));
}

}  // namespace

BoundsReport best_bounds(const BoundsInput& in) {
    BoundsReport rep;

    if (in.r && in.n && !in.cr_field) {
        BigInt b = sl_upper_prank(*in.r, *in.n);
        std::string functor = *in.n == 1 ? "Br" : "H";
        push_int(rep, "sl", functor, "<=", b, "prank-binomial", {kCharP, kPrankFinite});
    }
    if (in.r && !in.n && !in.cr_field) {
        push_int(rep, "sl", "Br", "<=", sl_upper_prank(*in.r, 1), "prank-binomial",
                 {kCharP, kPrankFinite});
    }
    if (in.t && in.s)
        push_int(rep, "sl", "H", "<=", sl_upper_step(BigInt(*in.t), BigInt(*in.s)),
                 "exp-shift-step", {kCharP, "bounds the next level m+1"});
    if (in.s && in.m)
        push_int(rep, "sl", "H", "<=", sl_upper_tower(BigInt(*in.s), *in.m), "exp-shift-tower",
                 {kCharP});
    if (in.u && in.m && (!in.p || *in.p == 2)) {
        try {
            BigInt b = sl_upper_u(*in.u, in.n.value_or(1), *in.m);
            push_int(rep, "sl", in.n.value_or(1) == 1 ? "Br" : "H", "<=", b,
                     "u-invariant-product (Chapman-McKinnie 2019)", {"p = 2", "u(F) finite"});
        } catch (const Error&) {
            // factor not positive for this n; bound inapplicable
        }
    }
    if (in.cr_field && in.p && in.r && *in.r >= 1 && in.m)
        push_int(rep, "sl", "Br", "<=", sl_upper_cpr(*in.p, *in.r, *in.m),
                 "cpr-field (Chapman-McKinnie 2018)", {"F is a C~_{p,r} field", kCharP});
    if (in.r && in.t)
        push_int(rep, "rank_p", "field", "=", prank_fg_extension(BigInt(*in.r), BigInt(*in.t)),
                 "prank-extension (Bourbaki V.16.6 Cor 3)",
                 {"F/k finitely generated of transcendence degree t", kCharP});
    if (in.sl && in.r)
        push_int(rep, "ed", "Br", ">=", ed_lower_from_sl(BigInt(*in.sl), BigInt(*in.r)),
                 "ed-vs-sl", {kCharP, "rank_p(k) = r"});
    if (in.ell && *in.ell >= 2 && in.r) {
        std::vector<std::string> flags{kCharP, kEll2, "rank_p(k) = r"};
        if (in.p && *in.p == 2 && *in.ell == 2 && in.m && *in.m == 1)
            flags.push_back("case p = ell = 2, m = 1 via Baek 2011 Cor 2.2");
        push_int(rep, "ed_p", "Alg", ">=", ed_p_lower_alg(*in.ell, BigInt(*in.r)),
                 "indecomposable-lower (Karpenko 1995)", std::move(flags));
    }
    if (in.deg && in.m && in.r) {
        uint64_t ell = *in.deg / *in.m;
        if (ell >= 2) {
            push_int(rep, "ed_p", "Alg", ">=", ed_p_lower_alg(ell, BigInt(*in.r)),
                     "indecomposable-lower (Karpenko 1995)",
                     {kCharP, "ell = floor(deg/m) = " + std::to_string(ell), "rank_p(k) = r"});
        }
    }
    if (in.ell && in.n)
        push_int(rep, "ed_p", "H", ">=", ed_p_lower_generic(*in.ell, *in.n),
                 "generic-sum-lower (McKinnie 2017 Thm 5.8)",
                 {kAlgClosed, "generic sum of ell symbols"});
    if (in.ell && in.m) {
        uint64_t n = in.n.value_or(1);
        push_int(rep, "ed", n == 1 ? "Br" : "H", "<=", ed_upper_symbols(*in.m, *in.ell, n),
                 "ledet-descent (Ledet 2004)", {kCharP, "|k| >= p^ell"});
    }
    if (in.sl && in.m) {
        Interval iv = ed_sandwich(BigInt(*in.sl), *in.m);
        push_int(rep, "ed", "Br", ">=", iv.lo, "ed-sandwich", {kInfPerfect, kCharP});
        push_int(rep, "ed", "Br", "<=", iv.hi, "ed-sandwich", {kInfPerfect, kCharP});
    }
    if (in.p && in.deg && in.m)
        push_int(rep, "ed", "Br", "<=", ed_upper_deg_exp(*in.p, *in.deg, *in.m),
                 "florence-symbol-length (Florence 2013)",
                 {kInfPerfect, kCharP, "degree p^deg, exponent p^m"});
    if (in.p && in.m && in.sl) {
        LogValue lv = ed_lower_cr(*in.p, *in.m, BigInt(*in.sl));
        BoundEntry e;
        e.quantity = "ed";
        e.functor = "Br";
        e.relation = ">=";
        e.value = lv.str();
        e.approx = lv.approx();
        e.citation = "cr-log-lower (Matzri 2016 Thm 8.2)";
        e.assumptions = {kStdCase};
        rep.entries.push_back(std::move(e));
    }

    // Mark the tightest entry per (quantity, functor, relation).
    for (auto& e : rep.entries) {
        if (e.relation == "=") {
            e.best = true;
            continue;
        }
        bool best = true;
        for (const auto& o : rep.entries) {
            if (&o == &e) continue;
            if (o.quantity != e.quantity || o.functor != e.functor || o.relation != e.relation)
                continue;
            if (e.relation == "<=" && o.approx < e.approx) best = false;
            if (e.relation == ">=" && o.approx > e.approx) best = false;
        }
        e.best = best;
    }
    return rep;
}

}  // namespace kmsym
