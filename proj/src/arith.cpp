#include "kmsym/arith.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace kmsym {

// ---------------------------------------------------------------- field spec

FieldSpec::FieldSpec(uint32_t p, std::vector<std::string> variables)
    : p_(p), variables_(std::move(variables)) {
    if (!is_prime(p_)) throw PreconditionFailed("p must be prime, got " + std::to_string(p_));
    for (size_t i = 0; i < variables_.size(); ++i) {
        const std::string& v = variables_[i];
        if (v.empty() || (!std::isalpha(static_cast<unsigned char>(v[0])) && v[0] != '_'))
            throw PreconditionFailed("invalid variable name '" + v + "'");
        for (char c : v)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw PreconditionFailed("invalid variable name '" + v + "'");
        for (size_t j = i + 1; j < variables_.size(); ++j)
            if (variables_[j] == v)
                throw PreconditionFailed("duplicate variable name '" + v + "'");
    }
}

FieldSpecPtr FieldSpec::make(uint32_t p, std::vector<std::string> variables) {
    return std::make_shared<const FieldSpec>(p, std::move(variables));
}

std::optional<size_t> FieldSpec::variable_index(std::string_view name) const {
    for (size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i] == name) return i;
    return std::nullopt;
}

bool same_spec(const FieldSpecPtr& a, const FieldSpecPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

void require_same_spec(const FieldSpecPtr& a, const FieldSpecPtr& b, const char* where) {
    if (!same_spec(a, b)) throw SpecMismatch(std::string("field spec mismatch in ") + where);
}

// ------------------------------------------------------------ F_p arithmetic

bool is_prime(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint32_t fp_add(uint32_t a, uint32_t b, uint32_t p) {
    uint64_t s = static_cast<uint64_t>(a) + b;
    return static_cast<uint32_t>(s >= p ? s - p : s);
}

uint32_t fp_sub(uint32_t a, uint32_t b, uint32_t p) {
    return a >= b ? a - b : a + p - b;
}

uint32_t fp_mul(uint32_t a, uint32_t b, uint32_t p) {
    return static_cast<uint32_t>(static_cast<uint64_t>(a) * b % p);
}

uint32_t fp_neg(uint32_t a, uint32_t p) { return a == 0 ? 0 : p - a; }

uint32_t fp_pow(uint32_t a, uint64_t e, uint32_t p) {
    uint32_t result = 1 % p;
    uint32_t base = a % p;
    while (e > 0) {
        if (e & 1) result = fp_mul(result, base, p);
        base = fp_mul(base, base, p);
        e >>= 1;
    }
    return result;
}

uint32_t fp_inv(uint32_t a, uint32_t p) {
    a %= p;
    if (a == 0) throw DivisionByZero();
    return fp_pow(a, p - 2, p);
}

// ------------------------------------------------------------------ monomial

Monomial Monomial::variable(size_t nvars, size_t index) {
    std::vector<uint32_t> e(nvars, 0);
    e.at(index) = 1;
    return Monomial(std::move(e));
}

uint64_t Monomial::total_degree() const {
    uint64_t d = 0;
    for (uint32_t e : exps_) d += e;
    return d;
}

bool Monomial::is_one() const {
    return std::all_of(exps_.begin(), exps_.end(), [](uint32_t e) { return e == 0; });
}

Monomial Monomial::operator*(const Monomial& o) const {
    std::vector<uint32_t> e(exps_);
    for (size_t i = 0; i < e.size(); ++i) e[i] += o.exps_[i];
    return Monomial(std::move(e));
}

bool Monomial::divides(const Monomial& o) const {
    for (size_t i = 0; i < exps_.size(); ++i)
        if (exps_[i] > o.exps_[i]) return false;
    return true;
}

Monomial Monomial::divide_by(const Monomial& o) const {
    std::vector<uint32_t> e(exps_);
    for (size_t i = 0; i < e.size(); ++i) e[i] -= o.exps_[i];
    return Monomial(std::move(e));
}

bool graded_lex_less(const Monomial& a, const Monomial& b) {
    uint64_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    const auto& ea = a.exponents();
    const auto& eb = b.exponents();
    for (size_t i = 0; i < ea.size(); ++i)
        if (ea[i] != eb[i]) return ea[i] < eb[i];
    return false;
}

// ---------------------------------------------------------------- polynomial

Poly::Poly(FieldSpecPtr spec, TermMap terms) : spec_(std::move(spec)), terms_(std::move(terms)) {}

Poly Poly::zero(FieldSpecPtr spec) { return Poly(std::move(spec), TermMap{}); }

Poly Poly::constant(FieldSpecPtr spec, int64_t c) {
    uint32_t p = spec->p();
    int64_t r = c % static_cast<int64_t>(p);
    if (r < 0) r += p;
    TermMap t;
    if (r != 0) t.emplace(Monomial::one(spec->rank()), static_cast<uint32_t>(r));
    return Poly(std::move(spec), std::move(t));
}

Poly Poly::variable(FieldSpecPtr spec, size_t index) {
    TermMap t;
    t.emplace(Monomial::variable(spec->rank(), index), 1u);
    return Poly(std::move(spec), std::move(t));
}

Poly Poly::monomial(FieldSpecPtr spec, Monomial m, uint32_t coeff) {
    coeff %= spec->p();
    TermMap t;
    if (coeff != 0) t.emplace(std::move(m), coeff);
    return Poly(std::move(spec), std::move(t));
}

bool Poly::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first.is_one() && terms_.begin()->second == 1;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

uint32_t Poly::constant_value() const {
    auto it = terms_.find(Monomial::one(nvars()));
    return it == terms_.end() ? 0 : it->second;
}

uint64_t Poly::total_degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.total_degree();
}

uint64_t Poly::degree_in(size_t var) const {
    uint64_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max<uint64_t>(d, m.exponent(var));
    return d;
}

const Monomial& Poly::leading_monomial() const {
    if (terms_.empty()) throw InternalError("leading term of zero polynomial");
    return terms_.rbegin()->first;
}

uint32_t Poly::leading_coeff() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->second;
}

Poly Poly::operator+(const Poly& o) const {
    require_same_spec(spec_, o.spec_, "poly add");
    uint32_t p = spec_->p();
    TermMap out = terms_;
    for (const auto& [m, c] : o.terms_) {
        auto it = out.find(m);
        if (it == out.end()) {
            out.emplace(m, c);
        } else {
            uint32_t s = fp_add(it->second, c, p);
            if (s == 0)
                out.erase(it);
            else
                it->second = s;
        }
    }
    return Poly(spec_, std::move(out));
}

Poly Poly::operator-() const {
    uint32_t p = spec_->p();
    TermMap out;
    for (const auto& [m, c] : terms_) out.emplace(m, fp_neg(c, p));
    return Poly(spec_, std::move(out));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    require_same_spec(spec_, o.spec_, "poly mul");
    uint32_t p = spec_->p();
    TermMap out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            uint32_t c = fp_mul(ca, cb, p);
            if (c == 0) continue;
            Monomial m = ma * mb;
            auto it = out.find(m);
            if (it == out.end()) {
                out.emplace(std::move(m), c);
            } else {
                uint32_t s = fp_add(it->second, c, p);
                if (s == 0)
                    out.erase(it);
                else
                    it->second = s;
            }
        }
    }
    return Poly(spec_, std::move(out));
}

Poly Poly::scaled(uint32_t c) const {
    uint32_t p = spec_->p();
    c %= p;
    if (c == 0) return zero(spec_);
    TermMap out;
    for (const auto& [m, a] : terms_) out.emplace(m, fp_mul(a, c, p));
    return Poly(spec_, std::move(out));
}

Poly Poly::mul_monomial(const Monomial& m, uint32_t c) const {
    uint32_t p = spec_->p();
    c %= p;
    if (c == 0) return zero(spec_);
    TermMap out;
    for (const auto& [mm, a] : terms_) out.emplace(mm * m, fp_mul(a, c, p));
    return Poly(spec_, std::move(out));
}

Poly Poly::pow(uint64_t e) const {
    Poly result = constant(spec_, 1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1) result = result * base;
        if (e >>= 1) base = base * base;
    }
    return result;
}

bool Poly::operator==(const Poly& o) const {
    return same_spec(spec_, o.spec_) && terms_ == o.terms_;
}

// ------------------------------------------------------------------ poly gcd
//
// Recursive content/primitive-part GCD.  Monomial contents come out first;
// polynomials in a single variable use dense Euclid over F_p; otherwise the
// primitive part is computed by a monic Euclidean remainder sequence over the
// rational function field in the remaining variables (coefficient reductions
// recurse on strictly smaller variable support).

namespace {

Poly make_monic(const Poly& f) {
    if (f.is_zero()) return f;
    return f.scaled(fp_inv(f.leading_coeff(), f.p()));
}

// Componentwise minimum exponent vector of all monomials.
Monomial monomial_content(const Poly& f) {
    std::vector<uint32_t> mins(f.nvars(), UINT32_MAX);
    for (const auto& [m, c] : f.terms())
        for (size_t i = 0; i < mins.size(); ++i) mins[i] = std::min(mins[i], m.exponent(i));
    return Monomial(std::move(mins));
}

Poly divide_monomial(const Poly& f, const Monomial& m) {
    Poly::TermMap out;
    for (const auto& [mm, c] : f.terms()) out.emplace(mm.divide_by(m), c);
    return Poly(f.spec(), std::move(out));
}

// Dense Euclid for polynomials supported on a single variable.
Poly gcd_single_variable(const Poly& a, const Poly& b, size_t var) {
    uint32_t p = a.p();
    auto dense = [&](const Poly& f) {
        std::vector<uint32_t> c(f.degree_in(var) + 1, 0);
        for (const auto& [m, coeff] : f.terms()) c[m.exponent(var)] = coeff;
        return c;
    };
    auto deg = [](const std::vector<uint32_t>& c) -> int64_t {
        for (size_t i = c.size(); i-- > 0;)
            if (c[i] != 0) return static_cast<int64_t>(i);
        return -1;
    };
    std::vector<uint32_t> f = dense(a), g = dense(b);
    int64_t df = deg(f), dg = deg(g);
    while (dg >= 0) {
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
            continue;
        }
        uint32_t ratio = fp_mul(f[df], fp_inv(g[dg], p), p);
        size_t shift = static_cast<size_t>(df - dg);
        for (int64_t i = 0; i <= dg; ++i)
            f[i + shift] = fp_sub(f[i + shift], fp_mul(ratio, g[i], p), p);
        df = deg(f);
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
        }
    }
    Poly::TermMap out;
    uint32_t inv = fp_inv(f[df], p);
    for (int64_t i = 0; i <= df; ++i) {
        if (f[i] == 0) continue;
        std::vector<uint32_t> e(a.nvars(), 0);
        e[var] = static_cast<uint32_t>(i);
        out.emplace(Monomial(std::move(e)), fp_mul(f[i], inv, p));
    }
    return Poly(a.spec(), std::move(out));
}

// f as univariate in `var`: degree -> coefficient (exponent of `var` zeroed).
std::map<uint64_t, Poly> as_univariate(const Poly& f, size_t var) {
    std::map<uint64_t, Poly> out;
    for (const auto& [m, c] : f.terms()) {
        uint64_t d = m.exponent(var);
        std::vector<uint32_t> e = m.exponents();
        e[var] = 0;
        Monomial key(std::move(e));
        auto it = out.find(d);
        if (it == out.end())
            out.emplace(d, Poly::monomial(f.spec(), std::move(key), c));
        else
            it->second = it->second + Poly::monomial(f.spec(), std::move(key), c);
    }
    return out;
}

// Coefficientwise gcd, i.e. the content with respect to `var`.
Poly content_in(const Poly& f, size_t var) {
    Poly c = Poly::zero(f.spec());
    for (const auto& [d, coeff] : as_univariate(f, var)) {
        c = poly_gcd(c, coeff);
        if (c.is_one()) break;
    }
    return c;
}

// ---- small extension field F_q, q = p^k, used by the modular gcd

// Elements are base-p digit vectors packed into a uint64 (digit i in bits
// [i*w, (i+1)*w)); p = 2 takes pure bit paths.
struct FqCtx {
    uint32_t p = 2;
    uint32_t k = 1;
    uint32_t w = 1;           // bits per digit
    uint64_t digit_mask = 1;  // (1 << w) - 1
    uint64_t mod_packed = 0;  // irreducible: digits c_0..c_{k-1} (x^k monic implicit)
    std::vector<uint32_t> mod;
};

struct FqEl {
    uint64_t v = 0;
    bool operator==(const FqEl& o) const { return v == o.v; }
};

// Dense univariate arithmetic over F_p for the irreducibility search.
namespace updense {

int64_t deg(const std::vector<uint32_t>& f) {
    for (size_t i = f.size(); i-- > 0;)
        if (f[i] != 0) return static_cast<int64_t>(i);
    return -1;
}

std::vector<uint32_t> mulmod(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                             const std::vector<uint32_t>& mod, uint32_t p) {
    size_t k = mod.size() - 1;  // mod is monic of degree k
    std::vector<uint32_t> prod(2 * k, 0);
    for (size_t i = 0; i < k; ++i) {
        if (i >= a.size() || a[i] == 0) continue;
        for (size_t j = 0; j < k; ++j) {
            if (j >= b.size() || b[j] == 0) continue;
            prod[i + j] = fp_add(prod[i + j], fp_mul(a[i], b[j], p), p);
        }
    }
    for (size_t i = 2 * k; i-- > k;) {
        uint32_t c = prod[i];
        if (c == 0) continue;
        prod[i] = 0;
        for (size_t j = 0; j < k; ++j)
            prod[i - k + j] = fp_sub(prod[i - k + j], fp_mul(c, mod[j], p), p);
    }
    prod.resize(k);
    return prod;
}

std::vector<uint32_t> gcd(std::vector<uint32_t> f, std::vector<uint32_t> g, uint32_t p) {
    int64_t df = deg(f), dg = deg(g);
    while (dg >= 0) {
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
            continue;
        }
        uint32_t ratio = fp_mul(f[df], fp_inv(g[dg], p), p);
        size_t shift = static_cast<size_t>(df - dg);
        for (int64_t i = 0; i <= dg; ++i)
            f[i + shift] = fp_sub(f[i + shift], fp_mul(ratio, g[i], p), p);
        df = deg(f);
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
        }
    }
    return f;
}

bool is_irreducible(const std::vector<uint32_t>& mod, uint32_t p) {
    size_t k = mod.size() - 1;
    if (k == 1) return true;
    std::vector<uint32_t> x(k, 0);
    x[1] = 1;
    std::vector<uint32_t> t = x;
    auto fro = [&](std::vector<uint32_t> f) {
        std::vector<uint32_t> acc(k, 0);
        acc[0] = 1;
        std::vector<uint32_t> base = std::move(f);
        uint32_t e = p;
        while (e > 0) {
            if (e & 1) acc = mulmod(acc, base, mod, p);
            e >>= 1;
            if (e) base = mulmod(base, base, mod, p);
        }
        return acc;
    };
    for (size_t i = 1; i <= k; ++i) {
        t = fro(std::move(t));
        if (i < k && k % i == 0) {
            size_t quot = k / i;
            bool prime_quotient = quot >= 2;
            for (size_t d = 2; d * d <= quot && prime_quotient; ++d)
                if (quot % d == 0) prime_quotient = false;
            if (prime_quotient) {
                std::vector<uint32_t> diff = t;
                diff[1] = fp_sub(diff[1], 1, p);
                if (deg(gcd(diff, mod, p)) > 0) return false;
            }
        }
        if (i == k) {
            std::vector<uint32_t> diff = t;
            diff[1] = fp_sub(diff[1], 1, p);
            if (deg(diff) >= 0) return false;
        }
    }
    return true;
}

}  // namespace updense

const FqCtx& fq_context(uint32_t p, uint32_t k) {
    static std::mutex mu;
    static std::map<std::pair<uint32_t, uint32_t>, FqCtx> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, k});
    if (it != cache.end()) return it->second;
    FqCtx ctx;
    ctx.p = p;
    ctx.k = k;
    ctx.w = 1;
    while ((1u << ctx.w) < p) ++ctx.w;
    ctx.digit_mask = (uint64_t(1) << ctx.w) - 1;
    std::vector<uint32_t> mod(k + 1, 0);
    mod[k] = 1;
    for (uint64_t counter = 1;; ++counter) {
        uint64_t c = counter;
        for (size_t i = 0; i < k; ++i) {
            mod[i] = static_cast<uint32_t>(c % p);
            c /= p;
        }
        if (mod[0] == 0) continue;
        if (updense::is_irreducible(mod, p)) break;
    }
    ctx.mod = mod;
    ctx.mod_packed = 0;
    for (size_t i = 0; i < k; ++i) ctx.mod_packed |= uint64_t(mod[i]) << (i * ctx.w);
    return cache.emplace(std::make_pair(p, k), std::move(ctx)).first->second;
}

inline FqEl fq_zero(const FqCtx&) { return FqEl{0}; }
inline bool fq_is_zero(const FqEl& a) { return a.v == 0; }

inline uint32_t fq_digit(const FqCtx& ctx, const FqEl& a, uint32_t i) {
    return static_cast<uint32_t>((a.v >> (i * ctx.w)) & ctx.digit_mask);
}

inline FqEl fq_from_scalar(const FqCtx& ctx, uint32_t v) { return FqEl{v % ctx.p}; }

inline FqEl fq_add(const FqCtx& ctx, const FqEl& a, const FqEl& b) {
    if (ctx.p == 2) return FqEl{a.v ^ b.v};
    uint64_t out = 0;
    for (uint32_t i = 0; i < ctx.k; ++i)
        out |= uint64_t(fp_add(fq_digit(ctx, a, i), fq_digit(ctx, b, i), ctx.p)) << (i * ctx.w);
    return FqEl{out};
}

inline FqEl fq_sub(const FqCtx& ctx, const FqEl& a, const FqEl& b) {
    if (ctx.p == 2) return FqEl{a.v ^ b.v};
    uint64_t out = 0;
    for (uint32_t i = 0; i < ctx.k; ++i)
        out |= uint64_t(fp_sub(fq_digit(ctx, a, i), fq_digit(ctx, b, i), ctx.p)) << (i * ctx.w);
    return FqEl{out};
}

inline FqEl fq_neg(const FqCtx& ctx, const FqEl& a) { return fq_sub(ctx, FqEl{0}, a); }

FqEl fq_mul(const FqCtx& ctx, const FqEl& a, const FqEl& b) {
    if (a.v == 0 || b.v == 0) return FqEl{0};
    if (ctx.p == 2) {
        // carryless multiply then reduce by the irreducible
        uint64_t prod = 0;
        uint64_t x = a.v;
        for (uint32_t i = 0; i < ctx.k; ++i)
            if ((b.v >> i) & 1) prod ^= x << i;
        for (uint32_t i = 2 * ctx.k - 1; i >= ctx.k; --i)
            if ((prod >> i) & 1) prod ^= (ctx.mod_packed << (i - ctx.k)) | (uint64_t(1) << i);
        return FqEl{prod};
    }
    std::array<uint32_t, 32> prod{};
    for (uint32_t i = 0; i < ctx.k; ++i) {
        uint32_t ai = fq_digit(ctx, a, i);
        if (!ai) continue;
        for (uint32_t j = 0; j < ctx.k; ++j) {
            uint32_t bj = fq_digit(ctx, b, j);
            if (!bj) continue;
            prod[i + j] = fp_add(prod[i + j], fp_mul(ai, bj, ctx.p), ctx.p);
        }
    }
    for (uint32_t i = 2 * ctx.k - 1; i >= ctx.k; --i) {
        uint32_t c = prod[i];
        if (!c) continue;
        prod[i] = 0;
        for (uint32_t j = 0; j < ctx.k; ++j)
            prod[i - ctx.k + j] = fp_sub(prod[i - ctx.k + j], fp_mul(c, ctx.mod[j], ctx.p), ctx.p);
    }
    uint64_t out = 0;
    for (uint32_t i = 0; i < ctx.k; ++i) out |= uint64_t(prod[i]) << (i * ctx.w);
    return FqEl{out};
}

FqEl fq_pow(const FqCtx& ctx, FqEl base, uint64_t e) {
    FqEl acc = fq_from_scalar(ctx, 1);
    while (e > 0) {
        if (e & 1) acc = fq_mul(ctx, acc, base);
        e >>= 1;
        if (e) base = fq_mul(ctx, base, base);
    }
    return acc;
}

FqEl fq_inv(const FqCtx& ctx, const FqEl& a) {
    uint64_t q = 1;
    for (uint32_t i = 0; i < ctx.k; ++i) q *= ctx.p;
    return fq_pow(ctx, a, q - 2);
}

// Deterministic enumeration of F_q elements (counter written in base p).
FqEl fq_element_number(const FqCtx& ctx, uint64_t counter) {
    uint64_t out = 0;
    for (uint32_t i = 0; i < ctx.k && counter; ++i) {
        out |= uint64_t(counter % ctx.p) << (i * ctx.w);
        counter /= ctx.p;
    }
    return FqEl{out};
}

// f with every variable except `var` evaluated at the given points; dense
// univariate result.
std::vector<FqEl> eval_keep_var(const FqCtx& ctx, const Poly& f, size_t var,
                                const std::vector<FqEl>& point) {
    std::vector<FqEl> out(f.degree_in(var) + 1, FqEl{0});
    std::vector<std::vector<FqEl>> powers(f.nvars());
    auto power = [&](size_t v, uint32_t e) -> const FqEl& {
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(fq_from_scalar(ctx, 1));
        while (cache.size() <= e) cache.push_back(fq_mul(ctx, cache.back(), point[v]));
        return cache[e];
    };
    for (const auto& [m, coeff] : f.terms()) {
        FqEl t = fq_from_scalar(ctx, coeff);
        for (size_t v = 0; v < f.nvars(); ++v)
            if (v != var && m.exponent(v) != 0) t = fq_mul(ctx, t, power(v, m.exponent(v)));
        out[m.exponent(var)] = fq_add(ctx, out[m.exponent(var)], t);
    }
    return out;
}

int64_t fq_univ_deg(const std::vector<FqEl>& f) {
    for (size_t i = f.size(); i-- > 0;)
        if (!fq_is_zero(f[i])) return static_cast<int64_t>(i);
    return -1;
}

int64_t fq_univ_gcd_degree(const FqCtx& ctx, std::vector<FqEl> f, std::vector<FqEl> g) {
    int64_t df = fq_univ_deg(f), dg = fq_univ_deg(g);
    while (dg >= 0) {
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
            continue;
        }
        FqEl ratio = fq_mul(ctx, f[df], fq_inv(ctx, g[dg]));
        size_t shift = static_cast<size_t>(df - dg);
        for (int64_t i = 0; i <= dg; ++i)
            f[i + shift] = fq_sub(ctx, f[i + shift], fq_mul(ctx, ratio, g[i]));
        df = fq_univ_deg(f);
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
        }
    }
    return df;
}

uint32_t fq_pick_k(uint32_t p, uint64_t max_degree) {
    uint64_t need = 4 * (max_degree + 8) + 32;
    uint32_t k = 1;
    uint64_t q = p;
    while (q < need && k < 16) {
        q *= p;
        ++k;
    }
    return k;
}

// Certified upper bound for deg_var(gcd(a, b)): at any point where both images
// keep full degree in `var`, the image gcd degree bounds deg_var(gcd) from
// above.  Falls back to min(deg_var a, deg_var b) if no valid points show up.
uint64_t certified_degree_bound(const Poly& a, const Poly& b, size_t var) {
    uint64_t da = a.degree_in(var), db = b.degree_in(var);
    uint64_t fallback = std::min(da, db);
    uint32_t p = a.p();
    const FqCtx& ctx = fq_context(p, fq_pick_k(p, std::max(a.total_degree(), b.total_degree())));
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ (uint64_t(p) << 32) ^ var);
    uint64_t q = 1;
    for (uint32_t i = 0; i < ctx.k; ++i) q *= ctx.p;
    uint64_t best = fallback;
    int valid = 0;
    for (int attempt = 0; attempt < 6 && valid < 2; ++attempt) {
        std::vector<FqEl> point(a.nvars(), FqEl{0});
        for (size_t v = 0; v < a.nvars(); ++v)
            if (v != var) point[v] = fq_element_number(ctx, rng() % q);
        auto ua = eval_keep_var(ctx, a, var, point);
        auto ub = eval_keep_var(ctx, b, var, point);
        if (fq_univ_deg(ua) != static_cast<int64_t>(da) ||
            fq_univ_deg(ub) != static_cast<int64_t>(db))
            continue;
        int64_t d = fq_univ_gcd_degree(ctx, std::move(ua), std::move(ub));
        best = std::min<uint64_t>(best, static_cast<uint64_t>(d));
        ++valid;
        if (best == 0) break;
    }
    return best;
}

// ---- Brown-style modular gcd over F_q: evaluate one variable at a time,
// interpolate the gcd scaled to a known leading coefficient, and certify the
// candidate by trial division.

struct GradedLexExps {
    bool operator()(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) const {
        uint64_t da = 0, db = 0;
        for (uint32_t x : a) da += x;
        for (uint32_t x : b) db += x;
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

struct FqPoly {
    size_t nvars = 0;
    std::map<std::vector<uint32_t>, FqEl, GradedLexExps> terms;
};

uint64_t fqp_total_degree(const FqPoly& f) {
    if (f.terms.empty()) return 0;
    uint64_t d = 0;
    for (uint32_t x : f.terms.rbegin()->first) d += x;
    return d;
}

bool fqp_is_zero(const FqPoly& f) { return f.terms.empty(); }

bool fqp_is_constant(const FqPoly& f) {
    if (f.terms.empty()) return true;
    if (f.terms.size() > 1) return false;
    for (uint32_t e : f.terms.begin()->first)
        if (e) return false;
    return true;
}

void fqp_add_term(const FqCtx& ctx, FqPoly& f, const std::vector<uint32_t>& e, const FqEl& c) {
    if (fq_is_zero(c)) return;
    auto it = f.terms.find(e);
    if (it == f.terms.end()) {
        f.terms.emplace(e, c);
    } else {
        it->second = fq_add(ctx, it->second, c);
        if (fq_is_zero(it->second)) f.terms.erase(it);
    }
}

FqPoly fqp_mul(const FqCtx& ctx, const FqPoly& a, const FqPoly& b) {
    FqPoly out{a.nvars, {}};
    std::vector<uint32_t> e(a.nvars);
    for (const auto& [ea, ca] : a.terms) {
        for (const auto& [eb, cb] : b.terms) {
            for (size_t i = 0; i < a.nvars; ++i) e[i] = ea[i] + eb[i];
            fqp_add_term(ctx, out, e, fq_mul(ctx, ca, cb));
        }
    }
    return out;
}

FqPoly fqp_sub(const FqCtx& ctx, const FqPoly& a, const FqPoly& b) {
    FqPoly out = a;
    for (const auto& [e, c] : b.terms) fqp_add_term(ctx, out, e, fq_neg(ctx, c));
    return out;
}

FqPoly fqp_scale(const FqCtx& ctx, const FqPoly& a, const FqEl& c) {
    FqPoly out{a.nvars, {}};
    if (fq_is_zero(c)) return out;
    for (const auto& [e, coeff] : a.terms) {
        FqEl v = fq_mul(ctx, coeff, c);
        if (!fq_is_zero(v)) out.terms.emplace(e, v);
    }
    return out;
}

uint64_t fqp_degree_in(const FqPoly& f, size_t var) {
    uint64_t d = 0;
    for (const auto& [e, c] : f.terms) d = std::max<uint64_t>(d, e[var]);
    return d;
}

FqPoly fqp_monic(const FqCtx& ctx, const FqPoly& f) {
    if (fqp_is_zero(f)) return f;
    return fqp_scale(ctx, f, fq_inv(ctx, f.terms.rbegin()->second));
}

// Exact division under graded-lex leading-term elimination; nullopt if inexact.
std::optional<FqPoly> fqp_try_divide(const FqCtx& ctx, FqPoly rem, const FqPoly& b) {
    if (fqp_is_zero(b)) return std::nullopt;
    const auto lb = *b.terms.rbegin();
    FqEl lb_inv = fq_inv(ctx, lb.second);
    uint64_t quot_bound =
        fqp_is_zero(rem) ? 0 : fqp_total_degree(rem) - fqp_total_degree(b);
    FqPoly quot{rem.nvars, {}};
    std::vector<uint32_t> qe(rem.nvars);
    while (!fqp_is_zero(rem)) {
        const auto& lr = *rem.terms.rbegin();
        uint64_t qdeg = 0;
        for (size_t i = 0; i < rem.nvars; ++i) {
            if (lr.first[i] < lb.first[i]) return std::nullopt;
            qe[i] = lr.first[i] - lb.first[i];
            qdeg += qe[i];
        }
        if (qdeg > quot_bound) return std::nullopt;  // exact quotients cannot reach here
        FqEl qc = fq_mul(ctx, lr.second, lb_inv);
        quot.terms.emplace(qe, qc);
        // rem -= qc * x^qe * b
        std::vector<uint32_t> e(rem.nvars);
        for (const auto& [eb, cb] : b.terms) {
            for (size_t i = 0; i < rem.nvars; ++i) e[i] = eb[i] + qe[i];
            fqp_add_term(ctx, rem, e, fq_neg(ctx, fq_mul(ctx, qc, cb)));
        }
    }
    return quot;
}

FqPoly fqp_divide_exact(const FqCtx& ctx, const FqPoly& a, const FqPoly& b) {
    auto q = fqp_try_divide(ctx, a, b);
    if (!q) throw InternalError("inexact division in modular gcd");
    return *q;
}

// Substitute var := a.
FqPoly fqp_eval_at(const FqCtx& ctx, const FqPoly& f, size_t var, const FqEl& a) {
    FqPoly out{f.nvars, {}};
    std::vector<FqEl> powers{fq_from_scalar(ctx, 1)};
    auto power = [&](uint32_t e) -> const FqEl& {
        while (powers.size() <= e) powers.push_back(fq_mul(ctx, powers.back(), a));
        return powers[e];
    };
    std::vector<uint32_t> e2;
    for (const auto& [e, c] : f.terms) {
        e2 = e;
        uint32_t ev = e2[var];
        e2[var] = 0;
        fqp_add_term(ctx, out, e2, ev ? fq_mul(ctx, c, power(ev)) : c);
    }
    return out;
}

// Coefficients of powers of `var`.
std::map<uint64_t, FqPoly> fqp_univariate(const FqPoly& f, size_t var) {
    std::map<uint64_t, FqPoly> out;
    std::vector<uint32_t> e2;
    for (const auto& [e, c] : f.terms) {
        e2 = e;
        uint64_t d = e2[var];
        e2[var] = 0;
        auto it = out.find(d);
        if (it == out.end()) it = out.emplace(d, FqPoly{f.nvars, {}}).first;
        it->second.terms.emplace(e2, c);
    }
    return out;
}

FqPoly fq_gcd(const FqCtx& ctx, const FqPoly& a, const FqPoly& b);

FqPoly fqp_content_in(const FqCtx& ctx, const FqPoly& f, size_t var) {
    FqPoly c{f.nvars, {}};
    for (const auto& [d, coeff] : fqp_univariate(f, var)) {
        c = fq_gcd(ctx, c, coeff);
        if (fqp_is_constant(c) && !fqp_is_zero(c)) break;
    }
    return c;
}

FqPoly fqp_gcd_single_var(const FqCtx& ctx, const FqPoly& a, const FqPoly& b, size_t var) {
    auto dense = [&](const FqPoly& f) {
        std::vector<FqEl> c(fqp_degree_in(f, var) + 1, fq_zero(ctx));
        for (const auto& [e, coeff] : f.terms) c[e[var]] = coeff;
        return c;
    };
    std::vector<FqEl> f = dense(a), g = dense(b);
    int64_t df = fq_univ_deg(f), dg = fq_univ_deg(g);
    while (dg >= 0) {
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
            continue;
        }
        FqEl ratio = fq_mul(ctx, f[df], fq_inv(ctx, g[dg]));
        size_t shift = static_cast<size_t>(df - dg);
        for (int64_t i = 0; i <= dg; ++i)
            f[i + shift] = fq_sub(ctx, f[i + shift], fq_mul(ctx, ratio, g[i]));
        df = fq_univ_deg(f);
        if (df < dg) {
            std::swap(f, g);
            std::swap(df, dg);
        }
    }
    FqPoly out{a.nvars, {}};
    FqEl inv = fq_inv(ctx, f[df]);
    for (int64_t i = 0; i <= df; ++i) {
        if (fq_is_zero(f[i])) continue;
        std::vector<uint32_t> e(a.nvars, 0);
        e[var] = static_cast<uint32_t>(i);
        out.terms.emplace(std::move(e), fq_mul(ctx, f[i], inv));
    }
    return out;
}

FqPoly fq_gcd(const FqCtx& ctx, const FqPoly& a, const FqPoly& b) {
    if (fqp_is_zero(a)) return fqp_monic(ctx, b);
    if (fqp_is_zero(b)) return fqp_monic(ctx, a);

    FqPoly one{a.nvars, {}};
    one.terms.emplace(std::vector<uint32_t>(a.nvars, 0), fq_from_scalar(ctx, 1));

    // monomial content
    std::vector<uint32_t> shared(a.nvars, UINT32_MAX);
    auto mono_min = [&](const FqPoly& f, std::vector<uint32_t>& mins) {
        std::fill(mins.begin(), mins.end(), UINT32_MAX);
        for (const auto& [e, c] : f.terms)
            for (size_t i = 0; i < mins.size(); ++i) mins[i] = std::min(mins[i], e[i]);
    };
    std::vector<uint32_t> ma(a.nvars), mb(a.nvars);
    mono_min(a, ma);
    mono_min(b, mb);
    for (size_t i = 0; i < a.nvars; ++i) shared[i] = std::min(ma[i], mb[i]);
    auto strip = [&](const FqPoly& f, const std::vector<uint32_t>& mins) {
        FqPoly out{f.nvars, {}};
        std::vector<uint32_t> e2;
        for (const auto& [e, c] : f.terms) {
            e2 = e;
            for (size_t i = 0; i < e2.size(); ++i) e2[i] -= mins[i];
            out.terms.emplace(e2, c);
        }
        return out;
    };
    FqPoly fa = strip(a, ma), fb = strip(b, mb);
    FqPoly shared_mono{a.nvars, {}};
    shared_mono.terms.emplace(shared, fq_from_scalar(ctx, 1));
    auto finish = [&](const FqPoly& core) { return fqp_monic(ctx, fqp_mul(ctx, core, shared_mono)); };

    if (fqp_is_constant(fa) || fqp_is_constant(fb)) return finish(one);

    std::vector<size_t> both, any;
    for (size_t v = 0; v < a.nvars; ++v) {
        uint64_t da = fqp_degree_in(fa, v), db = fqp_degree_in(fb, v);
        if (da > 0 && db > 0) both.push_back(v);
        if (da > 0 || db > 0) any.push_back(v);
    }
    if (both.empty()) return finish(one);
    if (any.size() == 1) return finish(fqp_gcd_single_var(ctx, fa, fb, any[0]));

    size_t xm = both[0];                  // main variable: the anchor for scaling
    size_t ev = any.back() == xm ? any[any.size() - 2] : any.back();  // evaluated variable

    FqPoly cont_a = fqp_content_in(ctx, fa, xm);
    FqPoly cont_b = fqp_content_in(ctx, fb, xm);
    FqPoly cont = fq_gcd(ctx, cont_a, cont_b);
    FqPoly pa = fqp_is_constant(cont_a) ? fa : fqp_divide_exact(ctx, fa, cont_a);
    FqPoly pb = fqp_is_constant(cont_b) ? fb : fqp_divide_exact(ctx, fb, cont_b);

    auto lc_of = [&](const FqPoly& f) {
        auto uni = fqp_univariate(f, xm);
        return uni.rbegin()->second;
    };
    FqPoly gamma = fq_gcd(ctx, lc_of(pa), lc_of(pb));
    uint64_t deg_main = std::min(fqp_degree_in(pa, xm), fqp_degree_in(pb, xm));

    uint64_t points_needed =
        std::min(fqp_degree_in(pa, ev), fqp_degree_in(pb, ev)) + fqp_degree_in(gamma, ev) + 1;
    uint64_t q = 1;
    for (uint32_t i = 0; i < ctx.k; ++i) q *= ctx.p;

    // Newton interpolation state
    FqPoly h{a.nvars, {}};
    FqPoly basis = one;  // prod (x_ev - a_i)
    uint64_t collected = 0;
    uint64_t current_deg = deg_main;

    for (uint64_t counter = 0; counter < q; ++counter) {
        FqEl pt = fq_element_number(ctx, counter);
        FqPoly gamma_a = fqp_eval_at(ctx, gamma, ev, pt);
        if (fqp_is_zero(gamma_a)) continue;
        FqPoly aa = fqp_eval_at(ctx, pa, ev, pt);
        FqPoly bb = fqp_eval_at(ctx, pb, ev, pt);
        if (fqp_degree_in(aa, xm) != fqp_degree_in(pa, xm)) continue;
        if (fqp_degree_in(bb, xm) != fqp_degree_in(pb, xm)) continue;
        FqPoly ga = fq_gcd(ctx, aa, bb);
        uint64_t dg = fqp_degree_in(ga, xm);
        if (dg == 0) return finish(cont);  // primitive parts are coprime
        if (dg > current_deg) continue;    // unlucky point
        if (dg < current_deg) {            // all previous points were unlucky
            current_deg = dg;
            h = FqPoly{a.nvars, {}};
            basis = one;
            collected = 0;
        }
        auto uni = fqp_univariate(ga, xm);
        auto scale = fqp_try_divide(ctx, gamma_a, uni.rbegin()->second);
        if (!scale) continue;
        FqPoly ha = fqp_mul(ctx, ga, *scale);

        // Newton update: h += (ha - h(ev=pt)) * basis / basis(pt)
        FqPoly delta = fqp_sub(ctx, ha, fqp_eval_at(ctx, h, ev, pt));
        if (!fqp_is_zero(delta)) {
            FqPoly bval = fqp_eval_at(ctx, basis, ev, pt);
            FqEl binv = fq_inv(ctx, bval.terms.begin()->second);
            FqPoly add = fqp_mul(ctx, fqp_scale(ctx, delta, binv), basis);
            for (const auto& [e, c] : add.terms) fqp_add_term(ctx, h, e, c);
        }
        {
            // basis *= (x_ev - pt)
            FqPoly lin{a.nvars, {}};
            std::vector<uint32_t> e(a.nvars, 0);
            e[ev] = 1;
            lin.terms.emplace(e, fq_from_scalar(ctx, 1));
            std::vector<uint32_t> e0(a.nvars, 0);
            FqEl neg = fq_sub(ctx, fq_zero(ctx), pt);
            if (!fq_is_zero(neg)) lin.terms.emplace(e0, neg);
            basis = fqp_mul(ctx, basis, lin);
        }
        ++collected;
        if (collected >= points_needed) {
            FqPoly cand = h;
            FqPoly hc = fqp_content_in(ctx, cand, xm);
            if (!fqp_is_constant(hc)) cand = fqp_divide_exact(ctx, cand, hc);
            if (fqp_try_divide(ctx, pa, cand) && fqp_try_divide(ctx, pb, cand))
                return finish(fqp_mul(ctx, cont, cand));
            // interpolated from unlucky data; keep collecting
            points_needed += 2;
        }
    }
    throw InternalError("modular gcd ran out of evaluation points");
}

}  // namespace

Poly poly_gcd_impl(const Poly& a, const Poly& b);

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (!std::getenv("KMSYM_GCD_DEBUG")) return poly_gcd_impl(a, b);
    static thread_local int depth = 0;
    ++depth;
    auto t0 = std::chrono::steady_clock::now();
    Poly g = poly_gcd_impl(a, b);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    --depth;
    if (dt > 0.5)
        fprintf(stderr, "[gcd d=%d %.1fs] a: %zu terms deg %llu | b: %zu terms deg %llu -> %zu terms deg %llu\n",
                depth, dt, a.term_count(), (unsigned long long)a.total_degree(), b.term_count(),
                (unsigned long long)b.total_degree(), g.term_count(), (unsigned long long)g.total_degree());
    return g;
}

Poly poly_gcd_impl(const Poly& a, const Poly& b) {
    require_same_spec(a.spec(), b.spec(), "poly gcd");
    if (a.is_zero()) return make_monic(b);
    if (b.is_zero()) return make_monic(a);
    if (a.is_constant() || b.is_constant()) return Poly::constant(a.spec(), 1);

    // Pull out monomial contents; the rest of the computation sees polynomials
    // with trivial monomial content.
    Monomial ma = monomial_content(a), mb = monomial_content(b);
    std::vector<uint32_t> shared(a.nvars());
    for (size_t i = 0; i < shared.size(); ++i)
        shared[i] = std::min(ma.exponent(i), mb.exponent(i));
    Monomial shared_mono{std::move(shared)};
    Poly fa = divide_monomial(a, ma);
    Poly fb = divide_monomial(b, mb);

    std::vector<size_t> support;
    for (size_t i = 0; i < a.nvars(); ++i)
        if (fa.degree_in(i) > 0 && fb.degree_in(i) > 0) support.push_back(i);
    std::vector<size_t> any_support;
    for (size_t i = 0; i < a.nvars(); ++i)
        if (fa.degree_in(i) > 0 || fb.degree_in(i) > 0) any_support.push_back(i);

    auto finish = [&](const Poly& core) {
        return make_monic(core.mul_monomial(shared_mono, 1));
    };

    if (fa == fb) return finish(fa);
    // No shared variables: only constants divide both.
    if (support.empty()) return finish(Poly::constant(a.spec(), 1));

    if (any_support.size() == 1)
        return finish(gcd_single_variable(fa, fb, any_support[0]));

    // In characteristic p both inputs are often p-th powers; descend.
    if (auto ra = try_pth_root(fa)) {
        if (auto rb = try_pth_root(fb)) return finish(poly_gcd(*ra, *rb).pow(a.p()));
    }

    // Certified per-variable degree bounds for the gcd.  They prove most pairs
    // coprime outright and otherwise steer the Euclid below to the variable
    // with the fewest degree-lowering steps.
    std::vector<uint64_t> bound(a.nvars(), 0);
    bool all_zero = true;
    for (size_t v : support) {
        bound[v] = certified_degree_bound(fa, fb, v);
        if (bound[v] > 0) all_zero = false;
    }
    if (all_zero) return finish(Poly::constant(a.spec(), 1));

    // If the bounds allow the smaller input to be the gcd, try dividing.
    const Poly& small = fa.total_degree() <= fb.total_degree() ? fa : fb;
    const Poly& large = fa.total_degree() <= fb.total_degree() ? fb : fa;
    bool maybe_divides = true;
    for (size_t v = 0; v < a.nvars(); ++v) {
        uint64_t ds = small.degree_in(v);
        if (ds > large.degree_in(v) || (ds > 0 && bound[v] < ds)) maybe_divides = false;
    }
    if (maybe_divides) {
        try {
            poly_divide_exact(large, small);
            return finish(small);
        } catch (const InternalError&) {
        }
    }

    // Lift to F_q and run the modular gcd; the result is rational over F_p.
    const FqCtx& ctx =
        fq_context(a.p(), fq_pick_k(a.p(), std::max(fa.total_degree(), fb.total_degree())));
    auto lift = [&](const Poly& f) {
        FqPoly out{f.nvars(), {}};
        for (const auto& [m, c] : f.terms())
            out.terms.emplace(m.exponents(), fq_from_scalar(ctx, c));
        return out;
    };
    FqPoly g = fq_gcd(ctx, lift(fa), lift(fb));
    Poly::TermMap out;
    for (const auto& [e, c] : g.terms) {
        if ((c.v >> ctx.w) != 0) throw InternalError("modular gcd left the prime field");
        out.emplace(Monomial(e), fq_digit(ctx, c, 0));
    }
    return finish(make_monic(Poly(a.spec(), std::move(out))));
}

Poly poly_divide_exact(const Poly& a, const Poly& b) {
    require_same_spec(a.spec(), b.spec(), "poly divide");
    if (b.is_zero()) throw DivisionByZero("exact division by zero polynomial");
    uint32_t p = a.p();
    Poly rem = a;
    Poly::TermMap quot;
    const Monomial& lb = b.leading_monomial();
    uint32_t lb_inv = fp_inv(b.leading_coeff(), p);
    while (!rem.is_zero()) {
        const Monomial& lr = rem.leading_monomial();
        if (!lb.divides(lr))
            throw InternalError("inexact polynomial division");
        Monomial qm = lr.divide_by(lb);
        uint32_t qc = fp_mul(rem.leading_coeff(), lb_inv, p);
        quot.emplace(qm, qc);
        rem = rem - b.mul_monomial(qm, qc);
    }
    return Poly(a.spec(), std::move(quot));
}

// ------------------------------------------------------- p-power structure

std::optional<Poly> try_pth_root(const Poly& f) {
    uint32_t p = f.p();
    Poly::TermMap out;
    for (const auto& [m, c] : f.terms()) {
        std::vector<uint32_t> e = m.exponents();
        for (uint32_t& x : e) {
            if (x % p != 0) return std::nullopt;
            x /= p;
        }
        // Coefficients of F_p are fixed by Frobenius, so they carry over.
        out.emplace(Monomial(std::move(e)), c);
    }
    return Poly(f.spec(), std::move(out));
}

Poly pth_root(const Poly& f) {
    auto r = try_pth_root(f);
    if (!r) throw NotAPthPower("polynomial is not a p-th power: " + render(f));
    return *r;
}

std::vector<PBasisTerm> pbasis_expand(const Poly& f) {
    if (f.is_zero()) throw ZeroInput("pbasis_expand of zero polynomial");
    uint32_t p = f.p();
    std::map<Monomial, Poly::TermMap, GradedLexLess> groups;
    for (const auto& [m, c] : f.terms()) {
        std::vector<uint32_t> residue(m.nvars()), quotient(m.nvars());
        for (size_t i = 0; i < m.nvars(); ++i) {
            residue[i] = m.exponent(i) % p;
            quotient[i] = m.exponent(i) / p;
        }
        groups[Monomial(std::move(residue))].emplace(Monomial(std::move(quotient)), c);
    }
    std::vector<PBasisTerm> out;
    out.reserve(groups.size());
    for (auto& [residue, hterms] : groups)
        out.push_back(PBasisTerm{Poly(f.spec(), std::move(hterms)), residue});
    return out;
}

Poly pbasis_term_value(const PBasisTerm& t) {
    return t.h.pow(t.h.p()).mul_monomial(t.m, 1);
}

// ---------------------------------------------------------- rational function

RatFunc::RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    require_same_spec(num_.spec(), den_.spec(), "ratfunc");
    if (den_.is_zero()) throw DivisionByZero("zero denominator");
    reduce();
}

RatFunc::RatFunc(Poly num) : num_(std::move(num)), den_(Poly::constant(num_.spec(), 1)) {}

void RatFunc::reduce() {
    if (num_.is_zero()) {
        den_ = Poly::constant(num_.spec(), 1);
        return;
    }
    Poly g = poly_gcd(num_, den_);
    if (!g.is_one()) {
        num_ = poly_divide_exact(num_, g);
        den_ = poly_divide_exact(den_, g);
    }
    uint32_t lc = den_.leading_coeff();
    if (lc != 1) {
        uint32_t inv = fp_inv(lc, num_.p());
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
}

RatFunc RatFunc::zero(FieldSpecPtr spec) { return RatFunc(Poly::zero(std::move(spec))); }
RatFunc RatFunc::one(FieldSpecPtr spec) { return RatFunc(Poly::constant(std::move(spec), 1)); }
RatFunc RatFunc::constant(FieldSpecPtr spec, int64_t c) {
    return RatFunc(Poly::constant(std::move(spec), c));
}
RatFunc RatFunc::variable(FieldSpecPtr spec, size_t index) {
    return RatFunc(Poly::variable(std::move(spec), index));
}

RatFunc RatFunc::normalized_monic() const {
    uint32_t lc = den_.leading_coeff();
    if (lc == 1) return *this;
    uint32_t inv = fp_inv(lc, num_.p());
    return RatFunc(num_.scaled(inv), den_.scaled(inv), ReducedTag{});
}

// The rational operations keep both operands reduced, so full-size gcds of
// products never occur; only gcds between already-reduced components.

RatFunc RatFunc::operator+(const RatFunc& o) const {
    require_same_spec(spec(), o.spec(), "ratfunc add");
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    Poly g = poly_gcd(den_, o.den_);
    Poly u1 = g.is_one() ? den_ : poly_divide_exact(den_, g);
    Poly u2 = g.is_one() ? o.den_ : poly_divide_exact(o.den_, g);
    Poly t = num_ * u2 + o.num_ * u1;
    if (t.is_zero()) return zero(spec());
    Poly g2 = g.is_one() ? g : poly_gcd(t, g);
    if (!g2.is_one()) t = poly_divide_exact(t, g2);
    Poly den = u1 * (g2.is_one() ? o.den_ : poly_divide_exact(o.den_, g2));
    return RatFunc(std::move(t), std::move(den), ReducedTag{}).normalized_monic();
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator-() const { return RatFunc(-num_, den_, ReducedTag{}); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
    require_same_spec(spec(), o.spec(), "ratfunc mul");
    if (is_zero() || o.is_zero()) return zero(spec());
    Poly g1 = poly_gcd(num_, o.den_);
    Poly g2 = poly_gcd(o.num_, den_);
    Poly n1 = g1.is_one() ? num_ : poly_divide_exact(num_, g1);
    Poly n2 = g2.is_one() ? o.num_ : poly_divide_exact(o.num_, g2);
    Poly d1 = g2.is_one() ? den_ : poly_divide_exact(den_, g2);
    Poly d2 = g1.is_one() ? o.den_ : poly_divide_exact(o.den_, g1);
    return RatFunc(n1 * n2, d1 * d2, ReducedTag{}).normalized_monic();
}

RatFunc RatFunc::operator/(const RatFunc& o) const { return *this * o.inverse(); }

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw DivisionByZero();
    return RatFunc(den_, num_, ReducedTag{}).normalized_monic();
}

RatFunc RatFunc::pow(int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    // coprime parts stay coprime under powers; the monic denominator stays monic
    return RatFunc(num_.pow(static_cast<uint64_t>(e)), den_.pow(static_cast<uint64_t>(e)),
                   ReducedTag{});
}

// ------------------------------------------------------------------ rendering

std::string render(const Monomial& m, const FieldSpec& spec) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < m.nvars(); ++i) {
        uint32_t e = m.exponent(i);
        if (e == 0) continue;
        if (!first) os << "*";
        os << spec.variable_name(i);
        if (e > 1) os << "^" << e;
        first = false;
    }
    if (first) os << "1";
    return os.str();
}

std::string render(const Poly& f) {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // Graded-lex descending.
    for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        if (!first) os << " + ";
        if (m.is_one()) {
            os << c;
        } else {
            if (c != 1) os << c << "*";
            os << render(m, *f.spec());
        }
        first = false;
    }
    return os.str();
}

std::string render(const RatFunc& f) {
    if (f.den().is_one()) return render(f.num());
    return "(" + render(f.num()) + ")/(" + render(f.den()) + ")";
}

// --------------------------------------------------------------------- parser

namespace {

class Parser {
public:
    Parser(std::string_view text, FieldSpecPtr spec) : text_(text), spec_(std::move(spec)) {}

    RatFunc parse() {
        RatFunc v = expression();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return v;
    }

private:
    std::string_view text_;
    FieldSpecPtr spec_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    RatFunc expression() {
        RatFunc acc = term();
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    RatFunc term() {
        RatFunc acc = factor();
        for (;;) {
            if (eat('*')) {
                acc = acc * factor();
            } else if (eat('/')) {
                size_t at = pos_;
                RatFunc d = factor();
                if (d.is_zero()) throw SyntaxError("division by zero", at);
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    RatFunc factor() {
        if (eat('-')) return -factor();
        RatFunc base = atom();
        if (eat('^')) {
            skip_ws();
            size_t at = pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw SyntaxError("expected integer exponent after '^'", at);
            uint64_t e = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                e = e * 10 + static_cast<uint64_t>(text_[pos_] - '0');
                if (e > 1'000'000) throw SyntaxError("exponent too large", at);
                ++pos_;
            }
            if (base.is_zero() && e == 0) throw SyntaxError("0^0 is undefined", at);
            base = base.pow(static_cast<int64_t>(e));
        }
        return base;
    }

    RatFunc atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            RatFunc v = expression();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint64_t value = 0;  // accumulated mod p, so no overflow
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                value = (value * 10 + static_cast<uint64_t>(text_[pos_] - '0')) % spec_->p();
                ++pos_;
            }
            return RatFunc::constant(spec_, static_cast<int64_t>(value));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            auto idx = spec_->variable_index(name);
            if (!idx) throw UnknownVariable(name, start);
            return RatFunc::variable(spec_, *idx);
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
};

}  // namespace

RatFunc parse_ratfunc(std::string_view text, const FieldSpecPtr& spec) {
    return Parser(text, spec).parse();
}

}  // namespace kmsym
