#include "kmsym/zpoly.hpp"

namespace kmsym {

ZPoly ZPoly::constant(size_t nvars, BigInt c) {
    ZPoly out(nvars);
    if (c != 0) out.terms_.emplace(Exps(nvars, 0), std::move(c));
    return out;
}

ZPoly ZPoly::variable(size_t nvars, size_t index) {
    ZPoly out(nvars);
    Exps e(nvars, 0);
    e.at(index) = 1;
    out.terms_.emplace(std::move(e), BigInt(1));
    return out;
}

void ZPoly::add_term(const Exps& e, const BigInt& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ZPoly ZPoly::operator+(const ZPoly& o) const {
    if (nvars_ != o.nvars_) throw InternalError("zpoly nvars mismatch");
    ZPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

ZPoly ZPoly::operator-() const {
    ZPoly out(nvars_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

ZPoly ZPoly::operator-(const ZPoly& o) const { return *this + (-o); }

ZPoly ZPoly::operator*(const ZPoly& o) const {
    if (nvars_ != o.nvars_) throw InternalError("zpoly nvars mismatch");
    ZPoly out(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exps e(nvars_);
            for (size_t i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

ZPoly ZPoly::pow(uint64_t e) const {
    ZPoly result = constant(nvars_, 1);
    ZPoly base = *this;
    while (e > 0) {
        if (e & 1) result = result * base;
        if (e >>= 1) base = base * base;
    }
    return result;
}

ZPoly ZPoly::scaled(const BigInt& c) const {
    ZPoly out(nvars_);
    if (c == 0) return out;
    for (const auto& [e, a] : terms_) out.terms_.emplace(e, a * c);
    return out;
}

ZPoly ZPoly::divide_exact(const BigInt& d) const {
    if (d == 0) throw InternalError("zpoly division by zero");
    ZPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (c % d != 0) throw InternalError("inexact integer division in universal polynomial");
        out.terms_.emplace(e, c / d);
    }
    return out;
}

BigInt ZPoly::eval(const std::vector<BigInt>& args) const {
    if (args.size() != nvars_) throw InternalError("zpoly eval arity mismatch");
    // Cache argument powers; universal polynomials reuse high powers heavily.
    std::vector<std::vector<BigInt>> powers(nvars_);
    auto power = [&](size_t v, uint32_t e) -> const BigInt& {
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(BigInt(1));
        while (cache.size() <= e) cache.push_back(cache.back() * args[v]);
        return cache[e];
    };
    BigInt acc = 0;
    for (const auto& [e, c] : terms_) {
        BigInt t = c;
        for (size_t v = 0; v < nvars_; ++v)
            if (e[v] != 0) t *= power(v, e[v]);
        acc += t;
    }
    return acc;
}

ZPoly ZPoly::compose(const std::vector<ZPoly>& args) const {
    if (args.size() != nvars_) throw InternalError("zpoly compose arity mismatch");
    size_t out_vars = args.empty() ? nvars_ : args[0].nvars();
    ZPoly acc(out_vars);
    for (const auto& [e, c] : terms_) {
        ZPoly t = ZPoly::constant(out_vars, c);
        for (size_t v = 0; v < nvars_; ++v)
            if (e[v] != 0) t = t * args[v].pow(e[v]);
        acc = acc + t;
    }
    return acc;
}

}  // namespace kmsym
