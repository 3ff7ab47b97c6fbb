// Seeded random generators shared by the test suites.
#ifndef KMSYM_TESTS_HELPERS_HPP
#define KMSYM_TESTS_HELPERS_HPP

#include <random>

#include "kmsym/km.hpp"

namespace kmtest {

using namespace kmsym;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}

    uint64_t below(uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(gen); }
    int64_t range(int64_t lo, int64_t hi) {
        return std::uniform_int_distribution<int64_t>(lo, hi)(gen);
    }
};

inline Poly random_poly(Rng& rng, const FieldSpecPtr& spec, uint64_t max_terms, uint32_t max_deg,
                        bool nonzero) {
    for (;;) {
        Poly acc = Poly::zero(spec);
        uint64_t nterms = rng.below(max_terms) + (nonzero ? 1 : 0);
        for (uint64_t t = 0; t < nterms; ++t) {
            std::vector<uint32_t> exps(spec->rank(), 0);
            for (auto& e : exps) e = static_cast<uint32_t>(rng.below(max_deg + 1));
            uint32_t c = static_cast<uint32_t>(rng.below(spec->p() - 1) + 1);
            acc = acc + Poly::monomial(spec, Monomial(std::move(exps)), c);
        }
        if (!nonzero || !acc.is_zero()) return acc;
    }
}

inline RatFunc random_ratfunc(Rng& rng, const FieldSpecPtr& spec, uint32_t max_deg) {
    Poly num = random_poly(rng, spec, 3, max_deg, false);
    Poly den = random_poly(rng, spec, 2, max_deg, true);
    return RatFunc(std::move(num), std::move(den));
}

inline RatFunc random_nonzero_ratfunc(Rng& rng, const FieldSpecPtr& spec, uint32_t max_deg) {
    for (;;) {
        RatFunc f = random_ratfunc(rng, spec, max_deg);
        if (!f.is_zero()) return f;
    }
}

inline WittField random_witt(Rng& rng, const FieldSpecPtr& spec, uint32_t m, uint32_t max_deg) {
    std::vector<RatFunc> coords;
    for (uint32_t i = 0; i < m; ++i) coords.push_back(random_ratfunc(rng, spec, max_deg));
    return WittField(spec->p(), std::move(coords));
}

inline WittField random_nonzero_witt(Rng& rng, const FieldSpecPtr& spec, uint32_t m,
                                     uint32_t max_deg) {
    for (;;) {
        WittField w = random_witt(rng, spec, m, max_deg);
        if (!w.is_zero()) return w;
    }
}

inline ClassExpr random_class(Rng& rng, const FieldSpecPtr& spec, uint32_t m, uint32_t n,
                              uint64_t max_terms, uint32_t max_deg) {
    std::vector<SymbolTerm> terms;
    uint64_t nterms = rng.below(max_terms + 1);
    for (uint64_t t = 0; t < nterms; ++t) {
        std::vector<RatFunc> slots;
        for (uint32_t j = 0; j < n; ++j) slots.push_back(random_nonzero_ratfunc(rng, spec, max_deg));
        terms.emplace_back(random_witt(rng, spec, m, max_deg), std::move(slots));
    }
    return ClassExpr(spec, m, n, std::move(terms));
}

}  // namespace kmtest

#endif
