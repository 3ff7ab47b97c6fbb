#include <doctest.h>

#include "helpers.hpp"
#include "kmsym/witt.hpp"

using namespace kmsym;

namespace {

FieldSpecPtr fp(uint32_t p) { return FieldSpec::make(p, std::vector<std::string>{}); }

WittField wf(uint32_t p, const FieldSpecPtr& spec, std::initializer_list<const char*> exprs) {
    std::vector<RatFunc> coords;
    for (const char* e : exprs) coords.push_back(parse_ratfunc(e, spec));
    return WittField(p, std::move(coords));
}

WittInt wi(uint32_t p, std::initializer_list<int64_t> coords) {
    std::vector<BigInt> v;
    for (int64_t c : coords) v.emplace_back(c);
    return WittInt(p, std::move(v));
}

}  // namespace

TEST_CASE("universal polynomials satisfy the ghost identities symbolically") {
    for (uint32_t p : {2u, 3u}) {
        for (uint32_t m : {1u, 2u, 3u}) {
            const WittTable& t = witt_table(p, m);
            size_t nv = 2 * static_cast<size_t>(m);
            for (uint32_t i = 0; i < m; ++i) {
                ZPoly gx = ghost_poly(p, i, 0, nv);
                ZPoly gy = ghost_poly(p, i, m, nv);
                // ghost_i circ (S_0..S_i) = g_i(x) + g_i(y), same for P and N
                ZPoly sum_ghost(nv), prod_ghost(nv), neg_ghost(nv);
                BigInt pj = 1;
                for (uint32_t j = 0; j <= i; ++j) {
                    uint64_t e = 1;
                    for (uint32_t k = 0; k < i - j; ++k) e *= p;
                    sum_ghost = sum_ghost + t.sum[j].pow(e).scaled(pj);
                    prod_ghost = prod_ghost + t.prod[j].pow(e).scaled(pj);
                    ZPoly neg_in_2m = t.neg[j].compose([&] {
                        std::vector<ZPoly> args;
                        for (size_t v = 0; v < m; ++v) args.push_back(ZPoly::variable(nv, v));
                        return args;
                    }());
                    neg_ghost = neg_ghost + neg_in_2m.pow(e).scaled(pj);
                    pj *= p;
                }
                CHECK(sum_ghost == gx + gy);
                CHECK(prod_ghost == gx * gy);
                CHECK(neg_ghost == -gx);
            }
        }
    }
}

TEST_CASE("witt addition examples") {
    auto s2 = fp(2);
    auto one2 = wf(2, s2, {"1", "0"});
    CHECK(witt_add(one2, one2) == wf(2, s2, {"0", "1"}));

    auto s3 = fp(3);
    auto one3 = wf(3, s3, {"1", "0"});
    CHECK(witt_add(one3, one3) == wf(3, s3, {"2", "1"}));

    auto spec = FieldSpec::make(2, {"x", "y"});
    kmtest::Rng rng(11);
    WittField w = kmtest::random_witt(rng, spec, 3, 2);
    CHECK(witt_add(w, w.zero_like()) == w);
    CHECK(witt_add(w, witt_neg(w)).is_zero());
}

TEST_CASE("ghost components are an oracle for the ring operations") {
    kmtest::Rng rng(42);
    for (int iter = 0; iter < 60; ++iter) {
        uint32_t p = iter % 2 == 0 ? 2 : 3;
        uint32_t m = 1 + static_cast<uint32_t>(rng.below(4));
        std::vector<BigInt> ac, bc;
        for (uint32_t i = 0; i < m; ++i) {
            ac.emplace_back(rng.range(-9, 9));
            bc.emplace_back(rng.range(-9, 9));
        }
        WittInt a(p, ac), b(p, bc);
        auto ga = ghost(a), gb = ghost(b);
        auto gs = ghost(witt_add(a, b));
        auto gm = ghost(witt_mul(a, b));
        auto gn = ghost(witt_neg(a));
        for (uint32_t i = 0; i < m; ++i) {
            CHECK(gs[i] == ga[i] + gb[i]);
            CHECK(gm[i] == ga[i] * gb[i]);
            CHECK(gn[i] == -ga[i]);
        }
    }
}

TEST_CASE("ghost of the shift") {
    CHECK(ghost(wi(2, {0, 0, 0})) == std::vector<BigInt>{0, 0, 0});
    WittInt w = wi(3, {2, -1, 4});
    WittInt vw = verschiebung(w);
    auto g = ghost(w);
    auto gv = ghost(vw);
    CHECK(gv[0] == 0);
    for (size_t i = 1; i < gv.size(); ++i) CHECK(gv[i] == 3 * g[i - 1]);
}

TEST_CASE("W_m(F_p) is Z/p^m under k -> k*[1]") {
    for (uint32_t p : {2u, 3u}) {
        for (uint32_t m : {1u, 2u}) {
            auto spec = fp(p);
            uint64_t q = 1;
            for (uint32_t i = 0; i < m; ++i) q *= p;
            WittField one = teichmuller(p, RatFunc::one(spec), m);
            std::vector<WittField> rep;
            for (uint64_t k = 0; k < q; ++k) rep.push_back(scalar_mul(BigInt(k), one));
            for (uint64_t i = 0; i < q; ++i)
                for (uint64_t j = i + 1; j < q; ++j) CHECK(rep[i] != rep[j]);
            for (uint64_t i = 0; i < q; ++i)
                for (uint64_t j = 0; j < q; ++j) {
                    CHECK(witt_add(rep[i], rep[j]) == rep[(i + j) % q]);
                    CHECK(witt_mul(rep[i], rep[j]) == rep[(i * j) % q]);
                }
        }
    }
}

TEST_CASE("frobenius and the Artin-Schreier map") {
    auto spec = FieldSpec::make(2, {"x", "y"});
    auto w = wf(2, spec, {"x", "y"});
    CHECK(frobenius_pow(w) == wf(2, spec, {"x^2", "y^2"}));
    CHECK(frobenius_pow(wf(2, spec, {"1", "1"})) == wf(2, spec, {"1", "1"}));
    CHECK(frobenius_pow(wf(2, spec, {"x+y", "0"})) == wf(2, spec, {"x^2+y^2", "0"}));

    CHECK(wp(wf(2, spec, {"0", "0"})).is_zero());
    auto sx = FieldSpec::make(2, {"x"});
    CHECK(wp(wf(2, sx, {"x"})) == wf(2, sx, {"x^2+x"}));

    // additivity: Frobenius is a ring map in characteristic p
    kmtest::Rng rng(5);
    for (int iter = 0; iter < 15; ++iter) {
        WittField u = kmtest::random_witt(rng, spec, 2, 2);
        WittField v = kmtest::random_witt(rng, spec, 2, 2);
        CHECK(wp(witt_add(u, v)) == witt_add(wp(u), wp(v)));
    }
    WittField x0 = wf(2, spec, {"x", "0"});
    CHECK(wp(x0) == witt_add(wp(x0), wp(x0.zero_like())));
}

TEST_CASE("verschiebung prepends a zero") {
    auto spec = FieldSpec::make(2, {"x"});
    auto w = wf(2, spec, {"x"});
    CHECK(verschiebung(w) == wf(2, spec, {"0", "x"}));
    CHECK(verschiebung(wf(2, spec, {"x", "1"})) == wf(2, spec, {"0", "x", "1"}));
    CHECK(verschiebung(wf(2, spec, {"0"})).is_zero());
}

TEST_CASE("teichmuller representatives are multiplicative") {
    auto spec = FieldSpec::make(2, {"x", "y"});
    auto tx = teichmuller(2u, parse_ratfunc("x", spec), 2u);
    auto ty = teichmuller(2u, parse_ratfunc("y", spec), 2u);
    auto t1 = teichmuller(2u, RatFunc::one(spec), 2u);
    CHECK(witt_mul(t1, tx) == tx);
    CHECK(witt_mul(tx, ty) == teichmuller(2u, parse_ratfunc("x*y", spec), 2u));

    auto s3 = fp(3);
    auto t2 = teichmuller(3u, RatFunc::constant(s3, 2), 2u);
    CHECK(witt_mul(t2, t2) == teichmuller(3u, RatFunc::constant(s3, 4), 2u));
}

TEST_CASE("scalar multiples and p = V after F") {
    auto spec = FieldSpec::make(2, {"x", "y"});
    kmtest::Rng rng(17);
    WittField w2 = kmtest::random_witt(rng, spec, 2, 2);
    CHECK(scalar_mul(BigInt(1), w2) == w2);

    // 2*(a_1, a_2) = (0, a_1^2) over F_2
    WittField d = scalar_mul(BigInt(2), w2);
    CHECK(d.coord(0).is_zero());
    CHECK(d.coord(1) == w2.coord(0).pow(2));

    for (uint32_t p : {2u, 3u}) {
        auto s = p == 2 ? spec : FieldSpec::make(3, {"x"});
        for (uint32_t m : {1u, 2u, 3u}) {
            for (int iter = 0; iter < 8; ++iter) {
                WittField w = kmtest::random_witt(rng, s, m, 2);
                CHECK(scalar_mul(BigInt(p), w) == v_shift_frob(w));
            }
        }
    }

    // p^(m-1) * (a_1,...,a_m) = (0,...,0, a_1^(p^(m-1)))
    WittField w3 = kmtest::random_witt(rng, spec, 3, 2);
    WittField h = scalar_mul(BigInt(4), w3);
    CHECK(h.coord(0).is_zero());
    CHECK(h.coord(1).is_zero());
    CHECK(h.coord(2) == w3.coord(0).pow(4));
}

TEST_CASE("v_split") {
    auto s2 = fp(2);
    auto [first, tail] = v_split(wf(2, s2, {"1", "1"}));
    CHECK(first == RatFunc::one(s2));
    CHECK(tail == wf(2, s2, {"1"}));

    auto spec = FieldSpec::make(2, {"x"});
    auto [f2, t2] = v_split(wf(2, spec, {"x", "0"}));
    CHECK(f2 == parse_ratfunc("x", spec));
    CHECK(t2.is_zero());

    // reassembly on random vectors: [first] + V(tail) = w
    kmtest::Rng rng(23);
    for (uint32_t p : {2u, 3u}) {
        auto s = FieldSpec::make(p, {"x", "y"});
        for (int iter = 0; iter < 12; ++iter) {
            WittField w = kmtest::random_witt(rng, s, 3, 2);
            auto [a, t] = v_split(w);
            CHECK(witt_add(teichmuller(p, a, 3u), verschiebung(t)) == w);
        }
    }

    // W_3(F_2): (1,1,0) splits as [1] + V(tail)
    WittField w = wf(2, s2, {"1", "1", "0"});
    auto [a3, t3] = v_split(w);
    CHECK(a3 == RatFunc::one(s2));
    CHECK(witt_add(teichmuller(2u, a3, 3u), verschiebung(t3)) == w);
}

TEST_CASE("mode mismatch") {
    auto s2 = fp(2);
    auto s3 = fp(3);
    CHECK_THROWS_AS(witt_add(wf(2, s2, {"1", "0"}), wf(3, s3, {"1", "0"})), ModeMismatch);
    CHECK_THROWS_AS(witt_add(wf(2, s2, {"1", "0"}), wf(2, s2, {"1"})), ModeMismatch);
}
