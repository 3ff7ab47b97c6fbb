#include <doctest.h>

#include "helpers.hpp"
#include "kmsym/km.hpp"

using namespace kmsym;

namespace {

FieldSpecPtr spec2() { return FieldSpec::make(2, {"x", "y"}); }

SymbolTerm term(const FieldSpecPtr& spec, std::initializer_list<const char*> witt,
                std::initializer_list<const char*> slots) {
    std::vector<RatFunc> coords, ss;
    for (const char* e : witt) coords.push_back(parse_ratfunc(e, spec));
    for (const char* e : slots) ss.push_back(parse_ratfunc(e, spec));
    return SymbolTerm(WittField(spec->p(), std::move(coords)), std::move(ss));
}

}  // namespace

TEST_CASE("class construction") {
    auto spec = spec2();
    CHECK_THROWS_AS(term(spec, {"x"}, {"0"}), ZeroInput);
    // zero Witt coefficients are the identity and disappear
    ClassExpr e(spec, 1, 1, {term(spec, {"0"}, {"x"}), term(spec, {"x"}, {"y"})});
    CHECK(e.term_count() == 1);
    CHECK(ClassExpr::zero(spec, 2, 1).is_zero());
}

TEST_CASE("class_add") {
    auto spec = spec2();
    ClassExpr a(spec, 1, 1, {term(spec, {"x"}, {"y"})});
    CHECK(class_add(a, ClassExpr::zero(spec, 1, 1)) == a);
    ClassExpr b(spec, 1, 1, {term(spec, {"y"}, {"x"})});
    CHECK(class_add(a, b).term_count() == 2);
    auto other = FieldSpec::make(3, {"x", "y"});
    CHECK_THROWS_AS(class_add(a, ClassExpr::zero(other, 1, 1)), SpecMismatch);

    // pi + pi collects to (2w) (x) b under a WittAdd merge
    auto s3 = FieldSpec::make(3, {"x"});
    ClassExpr two(s3, 1, 1,
                  {SymbolTerm(teichmuller(3u, parse_ratfunc("x", s3), 1u), {parse_ratfunc("x", s3)}),
                   SymbolTerm(teichmuller(3u, parse_ratfunc("x", s3), 1u), {parse_ratfunc("x", s3)})});
    ClassExpr merged = apply_move(two, WittAddMove{true, 0, 1});
    REQUIRE(merged.term_count() == 1);
    CHECK(merged.terms()[0].witt ==
          scalar_mul(BigInt(2), teichmuller(3u, parse_ratfunc("x", s3), 1u)));
}

TEST_CASE("shift and exp_map") {
    auto spec = spec2();
    ClassExpr a(spec, 1, 1, {term(spec, {"x"}, {"y"})});
    ClassExpr s = shift(a, 2);
    REQUIRE(s.term_count() == 1);
    CHECK(s.m() == 2);
    CHECK(s.terms()[0].witt == WittField(2, {RatFunc::zero(spec), parse_ratfunc("x", spec)}));
    CHECK(shift(ClassExpr::zero(spec, 1, 1), 3).is_zero());
    CHECK_THROWS_AS(shift(a, 1), PreconditionFailed);

    ClassExpr c(spec, 2, 1, {term(spec, {"x", "y"}, {"x+1"})});
    ClassExpr e = exp_map(c);
    CHECK(e.m() == 1);
    CHECK(e == ClassExpr(spec, 1, 1, {term(spec, {"x"}, {"x+1"})}));
    CHECK(exp_map(e) == e);

    // exactness spot check: exp after shift is the zero map
    kmtest::Rng rng(31);
    for (int iter = 0; iter < 20; ++iter) {
        ClassExpr pi = kmtest::random_class(rng, spec, 2, 1, 3, 2);
        CHECK(exp_map(shift(pi, 3)).is_zero());
    }
}

TEST_CASE("times_p_power") {
    auto spec = spec2();
    ClassExpr a(spec, 2, 1, {term(spec, {"x", "y"}, {"x+1"})});
    CHECK(times_p_power(a, 0) == a);
    CHECK(times_p_power(a, 2).is_zero());  // W_2 is 4-torsion at p = 2
    ClassExpr pm1 = times_p_power(a, 1);
    REQUIRE(pm1.term_count() == 1);
    CHECK(pm1.terms()[0].witt == WittField(2, {RatFunc::zero(spec), parse_ratfunc("x^2", spec)}));
}

TEST_CASE("relation moves") {
    auto spec = spec2();

    ClassExpr repeat(spec, 1, 2, {term(spec, {"y"}, {"x", "x"})});
    CHECK(apply_move(repeat, RepeatSlotMove{false, 0, 0, 1, std::nullopt, {}}).is_zero());

    ClassExpr prod(spec, 1, 1, {term(spec, {"y"}, {"x*y"})});
    ClassExpr split = apply_move(
        prod, SlotMulMove{0, 0, parse_ratfunc("x", spec), parse_ratfunc("y", spec)});
    CHECK(split == ClassExpr(spec, 1, 1, {term(spec, {"y"}, {"x"}), term(spec, {"y"}, {"y"})}));

    ClassExpr as(spec, 1, 1, {term(spec, {"x^2+x"}, {"y"})});
    WittField witness(2, {parse_ratfunc("x", spec)});
    CHECK(apply_move(as, ArtinSchreierMove{false, 0, witness, {}}).is_zero());
    WittField bad(2, {parse_ratfunc("y", spec)});
    CHECK_THROWS_AS(apply_move(as, ArtinSchreierMove{false, 0, bad, {}}), SideConditionFailed);

    // slot_match at a deeper coordinate: (0, x) (x) x = V([x]) (x) x
    ClassExpr sm(spec, 2, 1, {term(spec, {"0", "x"}, {"x"})});
    CHECK(apply_move(sm, SlotMatchMove{false, 0, 0, 1, {}}).is_zero());
    CHECK_THROWS_AS(apply_move(sm, SlotMatchMove{false, 0, 0, 0, {}}), SideConditionFailed);

    ClassExpr sq(spec, 2, 1, {term(spec, {"x", "y"}, {"x^2"})});
    ClassExpr stripped = apply_move(sq, ShiftIntroMove{0, 0, parse_ratfunc("x", spec)});
    CHECK(stripped == ClassExpr(spec, 2, 1, {term(spec, {"0", "x^2"}, {"x"})}));
}

TEST_CASE("derivation traces verify and reject tampering") {
    auto spec = spec2();
    ClassExpr start(spec, 1, 2, {term(spec, {"y"}, {"x*y", "x"})});
    TraceBuilder tb(start);
    tb.apply(SlotMulMove{0, 0, parse_ratfunc("x", spec), parse_ratfunc("y", spec)});
    tb.apply(RepeatSlotMove{false, 0, 0, 1, std::nullopt, {}});
    DerivationTrace good = tb.trace();
    CHECK(good.steps.size() == 2);
    CHECK(verify_derivation(good).ok);
    CHECK(verify_derivation(DerivationTrace{start, {}}).ok);

    // tamper with the recorded result of step 1
    DerivationTrace bad = good;
    auto terms = bad.steps[1].result.terms();
    terms.push_back(term(spec, {"x"}, {"y", "y"}));
    bad.steps[1].result = ClassExpr(spec, 1, 2, std::move(terms));
    Verdict v = verify_derivation(bad);
    CHECK(!v.ok);
    CHECK(v.failed_step == 1);

    // a WittAdd with the wrong sum is rejected as a side condition
    DerivationTrace bad2 = good;
    bad2.steps[0].move = WittAddMove{false, 0, 0, WittField(2, {parse_ratfunc("x", spec)}),
                                     WittField(2, {parse_ratfunc("x", spec)})};
    Verdict v2 = verify_derivation(bad2);
    CHECK(!v2.ok);
    CHECK(v2.failed_step == 0);
}

TEST_CASE("alternating macro swaps slots with a Witt negation") {
    auto spec = spec2();
    kmtest::Rng rng(77);
    for (int iter = 0; iter < 10; ++iter) {
        WittField w = kmtest::random_nonzero_witt(rng, spec, 2, 2);
        ClassExpr start(spec, 2, 2,
                        {SymbolTerm(w, {parse_ratfunc("y", spec), parse_ratfunc("x", spec)})});
        TraceBuilder tb(start);
        size_t at = swap_adjacent_slots(tb, 0, 0);
        CHECK(at == 0);
        ClassExpr want(spec, 2, 2,
                       {SymbolTerm(witt_neg(w), {parse_ratfunc("x", spec), parse_ratfunc("y", spec)})});
        CHECK(tb.current() == want);
        CHECK(verify_derivation(tb.trace()).ok);
    }
}

TEST_CASE("exp power reduction chain") {
    for (uint32_t p : {2u, 3u}) {
        auto spec = FieldSpec::make(p, {"x", "y"});
        RatFunc a = parse_ratfunc("x+y", spec);
        std::vector<RatFunc> slots{parse_ratfunc("y", spec)};
        for (uint32_t k : {1u, 2u}) {
            DerivationTrace tr = exp_power_reduction(a, slots, k);
            CHECK(verify_derivation(tr).ok);
            uint64_t pk = 1;
            for (uint32_t i = 0; i < k; ++i) pk *= p;
            CHECK(tr.start ==
                  ClassExpr(spec, 1, 1,
                            {SymbolTerm(WittField(p, {a.pow(static_cast<int64_t>(pk))}), slots)}));
            CHECK(tr.final_expr() ==
                  ClassExpr(spec, 1, 1, {SymbolTerm(WittField(p, {a}), slots)}));
        }
    }
}

TEST_CASE("cyclic presentation") {
    auto spec = FieldSpec::make(2, {"x"});
    auto pres = present_cyclic(WittField(2, {parse_ratfunc("x", spec)}), parse_ratfunc("x+1", spec));
    REQUIRE(pres.generators.size() == 2);
    CHECK(pres.generators[0] == "theta");
    CHECK(pres.relations[0] == "theta^2 - theta = x");
    CHECK(pres.relations[1] == "y^2 = x + 1");
    CHECK(pres.relations[2] == "y*theta*y^-1 = theta + 1");
    CHECK(!pres.split);

    auto zero = present_cyclic(WittField(2, {RatFunc::zero(spec)}), parse_ratfunc("x", spec));
    CHECK(zero.split);

    auto pres2 = present_cyclic(WittField(2, {parse_ratfunc("x", spec), RatFunc::one(spec)}),
                                parse_ratfunc("x", spec));
    REQUIRE(pres2.generators.size() == 3);
    CHECK(pres2.relations[0] == "(theta_1^2, theta_2^2) - (theta_1, theta_2) = (x, 1)");
    CHECK(pres2.relations[1] == "y^4 = x");
    CHECK(pres2.relations[2] == "y*(theta_1, theta_2)*y^-1 = (theta_1, theta_2) + (1, 0)");

    CHECK_THROWS_AS(present_cyclic(WittField(2, {parse_ratfunc("x", spec)}), RatFunc::zero(spec)),
                    ZeroInput);
}

TEST_CASE("generic sum") {
    ClassExpr g = generic_sum(2, 1, 1, 1);
    CHECK(g.term_count() == 1);
    CHECK(g.spec()->variables() == std::vector<std::string>{"x1_1", "y1_1"});
    CHECK(g.terms()[0].witt.coord(0) == RatFunc::variable(g.spec(), 0));
    CHECK(g.terms()[0].slots[0] == RatFunc::variable(g.spec(), 1));

    ClassExpr g2 = generic_sum(2, 2, 2, 1);
    CHECK(g2.term_count() == 2);
    CHECK(g2.spec()->rank() == 6);

    for (uint32_t ell : {1u, 3u, 5u}) CHECK(generic_sum(3, ell, 1, 2).term_count() == ell);
}
