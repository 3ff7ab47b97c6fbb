// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  argv[1] is the path to the CLI binary (used by criterion 9).
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "helpers.hpp"
#include "kmsym/json_io.hpp"

using namespace kmsym;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Criterion {
public:
    Criterion(int number, std::string label, double budget_seconds)
        : number_(number), label_(std::move(label)), budget_(budget_seconds),
          start_(std::chrono::steady_clock::now()) {}

    void fail(const std::string& why) {
        if (!failed_msg_.empty()) return;
        failed_msg_ = why;
    }

    void check(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }

    ~Criterion() {
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (failed_msg_.empty() && budget_ > 0 && elapsed > budget_)
            failed_msg_ = "exceeded time budget (" + std::to_string(elapsed) + "s > " +
                          std::to_string(budget_) + "s)";
        std::ostringstream line;
        line << (failed_msg_.empty() ? "[PASS]" : "[FAIL]") << " criterion " << number_ << ": "
             << label_;
        char buf[32];
        std::snprintf(buf, sizeof(buf), " (%.2fs)", elapsed);
        line << buf;
        if (!failed_msg_.empty()) {
            line << " -- " << failed_msg_;
            ++failures;
        }
        std::cout << line.str() << std::endl;
    }

private:
    int number_;
    std::string label_;
    double budget_;
    std::chrono::steady_clock::time_point start_;
    std::string failed_msg_;
};

FieldSpecPtr prime_field(uint32_t p) { return FieldSpec::make(p, std::vector<std::string>{}); }

// 1. Full W_m(F_p) addition and multiplication tables match Z/p^m.
void criterion_1() {
    Criterion c(1, "W_m(F_p) matches Z/p^m for p in {2,3,5}, m in {1,2,3}", 10.0);
    for (uint32_t p : {2u, 3u, 5u}) {
        for (uint32_t m : {1u, 2u, 3u}) {
            auto spec = prime_field(p);
            uint64_t q = 1;
            for (uint32_t i = 0; i < m; ++i) q *= p;
            WittField one = teichmuller(p, RatFunc::one(spec), m);
            std::vector<WittField> rep;
            rep.reserve(q);
            for (uint64_t k = 0; k < q; ++k) rep.push_back(scalar_mul(BigInt(k), one));
            for (uint64_t i = 0; i < q; ++i)
                for (uint64_t j = i + 1; j < q; ++j)
                    c.check(rep[i] != rep[j], "representatives collide");
            for (uint64_t i = 0; i < q; ++i) {
                for (uint64_t j = 0; j < q; ++j) {
                    c.check(witt_add(rep[i], rep[j]) == rep[(i + j) % q],
                            "addition table mismatch at p=" + std::to_string(p) +
                                " m=" + std::to_string(m));
                    c.check(witt_mul(rep[i], rep[j]) == rep[(i * j) % q],
                            "multiplication table mismatch at p=" + std::to_string(p) +
                                " m=" + std::to_string(m));
                }
            }
        }
    }
}

// 2. Ghost components are additive and multiplicative on 500 random pairs.
void criterion_2() {
    Criterion c(2, "ghost oracle on 500 random integer-mode pairs", 30.0);
    kmtest::Rng rng(20240801);
    for (int iter = 0; iter < 500; ++iter) {
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
        for (uint32_t i = 0; i < m; ++i) {
            c.check(gs[i] == ga[i] + gb[i], "ghost additivity fails");
            c.check(gm[i] == ga[i] * gb[i], "ghost multiplicativity fails");
        }
    }
}

// 3. p*w = V(F(w) truncated) on 200 random field-mode vectors.
void criterion_3() {
    Criterion c(3, "scalar_mul(p, w) = V(F(w)) on 200 random field-mode vectors", 0.0);
    kmtest::Rng rng(3141);
    auto s2 = FieldSpec::make(2, {"x", "y"});
    auto s3 = FieldSpec::make(3, {"x"});
    for (int iter = 0; iter < 200; ++iter) {
        const auto& spec = iter % 2 == 0 ? s2 : s3;
        uint32_t p = spec->p();
        uint32_t m = 1 + static_cast<uint32_t>(rng.below(3));
        WittField w = kmtest::random_witt(rng, spec, m, 2);
        c.check(scalar_mul(BigInt(p), w) == v_shift_frob(w), "p = V after F fails");
    }
}

// 4. Decomposition: every trace re-verifies, canonical size <= binom(3, n).
void criterion_4() {
    Criterion c(4, "decomposition soundness and size on 100 random classes", 0.0);
    auto spec = FieldSpec::make(2, {"x", "y", "z"});
    kmtest::Rng rng(41);
    double worst = 0;
    for (int iter = 0; iter < 100; ++iter) {
        uint32_t m = 1 + static_cast<uint32_t>(rng.below(2));
        uint32_t n = 1 + static_cast<uint32_t>(rng.below(2));
        ClassExpr pi = kmtest::random_class(rng, spec, m, n, 4, 3);
        auto t0 = std::chrono::steady_clock::now();
        auto [canonical, trace] = decompose(pi);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst = std::max(worst, dt);
        uint64_t bound = sl_upper_prank(3, n).convert_to<uint64_t>();
        c.check(canonical.size() <= bound, "canonical form exceeds binom(r, n)");
        Verdict v = verify_derivation(trace);
        c.check(v.ok, "trace " + std::to_string(iter) + " rejected at step " +
                          std::to_string(v.failed_step) + ": " + v.message);
        c.check(dt < 60.0, "single decomposition exceeded 60s");
    }
}

// 5. Level-1 decomposition is additive, on 100 random pairs.
void criterion_5() {
    Criterion c(5, "m = 1 decomposition additivity on 100 random pairs", 0.0);
    auto spec = FieldSpec::make(2, {"x", "y", "z"});
    kmtest::Rng rng(51);
    for (int iter = 0; iter < 100; ++iter) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.below(2));
        ClassExpr a = kmtest::random_class(rng, spec, 1, n, 3, 2);
        ClassExpr b = kmtest::random_class(rng, spec, 1, n, 3, 2);
        auto ca = decompose(a).canonical.coeffs();
        auto cb = decompose(b).canonical.coeffs();
        auto csum = decompose(class_add(a, b)).canonical.coeffs();
        std::map<std::vector<uint32_t>, WittField> want = ca;
        for (const auto& [k, w] : cb) {
            auto it = want.find(k);
            if (it == want.end()) {
                want.emplace(k, w);
            } else {
                it->second = witt_add(it->second, w);
                if (it->second.is_zero()) want.erase(it);
            }
        }
        c.check(csum == want, "coefficientwise additivity fails");
    }
}

// 6. Exactness spot checks.
void criterion_6() {
    Criterion c(6, "exp after shift vanishes; p^(m-1) multiples reduce by Artin-Schreier", 0.0);
    kmtest::Rng rng(61);
    auto s2 = FieldSpec::make(2, {"x", "y"});
    auto s3 = FieldSpec::make(3, {"x"});
    for (int iter = 0; iter < 100; ++iter) {
        const auto& spec = iter % 2 == 0 ? s2 : s3;
        uint32_t m = 1 + static_cast<uint32_t>(rng.below(3));
        ClassExpr pi = kmtest::random_class(rng, spec, m, 1, 3, 2);
        c.check(exp_map(shift(pi, m + 1)).is_zero(), "exp after shift is not zero");
    }
    for (int iter = 0; iter < 100; ++iter) {
        const auto& spec = iter % 2 == 0 ? s2 : s3;
        uint32_t p = spec->p();
        uint32_t m = 2 + static_cast<uint32_t>(rng.below(2));
        WittField w = kmtest::random_nonzero_witt(rng, spec, m, 2);
        std::vector<RatFunc> slots{kmtest::random_nonzero_ratfunc(rng, spec, 2)};
        ClassExpr pi(spec, m, 1, {SymbolTerm(w, slots)});
        ClassExpr multiple = times_p_power(pi, m - 1);
        uint64_t pm1 = 1;
        for (uint32_t i = 0; i + 1 < m; ++i) pm1 *= p;
        RatFunc a = w.coord(0);
        if (a.is_zero()) {
            c.check(multiple.is_zero(), "p^(m-1) multiple of V-shifted symbol must vanish");
            continue;
        }
        std::vector<RatFunc> coords(m, RatFunc::zero(spec));
        coords[m - 1] = a.pow(static_cast<int64_t>(pm1));
        c.check(multiple == ClassExpr(spec, m, 1, {SymbolTerm(WittField(p, coords), slots)}),
                "p^(m-1) multiple is not (0,...,0,a_1^(p^(m-1)))");
        DerivationTrace chain = exp_power_reduction(a, slots, m - 1);
        c.check(verify_derivation(chain).ok, "Artin-Schreier chain rejected");
        c.check(chain.final_expr() == ClassExpr(spec, 1, 1, {SymbolTerm(WittField(p, {a}), slots)}),
                "Artin-Schreier chain does not end at (a_1)");
    }
}

// 7. Exact reproduction of the stated bound values.
void criterion_7() {
    Criterion c(7, "bound formulas reproduce their stated values", 0.0);
    for (uint64_t r : {0ull, 1ull, 3ull, 8ull})
        c.check(sl_upper_prank(r, 1) == r, "sl_upper_prank(r,1) != r");
    Interval iv = ed_sandwich(4, 1);
    c.check(iv.lo == 4 && iv.hi == 5, "ed_sandwich(4,1) != [4,5]");
    c.check(ed_p_lower_alg(2, 0) == 3, "ed_p_lower_alg(2,0) != 3");
    for (uint64_t m : {1ull, 2ull})
        for (uint64_t ell : {1ull, 2ull, 5ull})
            c.check(ed_upper_symbols(m, ell, 1) == m + ell, "ed_upper_symbols(m,ell,1) != m+ell");
    LogValue lv = ed_lower_cr(2, 1, 3);
    c.check(lv.exact && lv.exact_value == 3, "ed_lower_cr(2,1,3) != 3");
    c.check(sl_upper_u(8, 1, 1) == 3, "sl_upper_u(8,1,1) != 3");
}

// 8. The generic sum of 2 symbols at (p, m, n) = (2, 2, 1).
void criterion_8() {
    Criterion c(8, "generic_sum(2,2,2,1) shape and decomposition", 120.0);
    ClassExpr g = generic_sum(2, 2, 2, 1);
    c.check(g.term_count() == 2, "generic sum must have 2 terms");
    c.check(g.spec()->rank() == 6, "generic sum must live over 6 indeterminates");
    auto [canonical, trace] = decompose(g);
    c.check(canonical.size() <= 6, "canonical form exceeds binom(6,1)");
    c.check(verify_derivation(trace).ok, "generic sum trace rejected");
}

// 9. CLI round trip and tamper rejection.
void criterion_9(const char* cli) {
    Criterion c(9, "CLI schema round trip and tamper rejection", 0.0);
    if (!cli) {
        c.fail("CLI path not provided (argv[1])");
        return;
    }
    fs::path dir = fs::temp_directory_path() / "kmsym_acceptance";
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto path = [&](const char* name) { return (dir / name).string(); };
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(cli) + " " + args;
        int rc = std::system(cmd.c_str());
        return rc == -1 ? -1 : WEXITSTATUS(rc);
    };
    auto slurp = [&](const std::string& file) {
        std::ifstream in(file);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    // emit -> parse -> emit must be byte-identical
    int rc = run("generic-sum --p 2 --l 2 --m 2 --n 1 -o " + path("gs.json"));
    c.check(rc == 0, "generic-sum exited with " + std::to_string(rc));
    std::string first = slurp(path("gs.json"));
    c.check(!first.empty(), "generic-sum produced no output");
    Json parsed = Json::parse(first);
    c.check(dump_json(parsed) == first, "emit/parse/emit is not byte-stable");
    ClassExpr relaid = class_from_json(parsed);
    c.check(dump_json(class_to_json(relaid)) == first, "class round trip is not byte-stable");

    // decompose with a trace, then verify through the CLI
    auto spec = FieldSpec::make(2, {"x", "y"});
    ClassExpr pi(spec, 1, 1,
                 {SymbolTerm(WittField(2, {parse_ratfunc("x", spec)}), {parse_ratfunc("x+y", spec)})});
    {
        std::ofstream out(path("class.json"));
        out << dump_json(class_to_json(pi));
    }
    rc = run("decompose -i " + path("class.json") + " --trace -o " + path("dec.json"));
    c.check(rc == 0, "decompose exited with " + std::to_string(rc));
    Json dec = Json::parse(slurp(path("dec.json")));
    c.check(dec.contains("trace"), "decompose --trace must include the trace");
    {
        std::ofstream out(path("trace.json"));
        out << dump_json(dec.at("trace"));
    }
    rc = run("verify -i " + path("trace.json") + " -o " + path("verdict.json"));
    c.check(rc == 0, "verify rejected an engine trace");

    // tamper with a mid-trace result: rejection must name that step
    Json trace = dec.at("trace");
    size_t steps = trace.at("steps").size();
    c.check(steps >= 2, "trace unexpectedly short");
    size_t victim = steps / 2;
    trace["steps"][victim]["result"]["terms"] = Json::array();
    {
        std::ofstream out(path("tampered.json"));
        out << dump_json(trace);
    }
    rc = run("verify -i " + path("tampered.json") + " -o " + path("verdict2.json"));
    c.check(rc == 1, "tampered trace must exit 1, got " + std::to_string(rc));
    Json verdict = Json::parse(slurp(path("verdict2.json")));
    c.check(verdict.at("ok") == false, "tampered trace reported ok");
    c.check(verdict.at("step").get<size_t>() == victim,
            "tamper reported at step " + verdict.at("step").dump() + ", expected " +
                std::to_string(victim));
}

}  // namespace

int main(int argc, char** argv) {
    const char* cli = argc > 1 ? argv[1] : nullptr;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(cli);
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
