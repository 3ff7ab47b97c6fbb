#include "kmsym/witt.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace kmsym {

ZPoly ghost_poly(uint32_t p, uint32_t i, size_t offset, size_t nvars) {
    ZPoly acc(nvars);
    BigInt pj = 1;
    for (uint32_t j = 0; j <= i; ++j) {
        uint64_t e = 1;
        for (uint32_t k = 0; k < i - j; ++k) e *= p;
        acc = acc + ZPoly::variable(nvars, offset + j).pow(e).scaled(pj);
        pj *= p;
    }
    return acc;
}

namespace {

uint32_t mod_p(const BigInt& c, uint32_t p) {
    BigInt r = c % p;
    if (r < 0) r += p;
    return r.convert_to<uint32_t>();
}

WittTable::FpSlice reduce_mod_p(const ZPoly& poly, uint32_t p) {
    WittTable::FpSlice out;
    for (const auto& [e, c] : poly.terms()) {
        uint32_t cp = mod_p(c, p);
        if (cp != 0) out.push_back(WittTable::FpTerm{e, cp});
    }
    return out;
}

// Solves the ghost equations coordinate by coordinate: the i-th universal
// polynomial is (target_i - sum_{j<i} p^j U_j^(p^(i-j))) / p^i, and each
// division must be exact over Z.
std::vector<ZPoly> solve_ghost(uint32_t p, uint32_t m, const std::vector<ZPoly>& targets) {
    std::vector<ZPoly> out;
    out.reserve(m);
    for (uint32_t i = 0; i < m; ++i) {
        ZPoly acc = targets[i];
        BigInt pj = 1;
        for (uint32_t j = 0; j < i; ++j) {
            uint64_t e = 1;
            for (uint32_t k = 0; k < i - j; ++k) e *= p;
            acc = acc - out[j].pow(e).scaled(pj);
            pj *= p;
        }
        out.push_back(acc.divide_exact(pj));
    }
    return out;
}

WittTable compute_table(uint32_t p, uint32_t m) {
    WittTable t;
    t.p = p;
    t.m = m;
    size_t nv2 = 2 * static_cast<size_t>(m);

    std::vector<ZPoly> sum_targets, prod_targets, neg_targets;
    for (uint32_t i = 0; i < m; ++i) {
        ZPoly gx = ghost_poly(p, i, 0, nv2);
        ZPoly gy = ghost_poly(p, i, m, nv2);
        sum_targets.push_back(gx + gy);
        prod_targets.push_back(gx * gy);
        neg_targets.push_back(-ghost_poly(p, i, 0, m));
    }
    t.sum = solve_ghost(p, m, sum_targets);
    t.prod = solve_ghost(p, m, prod_targets);
    t.neg = solve_ghost(p, m, neg_targets);

    for (uint32_t i = 0; i < m; ++i) {
        t.sum_fp.push_back(reduce_mod_p(t.sum[i], p));
        t.prod_fp.push_back(reduce_mod_p(t.prod[i], p));
        t.neg_fp.push_back(reduce_mod_p(t.neg[i], p));
    }
    return t;
}

nlohmann::json polys_to_json(const std::vector<ZPoly>& polys) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& poly : polys) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [e, c] : poly.terms())
            terms.push_back({e, c.str()});
        out.push_back({{"nvars", poly.nvars()}, {"terms", terms}});
    }
    return out;
}

std::vector<ZPoly> polys_from_json(const nlohmann::json& arr) {
    std::vector<ZPoly> out;
    for (const auto& jp : arr) {
        ZPoly::TermMap terms;
        for (const auto& jt : jp.at("terms")) {
            std::vector<uint32_t> e = jt.at(0).get<std::vector<uint32_t>>();
            terms.emplace(std::move(e), BigInt(jt.at(1).get<std::string>()));
        }
        out.emplace_back(jp.at("nvars").get<size_t>(), std::move(terms));
    }
    return out;
}

std::filesystem::path cache_file(uint32_t p, uint32_t m) {
    const char* dir = std::getenv("KMSYM_TABLE_CACHE");
    if (!dir || !*dir) return {};
    return std::filesystem::path(dir) /
           ("witt_table_p" + std::to_string(p) + "_m" + std::to_string(m) + ".json");
}

bool load_cached(WittTable& t, uint32_t p, uint32_t m) {
    auto path = cache_file(p, m);
    if (path.empty()) return false;
    std::ifstream in(path);
    if (!in) return false;
    try {
        nlohmann::json doc = nlohmann::json::parse(in);
        if (doc.at("p").get<uint32_t>() != p || doc.at("m").get<uint32_t>() != m) return false;
        t.p = p;
        t.m = m;
        t.sum = polys_from_json(doc.at("sum"));
        t.prod = polys_from_json(doc.at("prod"));
        t.neg = polys_from_json(doc.at("neg"));
        if (t.sum.size() != m || t.prod.size() != m || t.neg.size() != m) return false;
        for (uint32_t i = 0; i < m; ++i) {
            t.sum_fp.push_back(reduce_mod_p(t.sum[i], p));
            t.prod_fp.push_back(reduce_mod_p(t.prod[i], p));
            t.neg_fp.push_back(reduce_mod_p(t.neg[i], p));
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void store_cached(const WittTable& t) {
    auto path = cache_file(t.p, t.m);
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) return;
    nlohmann::json doc = {{"p", t.p},
                          {"m", t.m},
                          {"sum", polys_to_json(t.sum)},
                          {"prod", polys_to_json(t.prod)},
                          {"neg", polys_to_json(t.neg)}};
    out << doc.dump();
}

}  // namespace

const WittTable& witt_table(uint32_t p, uint32_t m) {
    static std::mutex mu;
    static std::map<std::pair<uint32_t, uint32_t>, std::unique_ptr<WittTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, m);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto table = std::make_unique<WittTable>();
    if (!load_cached(*table, p, m)) {
        *table = compute_table(p, m);
        store_cached(*table);
    }
    return *cache.emplace(key, std::move(table)).first->second;
}

namespace wdetail {

BigInt eval_slice(const ZPoly& poly, std::span<const BigInt> args) {
    return poly.eval(std::vector<BigInt>(args.begin(), args.end()));
}

RatFunc eval_slice(const WittTable::FpSlice& slice, std::span<const RatFunc> args,
                   const FieldSpecPtr& spec) {
    uint32_t p = spec->p();
    bool all_const = true;
    for (const auto& a : args)
        if (!a.is_constant()) {
            all_const = false;
            break;
        }
    if (all_const) {
        // Scalar fast path: everything happens in F_p.
        uint64_t acc = 0;
        std::vector<std::vector<uint32_t>> powers(args.size());
        auto power = [&](size_t v, uint32_t e) -> uint32_t {
            auto& cache = powers[v];
            if (cache.empty()) cache.push_back(1 % p);
            while (cache.size() <= e)
                cache.push_back(fp_mul(cache.back(), args[v].constant_value(), p));
            return cache[e];
        };
        for (const auto& term : slice) {
            uint32_t t = term.coeff;
            for (size_t v = 0; v < args.size() && t != 0; ++v)
                if (term.exps[v] != 0) t = fp_mul(t, power(v, term.exps[v]), p);
            acc = (acc + t) % p;
        }
        return RatFunc::constant(spec, static_cast<int64_t>(acc));
    }

    std::vector<std::vector<RatFunc>> powers(args.size());
    auto power = [&](size_t v, uint32_t e) -> const RatFunc& {
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(RatFunc::one(spec));
        while (cache.size() <= e) cache.push_back(cache.back() * args[v]);
        return cache[e];
    };
    RatFunc acc = RatFunc::zero(spec);
    for (const auto& term : slice) {
        RatFunc t = RatFunc::constant(spec, term.coeff);
        for (size_t v = 0; v < args.size(); ++v)
            if (term.exps[v] != 0) t = t * power(v, term.exps[v]);
        acc = acc + t;
    }
    return acc;
}

}  // namespace wdetail

WittField frobenius_pow(const WittField& w) {
    std::vector<RatFunc> out;
    out.reserve(w.length());
    for (const auto& c : w.coords()) out.push_back(c.pow(w.p()));
    return WittField(w.p(), std::move(out));
}

WittField wp(const WittField& w) { return witt_sub(frobenius_pow(w), w); }

WittField v_shift_frob(const WittField& w) {
    std::vector<RatFunc> out;
    out.reserve(w.length());
    out.push_back(RatFunc::zero(w.coord(0).spec()));
    for (size_t i = 0; i + 1 < w.length(); ++i) out.push_back(w.coord(i).pow(w.p()));
    return WittField(w.p(), std::move(out));
}

std::vector<BigInt> ghost(const WittInt& w) {
    std::vector<BigInt> out;
    out.reserve(w.length());
    for (uint32_t i = 0; i < w.length(); ++i) {
        BigInt acc = 0;
        BigInt pj = 1;
        for (uint32_t j = 0; j <= i; ++j) {
            uint64_t e = 1;
            for (uint32_t k = 0; k < i - j; ++k) e *= w.p();
            BigInt term = 1;
            BigInt base = w.coord(j);
            for (uint64_t b = 0; b < e; ++b) term *= base;
            acc += pj * term;
            pj *= w.p();
        }
        out.push_back(acc);
    }
    return out;
}

std::string render(const WittField& w) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < w.length(); ++i) {
        if (i) os << ", ";
        os << render(w.coord(i));
    }
    os << ")";
    return os.str();
}

}  // namespace kmsym
