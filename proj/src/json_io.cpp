#include "kmsym/json_io.hpp"

namespace kmsym {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, size_t index) {
    return path + "/" + std::to_string(index);
}

void require_key(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string("missing key '") + key + "'", path);
}

bool is_nonneg_int(const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0);
}

uint64_t get_uint(const Json& j, const char* key, const std::string& path) {
    require_key(j, key, path);
    const Json& v = j.at(key);
    if (!is_nonneg_int(v))
        throw SchemaError(std::string("'") + key + "' must be a nonnegative integer",
                          child(path, key));
    return v.get<uint64_t>();
}

std::string get_string(const Json& j, const char* key, const std::string& path) {
    require_key(j, key, path);
    const Json& v = j.at(key);
    if (!v.is_string())
        throw SchemaError(std::string("'") + key + "' must be a string", child(path, key));
    return v.get<std::string>();
}

RatFunc parse_expr(const Json& v, const FieldSpecPtr& spec, const std::string& path) {
    if (!v.is_string()) throw SchemaError("expression must be a string", path);
    try {
        return parse_ratfunc(v.get<std::string>(), spec);
    } catch (const Error& e) {
        throw SchemaError(e.what(), path);
    }
}

FieldSpecPtr spec_from_json(const Json& doc, const std::string& path) {
    uint64_t p = get_uint(doc, "p", path);
    require_key(doc, "variables", path);
    const Json& vars = doc.at("variables");
    if (!vars.is_array())
        throw SchemaError("'variables' must be an array", child(path, "variables"));
    std::vector<std::string> names;
    for (size_t i = 0; i < vars.size(); ++i) {
        if (!vars[i].is_string())
            throw SchemaError("variable name must be a string",
                              child(child(path, "variables"), i));
        names.push_back(vars[i].get<std::string>());
    }
    try {
        return FieldSpec::make(static_cast<uint32_t>(p), std::move(names));
    } catch (const Error& e) {
        throw SchemaError(e.what(), path);
    }
}

}  // namespace

// ----------------------------------------------------------------- validation

namespace {

void check_expr(const Json& v, const FieldSpecPtr& spec, const std::string& path, bool nonzero,
                std::vector<SchemaIssue>& issues) {
    if (!v.is_string()) {
        issues.push_back({path, "expression must be a string"});
        return;
    }
    try {
        RatFunc f = parse_ratfunc(v.get<std::string>(), spec);
        if (nonzero && f.is_zero()) issues.push_back({path, "slot must be nonzero"});
    } catch (const Error& e) {
        issues.push_back({path, e.what()});
    }
}

// Shared head: p, m, n, variables.  Returns the spec when sound.
FieldSpecPtr validate_head(const Json& doc, const std::string& path,
                           std::vector<SchemaIssue>& issues) {
    if (!doc.is_object()) {
        issues.push_back({path.empty() ? "/" : path, "document must be an object"});
        return nullptr;
    }
    for (const char* key : {"p", "m", "n"}) {
        if (!doc.contains(key)) {
            issues.push_back({path.empty() ? "/" : path, std::string("missing key '") + key + "'"});
            continue;
        }
        if (!is_nonneg_int(doc.at(key)) || doc.at(key).get<uint64_t>() == 0)
            issues.push_back({child(path, key), std::string("'") + key + "' must be a positive integer"});
    }
    if (!doc.contains("variables")) {
        issues.push_back({path.empty() ? "/" : path, "missing key 'variables'"});
    } else if (!doc.at("variables").is_array()) {
        issues.push_back({child(path, "variables"), "'variables' must be an array"});
    }
    if (!issues.empty()) return nullptr;
    try {
        return spec_from_json(doc, path);
    } catch (const SchemaError& e) {
        issues.push_back({e.path, e.what()});
        return nullptr;
    }
}

void validate_class_impl(const Json& doc, const std::string& path,
                         std::vector<SchemaIssue>& issues) {
    FieldSpecPtr spec = validate_head(doc, path, issues);
    if (!spec) return;
    uint64_t m = doc.at("m").get<uint64_t>();
    uint64_t n = doc.at("n").get<uint64_t>();
    if (!doc.contains("terms")) {
        issues.push_back({path.empty() ? "/" : path, "missing key 'terms'"});
        return;
    }
    const Json& terms = doc.at("terms");
    if (!terms.is_array()) {
        issues.push_back({child(path, "terms"), "'terms' must be an array"});
        return;
    }
    for (size_t i = 0; i < terms.size(); ++i) {
        std::string tpath = child(child(path, "terms"), i);
        const Json& t = terms[i];
        if (!t.is_object()) {
            issues.push_back({tpath, "term must be an object"});
            continue;
        }
        for (const char* key : {"witt", "slots"}) {
            if (!t.contains(key)) {
                issues.push_back({tpath, std::string("missing key '") + key + "'"});
                continue;
            }
            const Json& arr = t.at(key);
            std::string apath = child(tpath, key);
            if (!arr.is_array()) {
                issues.push_back({apath, std::string("'") + key + "' must be an array"});
                continue;
            }
            uint64_t want = key[0] == 'w' ? m : n;
            if (arr.size() != want) {
                issues.push_back({apath, std::string("'") + key + "' must have length " +
                                             std::to_string(want)});
                continue;
            }
            for (size_t k = 0; k < arr.size(); ++k)
                check_expr(arr[k], spec, child(apath, k), key[0] == 's', issues);
        }
    }
}

}  // namespace

std::vector<SchemaIssue> validate_class_doc(const Json& doc) {
    std::vector<SchemaIssue> issues;
    validate_class_impl(doc, "", issues);
    return issues;
}

std::vector<SchemaIssue> validate_trace_doc(const Json& doc) {
    std::vector<SchemaIssue> issues;
    if (!doc.is_object()) {
        issues.push_back({"/", "document must be an object"});
        return issues;
    }
    if (!doc.contains("start")) {
        issues.push_back({"/", "missing key 'start'"});
        return issues;
    }
    validate_class_impl(doc.at("start"), "/start", issues);
    if (!issues.empty()) return issues;
    if (!doc.contains("steps")) {
        issues.push_back({"/", "missing key 'steps'"});
        return issues;
    }
    if (!doc.at("steps").is_array()) {
        issues.push_back({"/steps", "'steps' must be an array"});
        return issues;
    }
    // Step internals are validated structurally during parsing; here just the
    // required keys, so a failed parse reports a usable pointer.
    const Json& steps = doc.at("steps");
    for (size_t i = 0; i < steps.size(); ++i) {
        std::string spath = child("/steps", i);
        if (!steps[i].is_object()) {
            issues.push_back({spath, "step must be an object"});
            continue;
        }
        for (const char* key : {"kind", "params", "result"})
            if (!steps[i].contains(key))
                issues.push_back({spath, std::string("missing key '") + key + "'"});
        if (steps[i].contains("result"))
            validate_class_impl(steps[i].at("result"), child(spath, "result"), issues);
    }
    return issues;
}

// -------------------------------------------------------------------- classes

Json witt_to_json(const WittField& w) {
    Json arr = Json::array();
    for (const auto& c : w.coords()) arr.push_back(render(c));
    return arr;
}

WittField witt_from_json(const Json& arr, const FieldSpecPtr& spec, uint32_t m,
                         const std::string& path) {
    if (!arr.is_array() || arr.size() != m)
        throw SchemaError("Witt vector must be an array of length " + std::to_string(m), path);
    std::vector<RatFunc> coords;
    for (size_t i = 0; i < arr.size(); ++i) coords.push_back(parse_expr(arr[i], spec, child(path, i)));
    return WittField(spec->p(), std::move(coords));
}

Json class_to_json(const ClassExpr& expr) {
    Json terms = Json::array();
    for (const auto& t : expr.terms()) {
        Json slots = Json::array();
        for (const auto& b : t.slots) slots.push_back(render(b));
        terms.push_back(Json{{"witt", witt_to_json(t.witt)}, {"slots", slots}});
    }
    return Json{{"p", expr.p()},
                {"m", expr.m()},
                {"n", expr.n()},
                {"variables", expr.spec()->variables()},
                {"terms", terms}};
}

ClassExpr class_from_json(const Json& doc) {
    auto issues = validate_class_doc(doc);
    if (!issues.empty())
        throw SchemaError(issues.front().message,
                          issues.front().path.empty() ? "/" : issues.front().path);
    FieldSpecPtr spec = spec_from_json(doc, "");
    auto m = static_cast<uint32_t>(doc.at("m").get<uint64_t>());
    auto n = static_cast<uint32_t>(doc.at("n").get<uint64_t>());
    std::vector<SymbolTerm> terms;
    const Json& jterms = doc.at("terms");
    for (size_t i = 0; i < jterms.size(); ++i) {
        std::string tpath = child("/terms", i);
        WittField w = witt_from_json(jterms[i].at("witt"), spec, m, child(tpath, "witt"));
        std::vector<RatFunc> slots;
        const Json& jslots = jterms[i].at("slots");
        for (size_t k = 0; k < jslots.size(); ++k)
            slots.push_back(parse_expr(jslots[k], spec, child(child(tpath, "slots"), k)));
        terms.emplace_back(std::move(w), std::move(slots));
    }
    return ClassExpr(spec, m, n, std::move(terms));
}

// ---------------------------------------------------------------------- moves

namespace {

Json slots_to_json(const std::vector<RatFunc>& slots) {
    Json arr = Json::array();
    for (const auto& b : slots) arr.push_back(render(b));
    return arr;
}

std::vector<RatFunc> slots_from_json(const Json& arr, const FieldSpecPtr& spec, uint32_t n,
                                     const std::string& path) {
    if (!arr.is_array() || arr.size() != n)
        throw SchemaError("slot list must be an array of length " + std::to_string(n), path);
    std::vector<RatFunc> out;
    for (size_t i = 0; i < arr.size(); ++i) out.push_back(parse_expr(arr[i], spec, child(path, i)));
    return out;
}

struct MoveWriter {
    Json operator()(const ArtinSchreierMove& m) const {
        Json j{{"dir", m.insert ? "insert" : "drop"},
               {"index", m.index},
               {"witness", witt_to_json(m.witness)}};
        if (m.insert) j["slots"] = slots_to_json(m.slots);
        return j;
    }
    Json operator()(const SlotMatchMove& m) const {
        Json j{{"dir", m.insert ? "insert" : "drop"},
               {"index", m.index},
               {"slot", m.slot},
               {"coord", m.coord}};
        if (m.insert) j["slots"] = slots_to_json(m.slots);
        return j;
    }
    Json operator()(const RepeatSlotMove& m) const {
        Json j{{"dir", m.insert ? "insert" : "drop"},
               {"index", m.index},
               {"slot1", m.slot1},
               {"slot2", m.slot2}};
        if (m.insert) {
            j["witt"] = witt_to_json(*m.witt);
            j["slots"] = slots_to_json(m.slots);
        }
        return j;
    }
    Json operator()(const SlotMulMove& m) const {
        return Json{{"index", m.index},
                    {"slot", m.slot},
                    {"left", render(m.left)},
                    {"right", render(m.right)}};
    }
    Json operator()(const WittAddMove& m) const {
        if (m.merge) return Json{{"dir", "merge"}, {"index", m.index}, {"index2", m.index2}};
        return Json{{"dir", "split"},
                    {"index", m.index},
                    {"left", witt_to_json(*m.left)},
                    {"right", witt_to_json(*m.right)}};
    }
    Json operator()(const PScalarMove& m) const {
        return Json{{"index", m.index}, {"count", m.count}};
    }
    Json operator()(const ShiftIntroMove& m) const {
        return Json{{"index", m.index}, {"slot", m.slot}, {"root", render(m.root)}};
    }
};

}  // namespace

Json move_to_json(const RewriteMove& mv) {
    return Json{{"kind", move_kind_name(mv)}, {"params", std::visit(MoveWriter{}, mv)}};
}

RewriteMove move_from_json(const Json& doc, const FieldSpecPtr& spec, uint32_t m, uint32_t n,
                           const std::string& path) {
    std::string kind = get_string(doc, "kind", path);
    require_key(doc, "params", path);
    const Json& pj = doc.at("params");
    std::string ppath = child(path, "params");
    if (!pj.is_object()) throw SchemaError("'params' must be an object", ppath);

    auto get_dir = [&](const char* a, const char* b) {
        std::string d = get_string(pj, "dir", ppath);
        if (d != a && d != b)
            throw SchemaError("'dir' must be '" + std::string(a) + "' or '" + b + "'",
                              child(ppath, "dir"));
        return d == a;
    };

    if (kind == "artin_schreier") {
        bool insert = get_dir("insert", "drop");
        size_t index = get_uint(pj, "index", ppath);
        WittField witness = witt_from_json(pj.contains("witness") ? pj.at("witness") : Json(),
                                           spec, m, child(ppath, "witness"));
        std::vector<RatFunc> slots;
        if (insert) slots = slots_from_json(pj.contains("slots") ? pj.at("slots") : Json(),
                                            spec, n, child(ppath, "slots"));
        return ArtinSchreierMove{insert, index, std::move(witness), std::move(slots)};
    }
    if (kind == "slot_match") {
        SlotMatchMove mv;
        mv.insert = get_dir("insert", "drop");
        mv.index = get_uint(pj, "index", ppath);
        mv.slot = get_uint(pj, "slot", ppath);
        mv.coord = static_cast<uint32_t>(get_uint(pj, "coord", ppath));
        if (mv.insert) mv.slots = slots_from_json(pj.contains("slots") ? pj.at("slots") : Json(),
                                                  spec, n, child(ppath, "slots"));
        return mv;
    }
    if (kind == "repeat_slot") {
        RepeatSlotMove mv;
        mv.insert = get_dir("insert", "drop");
        mv.index = get_uint(pj, "index", ppath);
        mv.slot1 = get_uint(pj, "slot1", ppath);
        mv.slot2 = get_uint(pj, "slot2", ppath);
        if (mv.insert) {
            mv.witt = witt_from_json(pj.contains("witt") ? pj.at("witt") : Json(), spec, m,
                                     child(ppath, "witt"));
            mv.slots = slots_from_json(pj.contains("slots") ? pj.at("slots") : Json(), spec, n,
                                       child(ppath, "slots"));
        }
        return mv;
    }
    if (kind == "slot_mul") {
        SlotMulMove mv{get_uint(pj, "index", ppath), get_uint(pj, "slot", ppath),
                       parse_expr(pj.contains("left") ? pj.at("left") : Json(), spec,
                                  child(ppath, "left")),
                       parse_expr(pj.contains("right") ? pj.at("right") : Json(), spec,
                                  child(ppath, "right"))};
        return mv;
    }
    if (kind == "witt_add") {
        WittAddMove mv;
        mv.merge = get_dir("merge", "split");
        mv.index = get_uint(pj, "index", ppath);
        if (mv.merge) {
            mv.index2 = get_uint(pj, "index2", ppath);
        } else {
            mv.left = witt_from_json(pj.contains("left") ? pj.at("left") : Json(), spec, m,
                                     child(ppath, "left"));
            mv.right = witt_from_json(pj.contains("right") ? pj.at("right") : Json(), spec, m,
                                      child(ppath, "right"));
        }
        return mv;
    }
    if (kind == "p_scalar")
        return PScalarMove{get_uint(pj, "index", ppath), get_uint(pj, "count", ppath)};
    if (kind == "shift_intro")
        return ShiftIntroMove{get_uint(pj, "index", ppath), get_uint(pj, "slot", ppath),
                              parse_expr(pj.contains("root") ? pj.at("root") : Json(), spec,
                                         child(ppath, "root"))};
    throw SchemaError("unknown move kind '" + kind + "'", child(path, "kind"));
}

// --------------------------------------------------------------------- traces

Json trace_to_json(const DerivationTrace& trace) {
    Json steps = Json::array();
    for (const auto& s : trace.steps) {
        Json j = move_to_json(s.move);
        j["result"] = class_to_json(s.result);
        steps.push_back(std::move(j));
    }
    return Json{{"start", class_to_json(trace.start)}, {"steps", steps}};
}

DerivationTrace trace_from_json(const Json& doc) {
    auto issues = validate_trace_doc(doc);
    if (!issues.empty()) throw SchemaError(issues.front().message, issues.front().path);
    DerivationTrace out{class_from_json(doc.at("start")), {}};
    const ClassExpr& start = out.start;
    const Json& steps = doc.at("steps");
    for (size_t i = 0; i < steps.size(); ++i) {
        std::string spath = child("/steps", i);
        RewriteMove mv = move_from_json(steps[i], start.spec(), start.m(), start.n(), spath);
        ClassExpr result = class_from_json(steps[i].at("result"));
        out.steps.push_back(TraceStep{std::move(mv), std::move(result)});
    }
    return out;
}

// ------------------------------------------------------- canonical form, report

Json canonical_to_json(const CanonicalForm& cf) {
    Json tuples = Json::array();
    for (const auto& [tuple, w] : cf.coeffs()) {
        Json indices = Json::array();
        for (uint32_t v : tuple) indices.push_back(v + 1);  // 1-based in the schema
        tuples.push_back(Json{{"indices", indices}, {"witt", witt_to_json(w)}});
    }
    return Json{{"p", cf.spec()->p()},
                {"m", cf.m()},
                {"n", cf.n()},
                {"variables", cf.spec()->variables()},
                {"tuples", tuples}};
}

Json report_to_json(const BoundsReport& report) {
    Json entries = Json::array();
    for (const auto& e : report.entries) {
        entries.push_back(Json{{"quantity", e.quantity},
                               {"functor", e.functor},
                               {"relation", e.relation},
                               {"value", e.value},
                               {"approx", e.approx},
                               {"citation", e.citation},
                               {"assumptions", e.assumptions},
                               {"best", e.best}});
    }
    return Json{{"entries", entries}};
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace kmsym
