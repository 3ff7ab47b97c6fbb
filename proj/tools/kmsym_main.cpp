// Command-line front end: batch jobs over JSON documents.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kmsym/json_io.hpp"

namespace {

using kmsym::Json;

struct IoOptions {
    std::string input_file;
    std::string inline_json;
    std::string output_file;
};

void add_input_options(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("-i,--input", io.input_file, "input JSON file ('-' for stdin)");
    cmd->add_option("-j,--json", io.inline_json, "inline JSON document");
    cmd->add_option("-o,--output", io.output_file, "output file (default stdout)");
}

void add_output_option(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("-o,--output", io.output_file, "output file (default stdout)");
}

Json read_input(const IoOptions& io) {
    std::string text;
    if (!io.inline_json.empty()) {
        text = io.inline_json;
    } else if (io.input_file == "-" || io.input_file.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(io.input_file);
        if (!in) throw kmsym::Error("cannot open input file: " + io.input_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw kmsym::SchemaError(std::string("invalid JSON: ") + e.what(), "/");
    }
}

void write_output(const IoOptions& io, const std::string& text) {
    if (io.output_file.empty() || io.output_file == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(io.output_file);
    if (!out) throw kmsym::Error("cannot open output file: " + io.output_file);
    out << text;
}

const char* error_type(const kmsym::Error& e) {
    if (dynamic_cast<const kmsym::SchemaError*>(&e)) return "schema";
    if (dynamic_cast<const kmsym::SideConditionFailed*>(&e)) return "side_condition";
    if (dynamic_cast<const kmsym::DivisionByZero*>(&e)) return "division_by_zero";
    if (dynamic_cast<const kmsym::NotAPthPower*>(&e)) return "not_a_pth_power";
    if (dynamic_cast<const kmsym::ZeroInput*>(&e)) return "zero_input";
    if (dynamic_cast<const kmsym::SyntaxError*>(&e)) return "syntax";
    if (dynamic_cast<const kmsym::UnknownVariable*>(&e)) return "unknown_variable";
    if (dynamic_cast<const kmsym::ModeMismatch*>(&e)) return "mode_mismatch";
    if (dynamic_cast<const kmsym::SpecMismatch*>(&e)) return "spec_mismatch";
    if (dynamic_cast<const kmsym::PreconditionFailed*>(&e)) return "precondition";
    if (dynamic_cast<const kmsym::NonPositiveFactor*>(&e)) return "non_positive_factor";
    if (dynamic_cast<const kmsym::InternalError*>(&e)) return "internal";
    return "error";
}

// ------------------------------------------------------------------ witt-eval

kmsym::WittInt witt_int_from_json(const Json& arr, uint32_t p, const std::string& path) {
    if (!arr.is_array() || arr.empty())
        throw kmsym::SchemaError("Witt vector must be a nonempty array", path);
    std::vector<kmsym::BigInt> coords;
    for (size_t i = 0; i < arr.size(); ++i) {
        const Json& v = arr[i];
        if (v.is_number_integer())
            coords.emplace_back(v.get<int64_t>());
        else if (v.is_string())
            coords.emplace_back(v.get<std::string>());
        else
            throw kmsym::SchemaError("integer coordinate must be a number or decimal string",
                                     path + "/" + std::to_string(i));
    }
    return kmsym::WittInt(p, std::move(coords));
}

Json witt_int_to_json(const kmsym::WittInt& w) {
    Json arr = Json::array();
    for (const auto& c : w.coords()) arr.push_back(c.str());
    return arr;
}

Json run_witt_eval(const Json& doc) {
    std::string mode = doc.value("mode", std::string("field"));
    std::string op = doc.at("op").get<std::string>();
    auto p = static_cast<uint32_t>(doc.at("p").get<uint64_t>());

    if (mode == "int") {
        auto need = [&](const char* key) {
            if (!doc.contains(key))
                throw kmsym::SchemaError(std::string("missing key '") + key + "'", "/");
            return witt_int_from_json(doc.at(key), p, std::string("/") + key);
        };
        if (op == "add") return Json{{"result", witt_int_to_json(witt_add(need("a"), need("b")))}};
        if (op == "mul") return Json{{"result", witt_int_to_json(witt_mul(need("a"), need("b")))}};
        if (op == "sub") return Json{{"result", witt_int_to_json(witt_sub(need("a"), need("b")))}};
        if (op == "neg") return Json{{"result", witt_int_to_json(witt_neg(need("a")))}};
        if (op == "verschiebung")
            return Json{{"result", witt_int_to_json(verschiebung(need("a")))}};
        if (op == "scalar") {
            kmsym::BigInt k(doc.at("k").is_string() ? kmsym::BigInt(doc.at("k").get<std::string>())
                                                    : kmsym::BigInt(doc.at("k").get<int64_t>()));
            return Json{{"result", witt_int_to_json(scalar_mul(k, need("a")))}};
        }
        if (op == "ghost") {
            Json out = Json::array();
            for (const auto& g : ghost(need("a"))) out.push_back(g.str());
            return Json{{"ghost", out}};
        }
        throw kmsym::SchemaError("unsupported integer-mode op '" + op + "'", "/op");
    }

    if (mode != "field") throw kmsym::SchemaError("mode must be 'field' or 'int'", "/mode");
    Json head = doc;
    head["variables"] = doc.value("variables", Json::array());
    kmsym::FieldSpecPtr spec;
    {
        std::vector<std::string> names;
        for (const auto& v : head.at("variables")) names.push_back(v.get<std::string>());
        spec = kmsym::FieldSpec::make(p, std::move(names));
    }
    auto need = [&](const char* key) {
        if (!doc.contains(key))
            throw kmsym::SchemaError(std::string("missing key '") + key + "'", "/");
        const Json& arr = doc.at(key);
        if (!arr.is_array() || arr.empty())
            throw kmsym::SchemaError("Witt vector must be a nonempty array",
                                     std::string("/") + key);
        return kmsym::witt_from_json(arr, spec, static_cast<uint32_t>(arr.size()),
                                     std::string("/") + key);
    };
    if (op == "add") return Json{{"result", witt_to_json(witt_add(need("a"), need("b")))}};
    if (op == "mul") return Json{{"result", witt_to_json(witt_mul(need("a"), need("b")))}};
    if (op == "sub") return Json{{"result", witt_to_json(witt_sub(need("a"), need("b")))}};
    if (op == "neg") return Json{{"result", witt_to_json(witt_neg(need("a")))}};
    if (op == "frobenius") return Json{{"result", witt_to_json(frobenius_pow(need("a")))}};
    if (op == "wp") return Json{{"result", witt_to_json(wp(need("a")))}};
    if (op == "verschiebung") return Json{{"result", witt_to_json(verschiebung(need("a")))}};
    if (op == "teichmuller") {
        auto m = static_cast<uint32_t>(doc.at("m").get<uint64_t>());
        kmsym::RatFunc a = kmsym::parse_ratfunc(doc.at("element").get<std::string>(), spec);
        return Json{{"result", witt_to_json(teichmuller(p, a, m))}};
    }
    if (op == "scalar") {
        kmsym::BigInt k(doc.at("k").is_string() ? kmsym::BigInt(doc.at("k").get<std::string>())
                                                : kmsym::BigInt(doc.at("k").get<int64_t>()));
        return Json{{"result", witt_to_json(scalar_mul(k, need("a")))}};
    }
    if (op == "vsplit") {
        auto [first, tail] = v_split(need("a"));
        return Json{{"first", render(first)}, {"tail", witt_to_json(tail)}};
    }
    throw kmsym::SchemaError("unsupported field-mode op '" + op + "'", "/op");
}

// --------------------------------------------------------------------- bounds

kmsym::BoundsInput bounds_input_from_json(const Json& doc) {
    kmsym::BoundsInput in;
    auto grab = [&](const char* key, auto& slot) {
        if (doc.contains(key)) slot = doc.at(key).get<uint64_t>();
    };
    if (doc.contains("p")) in.p = static_cast<uint32_t>(doc.at("p").get<uint64_t>());
    grab("m", in.m);
    grab("n", in.n);
    grab("l", in.ell);
    grab("ell", in.ell);
    grab("r", in.r);
    grab("t", in.t);
    grab("s", in.s);
    grab("u", in.u);
    grab("sl", in.sl);
    grab("deg", in.deg);
    if (doc.contains("cr")) in.cr_field = doc.at("cr").get<uint64_t>() != 0;
    return in;
}

Json bounds_pairs_to_json(const std::vector<std::string>& pairs) {
    Json doc = Json::object();
    for (const auto& kv : pairs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw kmsym::SchemaError("expected key=value, got '" + kv + "'", "/");
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        try {
            doc[key] = static_cast<uint64_t>(std::stoull(val));
        } catch (const std::exception&) {
            throw kmsym::SchemaError("value of '" + key + "' must be a nonnegative integer", "/" + key);
        }
    }
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Witt-vector and symbol calculus over F_p(x_1,...,x_r)"};
    app.require_subcommand(1);
    int exit_code = 0;

    IoOptions io;

    auto* witt_cmd = app.add_subcommand("witt-eval", "evaluate a Witt vector operation");
    add_input_options(witt_cmd, io);
    witt_cmd->callback([&] { write_output(io, kmsym::dump_json(run_witt_eval(read_input(io)))); });

    bool with_trace = false;
    auto* dec_cmd = app.add_subcommand("decompose", "rewrite a class into p-basis canonical form");
    add_input_options(dec_cmd, io);
    dec_cmd->add_flag("--trace", with_trace, "include the derivation trace in the output");
    dec_cmd->callback([&] {
        kmsym::ClassExpr expr = kmsym::class_from_json(read_input(io));
        kmsym::DecomposeResult res = kmsym::decompose(expr);
        Json out{{"canonical", kmsym::canonical_to_json(res.canonical)}};
        if (with_trace) out["trace"] = kmsym::trace_to_json(res.trace);
        write_output(io, kmsym::dump_json(out));
    });

    auto* verify_cmd = app.add_subcommand("verify", "re-verify a derivation trace");
    add_input_options(verify_cmd, io);
    verify_cmd->callback([&] {
        kmsym::DerivationTrace trace = kmsym::trace_from_json(read_input(io));
        kmsym::Verdict v = kmsym::verify_derivation(trace);
        if (v.ok) {
            write_output(io, kmsym::dump_json(Json{{"ok", true}}));
        } else {
            write_output(io, kmsym::dump_json(
                                 Json{{"ok", false}, {"step", v.failed_step}, {"message", v.message}}));
            exit_code = 1;
        }
    });

    std::vector<std::string> bound_pairs;
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate symbol-length / essential-dimension bounds");
    add_input_options(bounds_cmd, io);
    bounds_cmd->add_option("pairs", bound_pairs, "key=value inputs (p, m, n, l, r, t, s, u, sl, deg, cr)");
    bounds_cmd->callback([&] {
        Json doc = bound_pairs.empty() ? read_input(io) : bounds_pairs_to_json(bound_pairs);
        kmsym::BoundsReport rep = kmsym::best_bounds(bounds_input_from_json(doc));
        write_output(io, kmsym::dump_json(kmsym::report_to_json(rep)));
    });

    uint32_t gs_p = 2, gs_l = 1, gs_m = 1, gs_n = 1;
    auto* gs_cmd = app.add_subcommand("generic-sum", "emit the generic sum of l symbols");
    gs_cmd->add_option("--p", gs_p, "prime")->required();
    gs_cmd->add_option("--l", gs_l, "number of symbols")->required();
    gs_cmd->add_option("--m", gs_m, "Witt length")->required();
    gs_cmd->add_option("--n", gs_n, "slot count")->required();
    add_output_option(gs_cmd, io);
    gs_cmd->callback([&] {
        write_output(io, kmsym::dump_json(kmsym::class_to_json(
                             kmsym::generic_sum(gs_p, gs_l, gs_m, gs_n))));
    });

    auto* pc_cmd = app.add_subcommand("present-cyclic", "render the cyclic algebra presentation");
    add_input_options(pc_cmd, io);
    pc_cmd->callback([&] {
        Json doc = read_input(io);
        auto p = static_cast<uint32_t>(doc.at("p").get<uint64_t>());
        std::vector<std::string> names;
        if (doc.contains("variables"))
            for (const auto& v : doc.at("variables")) names.push_back(v.get<std::string>());
        kmsym::FieldSpecPtr spec = kmsym::FieldSpec::make(p, std::move(names));
        const Json& jw = doc.at("witt");
        kmsym::WittField w = kmsym::witt_from_json(
            jw, spec, static_cast<uint32_t>(jw.is_array() ? jw.size() : 0), "/witt");
        kmsym::RatFunc b = kmsym::parse_ratfunc(doc.at("b").get<std::string>(), spec);
        kmsym::CyclicPresentation pres = kmsym::present_cyclic(w, b);
        write_output(io, kmsym::dump_json(Json{{"p", p},
                                               {"m", w.length()},
                                               {"witt", kmsym::witt_to_json(pres.witt)},
                                               {"b", render(pres.b)},
                                               {"generators", pres.generators},
                                               {"relations", pres.relations},
                                               {"split", pres.split}}));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const kmsym::Error& e) {
        Json err{{"error", Json{{"type", error_type(e)}, {"message", e.what()}}}};
        if (const auto* se = dynamic_cast<const kmsym::SchemaError*>(&e))
            err["error"]["path"] = se->path;
        std::cerr << kmsym::dump_json(err);
        return 1;
    } catch (const Json::exception& e) {
        Json err{{"error", Json{{"type", "schema"}, {"message", e.what()}}}};
        std::cerr << kmsym::dump_json(err);
        return 1;
    }
    return exit_code;
}
