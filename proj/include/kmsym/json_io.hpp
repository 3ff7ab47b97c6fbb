// JSON schemas for class expressions, derivation traces, canonical forms and
// bounds reports.  Emission is deterministic (sorted keys, rendered
// expressions in canonical order), so emit -> parse -> emit is byte-stable.
#ifndef KMSYM_JSON_IO_HPP
#define KMSYM_JSON_IO_HPP

#include <json.hpp>

#include "kmsym/bounds.hpp"
#include "kmsym/decompose.hpp"
#include "kmsym/km.hpp"

namespace kmsym {

using Json = nlohmann::json;

struct SchemaIssue {
    std::string path;  // JSON pointer
    std::string message;
};

// Structural validation; empty result means the document is well-formed.
std::vector<SchemaIssue> validate_class_doc(const Json& doc);
std::vector<SchemaIssue> validate_trace_doc(const Json& doc);

// {"p", "m", "n", "variables", "terms": [{"witt": [expr...], "slots": [expr...]}]}
Json class_to_json(const ClassExpr& expr);
ClassExpr class_from_json(const Json& doc);  // throws SchemaError

// Class document plus {"steps": [{"kind", "params", "result"}]}
Json trace_to_json(const DerivationTrace& trace);
DerivationTrace trace_from_json(const Json& doc);  // throws SchemaError

// {"p", "m", "n", "variables", "tuples": [{"indices": [1-based...], "witt": [expr...]}]}
Json canonical_to_json(const CanonicalForm& cf);

Json move_to_json(const RewriteMove& mv);
RewriteMove move_from_json(const Json& doc, const FieldSpecPtr& spec, uint32_t m, uint32_t n,
                           const std::string& path);

Json witt_to_json(const WittField& w);
WittField witt_from_json(const Json& arr, const FieldSpecPtr& spec, uint32_t m,
                         const std::string& path);

Json report_to_json(const BoundsReport& report);

// Standard serialization used everywhere: 2-space indent, trailing newline.
std::string dump_json(const Json& doc);

}  // namespace kmsym

#endif
