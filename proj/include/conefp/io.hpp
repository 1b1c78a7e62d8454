#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "conefp/errors.hpp"
#include "conefp/map_models.hpp"
#include "conefp/topical.hpp"

namespace conefp {

using json = nlohmann::json;

/// FNV-1a 64-bit digest, hex encoded; identifies input files in reports.
inline std::string fnv1a_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace detail {

inline std::pair<int, int> line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

/// Parses JSON with line/column information attached to failures.
inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("json: ") + e.what(), line, col);
    }
}

// ---------------------------------------------------------------------------
// Map-spec documents
// ---------------------------------------------------------------------------
//
// One self-describing JSON object per map with a "kind" discriminator:
//   {"kind":"matrix","rows":[[2,1],[1,2]]}
//   {"kind":"tensor","order":3,"dim":2,"entries":[[1,1,1,1.0],[1,2,2,2.0]]}
//   {"kind":"expr","dim":2,"coords":[["max",["mon",1,[1,0]],["mon",1,[0,1]]],
//                                     ["mon",1,[0.5,0.5]]]}
//   {"kind":"builtin","tag":"example1"}
//   {"kind":"topical","dim":2,"coords":[["aff",1.0,[0,1]],["aff",1.0,[1,0]]]}
// Expression nodes: ["mon", coeff, [exponents]] | ["sum"|"max"|"min", ...].
// Topical nodes: ["aff", offset, [coeffs]] | ["max"|"min"|"lse", ...].

struct LoadedMap {
    std::string kind;
    std::optional<MapModel> model;      // matrix / tensor / expr / builtin
    std::optional<TopicalMap> topical;  // topical
};

namespace detail {

[[noreturn]] inline void doc_error(const std::string& what) { throw ParseError("mapspec: " + what); }

inline Expr expr_from_json(const json& node, int dim) {
    if (!node.is_array() || node.empty() || !node[0].is_string())
        doc_error("expression nodes are arrays starting with a tag string");
    const std::string tag = node[0].get<std::string>();
    if (tag == "mon") {
        if (node.size() != 3 || !node[1].is_number() || !node[2].is_array())
            doc_error("monomial nodes look like [\"mon\", coeff, [exponents]]");
        std::vector<double> alpha = node[2].get<std::vector<double>>();
        if (static_cast<int>(alpha.size()) != dim)
            doc_error("monomial exponent vector must have one entry per variable");
        try {
            return Expr::monomial(node[1].get<double>(), std::move(alpha));
        } catch (const ValidationError& e) {
            doc_error(e.what());
        }
    }
    std::vector<Expr> children;
    for (std::size_t i = 1; i < node.size(); ++i) children.push_back(expr_from_json(node[i], dim));
    try {
        if (tag == "sum") return Expr::sum(std::move(children));
        if (tag == "max") return Expr::max(std::move(children));
        if (tag == "min") return Expr::min(std::move(children));
    } catch (const ValidationError& e) {
        doc_error(e.what());
    }
    doc_error("unknown expression tag '" + tag + "'");
}

inline json expr_to_json(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Monomial: return json::array({"mon", e.coeff(), e.exponents()});
        case Expr::Kind::Sum:
        case Expr::Kind::Max:
        case Expr::Kind::Min: {
            const char* tag = e.kind() == Expr::Kind::Sum ? "sum"
                              : e.kind() == Expr::Kind::Max ? "max"
                                                            : "min";
            json out = json::array({tag});
            for (const auto& c : e.children()) out.push_back(expr_to_json(c));
            return out;
        }
    }
    doc_error("unreachable expression kind");
}

inline TopicalExpr topical_from_json(const json& node, int dim) {
    if (!node.is_array() || node.empty() || !node[0].is_string())
        doc_error("topical nodes are arrays starting with a tag string");
    const std::string tag = node[0].get<std::string>();
    if (tag == "aff") {
        if (node.size() != 3 || !node[1].is_number() || !node[2].is_array())
            doc_error("affine nodes look like [\"aff\", offset, [coeffs]]");
        std::vector<double> coeffs = node[2].get<std::vector<double>>();
        if (static_cast<int>(coeffs.size()) != dim)
            doc_error("affine coefficient row must have one entry per variable");
        try {
            return TopicalExpr::affine(std::move(coeffs), node[1].get<double>());
        } catch (const ValidationError& e) {
            doc_error(e.what());
        }
    }
    std::vector<TopicalExpr> children;
    for (std::size_t i = 1; i < node.size(); ++i)
        children.push_back(topical_from_json(node[i], dim));
    try {
        if (tag == "max") return TopicalExpr::max(std::move(children));
        if (tag == "min") return TopicalExpr::min(std::move(children));
        if (tag == "lse") return TopicalExpr::log_sum_exp(std::move(children));
    } catch (const ValidationError& e) {
        doc_error(e.what());
    }
    doc_error("unknown topical tag '" + tag + "'");
}

inline json topical_to_json(const TopicalExpr& e) {
    switch (e.kind()) {
        case TopicalExpr::Kind::Affine:
            return json::array({"aff", e.term().offset, e.term().coeffs});
        case TopicalExpr::Kind::Max:
        case TopicalExpr::Kind::Min:
        case TopicalExpr::Kind::LogSumExp: {
            const char* tag = e.kind() == TopicalExpr::Kind::Max   ? "max"
                              : e.kind() == TopicalExpr::Kind::Min ? "min"
                                                                   : "lse";
            json out = json::array({tag});
            for (const auto& c : e.children()) out.push_back(topical_to_json(c));
            return out;
        }
    }
    doc_error("unreachable topical kind");
}

}  // namespace detail

inline LoadedMap map_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
        detail::doc_error("document must be an object with a string \"kind\"");
    const std::string kind = doc["kind"].get<std::string>();
    LoadedMap out;
    out.kind = kind;
    try {
        if (kind == "matrix") {
            if (!doc.contains("rows")) detail::doc_error("matrix documents need \"rows\"");
            out.model = MapModel(
                MatrixMap::from_rows(doc["rows"].get<std::vector<std::vector<double>>>()));
        } else if (kind == "tensor") {
            if (!doc.contains("order") || !doc.contains("dim") || !doc.contains("entries"))
                detail::doc_error("tensor documents need \"order\", \"dim\" and \"entries\"");
            const int order = doc["order"].get<int>();
            const int dim = doc["dim"].get<int>();
            std::vector<TensorMap::Entry> entries;
            for (const auto& row : doc["entries"]) {
                if (!row.is_array() || static_cast<int>(row.size()) != order + 1)
                    detail::doc_error("tensor entries hold the indices followed by the value");
                TensorMap::Entry e;
                for (int t = 0; t < order; ++t) {
                    const int ix = row[static_cast<std::size_t>(t)].get<int>();
                    if (ix < 1 || ix > dim) detail::doc_error("tensor index out of range");
                    e.index.push_back(ix - 1);
                }
                e.value = row[static_cast<std::size_t>(order)].get<double>();
                entries.push_back(std::move(e));
            }
            out.model = MapModel(TensorMap(order, dim, std::move(entries)));
        } else if (kind == "expr") {
            if (!doc.contains("dim") || !doc.contains("coords"))
                detail::doc_error("expr documents need \"dim\" and \"coords\"");
            const int dim = doc["dim"].get<int>();
            std::vector<Expr> coords;
            for (const auto& c : doc["coords"]) coords.push_back(detail::expr_from_json(c, dim));
            out.model = MapModel(ExprMap(dim, std::move(coords)));
        } else if (kind == "builtin") {
            if (!doc.contains("tag") || !doc["tag"].is_string())
                detail::doc_error("builtin documents need a string \"tag\"");
            const auto tag = BuiltinMap::parse_tag(doc["tag"].get<std::string>());
            if (!tag) detail::doc_error("unknown builtin tag; expected example1 or example2");
            out.model = MapModel(BuiltinMap(*tag));
        } else if (kind == "topical") {
            if (!doc.contains("dim") || !doc.contains("coords"))
                detail::doc_error("topical documents need \"dim\" and \"coords\"");
            const int dim = doc["dim"].get<int>();
            std::vector<TopicalExpr> coords;
            for (const auto& c : doc["coords"]) coords.push_back(detail::topical_from_json(c, dim));
            out.topical = TopicalMap(dim, std::move(coords));
        } else {
            detail::doc_error("unknown kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        detail::doc_error(e.what());
    } catch (const ValidationError& e) {
        detail::doc_error(e.what());
    }
    return out;
}

inline json to_json(const LoadedMap& loaded) {
    json doc;
    doc["kind"] = loaded.kind;
    if (loaded.kind == "topical") {
        const auto& t = *loaded.topical;
        doc["dim"] = t.dim();
        json coords = json::array();
        for (const auto& c : t.coords()) coords.push_back(detail::topical_to_json(c));
        doc["coords"] = coords;
        return doc;
    }
    const MapModel& m = *loaded.model;
    switch (m.kind()) {
        case MapKind::Matrix: {
            const Matrix& a = m.as_matrix()->matrix();
            json rows = json::array();
            for (int i = 0; i < a.rows; ++i) {
                json row = json::array();
                for (int j = 0; j < a.cols; ++j) row.push_back(a(i, j));
                rows.push_back(row);
            }
            doc["rows"] = rows;
            break;
        }
        case MapKind::Tensor: {
            const TensorMap& t = *m.as_tensor();
            doc["order"] = t.order();
            doc["dim"] = t.dim();
            json entries = json::array();
            for (const auto& e : t.entries()) {
                json row = json::array();
                for (int ix : e.index) row.push_back(ix + 1);
                row.push_back(e.value);
                entries.push_back(row);
            }
            doc["entries"] = entries;
            break;
        }
        case MapKind::Expr: {
            const ExprMap& ex = *m.as_expr();
            doc["dim"] = ex.dim();
            json coords = json::array();
            for (const auto& c : ex.coords()) coords.push_back(detail::expr_to_json(c));
            doc["coords"] = coords;
            break;
        }
        case MapKind::Builtin:
            doc["tag"] = BuiltinMap::tag_name(m.as_builtin()->tag());
            break;
    }
    return doc;
}

/// Canonical single-line serialization (sorted keys, shortest float form);
/// serialize(parse(text)) is idempotent.
inline std::string serialize_map_document(const LoadedMap& loaded) { return to_json(loaded).dump(); }

/// Loads a map document from text: JSON when it leads with '{', otherwise
/// the coordinate-list tensor format.
inline LoadedMap load_map_document(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return map_from_json(parse_json_text(text));
    std::istringstream in(text);
    LoadedMap out;
    out.kind = "tensor";
    out.model = MapModel(load_tensor_text(in));
    return out;
}

/// Loads a topical map: JSON documents of kind "topical" or the table form.
inline TopicalMap load_topical_document(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const LoadedMap loaded = map_from_json(parse_json_text(text));
        if (!loaded.topical)
            throw ParseError("mapspec: expected a document of kind \"topical\"");
        return *loaded.topical;
    }
    std::istringstream in(text);
    return load_mdp_table(in);
}

}  // namespace conefp
