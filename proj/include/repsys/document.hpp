#pragma once

// The experiment document: one JSON file per experiment, schema-validated
// before any command runs. Top-level keys: format_version, pieces, epieces,
// marked_map, flags, curve_universe, pullbacks, renorm_certificates,
// affine_spec, annuli_spec, constants, matrix. Rationals travel as "p/q"
// strings; matrices as row-major arrays of such strings. Parsing returns
// either a fully validated Document or a list of diagnostics with
// line/field paths, never a partially usable value.

#include "repsys/models.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace repsys {

inline constexpr int kFormatVersion = 1;

struct Document {
    int format_version = kFormatVersion;
    Presentation presentation;
    CurveUniverse universe;
    std::optional<PullbackTable> pullbacks;
    std::vector<RenormCertificate> certificates;
    std::optional<AffineSpec> affine_spec;
    std::optional<AnnuliSpec> annuli_spec;
    std::map<std::string, Rational> constants;
    std::optional<NonNegMatrix> matrix;

    Rational constant(const std::string& name, const Rational& fallback) const {
        const auto it = constants.find(name);
        return it == constants.end() ? fallback : it->second;
    }
};

struct ParseResult {
    std::optional<Document> document;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

namespace detail {

using Json = nlohmann::ordered_json;

class DocReader {
public:
    explicit DocReader(std::vector<Diagnostic>& out) : out_(out) {}

    void fail(const std::string& path, const std::string& message) {
        out_.push_back({"SchemaError", path + ": " + message});
    }

    bool expect_string(const Json& j, const std::string& path, std::string& into) {
        if (!j.is_string()) {
            fail(path, "expected a string");
            return false;
        }
        into = j.get<std::string>();
        return true;
    }

    bool expect_int(const Json& j, const std::string& path, int& into) {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return false;
        }
        into = j.get<int>();
        return true;
    }

    bool expect_bool(const Json& j, const std::string& path, bool& into) {
        if (!j.is_boolean()) {
            fail(path, "expected a boolean");
            return false;
        }
        into = j.get<bool>();
        return true;
    }

    bool expect_rational(const Json& j, const std::string& path, Rational& into) {
        std::string text;
        if (!expect_string(j, path, text)) return false;
        try {
            into = parse_rational(text);
        } catch (const Error& e) {
            fail(path, e.what());
            return false;
        }
        return true;
    }

    bool expect_string_array(const Json& j, const std::string& path,
                             std::vector<std::string>& into) {
        if (!j.is_array()) {
            fail(path, "expected an array of strings");
            return false;
        }
        bool ok = true;
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::string s;
            if (expect_string(j[i], path + "/" + std::to_string(i), s))
                into.push_back(s);
            else
                ok = false;
        }
        return ok;
    }

private:
    std::vector<Diagnostic>& out_;
};

inline std::string json_rational(const Rational& r) { return to_string(r); }

}  // namespace detail

inline ParseResult parse_document(const std::string& text) {
    ParseResult result;
    detail::DocReader reader(result.diagnostics);

    detail::Json root;
    try {
        root = detail::Json::parse(text);
    } catch (const detail::Json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        reader.fail("line " + std::to_string(line), e.what());
        return result;
    }
    if (!root.is_object()) {
        reader.fail("/", "document must be a JSON object");
        return result;
    }

    static const std::vector<std::string> known = {
        "format_version", "pieces",   "epieces",      "marked_map",
        "flags",          "curve_universe", "pullbacks", "renorm_certificates",
        "affine_spec",    "annuli_spec",    "constants", "matrix"};
    for (const auto& [key, _] : root.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            reader.fail("/" + key, "unknown key");

    Document doc;

    if (!root.contains("format_version")) {
        reader.fail("/format_version", "missing");
    } else if (!root["format_version"].is_number_integer() ||
               root["format_version"].get<int>() != kFormatVersion) {
        reader.fail("/format_version", "unsupported version (supported: " +
                                           std::to_string(kFormatVersion) + ")");
    }

    if (root.contains("pieces")) {
        const auto& pieces = root["pieces"];
        if (!pieces.is_array()) reader.fail("/pieces", "expected an array");
        else
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                const std::string path = "/pieces/" + std::to_string(i);
                const auto& pj = pieces[i];
                if (!pj.is_object()) {
                    reader.fail(path, "expected an object");
                    continue;
                }
                Piece piece;
                if (pj.contains("id")) reader.expect_string(pj["id"], path + "/id", piece.id);
                else reader.fail(path + "/id", "missing");
                if (pj.contains("boundary_curves"))
                    reader.expect_string_array(pj["boundary_curves"], path + "/boundary_curves",
                                               piece.boundary_curves);
                if (pj.contains("marked_points"))
                    reader.expect_string_array(pj["marked_points"], path + "/marked_points",
                                               piece.marked_points);
                doc.presentation.pieces.push_back(std::move(piece));
            }
    }

    if (root.contains("epieces")) {
        const auto& epieces = root["epieces"];
        if (!epieces.is_array()) reader.fail("/epieces", "expected an array");
        else
            for (std::size_t i = 0; i < epieces.size(); ++i) {
                const std::string path = "/epieces/" + std::to_string(i);
                const auto& ej = epieces[i];
                if (!ej.is_object()) {
                    reader.fail(path, "expected an object");
                    continue;
                }
                EPieceEmbedding e;
                if (ej.contains("id")) reader.expect_string(ej["id"], path + "/id", e.id);
                else reader.fail(path + "/id", "missing");
                if (ej.contains("host_piece"))
                    reader.expect_string(ej["host_piece"], path + "/host_piece", e.host_piece);
                else reader.fail(path + "/host_piece", "missing");
                if (ej.contains("image_piece"))
                    reader.expect_string(ej["image_piece"], path + "/image_piece", e.image_piece);
                else reader.fail(path + "/image_piece", "missing");
                if (ej.contains("degree")) reader.expect_int(ej["degree"], path + "/degree", e.degree);
                if (ej.contains("boundary")) {
                    const auto& bj = ej["boundary"];
                    if (!bj.is_array()) reader.fail(path + "/boundary", "expected an array");
                    else
                        for (std::size_t r = 0; r < bj.size(); ++r) {
                            const std::string rpath = path + "/boundary/" + std::to_string(r);
                            const auto& rj = bj[r];
                            if (!rj.is_object()) {
                                reader.fail(rpath, "expected an object");
                                continue;
                            }
                            BoundaryRecord rec;
                            if (rj.contains("curve"))
                                reader.expect_string(rj["curve"], rpath + "/curve", rec.curve);
                            else reader.fail(rpath + "/curve", "missing");
                            if (rj.contains("image_curve"))
                                reader.expect_string(rj["image_curve"], rpath + "/image_curve",
                                                     rec.image_curve);
                            else reader.fail(rpath + "/image_curve", "missing");
                            if (rj.contains("covering_degree"))
                                reader.expect_int(rj["covering_degree"], rpath + "/covering_degree",
                                                  rec.covering_degree);
                            if (rj.contains("inside")) {
                                std::vector<std::string> inside;
                                reader.expect_string_array(rj["inside"], rpath + "/inside", inside);
                                rec.inside = ObjectSet(inside.begin(), inside.end());
                            }
                            e.boundary.push_back(std::move(rec));
                        }
                }
                doc.presentation.epieces.push_back(std::move(e));
            }
    }

    if (root.contains("marked_map")) {
        const auto& mm = root["marked_map"];
        if (!mm.is_object()) reader.fail("/marked_map", "expected an object");
        else
            for (const auto& [from, to] : mm.items()) {
                std::string target;
                if (reader.expect_string(to, "/marked_map/" + from, target))
                    doc.presentation.marked_map[from] = target;
            }
    }

    if (root.contains("flags")) {
        const auto& fj = root["flags"];
        if (!fj.is_object()) reader.fail("/flags", "expected an object");
        else {
            if (fj.contains("pcf_asserted"))
                reader.expect_bool(fj["pcf_asserted"], "/flags/pcf_asserted",
                                   doc.presentation.flags.pcf_asserted);
            if (fj.contains("orbifold_not_2222"))
                reader.expect_bool(fj["orbifold_not_2222"], "/flags/orbifold_not_2222",
                                   doc.presentation.flags.orbifold_not_2222);
        }
    }

    if (root.contains("curve_universe")) {
        const auto& uj = root["curve_universe"];
        if (!uj.is_array()) reader.fail("/curve_universe", "expected an array");
        else
            for (std::size_t i = 0; i < uj.size(); ++i) {
                const std::string path = "/curve_universe/" + std::to_string(i);
                const auto& cj = uj[i];
                if (!cj.is_object()) {
                    reader.fail(path, "expected an object");
                    continue;
                }
                std::string id, piece_id;
                std::vector<std::string> side;
                bool ok = true;
                if (cj.contains("id")) ok &= reader.expect_string(cj["id"], path + "/id", id);
                else { reader.fail(path + "/id", "missing"); ok = false; }
                if (cj.contains("piece"))
                    ok &= reader.expect_string(cj["piece"], path + "/piece", piece_id);
                else { reader.fail(path + "/piece", "missing"); ok = false; }
                if (cj.contains("side"))
                    ok &= reader.expect_string_array(cj["side"], path + "/side", side);
                if (!ok) continue;
                if (id == "NULL" || id == "PERIPHERAL") {
                    reader.fail(path + "/id", "'" + id + "' is reserved");
                    continue;
                }
                const Piece* piece = doc.presentation.find_piece(piece_id);
                if (!piece) {
                    reader.fail(path + "/piece", "unknown piece '" + piece_id + "'");
                    continue;
                }
                for (const auto& o : side)
                    if (!piece->objects().count(o))
                        reader.fail(path + "/side", "object '" + o + "' not in piece '" + piece_id + "'");
                for (const auto& u : doc.universe) {
                    if (u.id == id) reader.fail(path + "/id", "duplicate curve id '" + id + "'");
                }
                CurveClass cls(*piece, ObjectSet(side.begin(), side.end()));
                for (const auto& u : doc.universe)
                    if (u.cls == cls)
                        reader.fail(path, "duplicate curve class (same bipartition as '" + u.id + "')");
                doc.universe.push_back({id, cls});
            }
    }

    if (root.contains("pullbacks")) {
        const auto& pj = root["pullbacks"];
        if (!pj.is_object()) reader.fail("/pullbacks", "expected an object");
        else {
            std::vector<std::string> ids;
            for (const auto& u : doc.universe) ids.push_back(u.id);
            std::map<std::string, std::vector<PreimageRecord>> rows;
            for (const auto& [curve, records] : pj.items()) {
                const std::string path = "/pullbacks/" + curve;
                if (std::find(ids.begin(), ids.end(), curve) == ids.end()) {
                    reader.fail(path, "curve '" + curve + "' is not in the universe");
                    continue;
                }
                if (!records.is_array()) {
                    reader.fail(path, "expected an array");
                    continue;
                }
                auto& row = rows[curve];
                for (std::size_t r = 0; r < records.size(); ++r) {
                    const std::string rpath = path + "/" + std::to_string(r);
                    const auto& rj = records[r];
                    if (!rj.is_object()) {
                        reader.fail(rpath, "expected an object");
                        continue;
                    }
                    std::string target;
                    int degree = 1;
                    if (rj.contains("target"))
                        reader.expect_string(rj["target"], rpath + "/target", target);
                    else reader.fail(rpath + "/target", "missing");
                    if (rj.contains("degree"))
                        reader.expect_int(rj["degree"], rpath + "/degree", degree);
                    if (degree < 1) {
                        reader.fail(rpath + "/degree", "must be positive");
                        continue;
                    }
                    if (target == "NULL") row.push_back(PreimageRecord::null(degree));
                    else if (target == "PERIPHERAL") row.push_back(PreimageRecord::peripheral(degree));
                    else if (std::find(ids.begin(), ids.end(), target) == ids.end())
                        reader.fail(rpath + "/target", "curve '" + target + "' is not in the universe");
                    else row.push_back(PreimageRecord::to_curve(target, degree));
                }
            }
            if (result.diagnostics.empty()) doc.pullbacks = PullbackTable(ids, rows);
        }
    }

    if (root.contains("renorm_certificates")) {
        const auto& cj = root["renorm_certificates"];
        if (!cj.is_array()) reader.fail("/renorm_certificates", "expected an array");
        else
            for (std::size_t i = 0; i < cj.size(); ++i) {
                const std::string path = "/renorm_certificates/" + std::to_string(i);
                RenormCertificate cert;
                if (cj[i].contains("cycle"))
                    reader.expect_string_array(cj[i]["cycle"], path + "/cycle", cert.cycle);
                else reader.fail(path + "/cycle", "missing");
                if (cj[i].contains("kind"))
                    reader.expect_string(cj[i]["kind"], path + "/kind", cert.kind);
                if (cert.kind != "pcf-unobstructed" && cert.kind != "holomorphic-steps")
                    reader.fail(path + "/kind",
                                "expected 'pcf-unobstructed' or 'holomorphic-steps'");
                doc.certificates.push_back(std::move(cert));
            }
    }

    if (root.contains("affine_spec")) {
        const auto& aj = root["affine_spec"];
        AffineSpec spec;
        int k = 0;
        if (aj.contains("intervals")) reader.expect_int(aj["intervals"], "/affine_spec/intervals", k);
        else reader.fail("/affine_spec/intervals", "missing");
        spec.intervals = k > 0 ? static_cast<std::size_t>(k) : 0;
        if (aj.contains("branches") && aj["branches"].is_array())
            for (std::size_t i = 0; i < aj["branches"].size(); ++i) {
                spec.branches.emplace_back();
                const std::string path = "/affine_spec/branches/" + std::to_string(i);
                for (std::size_t b = 0; b < aj["branches"][i].size(); ++b) {
                    const auto& bj = aj["branches"][i][b];
                    AffineBranch branch;
                    int target = 0;
                    if (bj.contains("target")) reader.expect_int(bj["target"], path + "/target", target);
                    branch.target = target >= 0 ? static_cast<std::size_t>(target) : 0;
                    if (bj.contains("slope")) reader.expect_int(bj["slope"], path + "/slope", branch.slope);
                    if (bj.contains("increasing"))
                        reader.expect_bool(bj["increasing"], path + "/increasing", branch.increasing);
                    spec.branches.back().push_back(branch);
                }
            }
        try {
            spec.validate();
            doc.affine_spec = std::move(spec);
        } catch (const Error& e) {
            reader.fail("/affine_spec", e.what());
        }
    }

    if (root.contains("annuli_spec")) {
        const auto& aj = root["annuli_spec"];
        AnnuliSpec spec;
        int k = 0;
        if (aj.contains("annuli")) reader.expect_int(aj["annuli"], "/annuli_spec/annuli", k);
        else reader.fail("/annuli_spec/annuli", "missing");
        spec.annuli = k > 0 ? static_cast<std::size_t>(k) : 0;
        if (aj.contains("branches") && aj["branches"].is_array())
            for (std::size_t i = 0; i < aj["branches"].size(); ++i) {
                spec.branches.emplace_back();
                const std::string path = "/annuli_spec/branches/" + std::to_string(i);
                for (std::size_t b = 0; b < aj["branches"][i].size(); ++b) {
                    const auto& bj = aj["branches"][i][b];
                    AnnulusBranch branch;
                    int target = 0;
                    if (bj.contains("target")) reader.expect_int(bj["target"], path + "/target", target);
                    branch.target = target >= 0 ? static_cast<std::size_t>(target) : 0;
                    if (bj.contains("degree")) reader.expect_int(bj["degree"], path + "/degree", branch.degree);
                    if (bj.contains("preserves_labels"))
                        reader.expect_bool(bj["preserves_labels"], path + "/preserves_labels",
                                           branch.preserves_labels);
                    spec.branches.back().push_back(branch);
                }
            }
        try {
            spec.validate();
            doc.annuli_spec = std::move(spec);
        } catch (const Error& e) {
            reader.fail("/annuli_spec", e.what());
        }
    }

    if (root.contains("constants")) {
        const auto& cj = root["constants"];
        if (!cj.is_object()) reader.fail("/constants", "expected an object");
        else
            for (const auto& [name, value] : cj.items()) {
                Rational r;
                if (reader.expect_rational(value, "/constants/" + name, r)) doc.constants[name] = r;
            }
    }

    if (root.contains("matrix")) {
        const auto& mj = root["matrix"];
        int n = 0;
        if (mj.contains("n")) reader.expect_int(mj["n"], "/matrix/n", n);
        else reader.fail("/matrix/n", "missing");
        if (n >= 0 && mj.contains("entries") && mj["entries"].is_array()) {
            const auto& entries = mj["entries"];
            if (entries.size() != static_cast<std::size_t>(n) * n)
                reader.fail("/matrix/entries", "expected n*n entries");
            else {
                NonNegMatrix m(n);
                bool ok = true;
                for (int i = 0; i < n && ok; ++i)
                    for (int j = 0; j < n && ok; ++j) {
                        Rational r;
                        ok = reader.expect_rational(entries[i * n + j],
                                                    "/matrix/entries/" + std::to_string(i * n + j), r);
                        if (ok && r < 0) {
                            reader.fail("/matrix/entries", "negative entry");
                            ok = false;
                        }
                        if (ok) m.set(i, j, r);
                    }
                if (ok) doc.matrix = std::move(m);
            }
        }
    }

    // structural validation of the presentation itself
    for (const auto& d : validate_presentation(doc.presentation))
        result.diagnostics.push_back(d);

    if (result.diagnostics.empty()) result.document = std::move(doc);
    return result;
}

inline ParseResult load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({"IoError", "cannot read '" + path + "'"});
        return r;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str());
}

inline std::string serialize_document(const Document& doc) {
    using detail::Json;
    Json root = Json::object();
    root["format_version"] = doc.format_version;

    root["pieces"] = Json::array();
    for (const auto& piece : doc.presentation.pieces) {
        Json pj = Json::object();
        pj["id"] = piece.id;
        pj["boundary_curves"] = piece.boundary_curves;
        pj["marked_points"] = piece.marked_points;
        root["pieces"].push_back(pj);
    }

    root["epieces"] = Json::array();
    for (const auto& e : doc.presentation.epieces) {
        Json ej = Json::object();
        ej["id"] = e.id;
        ej["host_piece"] = e.host_piece;
        ej["image_piece"] = e.image_piece;
        ej["degree"] = e.degree;
        ej["boundary"] = Json::array();
        for (const auto& r : e.boundary) {
            Json rj = Json::object();
            rj["curve"] = r.curve;
            rj["image_curve"] = r.image_curve;
            rj["covering_degree"] = r.covering_degree;
            rj["inside"] = std::vector<std::string>(r.inside.begin(), r.inside.end());
            ej["boundary"].push_back(rj);
        }
        root["epieces"].push_back(ej);
    }

    if (!doc.presentation.marked_map.empty()) {
        Json mj = Json::object();
        for (const auto& [from, to] : doc.presentation.marked_map) mj[from] = to;
        root["marked_map"] = mj;
    }

    if (doc.presentation.flags.pcf_asserted || doc.presentation.flags.orbifold_not_2222) {
        Json fj = Json::object();
        fj["pcf_asserted"] = doc.presentation.flags.pcf_asserted;
        fj["orbifold_not_2222"] = doc.presentation.flags.orbifold_not_2222;
        root["flags"] = fj;
    }

    if (!doc.universe.empty()) {
        root["curve_universe"] = Json::array();
        for (const auto& u : doc.universe) {
            Json cj = Json::object();
            cj["id"] = u.id;
            cj["piece"] = u.cls.piece();
            cj["side"] = std::vector<std::string>(u.cls.side().begin(), u.cls.side().end());
            root["curve_universe"].push_back(cj);
        }
    }

    if (doc.pullbacks) {
        Json pj = Json::object();
        for (const auto& [curve, records] : doc.pullbacks->rows()) {
            Json row = Json::array();
            for (const auto& r : records) {
                Json rj = Json::object();
                switch (r.target) {
                    case PreimageRecord::Target::Curve: rj["target"] = r.curve; break;
                    case PreimageRecord::Target::Null: rj["target"] = "NULL"; break;
                    case PreimageRecord::Target::Peripheral: rj["target"] = "PERIPHERAL"; break;
                }
                rj["degree"] = r.degree;
                row.push_back(rj);
            }
            pj[curve] = row;
        }
        root["pullbacks"] = pj;
    }

    if (!doc.certificates.empty()) {
        root["renorm_certificates"] = Json::array();
        for (const auto& cert : doc.certificates) {
            Json cj = Json::object();
            cj["cycle"] = cert.cycle;
            cj["kind"] = cert.kind;
            root["renorm_certificates"].push_back(cj);
        }
    }

    if (doc.affine_spec) {
        Json aj = Json::object();
        aj["intervals"] = static_cast<int>(doc.affine_spec->intervals);
        aj["branches"] = Json::array();
        for (const auto& row : doc.affine_spec->branches) {
            Json rj = Json::array();
            for (const auto& b : row) {
                Json bj = Json::object();
                bj["target"] = static_cast<int>(b.target);
                bj["slope"] = b.slope;
                bj["increasing"] = b.increasing;
                rj.push_back(bj);
            }
            aj["branches"].push_back(rj);
        }
        root["affine_spec"] = aj;
    }

    if (doc.annuli_spec) {
        Json aj = Json::object();
        aj["annuli"] = static_cast<int>(doc.annuli_spec->annuli);
        aj["branches"] = Json::array();
        for (const auto& row : doc.annuli_spec->branches) {
            Json rj = Json::array();
            for (const auto& b : row) {
                Json bj = Json::object();
                bj["target"] = static_cast<int>(b.target);
                bj["degree"] = b.degree;
                bj["preserves_labels"] = b.preserves_labels;
                rj.push_back(bj);
            }
            aj["branches"].push_back(rj);
        }
        root["annuli_spec"] = aj;
    }

    if (!doc.constants.empty()) {
        Json cj = Json::object();
        for (const auto& [name, value] : doc.constants) cj[name] = detail::json_rational(value);
        root["constants"] = cj;
    }

    if (doc.matrix) {
        Json mj = Json::object();
        const std::size_t n = doc.matrix->size();
        mj["n"] = static_cast<int>(n);
        Json entries = Json::array();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                entries.push_back(detail::json_rational((*doc.matrix)(i, j)));
        mj["entries"] = entries;
        root["matrix"] = mj;
    }

    return root.dump(2) + "\n";
}

}  // namespace repsys
