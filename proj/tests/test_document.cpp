#include <catch_amalgamated.hpp>

#include <repsys/document.hpp>
#include <repsys/presets.hpp>

#include <fstream>
#include <sstream>

using namespace repsys;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const std::string kPresetDir = std::string(REPSYS_SOURCE_DIR) + "/presets/";

}  // namespace

TEST_CASE("shipped presets parse and match the builders") {
    for (const auto& [name, doc] : presets::corpus()) {
        INFO(name);
        const std::string on_disk = read_file(kPresetDir + name + ".json");
        REQUIRE(on_disk == serialize_document(doc));
        const auto parsed = load_document(kPresetDir + name + ".json");
        REQUIRE(parsed.ok());
    }
}

TEST_CASE("parse then serialize is the identity on valid documents") {
    for (const auto& [name, doc] : presets::corpus()) {
        INFO(name);
        const std::string once = serialize_document(doc);
        const auto parsed = parse_document(once);
        REQUIRE(parsed.ok());
        REQUIRE(serialize_document(*parsed.document) == once);
    }
}

TEST_CASE("exact rationals survive the round trip bit-for-bit") {
    Document doc;
    doc.matrix = NonNegMatrix::from_rows(
        {{parse_rational("123456789123456789/987654321987654323"), Rational(0)},
         {parse_rational("1/3"), parse_rational("7")}});
    doc.constants["C"] = parse_rational("22/7");
    const auto parsed = parse_document(serialize_document(doc));
    REQUIRE(parsed.ok());
    REQUIRE(*parsed.document->matrix == *doc.matrix);
    REQUIRE(parsed.document->constants.at("C") == parse_rational("22/7"));
}

TEST_CASE("diagnostics") {
    SECTION("duplicated curve id") {
        auto doc = presets::trousers_v1();
        doc.presentation.pieces[0].boundary_curves.push_back("g_0");
        const auto parsed = parse_document(serialize_document(doc));
        REQUIRE_FALSE(parsed.ok());
        bool found = false;
        for (const auto& d : parsed.diagnostics) found = found || d.code == "DuplicateId";
        REQUIRE(found);
    }
    SECTION("unknown format version names the supported one") {
        const auto parsed = parse_document(R"({"format_version": 99})");
        REQUIRE_FALSE(parsed.ok());
        REQUIRE(parsed.diagnostics[0].message.find("supported: 1") != std::string::npos);
    }
    SECTION("malformed json reports the line") {
        const auto parsed = parse_document("{\n  \"pieces\": [\n  oops\n]}");
        REQUIRE_FALSE(parsed.ok());
        REQUIRE(parsed.diagnostics[0].message.find("line 3") != std::string::npos);
    }
    SECTION("unknown top-level keys are rejected") {
        const auto parsed = parse_document(R"({"format_version": 1, "surprise": 1})");
        REQUIRE_FALSE(parsed.ok());
    }
    SECTION("pullback rows must live in the universe") {
        const auto parsed = parse_document(R"({
            "format_version": 1,
            "pieces": [{"id": "S", "boundary_curves": ["a", "b", "c"], "marked_points": []}],
            "curve_universe": [{"id": "u", "piece": "S", "side": ["a"]}],
            "pullbacks": {"ghost": [{"target": "u", "degree": 2}]}
        })");
        REQUIRE_FALSE(parsed.ok());
    }
    SECTION("reserved target names parse as tags") {
        const auto parsed = parse_document(R"({
            "format_version": 1,
            "pieces": [{"id": "S", "boundary_curves": ["a", "b", "c"], "marked_points": []}],
            "curve_universe": [{"id": "u", "piece": "S", "side": ["a"]}],
            "pullbacks": {"u": [{"target": "NULL", "degree": 2},
                                {"target": "PERIPHERAL", "degree": 1}]}
        })");
        REQUIRE(parsed.ok());
        const auto& row = parsed.document->pullbacks->row("u");
        REQUIRE(row.size() == 2);
        REQUIRE_FALSE(row[0].is_curve());
    }
    SECTION("the invalid fixture used by the CLI tests stays invalid") {
        const auto parsed =
            load_document(std::string(REPSYS_SOURCE_DIR) + "/tests/data/duplicate-curve.json");
        REQUIRE_FALSE(parsed.ok());
    }
}
