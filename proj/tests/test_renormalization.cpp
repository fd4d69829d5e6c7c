#include <catch_amalgamated.hpp>

#include <repsys/presets.hpp>
#include <repsys/renormalization.hpp>

#include <cmath>

using namespace repsys;

TEST_CASE("parallel_piece") {
    SECTION("quadratic preset: the four-holed piece is parallel") {
        const auto doc = presets::z2minus1().presentation;
        const auto found = parallel_piece(doc, *doc.find_piece("S"));
        REQUIRE(found == "E");
        REQUIRE(doc.find_epiece("E")->boundary.size() == 4);
    }
    SECTION("a hole with two boundary curves disqualifies") {
        const auto doc = presets::example4().presentation;
        // E_SA1's second hole holds {g2, g3}; E_SS is the unique candidate
        REQUIRE(parallel_piece(doc, *doc.find_piece("S")) == "E_SS");
    }
    SECTION("an omitted marked point disqualifies") {
        Presentation p;
        p.pieces.push_back(Piece{"S", {"g1", "g2", "g3"}, {"m"}});
        EPieceEmbedding e{"E", "S", "S", 2,
                          {{"b1", "g1", 2, {"g1", "m"}},  // marked point in a hole
                           {"b2", "g2", 2, {"g2"}},
                           {"b3", "g3", 2, {"g3"}}}};
        p.epieces.push_back(e);
        REQUIRE_FALSE(parallel_piece(p, p.pieces[0]).has_value());
    }
    SECTION("two candidates violate constant complexity") {
        Presentation p;
        p.pieces.push_back(Piece{"S", {"g1", "g2", "g3"}, {}});
        EPieceEmbedding e1{"E1", "S", "S", 2,
                           {{"x1", "g1", 2, {"g1"}},
                            {"x2", "g2", 2, {"g2"}},
                            {"x3", "g3", 2, {"g3"}}}};
        EPieceEmbedding e2 = e1;
        e2.id = "E2";
        e2.boundary[0].curve = "y1";
        e2.boundary[1].curve = "y2";
        e2.boundary[2].curve = "y3";
        p.epieces = {e1, e2};
        REQUIRE_THROWS_AS(parallel_piece(p, p.pieces[0]), NotConstantComplexity);
    }
    SECTION("requires a complex piece") {
        Presentation p;
        p.pieces.push_back(Piece{"O", {"q"}, {}});
        REQUIRE_THROWS_AS(parallel_piece(p, p.pieces[0]), Error);
    }
}

TEST_CASE("check_constant_complexity") {
    REQUIRE(check_constant_complexity(presets::z2minus1().presentation).ok);
    const auto report = check_constant_complexity(presets::example4().presentation);
    REQUIRE(report.ok);
    REQUIRE(report.parallel.at("S") == "E_SS");

    Presentation bare;
    bare.pieces.push_back(Piece{"S", {"g1", "g2", "g3"}, {}});
    const auto failing = check_constant_complexity(bare);
    REQUIRE_FALSE(failing.ok);
    REQUIRE_FALSE(failing.failures.empty());
}

TEST_CASE("star_map") {
    SECTION("quadratic preset has one fixed complex piece") {
        const auto sm = star_map(presets::z2minus1().presentation);
        REQUIRE(sm.next.at("S") == "S");
        REQUIRE(sm.cycles == std::vector<std::vector<std::string>>{{"S"}});
    }
    SECTION("example 4 fixes its pants piece") {
        const auto sm = star_map(presets::example4().presentation);
        REQUIRE(sm.cycles == std::vector<std::vector<std::string>>{{"S"}});
    }
    SECTION("two complex pieces swapping form a 2-cycle") {
        const auto sm = star_map(presets::period2_cycle().presentation);
        REQUIRE(sm.next.at("S1") == "S2");
        REQUIRE(sm.next.at("S2") == "S1");
        REQUIRE(sm.cycles == std::vector<std::vector<std::string>>{{"S1", "S2"}});
    }
}

TEST_CASE("extract_renormalization") {
    SECTION("quadratic preset: period one, subunit boundary block") {
        const auto doc = presets::z2minus1();
        const auto d = extract_renormalization(doc.presentation, {"S"}, doc.universe,
                                               *doc.pullbacks);
        REQUIRE(d.period == 1);
        REQUIRE(d.parallel_epieces == std::vector<std::string>{"E"});
        REQUIRE(d.cycle_boundary_matrix.index.size() == 3);
        REQUIRE(subunit_certificate(d.cycle_boundary_matrix.matrix).is_subunit());

        // boundary correspondence carries (gamma, beta, degree, image)
        const auto& corr = d.boundary.at("S");
        REQUIRE(corr.size() == 3);
        REQUIRE(corr[1].boundary_curve == "g_0");
        REQUIRE(corr[1].e_curve == "b_0");
        REQUIRE(corr[1].degree == 2);
        REQUIRE(corr[1].image_curve == "g_m1");
    }

    SECTION("example 4: the cycle matrix is the upper block of the boundary matrix") {
        const auto doc = presets::example4();
        const auto d = extract_renormalization(doc.presentation, {"S"}, doc.universe,
                                               *doc.pullbacks);
        const auto y = boundary_obstruction_check(doc.presentation, doc.universe, *doc.pullbacks);
        REQUIRE(y.boundary_matrix.index.size() == 4);
        REQUIRE(d.cycle_boundary_matrix.index == std::vector<std::string>{"g1", "g2", "g3"});
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                REQUIRE(d.cycle_boundary_matrix.matrix(i, j) == y.boundary_matrix.matrix(i, j));
        // the expected block [[0,1/2,0],[1,0,0],[0,0,1/2]]
        REQUIRE(d.cycle_boundary_matrix.matrix(0, 1) == parse_rational("1/2"));
        REQUIRE(d.cycle_boundary_matrix.matrix(1, 0) == 1);
        REQUIRE(d.cycle_boundary_matrix.matrix(2, 2) == parse_rational("1/2"));
    }

    SECTION("period two: composed table equals the square of the one-step matrix") {
        const auto doc = presets::period2_cycle();
        const auto d = extract_renormalization(doc.presentation, {"S1", "S2"}, doc.universe,
                                               *doc.pullbacks);
        REQUIRE(d.period == 2);
        const auto composed = transition_matrix(d.composed_table.universe(), d.composed_table);
        const auto single = transition_matrix(d.composed_table.universe(), *doc.pullbacks);
        REQUIRE(composed.matrix == single.matrix.multiply(single.matrix));
    }

    SECTION("missing pullback rows surface as coverage gaps") {
        auto doc = presets::z2minus1();
        auto rows = doc.pullbacks->rows();
        rows.erase("c_m1");
        const PullbackTable partial(doc.pullbacks->universe(), rows);
        REQUIRE_THROWS_AS(
            extract_renormalization(doc.presentation, {"S"}, doc.universe, partial), CoverageGap);
    }
}

TEST_CASE("boundary_obstruction_check") {
    SECTION("first trousers wiring passes with an exact witness") {
        const auto doc = presets::trousers_v1();
        const auto v = boundary_obstruction_check(doc.presentation, doc.universe, *doc.pullbacks);
        REQUIRE_FALSE(v.obstructed);
        REQUIRE(v.witness.has_value());
        const auto wv = v.boundary_matrix.matrix.apply(v.witness->v);
        for (std::size_t i = 0; i < wv.size(); ++i) REQUIRE(wv[i] < v.witness->v[i]);
    }
    SECTION("second trousers wiring is obstructed") {
        const auto doc = presets::trousers_v2();
        const auto v = boundary_obstruction_check(doc.presentation, doc.universe, *doc.pullbacks);
        REQUIRE(v.obstructed);
        REQUIRE(v.certificate.has_value());
        REQUIRE(v.certificate->lambda_lower_bound >= 1 - parse_rational("1/1000000000"));
    }
    SECTION("empty boundary multicurve cannot be obstructed") {
        const auto doc = presets::example1_discs();
        PullbackTable empty({}, {});
        const auto v = boundary_obstruction_check(doc.presentation, {}, empty);
        REQUIRE(v.y_empty);
        REQUIRE_FALSE(v.obstructed);
    }
    SECTION("coverage gap when a boundary class is missing from the universe") {
        const auto doc = presets::trousers_v1();
        CurveUniverse partial(doc.universe.begin(), doc.universe.begin() + 2);
        REQUIRE_THROWS_AS(
            boundary_obstruction_check(doc.presentation, partial, *doc.pullbacks), CoverageGap);
    }
}

TEST_CASE("renormalized_obstruction_check") {
    SECTION("quadratic preset is unobstructed within its universe") {
        const auto doc = presets::z2minus1();
        const auto d = extract_renormalization(doc.presentation, {"S"}, doc.universe,
                                               *doc.pullbacks);
        const auto verdict = renormalized_obstruction_check(d);
        REQUIRE_FALSE(verdict.obstructed);
        REQUIRE(verdict.scope == "within-universe");
    }
    SECTION("a fixed curve of total weight one obstructs") {
        const auto doc = presets::trousers_v2();
        const auto d = extract_renormalization(doc.presentation, {"S"}, doc.universe,
                                               *doc.pullbacks);
        const auto verdict = renormalized_obstruction_check(d);
        REQUIRE(verdict.obstructed);
        REQUIRE(verdict.irreducible_matrix.matrix(0, 0) == 1);
    }
    SECTION("example 4 is unobstructed when its block is subunit") {
        const auto doc = presets::example4();
        const auto d = extract_renormalization(doc.presentation, {"S"}, doc.universe,
                                               *doc.pullbacks);
        REQUIRE_FALSE(renormalized_obstruction_check(d).obstructed);
    }
}

TEST_CASE("analytization_verdict") {
    SECTION("example 4 passes through the certificate branch") {
        const auto doc = presets::example4();
        const auto report = analytization_verdict(doc.presentation, doc.universe, *doc.pullbacks,
                                                  doc.certificates);
        REQUIRE(report.status == AnalytizationStatus::Pass);
        REQUIRE(report.cycles.size() == 1);
        REQUIRE(report.cycles[0].branch == "pcf-certificate");
    }
    SECTION("period two passes through the composed-table branch") {
        const auto doc = presets::period2_cycle();
        const auto report = analytization_verdict(doc.presentation, doc.universe, *doc.pullbacks,
                                                  doc.certificates);
        REQUIRE(report.status == AnalytizationStatus::Pass);
        REQUIRE(report.cycles[0].branch == "holomorphic-steps");
    }
    SECTION("a boundary obstruction fails regardless of certificates") {
        const auto doc = presets::trousers_v2();
        const auto report = analytization_verdict(doc.presentation, doc.universe, *doc.pullbacks,
                                                  {{{"S"}, "pcf-unobstructed"}});
        REQUIRE(report.status == AnalytizationStatus::Fail);
        REQUIRE(report.detail == "boundary obstruction");
    }
    SECTION("missing certificates are indeterminate, never a silent pass") {
        const auto doc = presets::z2minus1();
        const auto report =
            analytization_verdict(doc.presentation, doc.universe, *doc.pullbacks, {});
        REQUIRE(report.status == AnalytizationStatus::Indeterminate);
        REQUIRE(report.cycles[0].branch == "missing-certificate");
    }
    SECTION("constant complexity failures are indeterminate") {
        Presentation bare;
        bare.pieces.push_back(Piece{"S", {"g1", "g2", "g3"}, {}});
        PullbackTable empty({}, {});
        const auto report = analytization_verdict(bare, {}, empty, {});
        REQUIRE(report.status == AnalytizationStatus::Indeterminate);
        REQUIRE(report.detail.find("constant complexity") != std::string::npos);
    }
}

TEST_CASE("boundary verdict is invariant under relabeling") {
    // same combinatorics as trousers v1, all ids permuted
    const auto doc = presets::trousers_v1();
    Document relabeled;
    relabeled.presentation.pieces.push_back(Piece{"Z", {"k2", "k1", "k3"}, {}});
    EPieceEmbedding e{"W",
                      "Z",
                      "Z",
                      2,
                      {{"w0", "k1", 2, {"k2"}},
                       {"w1", "k2", 1, {"k1"}},
                       {"w2", "k3", 2, {"k3"}},
                       {"w3", "k2", 1, {}}}};
    relabeled.presentation.epieces.push_back(e);
    const Piece& z = relabeled.presentation.pieces[0];
    relabeled.universe = {{"q0", CurveClass(z, {"k2"})},
                          {"q1", CurveClass(z, {"k1"})},
                          {"q2", CurveClass(z, {"k3"})}};
    relabeled.pullbacks = PullbackTable(
        {"q0", "q1", "q2"},
        {{"q0", {PreimageRecord::to_curve("q1", 1), PreimageRecord::null(1)}},
         {"q1", {PreimageRecord::to_curve("q0", 2)}},
         {"q2", {PreimageRecord::to_curve("q2", 2)}}});

    const auto a = boundary_obstruction_check(doc.presentation, doc.universe, *doc.pullbacks);
    const auto b = boundary_obstruction_check(relabeled.presentation, relabeled.universe,
                                              *relabeled.pullbacks);
    REQUIRE(a.obstructed == b.obstructed);
    REQUIRE_FALSE(b.obstructed);
}

TEST_CASE("pullbacks of boundary classes stay in boundary classes on presets") {
    // stability of the boundary multicurve on every constant-complexity preset
    for (const auto& [name, doc] : presets::corpus()) {
        if (!doc.pullbacks || doc.universe.empty()) continue;
        const auto y = boundary_multicurve(doc.presentation);
        REQUIRE(is_multicurve(doc.presentation, y.classes()).ok);
        std::vector<std::string> y_ids;
        for (const auto& entry : y.entries)
            y_ids.push_back(universe_lookup(doc.universe, entry.cls).value());
        const auto pulled = pullback(y_ids, *doc.pullbacks);
        for (const auto& id : pulled) {
            INFO(name << ": pullback of the boundary multicurve contains " << id);
            REQUIRE(std::find(y_ids.begin(), y_ids.end(), id) != y_ids.end());
        }
    }
}
