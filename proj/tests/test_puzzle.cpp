#include <catch_amalgamated.hpp>

#include <repsys/puzzle.hpp>

#include <algorithm>
#include <functional>
#include <random>

using namespace repsys;

namespace {

Piece pants(std::string id, std::string a, std::string b, std::string c) {
    return Piece{std::move(id), {std::move(a), std::move(b), std::move(c)}, {}};
}

// The quadratic-map presentation: one pants piece, one embedded piece of
// degree two with four boundary curves, three of its holes holding one host
// boundary curve each and one hole trivial.
Presentation quadratic_preset() {
    Presentation p;
    p.pieces.push_back(pants("S", "g_inf", "g_0", "g_m1"));
    EPieceEmbedding e;
    e.id = "E";
    e.host_piece = "S";
    e.image_piece = "S";
    e.degree = 2;
    e.boundary = {
        {"b_inf", "g_inf", 2, {"g_inf"}},
        {"b_0", "g_m1", 2, {"g_0"}},
        {"b_m1", "g_0", 1, {"g_m1"}},
        {"b_p1", "g_0", 1, {}},
    };
    p.epieces.push_back(e);
    return p;
}

}  // namespace

TEST_CASE("classify_curve") {
    const Piece trousers = pants("L", "c0", "c1", "c2");
    SECTION("boundary-parallel side") {
        const auto k = classify_curve(trousers, {"c0"});
        REQUIRE(k.kind == CurveKind::Kind::BoundaryParallel);
        REQUIRE(k.object == "c0");
    }
    SECTION("peripheral around a marked point") {
        const Piece disc{"D", {"b"}, {"a"}};
        const auto k = classify_curve(disc, {"a"});
        REQUIRE(k.kind == CurveKind::Kind::Peripheral);
        REQUIRE(k.object == "a");
    }
    SECTION("essential when both sides have two objects") {
        const Piece piece{"S", {"g1", "g2", "g3"}, {"p1"}};
        REQUIRE(classify_curve(piece, {"g2", "p1"}).kind == CurveKind::Kind::Essential);
    }
    SECTION("empty side is null-homotopic") {
        REQUIRE(classify_curve(trousers, {}).kind == CurveKind::Kind::NullHomotopic);
    }
    SECTION("unknown object") {
        REQUIRE_THROWS_AS(classify_curve(trousers, {"nope"}), Error);
    }
}

TEST_CASE("classify_piece follows the type table") {
    REQUIRE(classify_piece(pants("x", "a", "b", "c")) == PieceType::C);
    REQUIRE(classify_piece(Piece{"x", {"a", "b"}, {}}) == PieceType::A);
    REQUIRE(classify_piece(Piece{"x", {"a"}, {"p"}}) == PieceType::R);
    REQUIRE(classify_piece(Piece{"x", {"a"}, {}}) == PieceType::O);
    REQUIRE(classify_piece(Piece{"x", {"a", "b"}, {"p"}}) == PieceType::C);
    REQUIRE_THROWS_AS(classify_piece(Piece{"x", {}, {"p"}}), Error);
}

TEST_CASE("is_multicurve") {
    Presentation p;
    p.pieces.push_back(Piece{"S", {"g1", "g2", "g3", "g4"}, {"p1"}});
    const Piece& s = p.pieces[0];

    SECTION("nested sides are laminar") {
        const Multicurve mc{CurveClass(s, {"g1", "g2"}), CurveClass(s, {"g1", "g2", "p1"})};
        REQUIRE(is_multicurve(p, mc).ok);
    }
    SECTION("opposite sides of one bipartition are the same class") {
        const Multicurve mc{CurveClass(s, {"g1", "g2"}), CurveClass(s, {"g3", "g4", "p1"})};
        const auto check = is_multicurve(p, mc);
        REQUIRE_FALSE(check.ok);
        REQUIRE_FALSE(check.violations.empty());
    }
    SECTION("crossing sides are rejected") {
        Presentation q;
        q.pieces.push_back(Piece{"T", {"g1", "g2", "g3", "g4"}, {}});
        const Piece& t = q.pieces[0];
        // sides {g1,g2} vs {g2,g3}: not nested, not disjoint, union not all
        const Multicurve mc{CurveClass(t, {"g1", "g2"}), CurveClass(t, {"g2", "g3"})};
        REQUIRE_FALSE(is_multicurve(q, mc).ok);
    }
    SECTION("peripheral member is rejected, boundary-parallel accepted") {
        REQUIRE_FALSE(is_multicurve(p, {CurveClass(s, {"p1"})}).ok);
        REQUIRE(is_multicurve(p, {CurveClass(s, {"g1"})}).ok);
    }
}

TEST_CASE("classify_curve is side-symmetric") {
    const Piece piece{"S", {"g1", "g2", "g3"}, {"p1", "p2"}};
    const auto objects = piece.objects();
    std::vector<std::string> obj(objects.begin(), objects.end());
    for (unsigned mask = 0; mask < (1u << obj.size()); ++mask) {
        ObjectSet side, complement;
        for (std::size_t i = 0; i < obj.size(); ++i)
            (mask & (1u << i) ? side : complement).insert(obj[i]);
        const auto a = classify_curve(piece, side);
        const auto b = classify_curve(piece, complement);
        REQUIRE(a.kind == b.kind);
        REQUIRE(a.object == b.object);
    }
}

TEST_CASE("maximum laminar essential family has n-3 classes") {
    // exhaustive over all bipartition classes for pieces with n <= 7 objects
    for (std::size_t n = 4; n <= 7; ++n) {
        Piece piece;
        piece.id = "S";
        for (std::size_t i = 0; i + 1 < n; ++i)
            piece.boundary_curves.push_back("g" + std::to_string(i));
        piece.marked_points.push_back("p");
        Presentation p;
        p.pieces.push_back(piece);
        const Piece& s = p.pieces[0];

        std::vector<std::string> obj;
        for (const auto& o : s.objects()) obj.push_back(o);

        std::vector<CurveClass> classes;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            ObjectSet side;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) side.insert(obj[i]);
            if (!classify_curve(s, side).essential()) continue;
            CurveClass c(s, side);
            if (std::find(classes.begin(), classes.end(), c) == classes.end())
                classes.push_back(c);
        }

        // branch and bound for the largest pairwise-laminar subset
        std::size_t best = 0;
        const ObjectSet all = s.objects();
        const auto compatible = [&](const CurveClass& a, const CurveClass& b) {
            return detail::bipartitions_compatible(all, a.side(), b.side());
        };
        const std::function<void(std::size_t, std::vector<const CurveClass*>&)> extend =
            [&](std::size_t from, std::vector<const CurveClass*>& chosen) {
                best = std::max(best, chosen.size());
                if (chosen.size() + (classes.size() - from) <= best) return;
                for (std::size_t i = from; i < classes.size(); ++i) {
                    bool ok = true;
                    for (const auto* c : chosen) ok = ok && compatible(*c, classes[i]);
                    if (!ok) continue;
                    chosen.push_back(&classes[i]);
                    extend(i + 1, chosen);
                    chosen.pop_back();
                }
            };
        std::vector<const CurveClass*> chosen;
        extend(0, chosen);
        REQUIRE(best == n - 3);

        // a maximal nested family is accepted by the validator
        Multicurve nested;
        std::vector<std::string> ordered(obj.begin(), obj.end());
        for (std::size_t k = 2; k + 1 < n; ++k)
            nested.push_back(CurveClass(s, ObjectSet(ordered.begin(), ordered.begin() + k)));
        REQUIRE(nested.size() == n - 3);
        REQUIRE(is_multicurve(p, nested).ok);
    }
}

TEST_CASE("filled_in") {
    const Presentation p = quadratic_preset();
    const EPieceEmbedding& e = p.epieces[0];
    const ObjectSet protected_all = p.pieces[0].objects();

    SECTION("trivial hole is removed, protected holes are kept") {
        const auto filled = filled_in(e, protected_all);
        REQUIRE(filled.boundary.size() == 3);
        REQUIRE(filled.find_record("b_p1") == nullptr);
        REQUIRE(filled.find_record("b_inf") != nullptr);
    }
    SECTION("unprotected hole is removed") {
        const auto filled = filled_in(e, ObjectSet{"g_inf", "g_0"});
        REQUIRE(filled.boundary.size() == 2);
        REQUIRE(filled.find_record("b_m1") == nullptr);
    }
    SECTION("idempotent") {
        const auto once = filled_in(e, protected_all);
        const auto twice = filled_in(once, protected_all);
        REQUIRE(once.boundary.size() == twice.boundary.size());
        for (const auto& r : once.boundary) REQUIRE(twice.find_record(r.curve) != nullptr);
    }
    SECTION("absorbed nested piece") {
        Presentation q = quadratic_preset();
        // a small piece living inside the trivial hole of E
        EPieceEmbedding inner;
        inner.id = "E_inner";
        inner.host_piece = "S";
        inner.image_piece = "S";
        inner.degree = 1;
        inner.boundary = {{"b_in", "g_inf", 1, {"g_inf", "g_0", "g_m1"}}};
        q.epieces.push_back(inner);
        REQUIRE(validate_presentation(q).empty());

        const auto filled = filled_in(q.epieces[0], q.pieces[0].objects());
        const auto absorbed = absorbed_epieces(q, q.epieces[0], filled);
        REQUIRE(absorbed == std::vector<std::string>{"E_inner"});
    }
}

TEST_CASE("filled_in monotonicity on randomized nested embeddings") {
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        // e_small sits inside e_big: every hole of e_big is contained in a
        // hole of e_small
        Piece host;
        host.id = "S";
        for (int i = 0; i < 6; ++i) host.boundary_curves.push_back("g" + std::to_string(i));
        host.marked_points = {"p0", "p1"};
        std::vector<std::string> obj;
        for (const auto& o : host.objects()) obj.push_back(o);
        std::shuffle(obj.begin(), obj.end(), rng);

        EPieceEmbedding small, big;
        small.id = "small";
        big.id = "big";
        std::size_t at = 0;
        int hole = 0;
        while (at < obj.size()) {
            std::uniform_int_distribution<std::size_t> len(1, obj.size() - at);
            const std::size_t take = len(rng);
            ObjectSet h(obj.begin() + at, obj.begin() + at + take);
            at += take;
            ObjectSet g;
            for (const auto& o : h)
                if (coin(rng)) g.insert(o);
            const std::string idx = std::to_string(hole++);
            small.boundary.push_back({"s" + idx, "", 1, h});
            big.boundary.push_back({"b" + idx, "", 1, g});
        }

        ObjectSet protected_objects;
        for (const auto& o : obj)
            if (coin(rng)) protected_objects.insert(o);

        const auto fs = filled_in(small, protected_objects);
        const auto fb = filled_in(big, protected_objects);

        // nesting is preserved
        for (const auto& rb : fb.boundary) {
            bool covered = false;
            for (const auto& rs : fs.boundary)
                covered = covered || detail::subset(rb.inside, rs.inside);
            REQUIRE(covered);
        }
        // and filling is idempotent
        const auto fs2 = filled_in(fs, protected_objects);
        REQUIRE(fs2.boundary.size() == fs.boundary.size());
    }
}

TEST_CASE("boundary_multicurve") {
    SECTION("trousers give all three boundary curves") {
        const Presentation p = quadratic_preset();
        const auto y = boundary_multicurve(p);
        REQUIRE(y.size() == 3);
        std::vector<std::string> reps;
        for (const auto& e : y.entries) reps.push_back(e.representative);
        std::sort(reps.begin(), reps.end());
        REQUIRE(reps == std::vector<std::string>{"g_0", "g_inf", "g_m1"});
        REQUIRE(is_multicurve(p, y.classes()).ok);
    }
    SECTION("annulus contributes its plus-labelled curve") {
        Presentation p;
        p.pieces.push_back(pants("S", "g1", "g2", "g3"));
        p.pieces.push_back(Piece{"A", {"g5", "g4"}, {}});
        const auto y = boundary_multicurve(p);
        REQUIRE(y.size() == 4);
        REQUIRE(y.annulus_labels.at("A") == std::pair<std::string, std::string>{"g4", "g5"});
        std::vector<std::string> reps;
        for (const auto& e : y.entries) reps.push_back(e.representative);
        REQUIRE(std::find(reps.begin(), reps.end(), "g4") != reps.end());
        REQUIRE(std::find(reps.begin(), reps.end(), "g5") == reps.end());
        REQUIRE(is_multicurve(p, y.classes()).ok);
    }
    SECTION("a single O-piece has an empty boundary multicurve") {
        Presentation p;
        p.pieces.push_back(Piece{"O", {"q"}, {}});
        REQUIRE(boundary_multicurve(p).empty());
    }
}

TEST_CASE("validate_presentation") {
    SECTION("well-formed preset is clean") {
        REQUIRE(validate_presentation(quadratic_preset()).empty());
    }
    SECTION("dangling image piece") {
        Presentation p = quadratic_preset();
        p.epieces[0].image_piece = "nowhere";
        const auto d = validate_presentation(p);
        REQUIRE_FALSE(d.empty());
        REQUIRE(std::any_of(d.begin(), d.end(),
                            [](const Diagnostic& x) { return x.code == "IntegrityError"; }));
    }
    SECTION("crossing hole sets across embedded pieces") {
        Presentation p;
        p.pieces.push_back(Piece{"S", {"g1", "g2", "g3", "g4"}, {}});
        EPieceEmbedding e1, e2;
        e1.id = "E1";
        e1.host_piece = e1.image_piece = "S";
        e1.degree = 1;
        e1.boundary = {{"a1", "g1", 1, {"g1", "g2"}}, {"a2", "g2", 1, {"g3", "g4"}}};
        e2.id = "E2";
        e2.host_piece = e2.image_piece = "S";
        e2.degree = 1;
        e2.boundary = {{"c1", "g1", 1, {"g2", "g3"}}, {"c2", "g2", 1, {"g1", "g4"}}};
        p.epieces = {e1, e2};
        const auto d = validate_presentation(p);
        REQUIRE(std::any_of(d.begin(), d.end(),
                            [](const Diagnostic& x) { return x.code == "PlanarityError"; }));
    }
    SECTION("degree accounting") {
        Presentation p = quadratic_preset();
        p.epieces[0].boundary[3].covering_degree = 2;  // total over g_0 now 3 > deg 2
        const auto d = validate_presentation(p);
        REQUIRE(std::any_of(d.begin(), d.end(),
                            [](const Diagnostic& x) { return x.code == "DegreeError"; }));
    }
    SECTION("every host boundary curve must sit in exactly one hole") {
        // an embedded piece covering the whole host is not representable
        Presentation p = quadratic_preset();
        EPieceEmbedding whole;
        whole.id = "E_whole";
        whole.host_piece = "S";
        whole.image_piece = "S";
        whole.degree = 1;
        p.epieces.push_back(whole);
        const auto d = validate_presentation(p);
        int uncovered = 0;
        for (const auto& x : d)
            uncovered += x.message.find("exactly one hole") != std::string::npos ? 1 : 0;
        REQUIRE(uncovered == 3);
    }
    SECTION("nested embedded pieces are planar") {
        Presentation q = quadratic_preset();
        EPieceEmbedding inner;
        inner.id = "E_inner";
        inner.host_piece = "S";
        inner.image_piece = "S";
        inner.degree = 1;
        inner.boundary = {{"b_in", "g_inf", 1, {"g_inf", "g_0", "g_m1"}}};
        q.epieces.push_back(inner);
        REQUIRE(validate_presentation(q).empty());
    }
}
