#pragma once

// Shipped example corpus. Each builder returns a complete document; the
// presets/ directory holds their serialized form (kept in sync by the test
// suite). Degrees and boundary correspondences are chosen so that every
// presentation is an honest unbranched covering: for each embedded piece the
// covering degrees over any image boundary curve sum to the map degree, and
// the hole counts match the Euler characteristic of an unbranched cover.

#include "repsys/document.hpp"

namespace repsys::presets {

/// Two disc pieces mapped homeomorphically over one disc piece: the full
/// shift on two symbols. No essential curves anywhere; the boundary
/// multicurve is empty.
inline Document example1_discs() {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"Q", {"q0"}, {}});
    EPieceEmbedding e1{"E1", "Q", "Q", 1, {{"e1", "q0", 1, {"q0"}}}};
    EPieceEmbedding e2{"E2", "Q", "Q", 1, {{"e2", "q0", 1, {"q0"}}}};
    doc.presentation.epieces = {e1, e2};
    doc.pullbacks = PullbackTable({}, {});  // no essential classes anywhere
    return doc;
}

/// One annulus covered by two essential sub-annuli of degrees d1 and d2.
/// Realizable iff 1/d1 + 1/d2 < 1.
inline Document example2_annuli(int d1, int d2) {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"A", {"a_in", "a_out"}, {}});
    EPieceEmbedding inner{"A1",
                          "A",
                          "A",
                          d1,
                          {{"a1_out", "a_out", d1, {"a_out"}}, {"a1_in", "a_in", d1, {"a_in"}}}};
    EPieceEmbedding outer{"A2",
                          "A",
                          "A",
                          d2,
                          {{"a2_out", "a_out", d2, {"a_out"}}, {"a2_in", "a_in", d2, {"a_in"}}}};
    doc.presentation.epieces = {inner, outer};
    doc.universe.push_back({"core", CurveClass(doc.presentation.pieces[0], {"a_in"})});
    doc.pullbacks = PullbackTable({"core"}, {{"core",
                                             {PreimageRecord::to_curve("core", d1),
                                              PreimageRecord::to_curve("core", d2)}}});
    AnnuliSpec spec;
    spec.annuli = 1;
    spec.branches = {{{0, d1, true}, {0, d2, true}}};
    doc.annuli_spec = spec;
    return doc;
}

namespace detail_presets {

/// Trousers piece covered with degree two by a four-holed piece. The wiring
/// is per-variant: each entry maps one cover curve (by its hole) onto a host
/// boundary curve with a degree.
struct TrousersWiring {
    // image curve and covering degree for the holes around g_0, g_m1, g_s
    // and for the trivial hole
    std::string image_0, image_m1, image_s, image_trivial;
    int deg_0, deg_m1, deg_s, deg_trivial;
};

inline Document trousers(const TrousersWiring& w,
                         std::map<std::string, std::vector<PreimageRecord>> rows) {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"S", {"g_0", "g_m1", "g_s"}, {}});
    EPieceEmbedding e{"E",
                      "S",
                      "S",
                      2,
                      {{"b_0", w.image_0, w.deg_0, {"g_0"}},
                       {"b_m1", w.image_m1, w.deg_m1, {"g_m1"}},
                       {"b_s", w.image_s, w.deg_s, {"g_s"}},
                       {"b_p1", w.image_trivial, w.deg_trivial, {}}}};
    doc.presentation.epieces.push_back(e);
    const Piece& s = doc.presentation.pieces[0];
    doc.universe = {{"c0", CurveClass(s, {"g_0"})},
                    {"cm1", CurveClass(s, {"g_m1"})},
                    {"cs", CurveClass(s, {"g_s"})}};
    doc.pullbacks = PullbackTable({"c0", "cm1", "cs"}, std::move(rows));
    return doc;
}

}  // namespace detail_presets

/// First trousers wiring: boundary matrix [[0,1/2,0],[1,0,0],[0,0,1/2]],
/// leading eigenvalue 1/sqrt(2). Behaves like the quadratic presentation.
inline Document trousers_v1() {
    return detail_presets::trousers(
        {"g_m1", "g_0", "g_s", "g_0", 2, 1, 2, 1},
        {{"c0", {PreimageRecord::to_curve("cm1", 1), PreimageRecord::null(1)}},
         {"cm1", {PreimageRecord::to_curve("c0", 2)}},
         {"cs", {PreimageRecord::to_curve("cs", 2)}}});
}

/// Second trousers wiring: boundary matrix diag(1/2, 1, 1/2), leading
/// eigenvalue exactly 1 at the curve fixed with degree one.
inline Document trousers_v2() {
    return detail_presets::trousers(
        {"g_0", "g_m1", "g_s", "g_m1", 2, 1, 2, 1},
        {{"c0", {PreimageRecord::to_curve("c0", 2)}},
         {"cm1", {PreimageRecord::to_curve("cm1", 1), PreimageRecord::null(1)}},
         {"cs", {PreimageRecord::to_curve("cs", 2)}}});
}

/// The z^2 - 1 combinatorics: one pants piece around the Julia set, the
/// degree-two preimage has four boundary curves; the class cycle is
/// c_0 -> c_m1 -> c_0 plus c_inf fixed, matrix [[0,1/2,0],[1,0,0],[0,0,1/2]].
inline Document z2minus1() {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"S", {"g_inf", "g_0", "g_m1"}, {}});
    EPieceEmbedding e{"E",
                      "S",
                      "S",
                      2,
                      {{"b_inf", "g_inf", 2, {"g_inf"}},
                       {"b_0", "g_m1", 2, {"g_0"}},
                       {"b_m1", "g_0", 1, {"g_m1"}},
                       {"b_p1", "g_0", 1, {}}}};
    doc.presentation.epieces.push_back(e);
    const Piece& s = doc.presentation.pieces[0];
    doc.universe = {{"c_0", CurveClass(s, {"g_0"})},
                    {"c_m1", CurveClass(s, {"g_m1"})},
                    {"c_inf", CurveClass(s, {"g_inf"})}};
    doc.pullbacks = PullbackTable(
        {"c_0", "c_m1", "c_inf"},
        {{"c_0", {PreimageRecord::to_curve("c_m1", 1), PreimageRecord::null(1)}},
         {"c_m1", {PreimageRecord::to_curve("c_0", 2)}},
         {"c_inf", {PreimageRecord::to_curve("c_inf", 2)}}});
    doc.certificates.push_back({{"S"}, "pcf-unobstructed"});
    return doc;
}

/// A pants piece S and an annulus piece A. S carries its renormalization
/// piece E_SS plus an essential annulus mapping onto A; A carries a cover of
/// S (essential after filling) and an essential self-cover of A. The
/// boundary multicurve has four classes and the renormalization's
/// single-step matrix is the upper-left 3x3 block of the boundary matrix.
inline Document example4() {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"S", {"g1", "g2", "g3"}, {}});
    doc.presentation.pieces.push_back(Piece{"A", {"g4", "g5"}, {}});

    EPieceEmbedding e_ss{"E_SS",
                         "S",
                         "S",
                         2,
                         {{"b1", "g2", 2, {"g1"}},
                          {"b2", "g1", 1, {"g2"}},
                          {"b3", "g1", 1, {}},
                          {"b4", "g3", 2, {"g3"}}}};
    EPieceEmbedding e_sa{"E_SA1",
                         "S",
                         "A",
                         2,
                         {{"c1", "g4", 2, {"g1"}}, {"c2", "g5", 2, {"g2", "g3"}}}};
    EPieceEmbedding e_as{"E_AS",
                         "A",
                         "S",
                         4,
                         {{"a1", "g1", 4, {"g4"}},
                          {"a2", "g2", 4, {"g5"}},
                          {"a3", "g3", 1, {}},
                          {"a4", "g3", 1, {}},
                          {"a5", "g3", 1, {}},
                          {"a6", "g3", 1, {}}}};
    EPieceEmbedding e_aa{"E_AA1",
                         "A",
                         "A",
                         3,
                         {{"e1", "g4", 3, {"g4"}}, {"e2", "g5", 3, {"g5"}}}};
    doc.presentation.epieces = {e_ss, e_sa, e_as, e_aa};

    const Piece& s = doc.presentation.pieces[0];
    const Piece& a = doc.presentation.pieces[1];
    doc.universe = {{"u1", CurveClass(s, {"g1"})},
                    {"u2", CurveClass(s, {"g2"})},
                    {"u3", CurveClass(s, {"g3"})},
                    {"uA", CurveClass(a, {"g4"})}};
    doc.pullbacks = PullbackTable(
        {"u1", "u2", "u3", "uA"},
        {{"u1",
          {PreimageRecord::to_curve("u2", 1), PreimageRecord::null(1),
           PreimageRecord::to_curve("uA", 4)}},
         {"u2", {PreimageRecord::to_curve("u1", 2), PreimageRecord::to_curve("uA", 4)}},
         {"u3",
          {PreimageRecord::to_curve("u3", 2), PreimageRecord::null(1), PreimageRecord::null(1),
           PreimageRecord::null(1), PreimageRecord::null(1)}},
         {"uA", {PreimageRecord::to_curve("u1", 2), PreimageRecord::to_curve("uA", 3)}}});
    doc.certificates.push_back({{"S"}, "pcf-unobstructed"});
    return doc;
}

/// Two pants pieces exchanged by the induced map: a period-two
/// renormalization cycle whose composed table is the square of the
/// single-step dynamics.
inline Document period2_cycle() {
    Document doc;
    doc.presentation.pieces.push_back(Piece{"S1", {"a1", "a2", "a3"}, {}});
    doc.presentation.pieces.push_back(Piece{"S2", {"c1", "c2", "c3"}, {}});
    EPieceEmbedding e1{"E1",
                       "S1",
                       "S2",
                       2,
                       {{"e1a", "c1", 2, {"a1"}},
                        {"e1b", "c2", 1, {"a2"}},
                        {"e1c", "c2", 1, {}},
                        {"e1d", "c3", 2, {"a3"}}}};
    EPieceEmbedding e2{"E2",
                       "S2",
                       "S1",
                       2,
                       {{"f1", "a2", 2, {"c1"}},
                        {"f2", "a1", 1, {"c2"}},
                        {"f3", "a1", 1, {}},
                        {"f4", "a3", 2, {"c3"}}}};
    doc.presentation.epieces = {e1, e2};
    const Piece& s1 = doc.presentation.pieces[0];
    const Piece& s2 = doc.presentation.pieces[1];
    doc.universe = {{"uA1", CurveClass(s1, {"a1"})}, {"uA2", CurveClass(s1, {"a2"})},
                    {"uA3", CurveClass(s1, {"a3"})}, {"uC1", CurveClass(s2, {"c1"})},
                    {"uC2", CurveClass(s2, {"c2"})}, {"uC3", CurveClass(s2, {"c3"})}};
    doc.pullbacks = PullbackTable(
        {"uA1", "uA2", "uA3", "uC1", "uC2", "uC3"},
        {{"uA1", {PreimageRecord::to_curve("uC2", 1), PreimageRecord::null(1)}},
         {"uA2", {PreimageRecord::to_curve("uC1", 2)}},
         {"uA3", {PreimageRecord::to_curve("uC3", 2)}},
         {"uC1", {PreimageRecord::to_curve("uA1", 2)}},
         {"uC2", {PreimageRecord::to_curve("uA2", 1), PreimageRecord::null(1)}},
         {"uC3", {PreimageRecord::to_curve("uA3", 2)}}});
    doc.certificates.push_back({{"S1", "S2"}, "holomorphic-steps"});
    return doc;
}

/// Tent map: one interval, an increasing branch of slope d1 and a
/// decreasing branch of slope d2. Realizable iff 1/d1 + 1/d2 < 1.
inline Document tent(int d1, int d2) {
    Document doc;
    AffineSpec spec;
    spec.intervals = 1;
    spec.branches = {{{0, d1, true}, {0, d2, false}}};
    doc.affine_spec = spec;
    return doc;
}

struct NamedPreset {
    std::string name;
    Document document;
};

inline std::vector<NamedPreset> corpus() {
    return {{"example1-discs", example1_discs()},
            {"example2-annuli-22", example2_annuli(2, 2)},
            {"example2-annuli-23", example2_annuli(2, 3)},
            {"trousers-v1", trousers_v1()},
            {"trousers-v2", trousers_v2()},
            {"z2minus1", z2minus1()},
            {"example4", example4()},
            {"period2-cycle", period2_cycle()},
            {"tent-2-2", tent(2, 2)},
            {"tent-2-3", tent(2, 3)}};
}

}  // namespace repsys::presets
