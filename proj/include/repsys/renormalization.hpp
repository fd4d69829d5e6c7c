#pragma once

// Constant complexity and renormalization. A complex piece S is handled by
// its parallel sub-piece: the unique embedded piece containing all of S's
// marked points whose complementary components are annular or disc-like
// (each hole holds at most one boundary curve of S and no marked point).
// When every complex piece has one, the induced map on complex pieces is
// total and eventually periodic; each periodic cycle yields a
// renormalization descriptor carrying its boundary correspondence, the
// single-step matrix of the cycle's boundary curves, and the p-step
// composed pullback table restricted to cycle-piece curves.

#include "repsys/dynamics.hpp"
#include "repsys/matrix.hpp"
#include "repsys/puzzle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace repsys {

class NotConstantComplexity : public Error {
public:
    using Error::Error;
};

class CoverageGap : public Error {
public:
    using Error::Error;
};

/// Named homotopy class: binds a pullback-table id to its bipartition.
struct UniverseCurve {
    std::string id;
    CurveClass cls;
};

using CurveUniverse = std::vector<UniverseCurve>;

inline std::optional<std::string> universe_lookup(const CurveUniverse& universe,
                                                  const CurveClass& cls) {
    for (const auto& u : universe)
        if (u.cls == cls) return u.id;
    return std::nullopt;
}

/// The unique embedded piece parallel to the complex piece S, if any.
/// Candidates must contain every marked point of S and have only annular or
/// disc-like complementary components. Two candidates contradict constant
/// complexity and are reported as such.
inline std::optional<std::string> parallel_piece(const Presentation& p, const Piece& s) {
    if (classify_piece(s) != PieceType::C)
        throw Error("parallel_piece: '" + s.id + "' is not a complex piece");
    std::vector<std::string> candidates;
    for (const auto& e : p.epieces) {
        if (e.host_piece != s.id) continue;
        bool ok = true;
        for (const auto& r : e.boundary) {
            std::size_t boundary_count = 0;
            for (const auto& o : r.inside) {
                if (s.is_boundary(o)) ++boundary_count;
                if (s.is_marked(o)) ok = false;  // marked point outside E
            }
            if (boundary_count > 1) ok = false;  // component not annular/disc-like
        }
        if (ok) candidates.push_back(e.id);
    }
    if (candidates.size() > 1) {
        std::string msg = "piece '" + s.id + "' has several parallel candidates:";
        for (const auto& c : candidates) msg += " '" + c + "'";
        throw NotConstantComplexity(msg);
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[0];
}

struct ConstantComplexityReport {
    bool ok = true;
    // per complex piece: the parallel embedded piece, or the reason there is
    // none
    std::map<std::string, std::string> parallel;
    std::vector<std::string> failures;
};

inline ConstantComplexityReport check_constant_complexity(const Presentation& p) {
    ConstantComplexityReport report;
    for (const auto& s : p.pieces) {
        if (classify_piece(s) != PieceType::C) continue;
        try {
            const auto found = parallel_piece(p, s);
            if (found)
                report.parallel[s.id] = *found;
            else {
                report.ok = false;
                report.failures.push_back("complex piece '" + s.id + "' has no parallel piece");
            }
        } catch (const NotConstantComplexity& e) {
            report.ok = false;
            report.failures.push_back(e.what());
        }
    }
    return report;
}

struct StarMap {
    std::map<std::string, std::string> next;       // complex piece -> complex piece
    std::vector<std::vector<std::string>> cycles;  // periodic cycles, in map order
};

/// The induced map on complex pieces: S goes to the image of its parallel
/// piece. Total under constant complexity; every piece reaches a cycle.
inline StarMap star_map(const Presentation& p) {
    const auto cc = check_constant_complexity(p);
    if (!cc.ok) {
        std::string msg = "constant complexity violated:";
        for (const auto& f : cc.failures) msg += " " + f;
        throw NotConstantComplexity(msg);
    }
    StarMap out;
    for (const auto& [piece, epiece] : cc.parallel) {
        const EPieceEmbedding* e = p.find_epiece(epiece);
        const Piece& image = piece_of(p, e->image_piece);
        if (classify_piece(image) != PieceType::C)
            throw NotConstantComplexity("parallel piece '" + epiece +
                                        "' maps onto the non-complex piece '" + image.id + "'");
        out.next[piece] = image.id;
    }
    // cycle decomposition
    std::set<std::string> assigned;
    for (const auto& [start, _] : out.next) {
        if (assigned.count(start)) continue;
        // walk until a repeat, then read off the cycle
        std::vector<std::string> path{start};
        std::map<std::string, std::size_t> seen{{start, 0}};
        for (;;) {
            const std::string& next = out.next.at(path.back());
            const auto it = seen.find(next);
            if (it != seen.end()) {
                std::vector<std::string> cycle(path.begin() + it->second, path.end());
                // canonical rotation: start at the smallest piece id
                const auto min_it = std::min_element(cycle.begin(), cycle.end());
                std::rotate(cycle.begin(), min_it, cycle.end());
                if (!assigned.count(cycle[0]))
                    out.cycles.push_back(cycle);
                for (const auto& s : cycle) assigned.insert(s);
                break;
            }
            seen[next] = path.size();
            path.push_back(next);
        }
    }
    std::sort(out.cycles.begin(), out.cycles.end());
    return out;
}

struct BoundaryCorrespondence {
    std::string boundary_curve;  // gamma, a boundary curve of the cycle piece
    std::string e_curve;         // the parallel piece's curve homotopic to gamma
    int degree = 1;              // covering degree on that curve
    std::string image_curve;     // its image boundary curve
};

struct RenormDescriptor {
    std::vector<std::string> cycle;  // pieces S_1..S_p in map order
    std::vector<std::string> parallel_epieces;
    std::size_t period = 0;
    std::map<std::string, std::vector<std::string>> marked;  // per cycle piece
    std::map<std::string, std::vector<BoundaryCorrespondence>> boundary;
    PullbackTable composed_table;        // p-step return dynamics
    TransitionMatrix cycle_boundary_matrix;  // single-step, indexed by boundary curves
};

namespace detail {

inline std::string universe_id_of_boundary(const CurveUniverse& universe, const Piece& piece,
                                           const std::string& curve) {
    const auto id = universe_lookup(universe, CurveClass(piece, ObjectSet{curve}));
    if (!id)
        throw CoverageGap("no universe curve for boundary curve '" + curve + "' of piece '" +
                          piece.id + "'");
    return *id;
}

}  // namespace detail

/// Assembles the renormalization data of an induced-map cycle: the parallel
/// pieces, the boundary correspondence (gamma, its parallel curve, degree,
/// image), the single-step matrix of the cycle's boundary curves, and the
/// p-step composed pullback table on cycle-piece curves.
inline RenormDescriptor extract_renormalization(const Presentation& p,
                                                const std::vector<std::string>& cycle,
                                                const CurveUniverse& universe,
                                                const PullbackTable& table) {
    if (cycle.empty()) throw Error("extract_renormalization: empty cycle");
    RenormDescriptor d;
    d.cycle = cycle;
    d.period = cycle.size();

    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const Piece& s = piece_of(p, cycle[i]);
        const auto epiece_id = parallel_piece(p, s);
        if (!epiece_id)
            throw NotConstantComplexity("cycle piece '" + s.id + "' has no parallel piece");
        const EPieceEmbedding& e = *p.find_epiece(*epiece_id);
        const std::string& expected_image = cycle[(i + 1) % cycle.size()];
        if (e.image_piece != expected_image)
            throw Error("cycle is not closed: '" + e.id + "' maps to '" + e.image_piece +
                        "', expected '" + expected_image + "'");
        d.parallel_epieces.push_back(e.id);
        d.marked[s.id] = s.marked_points;

        std::vector<BoundaryCorrespondence> corr;
        for (const auto& gamma : s.boundary_curves) {
            const BoundaryRecord* hole = nullptr;
            for (const auto& r : e.boundary)
                if (r.inside.count(gamma)) hole = &r;
            if (!hole)
                throw Error("parallel piece '" + e.id + "' has no hole around '" + gamma + "'");
            corr.push_back({gamma, hole->curve, hole->covering_degree, hole->image_curve});
        }
        d.boundary[s.id] = corr;
    }

    // single-step transition matrix of the cycle's boundary-curve classes,
    // re-indexed by the boundary curves themselves
    {
        std::vector<std::string> boundary_curves, universe_ids;
        for (const auto& piece_id : cycle) {
            const Piece& s = piece_of(p, piece_id);
            for (const auto& gamma : s.boundary_curves) {
                boundary_curves.push_back(gamma);
                universe_ids.push_back(detail::universe_id_of_boundary(universe, s, gamma));
            }
        }
        TransitionMatrix tm = transition_matrix(universe_ids, table);
        tm.index = boundary_curves;
        d.cycle_boundary_matrix = std::move(tm);
    }

    // p-step relational composition, restricted to curves in cycle pieces
    {
        std::set<std::string> cycle_pieces(cycle.begin(), cycle.end());
        std::vector<std::string> cycle_curves;
        for (const auto& u : universe)
            if (cycle_pieces.count(u.cls.piece())) cycle_curves.push_back(u.id);
        const auto in_cycle = [&](const std::string& id) {
            return std::find(cycle_curves.begin(), cycle_curves.end(), id) != cycle_curves.end();
        };

        std::map<std::string, std::vector<PreimageRecord>> rows;
        for (const auto& start : cycle_curves) {
            std::vector<PreimageRecord> chains{PreimageRecord::to_curve(start, 1)};
            for (std::size_t step = 0; step < d.period; ++step) {
                std::vector<PreimageRecord> next;
                for (const auto& chain : chains) {
                    if (!chain.is_curve()) {
                        next.push_back(chain);  // null/peripheral stays put
                        continue;
                    }
                    if (!table.has_row(chain.curve))
                        throw CoverageGap("missing pullback row for cycle curve '" + chain.curve +
                                          "'");
                    for (const auto& r : table.row(chain.curve)) {
                        if (r.is_curve()) {
                            if (!in_cycle(r.curve)) continue;  // leaves the renormalization
                            next.push_back(
                                PreimageRecord::to_curve(r.curve, chain.degree * r.degree));
                        } else {
                            PreimageRecord dropped = r;
                            dropped.degree *= chain.degree;
                            next.push_back(dropped);
                        }
                    }
                }
                chains = std::move(next);
            }
            rows[start] = chains;
        }
        d.composed_table = PullbackTable(cycle_curves, rows);
    }
    return d;
}

struct BoundaryVerdict {
    bool y_empty = false;
    bool obstructed = false;
    TransitionMatrix boundary_matrix;  // indexed by Y representative curves
    std::optional<SubunitWitness> witness;
    std::optional<NotSubunitCertificate> certificate;
};

/// Boundary obstruction: Y non-empty and lambda(W_Y) >= 1, decided exactly.
/// Carries the witness (or lower-bound certificate) either way.
inline BoundaryVerdict boundary_obstruction_check(const Presentation& p,
                                                  const CurveUniverse& universe,
                                                  const PullbackTable& table) {
    BoundaryVerdict out;
    const BoundaryMulticurve y = boundary_multicurve(p);
    if (y.empty()) {
        out.y_empty = true;
        return out;
    }
    std::vector<std::string> representatives, universe_ids;
    for (const auto& entry : y.entries) {
        const auto id = universe_lookup(universe, entry.cls);
        if (!id)
            throw CoverageGap("boundary class of '" + entry.representative +
                              "' is not in the curve universe");
        if (!table.has_row(*id))
            throw CoverageGap("no pullback row for boundary curve '" + entry.representative + "'");
        representatives.push_back(entry.representative);
        universe_ids.push_back(*id);
    }
    TransitionMatrix tm = transition_matrix(universe_ids, table);
    tm.index = representatives;

    const SubunitVerdict verdict = subunit_certificate(tm.matrix);
    out.boundary_matrix = std::move(tm);
    out.obstructed = !verdict.is_subunit();
    if (verdict.is_subunit())
        out.witness = verdict.witness();
    else
        out.certificate = verdict.certificate();
    return out;
}

/// Obstruction verdict for the p-step return dynamics, scoped to the
/// composed table's universe.
inline ObstructionReport renormalized_obstruction_check(const RenormDescriptor& d,
                                                        const Rational& tol = Rational(kDefaultTol)) {
    return obstruction_verdict(d.composed_table, tol);
}

struct RenormCertificate {
    std::vector<std::string> cycle;
    std::string kind;  // "pcf-unobstructed" | "holomorphic-steps"
};

enum class AnalytizationStatus { Pass, Fail, Indeterminate };

struct AnalytizationReport {
    AnalytizationStatus status = AnalytizationStatus::Indeterminate;
    std::string detail;
    std::optional<BoundaryVerdict> boundary;

    struct CycleResult {
        std::vector<std::string> cycle;
        std::string branch;  // "pcf-certificate" | "holomorphic-steps" | "missing-certificate"
        bool ok = false;
        std::string detail;
    };
    std::vector<CycleResult> cycles;
};

namespace detail {

inline const RenormCertificate* find_certificate(const std::vector<RenormCertificate>& certs,
                                                 const std::vector<std::string>& cycle) {
    const std::set<std::string> wanted(cycle.begin(), cycle.end());
    for (const auto& c : certs)
        if (std::set<std::string>(c.cycle.begin(), c.cycle.end()) == wanted) return &c;
    return nullptr;
}

}  // namespace detail

/// Full pipeline verdict: the boundary check must pass, and every
/// renormalization cycle must be cleared either by a user-asserted
/// pcf-no-obstruction certificate or by the composed-table check together
/// with the asserted per-step holomorphicity. A cycle with neither is
/// Indeterminate, never a silent pass.
inline AnalytizationReport analytization_verdict(const Presentation& p,
                                                 const CurveUniverse& universe,
                                                 const PullbackTable& table,
                                                 const std::vector<RenormCertificate>& certificates) {
    AnalytizationReport report;
    const auto cc = check_constant_complexity(p);
    if (!cc.ok) {
        report.status = AnalytizationStatus::Indeterminate;
        report.detail = "not of constant complexity";
        for (const auto& f : cc.failures) report.detail += "; " + f;
        return report;
    }

    report.boundary = boundary_obstruction_check(p, universe, table);
    if (report.boundary->obstructed) {
        report.status = AnalytizationStatus::Fail;
        report.detail = "boundary obstruction";
        return report;
    }

    bool indeterminate = false;
    for (const auto& cycle : star_map(p).cycles) {
        AnalytizationReport::CycleResult result;
        result.cycle = cycle;
        const RenormCertificate* cert = detail::find_certificate(certificates, cycle);
        if (cert && cert->kind == "pcf-unobstructed") {
            result.branch = "pcf-certificate";
            result.ok = true;
            result.detail = "user-asserted: postcritically finite and free of obstructions";
        } else if (cert && cert->kind == "holomorphic-steps") {
            result.branch = "holomorphic-steps";
            const auto d = extract_renormalization(p, cycle, universe, table);
            const auto verdict = renormalized_obstruction_check(d);
            result.ok = !verdict.obstructed;
            result.detail = verdict.obstructed
                                ? "composed-table check failed"
                                : "composed-table check passed; per-step holomorphicity asserted";
            if (verdict.obstructed) {
                report.cycles.push_back(result);
                report.status = AnalytizationStatus::Fail;
                report.detail = "renormalized obstruction";
                return report;
            }
        } else {
            result.branch = "missing-certificate";
            result.detail = "no certificate for this cycle";
            indeterminate = true;
        }
        report.cycles.push_back(result);
    }

    report.status = indeterminate ? AnalytizationStatus::Indeterminate : AnalytizationStatus::Pass;
    report.detail = indeterminate ? "missing certificates" : "";
    return report;
}

}  // namespace repsys
