#pragma once

// Combinatorial model of marked puzzle surfaces. Pieces are planar bordered
// surfaces given by their boundary-curve and marked-point ids; a simple
// closed curve in a piece is encoded by the bipartition of the piece's
// objects it induces. On genus-zero pieces this encoding is a bijection with
// isotopy classes, and disjointness of curves is exactly laminarity of the
// bipartitions. Sub-piece embeddings record, per boundary curve, the host
// objects lying in the complementary component it bounds ("holes").

#include "repsys/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace repsys {

using ObjectSet = std::set<std::string>;

struct Piece {
    std::string id;
    std::vector<std::string> boundary_curves;
    std::vector<std::string> marked_points;

    ObjectSet objects() const {
        ObjectSet all(boundary_curves.begin(), boundary_curves.end());
        all.insert(marked_points.begin(), marked_points.end());
        return all;
    }

    bool is_boundary(const std::string& id_) const {
        return std::find(boundary_curves.begin(), boundary_curves.end(), id_) !=
               boundary_curves.end();
    }
    bool is_marked(const std::string& id_) const {
        return std::find(marked_points.begin(), marked_points.end(), id_) != marked_points.end();
    }
};

// Table of piece types: O = disc without marked points, A = annulus without
// marked points, R = disc with one marked point, C = everything with
// #boundary + #marked >= 3.
enum class PieceType { O, A, R, C };

inline PieceType classify_piece(const Piece& piece) {
    const std::size_t b = piece.boundary_curves.size();
    const std::size_t m = piece.marked_points.size();
    if (b == 0) throw Error("piece '" + piece.id + "' has no boundary curves (sphere not allowed)");
    if (b == 1 && m == 0) return PieceType::O;
    if (b == 2 && m == 0) return PieceType::A;
    if (b == 1 && m == 1) return PieceType::R;
    return PieceType::C;
}

inline char piece_type_letter(PieceType t) {
    switch (t) {
        case PieceType::O: return 'O';
        case PieceType::A: return 'A';
        case PieceType::R: return 'R';
        case PieceType::C: return 'C';
    }
    return '?';
}

struct CurveKind {
    enum class Kind { NullHomotopic, Peripheral, BoundaryParallel, Essential } kind;
    std::string object;  // the marked point / boundary curve, when applicable

    bool essential() const { return kind == Kind::Essential; }

    /// Valid multicurve member: non-peripheral and not null-homotopic.
    /// Boundary-parallel classes qualify (the boundary multicurve is made of
    /// them); peripheral and null-homotopic ones do not.
    bool non_peripheral() const {
        return kind == Kind::Essential || kind == Kind::BoundaryParallel;
    }
};

/// Classifies the bipartition {side, complement} of a piece's objects.
/// Null-homotopic iff one side is empty; peripheral iff one side is a single
/// marked point; boundary-parallel iff one side is a single boundary curve.
inline CurveKind classify_curve(const Piece& piece, const ObjectSet& side) {
    const ObjectSet all = piece.objects();
    for (const auto& o : side)
        if (!all.count(o)) throw Error("unknown object '" + o + "' in piece '" + piece.id + "'");
    ObjectSet complement;
    std::set_difference(all.begin(), all.end(), side.begin(), side.end(),
                        std::inserter(complement, complement.end()));

    if (side.empty() || complement.empty()) return {CurveKind::Kind::NullHomotopic, {}};

    std::vector<std::string> peripheral, parallel;
    for (const ObjectSet* s : {&side, static_cast<const ObjectSet*>(&complement)}) {
        if (s->size() != 1) continue;
        const std::string& o = *s->begin();
        (piece.is_marked(o) ? peripheral : parallel).push_back(o);
    }
    if (!peripheral.empty())
        return {CurveKind::Kind::Peripheral, *std::min_element(peripheral.begin(), peripheral.end())};
    if (!parallel.empty())
        return {CurveKind::Kind::BoundaryParallel, *std::min_element(parallel.begin(), parallel.end())};
    return {CurveKind::Kind::Essential, {}};
}

/// Unordered bipartition, canonicalized to the lexicographically smallest
/// side so that class equality is structural equality.
class CurveClass {
public:
    CurveClass(const Piece& piece, const ObjectSet& side) : piece_(piece.id) {
        const ObjectSet all = piece.objects();
        ObjectSet complement;
        std::set_difference(all.begin(), all.end(), side.begin(), side.end(),
                            std::inserter(complement, complement.end()));
        side_ = std::min(side, complement);
    }

    const std::string& piece() const { return piece_; }
    const ObjectSet& side() const { return side_; }

    ObjectSet complement_in(const Piece& piece) const {
        const ObjectSet all = piece.objects();
        ObjectSet out;
        std::set_difference(all.begin(), all.end(), side_.begin(), side_.end(),
                            std::inserter(out, out.end()));
        return out;
    }

    auto operator<=>(const CurveClass&) const = default;

private:
    std::string piece_;
    ObjectSet side_;
};

using Multicurve = std::vector<CurveClass>;

namespace detail {

inline bool subset(const ObjectSet& a, const ObjectSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool disjoint(const ObjectSet& a, const ObjectSet& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

/// Sets are laminar when one contains the other or they are disjoint.
inline bool laminar(const ObjectSet& a, const ObjectSet& b) {
    return subset(a, b) || subset(b, a) || disjoint(a, b);
}

/// Two bipartitions admit disjoint representatives iff some pair of chosen
/// sides is nested or disjoint; with {A, A^c} and {B, B^c} of the same object
/// set this reduces to: A within B, B within A, disjoint, or covering.
inline bool bipartitions_compatible(const ObjectSet& all, const ObjectSet& a, const ObjectSet& b) {
    if (subset(a, b) || subset(b, a) || disjoint(a, b)) return true;
    ObjectSet united = a;
    united.insert(b.begin(), b.end());
    return united == all;
}

}  // namespace detail

struct MulticurveCheck {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

struct Presentation;
const Piece& piece_of(const Presentation& p, const std::string& id);

struct BoundaryRecord {
    std::string curve;        // boundary curve of the embedded piece
    std::string image_curve;  // boundary curve of the image piece it covers
    int covering_degree = 1;
    ObjectSet inside;  // host objects inside the complementary component
};

struct EPieceEmbedding {
    std::string id;
    std::string host_piece;
    std::string image_piece;
    int degree = 1;
    std::vector<BoundaryRecord> boundary;

    const BoundaryRecord* find_record(const std::string& curve) const {
        for (const auto& r : boundary)
            if (r.curve == curve) return &r;
        return nullptr;
    }
};

struct PresentationFlags {
    bool pcf_asserted = false;
    bool orbifold_not_2222 = false;
};

struct Presentation {
    std::vector<Piece> pieces;
    std::vector<EPieceEmbedding> epieces;
    std::map<std::string, std::string> marked_map;
    PresentationFlags flags;

    const Piece* find_piece(const std::string& id) const {
        for (const auto& s : pieces)
            if (s.id == id) return &s;
        return nullptr;
    }
    const EPieceEmbedding* find_epiece(const std::string& id) const {
        for (const auto& e : epieces)
            if (e.id == id) return &e;
        return nullptr;
    }
};

inline const Piece& piece_of(const Presentation& p, const std::string& id) {
    const Piece* s = p.find_piece(id);
    if (!s) throw Error("unknown piece '" + id + "'");
    return *s;
}

/// Multicurve validity: every class non-peripheral, pairwise distinct, and
/// the sides within each piece pairwise laminar.
inline MulticurveCheck is_multicurve(const Presentation& p, const Multicurve& candidate) {
    MulticurveCheck check;
    for (const auto& c : candidate) {
        const Piece& piece = piece_of(p, c.piece());
        const CurveKind kind = classify_curve(piece, c.side());
        if (!kind.non_peripheral())
            check.fail("curve in piece '" + c.piece() + "' is peripheral or null-homotopic");
    }
    for (std::size_t i = 0; i < candidate.size(); ++i)
        for (std::size_t j = i + 1; j < candidate.size(); ++j) {
            const auto& a = candidate[i];
            const auto& b = candidate[j];
            if (a == b) {
                check.fail("duplicate curve class in piece '" + a.piece() + "'");
                continue;
            }
            if (a.piece() != b.piece()) continue;
            const Piece& piece = piece_of(p, a.piece());
            if (!detail::bipartitions_compatible(piece.objects(), a.side(), b.side()))
                check.fail("curve classes in piece '" + a.piece() + "' are not laminar");
        }
    return check;
}

/// Hole filling: drops every boundary record whose complementary component
/// misses the protected objects. The result's boundary is a subset of the
/// input's.
inline EPieceEmbedding filled_in(const EPieceEmbedding& e, const ObjectSet& protected_objects) {
    EPieceEmbedding out = e;
    out.boundary.clear();
    for (const auto& r : e.boundary)
        if (!detail::disjoint(r.inside, protected_objects)) out.boundary.push_back(r);
    return out;
}

/// True iff `other` sits combinatorially inside the complementary component
/// with objects `hole`: one of other's holes contains everything outside
/// `hole`, the rest live inside it.
inline bool epiece_inside_hole(const EPieceEmbedding& other, const ObjectSet& hole,
                               const ObjectSet& host_objects) {
    ObjectSet outside;
    std::set_difference(host_objects.begin(), host_objects.end(), hole.begin(), hole.end(),
                        std::inserter(outside, outside.end()));
    if (other.boundary.empty()) return outside.empty();
    // one hole of `other` faces outward and shows everything beyond `hole`;
    // the remaining holes must keep their objects inside it
    for (std::size_t outer = 0; outer < other.boundary.size(); ++outer) {
        if (!detail::subset(outside, other.boundary[outer].inside)) continue;
        bool rest_ok = true;
        for (std::size_t k = 0; rest_ok && k < other.boundary.size(); ++k)
            if (k != outer) rest_ok = detail::subset(other.boundary[k].inside, hole);
        if (rest_ok) return true;
    }
    return false;
}

/// E-pieces of the same host swallowed by the holes that filling `original`
/// down to `filled` removed.
inline std::vector<std::string> absorbed_epieces(const Presentation& p,
                                                 const EPieceEmbedding& original,
                                                 const EPieceEmbedding& filled) {
    const ObjectSet host_objects = piece_of(p, original.host_piece).objects();
    std::vector<ObjectSet> removed;
    for (const auto& r : original.boundary)
        if (!filled.find_record(r.curve)) removed.push_back(r.inside);

    std::vector<std::string> absorbed;
    for (const auto& other : p.epieces) {
        if (other.id == original.id || other.host_piece != original.host_piece) continue;
        for (const auto& hole : removed)
            if (epiece_inside_hole(other, hole, host_objects)) {
                absorbed.push_back(other.id);
                break;
            }
    }
    return absorbed;
}

/// One entry of the boundary multicurve: the homotopy class together with
/// the boundary curve chosen to represent it.
struct BoundaryCurveEntry {
    CurveClass cls;
    std::string representative;
    std::string piece;
};

struct BoundaryMulticurve {
    std::vector<BoundaryCurveEntry> entries;
    // per annular piece: {plus, minus} boundary labels (plus = smallest id,
    // plus is the curve included in the multicurve)
    std::map<std::string, std::pair<std::string, std::string>> annulus_labels;

    Multicurve classes() const {
        Multicurve out;
        for (const auto& e : entries) out.push_back(e.cls);
        return out;
    }
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    const BoundaryCurveEntry* find(const CurveClass& cls) const {
        for (const auto& e : entries)
            if (e.cls == cls) return &e;
        return nullptr;
    }
};

/// One representative per homotopy class of non-peripheral boundary curves:
/// all boundary curves of C-pieces, and the `+`-labelled curve of each
/// A-piece. O- and R-piece boundaries are null-homotopic resp. peripheral.
inline BoundaryMulticurve boundary_multicurve(const Presentation& p) {
    BoundaryMulticurve y;
    for (const auto& piece : p.pieces) {
        switch (classify_piece(piece)) {
            case PieceType::O:
            case PieceType::R:
                break;
            case PieceType::A: {
                auto curves = piece.boundary_curves;
                std::sort(curves.begin(), curves.end());
                y.annulus_labels[piece.id] = {curves[0], curves[1]};
                y.entries.push_back(
                    {CurveClass(piece, ObjectSet{curves[0]}), curves[0], piece.id});
                break;
            }
            case PieceType::C:
                for (const auto& curve : piece.boundary_curves)
                    y.entries.push_back({CurveClass(piece, ObjectSet{curve}), curve, piece.id});
                break;
        }
    }
    return y;
}

struct Diagnostic {
    std::string code;
    std::string message;
};

/// Structural validation: id uniqueness, reference integrity, laminarity of
/// the hole sets, hole coverage of the host boundary, covering-degree
/// bounds, marked-map closure. Empty result == valid.
inline std::vector<Diagnostic> validate_presentation(const Presentation& p) {
    std::vector<Diagnostic> out;
    const auto report = [&](std::string code, std::string message) {
        out.push_back({std::move(code), std::move(message)});
    };

    std::set<std::string> piece_ids, object_ids, epiece_ids, ecurve_ids;
    std::set<std::string> marked_ids;
    for (const auto& piece : p.pieces) {
        if (!piece_ids.insert(piece.id).second)
            report("DuplicateId", "duplicate piece id '" + piece.id + "'");
        for (const auto& o : piece.boundary_curves)
            if (!object_ids.insert(o).second)
                report("DuplicateId", "duplicate object id '" + o + "'");
        for (const auto& o : piece.marked_points) {
            if (!object_ids.insert(o).second)
                report("DuplicateId", "duplicate object id '" + o + "'");
            marked_ids.insert(o);
        }
        if (piece.boundary_curves.empty())
            report("SphereNotAllowed", "piece '" + piece.id + "' has no boundary curves");
    }

    for (const auto& e : p.epieces) {
        if (!epiece_ids.insert(e.id).second)
            report("DuplicateId", "duplicate embedded piece id '" + e.id + "'");
        const Piece* host = p.find_piece(e.host_piece);
        const Piece* image = p.find_piece(e.image_piece);
        if (!host) report("IntegrityError", "'" + e.id + "': unknown host piece '" + e.host_piece + "'");
        if (!image)
            report("IntegrityError", "'" + e.id + "': unknown image piece '" + e.image_piece + "'");
        if (e.degree < 1) report("IntegrityError", "'" + e.id + "': degree must be positive");

        std::map<std::string, int> image_cover;
        for (const auto& r : e.boundary) {
            if (!ecurve_ids.insert(r.curve).second)
                report("DuplicateId", "duplicate boundary curve id '" + r.curve + "'");
            if (r.covering_degree < 1 || r.covering_degree > e.degree)
                report("IntegrityError",
                       "'" + e.id + "': covering degree of '" + r.curve + "' out of range");
            image_cover[r.image_curve] += r.covering_degree;
            if (image && !image->is_boundary(r.image_curve))
                report("IntegrityError", "'" + e.id + "': image curve '" + r.image_curve +
                                             "' is not a boundary curve of '" + e.image_piece + "'");
            if (host)
                for (const auto& o : r.inside)
                    if (!host->objects().count(o))
                        report("IntegrityError",
                               "'" + e.id + "': hole object '" + o + "' is not in the host piece");
        }
        for (const auto& [curve, total] : image_cover)
            if (total > e.degree)
                report("DegreeError", "'" + e.id + "': total covering degree over '" + curve +
                                          "' exceeds the map degree");
        if (host) {
            for (const auto& b : host->boundary_curves) {
                int holes = 0;
                for (const auto& r : e.boundary) holes += r.inside.count(b) ? 1 : 0;
                if (holes != 1)
                    report("IntegrityError", "'" + e.id + "': host boundary curve '" + b +
                                                 "' must lie in exactly one hole");
            }
            for (const auto& m : host->marked_points) {
                int holes = 0;
                for (const auto& r : e.boundary) holes += r.inside.count(m) ? 1 : 0;
                if (holes > 1)
                    report("IntegrityError", "'" + e.id + "': marked point '" + m +
                                                 "' lies in several holes");
            }
        }
    }

    // planarity: within one embedded piece the hole sets are pairwise
    // disjoint; two embedded pieces sharing a host must be drawable disjoint,
    // i.e. one sits inside a hole of the other
    for (const auto& e : p.epieces) {
        for (std::size_t i = 0; i < e.boundary.size(); ++i)
            for (std::size_t j = i + 1; j < e.boundary.size(); ++j)
                if (!detail::disjoint(e.boundary[i].inside, e.boundary[j].inside))
                    report("PlanarityError",
                           "'" + e.id + "': holes '" + e.boundary[i].curve + "' and '" +
                               e.boundary[j].curve + "' overlap");
    }
    for (std::size_t i = 0; i < p.epieces.size(); ++i)
        for (std::size_t j = i + 1; j < p.epieces.size(); ++j) {
            const auto& a = p.epieces[i];
            const auto& b = p.epieces[j];
            if (a.host_piece != b.host_piece) continue;
            const Piece* host = p.find_piece(a.host_piece);
            if (!host) continue;
            const ObjectSet all = host->objects();
            bool ok = false;
            for (const auto& r : a.boundary) ok = ok || epiece_inside_hole(b, r.inside, all);
            for (const auto& r : b.boundary) ok = ok || epiece_inside_hole(a, r.inside, all);
            if (!ok)
                report("PlanarityError", "embedded pieces '" + a.id + "' and '" + b.id +
                                             "' cannot be drawn disjoint in '" + a.host_piece + "'");
        }

    for (const auto& [from, to] : p.marked_map) {
        if (!marked_ids.count(from))
            report("IntegrityError", "marked_map source '" + from + "' is not a marked point");
        if (!marked_ids.count(to))
            report("IntegrityError", "marked_map target '" + to + "' is not a marked point");
    }
    return out;
}

}  // namespace repsys
