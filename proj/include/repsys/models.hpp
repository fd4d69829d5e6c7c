#pragma once

// Explicit unbranched models. An affine spec (intervals, sub-intervals with
// integer slopes) or an annuli spec (annuli, essential sub-annuli with
// covering degrees) is realizable iff its transition matrix admits a
// positive vector v with Dv < v; the witness entries become the interval
// lengths resp. annulus moduli, sub-objects are placed in the prescribed
// order with the certified slack split into equal gaps, and the covering
// maps come out exact. Moduli follow the convention mod{r < |z| < 1} =
// -log r and are stored as exact rationals; radii exp(-v) exist only for
// rendering.

#include "repsys/matrix.hpp"
#include "repsys/renormalization.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace repsys {

class ModelCorrupt : public Error {
public:
    using Error::Error;
};

class InvalidWitness : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// affine interval systems

struct AffineBranch {
    std::size_t target = 0;  // interval index j
    int slope = 1;           // absolute slope d >= 1
    bool increasing = true;
};

struct AffineSpec {
    std::size_t intervals = 0;
    std::vector<std::vector<AffineBranch>> branches;  // per interval, left to right

    void validate() const {
        if (intervals < 1) throw Error("affine spec needs at least one interval");
        if (branches.size() != intervals) throw Error("affine spec: branch table shape mismatch");
        for (const auto& row : branches)
            for (const auto& b : row) {
                if (b.slope < 1) throw Error("affine spec: slopes must be >= 1");
                if (b.target >= intervals) throw Error("affine spec: target out of range");
            }
    }

    NonNegMatrix matrix() const {
        validate();
        NonNegMatrix d(intervals);
        for (std::size_t i = 0; i < intervals; ++i)
            for (const auto& b : branches[i]) d.add(i, b.target, Rational(1, b.slope));
        return d;
    }
};

struct AffineMap {
    Rational slope;   // +/- d
    Rational offset;  // x -> slope * x + offset

    Rational operator()(const Rational& x) const { return slope * x + offset; }
    Rational inverse(const Rational& y) const { return (y - offset) / slope; }
};

struct AffineSubinterval {
    std::size_t source = 0;
    std::size_t target = 0;
    int slope = 1;
    bool increasing = true;
    Rational left;
    Rational length;
    AffineMap map;
};

struct AffineModel {
    std::vector<Rational> lengths;  // |I_i| = witness entries
    std::vector<Rational> lefts;    // absolute placements
    std::vector<AffineSubinterval> subintervals;  // grouped by source, in order
};

/// Builds the model from a subunit witness: |I_i| = v_i, sub-intervals of
/// width |I_j|/d placed left to right with the slack split into equal gaps
/// (one more gap than sub-intervals). Obstructed when no witness exists.
inline std::variant<AffineModel, NotSubunitCertificate> realize_affine(const AffineSpec& spec) {
    const NonNegMatrix d = spec.matrix();
    const SubunitVerdict verdict = subunit_certificate(d);
    if (!verdict.is_subunit()) return verdict.certificate();

    AffineModel model;
    model.lengths = verdict.witness().v;
    Rational cursor(0);
    for (std::size_t i = 0; i < spec.intervals; ++i) {
        model.lefts.push_back(cursor);
        cursor += model.lengths[i] + 1;  // unit gap between intervals
    }
    for (std::size_t i = 0; i < spec.intervals; ++i) {
        Rational used(0);
        for (const auto& b : spec.branches[i]) used += model.lengths[b.target] / b.slope;
        const Rational gap =
            (model.lengths[i] - used) / Rational(spec.branches[i].size() + 1);
        Rational x = model.lefts[i] + gap;
        for (const auto& b : spec.branches[i]) {
            AffineSubinterval sub;
            sub.source = i;
            sub.target = b.target;
            sub.slope = b.slope;
            sub.increasing = b.increasing;
            sub.left = x;
            sub.length = model.lengths[b.target] / b.slope;
            const Rational target_left = model.lefts[b.target];
            if (b.increasing) {
                sub.map = AffineMap{Rational(b.slope), target_left - Rational(b.slope) * sub.left};
            } else {
                sub.map = AffineMap{Rational(-b.slope), target_left + model.lengths[b.target] +
                                                            Rational(b.slope) * sub.left};
            }
            model.subintervals.push_back(sub);
            x += sub.length + gap;
        }
    }
    return model;
}

/// Recomputes the transition matrix from the realized maps, verifying the
/// placement and covering invariants exactly on the way.
inline NonNegMatrix extract_transition(const AffineModel& m) {
    const std::size_t k = m.lengths.size();
    NonNegMatrix d(k);
    std::vector<Rational> cursor = m.lefts;  // last right endpoint per interval
    for (const auto& sub : m.subintervals) {
        if (sub.source >= k || sub.target >= k) throw ModelCorrupt("index out of range");
        if (sub.length * sub.slope != m.lengths[sub.target])
            throw ModelCorrupt("sub-interval width is not |target| / slope");
        if (sub.left < cursor[sub.source] ||
            sub.left + sub.length > m.lefts[sub.source] + m.lengths[sub.source])
            throw ModelCorrupt("sub-intervals overlap or leave their interval");
        cursor[sub.source] = sub.left + sub.length;
        const Rational lo = m.lefts[sub.target];
        const Rational hi = lo + m.lengths[sub.target];
        const Rational a = sub.map(sub.left);
        const Rational b = sub.map(sub.left + sub.length);
        if (!((sub.increasing && a == lo && b == hi) || (!sub.increasing && a == hi && b == lo)))
            throw ModelCorrupt("map does not cover the target interval exactly");
        d.add(sub.source, sub.target, Rational(1, sub.slope));
    }
    return d;
}

// ---------------------------------------------------------------------------
// round annuli coverings

struct AnnulusBranch {
    std::size_t target = 0;
    int degree = 1;
    bool preserves_labels = true;  // outer boundary to outer boundary
};

struct AnnuliSpec {
    std::size_t annuli = 0;
    std::vector<std::vector<AnnulusBranch>> branches;  // per annulus, outer to inner

    void validate() const {
        if (annuli < 1) throw Error("annuli spec needs at least one annulus");
        if (branches.size() != annuli) throw Error("annuli spec: branch table shape mismatch");
        for (const auto& row : branches)
            for (const auto& b : row) {
                if (b.degree < 1) throw Error("annuli spec: degrees must be >= 1");
                if (b.target >= annuli) throw Error("annuli spec: target out of range");
            }
    }

    NonNegMatrix matrix() const {
        validate();
        NonNegMatrix d(annuli);
        for (std::size_t i = 0; i < annuli; ++i)
            for (const auto& b : branches[i]) d.add(i, b.target, Rational(1, b.degree));
        return d;
    }
};

/// Essential sub-annulus of A_i in modulus coordinates: it occupies
/// {exp(-(depth+modulus)) <= |z| <= exp(-depth)} inside A_i = {exp(-v_i) <=
/// |z| <= 1}, and the covering map is z -> c z^d (label-preserving) or
/// z -> c z^-d, with log c rational.
struct AnnulusSubannulus {
    std::size_t source = 0;
    std::size_t target = 0;
    int degree = 1;
    bool preserves_labels = true;
    Rational depth;    // modulus distance from the unit circle
    Rational modulus;  // = v_target / degree
    Rational log_scale;  // log c of the covering map
};

struct AnnuliModel {
    std::vector<Rational> moduli;  // v_i = witness entries
    std::vector<AnnulusSubannulus> subannuli;
};

inline std::variant<AnnuliModel, NotSubunitCertificate> realize_annuli(const AnnuliSpec& spec) {
    const NonNegMatrix d = spec.matrix();
    const SubunitVerdict verdict = subunit_certificate(d);
    if (!verdict.is_subunit()) return verdict.certificate();

    AnnuliModel model;
    model.moduli = verdict.witness().v;
    for (std::size_t i = 0; i < spec.annuli; ++i) {
        Rational used(0);
        for (const auto& b : spec.branches[i]) used += model.moduli[b.target] / b.degree;
        const Rational gap = (model.moduli[i] - used) / Rational(spec.branches[i].size() + 1);
        Rational depth = gap;
        for (const auto& b : spec.branches[i]) {
            AnnulusSubannulus sub;
            sub.source = i;
            sub.target = b.target;
            sub.degree = b.degree;
            sub.preserves_labels = b.preserves_labels;
            sub.depth = depth;
            sub.modulus = model.moduli[b.target] / b.degree;
            // |z| = exp(-depth) must land on the outer (resp. inner) boundary
            sub.log_scale = b.preserves_labels
                                ? Rational(b.degree) * sub.depth
                                : -model.moduli[b.target] - Rational(b.degree) * sub.depth;
            model.subannuli.push_back(sub);
            depth += sub.modulus + gap;
        }
    }
    return model;
}

inline NonNegMatrix extract_transition(const AnnuliModel& m) {
    const std::size_t k = m.moduli.size();
    NonNegMatrix d(k);
    std::vector<Rational> cursor(k, Rational(0));  // deepest point used so far
    for (const auto& sub : m.subannuli) {
        if (sub.source >= k || sub.target >= k) throw ModelCorrupt("index out of range");
        if (sub.modulus * sub.degree != m.moduli[sub.target])
            throw ModelCorrupt("sub-annulus modulus is not mod(target) / degree");
        if (sub.depth < cursor[sub.source] ||
            sub.depth + sub.modulus > m.moduli[sub.source])
            throw ModelCorrupt("sub-annuli overlap or leave their annulus");
        cursor[sub.source] = sub.depth + sub.modulus;
        // boundary correspondence: the map must send the sub-annulus onto
        // the target annulus matching the label bit
        const Rational outer = sub.log_scale - Rational(sub.degree) * sub.depth;
        const Rational inner = sub.log_scale - Rational(sub.degree) * (sub.depth + sub.modulus);
        if (sub.preserves_labels) {
            if (outer != 0 || inner != -m.moduli[sub.target])
                throw ModelCorrupt("covering map does not match the label-preserving bit");
        } else {
            const Rational outer_rev = sub.log_scale + Rational(sub.degree) * sub.depth;
            const Rational inner_rev =
                sub.log_scale + Rational(sub.degree) * (sub.depth + sub.modulus);
            if (outer_rev != -m.moduli[sub.target] || inner_rev != 0)
                throw ModelCorrupt("covering map does not match the label-reversing bit");
        }
        d.add(sub.source, sub.target, Rational(1, sub.degree));
    }
    return d;
}

// ---------------------------------------------------------------------------
// non-escaping sets

/// One component of the depth-n preimage of the model pieces: an interval
/// [a, b] for affine models, a modulus band [a, b] measured from the unit
/// circle for annuli models.
struct NonEscapingComponent {
    std::size_t object = 0;  // top-level interval / annulus it lies in
    std::size_t depth = 0;
    Rational a;
    Rational b;
};

inline std::vector<NonEscapingComponent> nonescaping_depth(const AffineModel& m, std::size_t n) {
    std::vector<std::vector<std::pair<Rational, Rational>>> level(m.lengths.size());
    for (std::size_t i = 0; i < m.lengths.size(); ++i)
        level[i] = {{m.lefts[i], m.lefts[i] + m.lengths[i]}};
    for (std::size_t step = 0; step < n; ++step) {
        std::vector<std::vector<std::pair<Rational, Rational>>> next(m.lengths.size());
        for (const auto& sub : m.subintervals)
            for (const auto& [a, b] : level[sub.target]) {
                Rational x = sub.map.inverse(a);
                Rational y = sub.map.inverse(b);
                if (x > y) std::swap(x, y);
                next[sub.source].push_back({x, y});
            }
        level = std::move(next);
    }
    std::vector<NonEscapingComponent> out;
    for (std::size_t i = 0; i < level.size(); ++i) {
        std::sort(level[i].begin(), level[i].end());
        for (const auto& [a, b] : level[i]) out.push_back({i, n, a, b});
    }
    return out;
}

inline std::vector<NonEscapingComponent> nonescaping_depth(const AnnuliModel& m, std::size_t n) {
    std::vector<std::vector<std::pair<Rational, Rational>>> level(m.moduli.size());
    for (std::size_t i = 0; i < m.moduli.size(); ++i) level[i] = {{Rational(0), m.moduli[i]}};
    for (std::size_t step = 0; step < n; ++step) {
        std::vector<std::vector<std::pair<Rational, Rational>>> next(m.moduli.size());
        for (const auto& sub : m.subannuli)
            for (const auto& [a, b] : level[sub.target]) {
                // band [a, b] of the target pulls back into the sub-annulus
                Rational x, y;
                if (sub.preserves_labels) {
                    x = sub.depth + a / sub.degree;
                    y = sub.depth + b / sub.degree;
                } else {
                    x = sub.depth + (m.moduli[sub.target] - b) / sub.degree;
                    y = sub.depth + (m.moduli[sub.target] - a) / sub.degree;
                }
                next[sub.source].push_back({x, y});
            }
        level = std::move(next);
    }
    std::vector<NonEscapingComponent> out;
    for (std::size_t i = 0; i < level.size(); ++i) {
        std::sort(level[i].begin(), level[i].end());
        for (const auto& [a, b] : level[i]) out.push_back({i, n, a, b});
    }
    return out;
}

// ---------------------------------------------------------------------------
// ring moduli of round configurations

struct Circle {
    std::complex<double> center;
    double radius = 1.0;
};

/// Modulus of the ring bounded by two disjoint circles (nested or separate),
/// in the -log r convention: arccosh of the inversive distance.
inline double ring_modulus(const Circle& a, const Circle& b) {
    const double dist = std::abs(a.center - b.center);
    const bool separate = dist > a.radius + b.radius;
    const bool nested = dist < std::abs(a.radius - b.radius);
    if (!separate && !nested) throw Error("ring_modulus: circles overlap or touch");
    const double inversive =
        std::abs(dist * dist - a.radius * a.radius - b.radius * b.radius) /
        (2.0 * a.radius * b.radius);
    return std::acosh(inversive);
}

/// Conformal radius of a round disc at an interior marked point:
/// (R^2 - |w - c|^2) / R.
inline double conformal_radius(const Circle& disc, std::complex<double> marked) {
    const double d = std::abs(marked - disc.center);
    if (d >= disc.radius) throw Error("conformal_radius: point not inside the disc");
    return (disc.radius * disc.radius - d * d) / disc.radius;
}

namespace detail {

/// Image of a circle under z -> 1/z (circle not through 0).
inline Circle invert_circle(const Circle& c) {
    const double norm2 = std::norm(c.center) - c.radius * c.radius;
    if (norm2 == 0.0) throw Error("circle passes through the inversion pole");
    return Circle{std::conj(c.center) / norm2, std::abs(c.radius / norm2)};
}

}  // namespace detail

/// The additive constant log(16 / (C1 C2)) bounding the ring modulus between
/// equipotentials of two disjoint marked round discs: C1, C2 are the
/// conformal radii of the discs after the Moebius normalization sending the
/// marked points to 0 and infinity.
inline double ring_bound_constant(const Circle& disc1, std::complex<double> z1,
                                  const Circle& disc2, std::complex<double> z2) {
    // xi(z) = (z - z1) / (z - z2) = 1 + (z2 - z1) * inv(z - z2)
    const auto transform = [&](const Circle& c) {
        Circle shifted{c.center - z2, c.radius};
        Circle inv = detail::invert_circle(shifted);
        const std::complex<double> scale = z2 - z1;
        return Circle{inv.center * scale + 1.0, inv.radius * std::abs(scale)};
    };
    // C1: conformal radius of xi(disc1) at xi(z1) = 0
    const double c1 = conformal_radius(transform(disc1), {0.0, 0.0});
    // C2: conformal radius of xi(disc2) at infinity = radius of the inverted
    // image at 0
    const double c2 = conformal_radius(detail::invert_circle(transform(disc2)), {0.0, 0.0});
    return std::log(16.0 / (c1 * c2));
}

/// Equipotential of potential v in the marked round disc (centre marked):
/// the concentric circle of radius r e^{-v}.
inline Circle equipotential(const Circle& disc, const Rational& potential) {
    return Circle{disc.center, disc.radius * std::exp(-to_double(potential))};
}

// ---------------------------------------------------------------------------
// potential ledger

struct PotentialLedger {
    Rational M;  // scale
    Rational C;  // slack constant
    std::map<std::string, Rational> u;          // per boundary curve: M v
    std::map<std::string, Rational> rho;        // per cycle boundary curve
    std::map<std::string, Rational> sigma;      // u restricted to the first cycle piece
    std::map<std::string, Rational> kappa_phi;  // potential of the gamma image
    std::map<std::string, Rational> kappa_psi;  // potential of the beta image, keyed by beta
};

namespace detail {

/// Smallest integer scale M with M * min_slack > C (and M >= 1).
inline Rational minimal_scale(const Rational& c, const Rational& min_slack) {
    if (c < 0) throw Error("slack constant must be non-negative");
    if (min_slack <= 0) throw InvalidWitness("witness has no slack");
    const Rational threshold = c / min_slack;
    BigInt floor = numerator(threshold) / denominator(threshold);  // exact for >= 0
    Rational m(floor + 1);
    if (m < 1) m = 1;
    return m;
}

}  // namespace detail

/// Potential prescription for a renormalization cycle: verifies W_Y v < v,
/// scales by the minimal integer M with W_Y (Mv) + C 1 < Mv, and emits u,
/// rho, sigma and the kappa values of both equipotential families.
inline PotentialLedger prescribe_potentials(const RenormDescriptor& d,
                                            const TransitionMatrix& boundary_matrix,
                                            const std::map<std::string, Rational>& v,
                                            const Rational& c) {
    const std::size_t n = boundary_matrix.index.size();
    std::vector<Rational> vec(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = v.find(boundary_matrix.index[i]);
        if (it == v.end())
            throw InvalidWitness("no value for boundary curve '" + boundary_matrix.index[i] + "'");
        if (it->second <= 0) throw InvalidWitness("witness entries must be positive");
        vec[i] = it->second;
    }
    const auto wv = boundary_matrix.matrix.apply(vec);
    Rational min_slack;
    for (std::size_t i = 0; i < n; ++i) {
        const Rational slack = vec[i] - wv[i];
        if (slack <= 0)
            throw InvalidWitness("not a subunit witness: no slack at '" +
                                 boundary_matrix.index[i] + "'");
        if (i == 0 || slack < min_slack) min_slack = slack;
    }

    PotentialLedger ledger;
    ledger.C = c;
    ledger.M = detail::minimal_scale(c, min_slack);
    for (std::size_t i = 0; i < n; ++i) ledger.u[boundary_matrix.index[i]] = ledger.M * vec[i];

    for (const auto& piece : d.cycle)
        for (const auto& corr : d.boundary.at(piece)) {
            const auto u_gamma = ledger.u.find(corr.boundary_curve);
            const auto u_image = ledger.u.find(corr.image_curve);
            if (u_gamma == ledger.u.end() || u_image == ledger.u.end())
                throw InvalidWitness("boundary correspondence leaves the cycle boundary");
            const Rational psi = u_image->second / corr.degree;
            const Rational rho = (u_gamma->second - psi) * corr.degree;
            if (rho <= 0) throw InvalidWitness("non-positive extension potential at '" +
                                               corr.boundary_curve + "'");
            ledger.rho[corr.boundary_curve] = rho;
            ledger.kappa_phi[corr.boundary_curve] = u_gamma->second;
            ledger.kappa_psi[corr.e_curve] = psi;
        }

    for (const auto& corr : d.boundary.at(d.cycle.front()))
        ledger.sigma[corr.boundary_curve] = ledger.u.at(corr.boundary_curve);
    return ledger;
}

/// Per-boundary-curve potential data of one complex piece (periodic or
/// not): the parallel curve beta homotopic to gamma, the outer and inner
/// equipotential values u(gamma) and u(F(beta))/deg, and the extension
/// potential rho.
struct PiecePotential {
    std::string gamma;
    std::string beta;
    int degree = 1;
    std::string image;
    Rational kappa_phi;
    Rational kappa_psi;
    Rational rho;
};

inline std::vector<PiecePotential> piece_potentials(const Presentation& p, const Piece& s,
                                                    const std::map<std::string, Rational>& u) {
    const auto epiece_id = parallel_piece(p, s);
    if (!epiece_id) throw NotConstantComplexity("piece '" + s.id + "' has no parallel piece");
    const EPieceEmbedding& e = *p.find_epiece(*epiece_id);
    std::vector<PiecePotential> out;
    for (const auto& gamma : s.boundary_curves) {
        const BoundaryRecord* hole = nullptr;
        for (const auto& r : e.boundary)
            if (r.inside.count(gamma)) hole = &r;
        if (!hole) throw Error("parallel piece '" + e.id + "' has no hole around '" + gamma + "'");
        const auto u_gamma = u.find(gamma);
        const auto u_image = u.find(hole->image_curve);
        if (u_gamma == u.end() || u_image == u.end())
            throw InvalidWitness("no potential value for '" + gamma + "' or its image");
        PiecePotential entry;
        entry.gamma = gamma;
        entry.beta = hole->curve;
        entry.degree = hole->covering_degree;
        entry.image = hole->image_curve;
        entry.kappa_phi = u_gamma->second;
        entry.kappa_psi = u_image->second / hole->covering_degree;
        entry.rho = (entry.kappa_phi - entry.kappa_psi) * hole->covering_degree;
        if (entry.rho <= 0)
            throw InvalidWitness("non-positive extension potential at '" + gamma + "'");
        out.push_back(std::move(entry));
    }
    return out;
}

struct GluingBudget {
    std::map<std::string, Rational> v;
    Rational M;
    std::map<std::string, Rational> u;
};

/// Derives the witness from the exact certificate and scales it so that
/// W_Y (Mv) + C 1 < Mv; Obstructed when the certificate fails.
inline std::variant<GluingBudget, NotSubunitCertificate> gluing_budget(
    const TransitionMatrix& boundary_matrix, const Rational& c) {
    const SubunitVerdict verdict = subunit_certificate(boundary_matrix.matrix);
    if (!verdict.is_subunit()) return verdict.certificate();
    const auto& v = verdict.witness().v;
    const auto wv = boundary_matrix.matrix.apply(v);
    Rational min_slack;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Rational slack = v[i] - wv[i];
        if (i == 0 || slack < min_slack) min_slack = slack;
    }
    GluingBudget budget;
    budget.M = v.empty() ? Rational(1) : detail::minimal_scale(c, min_slack);
    for (std::size_t i = 0; i < v.size(); ++i) {
        budget.v[boundary_matrix.index[i]] = v[i];
        budget.u[boundary_matrix.index[i]] = budget.M * v[i];
    }
    return budget;
}

}  // namespace repsys
