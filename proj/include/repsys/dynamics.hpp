#pragma once

// Curve dynamics over a finite universe of named homotopy classes. The
// pullback table is user-supplied data: for each universe curve, the classes
// of its preimage components with their covering degrees (NULL and
// PERIPHERAL entries drop out of every transition matrix but are kept for
// bookkeeping). Transition matrices have entries b_ij = sum of 1/degree over
// the preimage records of curve j landing in class i.
//
// Obstruction verdicts are scoped: the quantifier "some multicurve" ranges
// only over the supplied universe, so a clean result is reported as
// unobstructed *within universe*, never absolutely.

#include "repsys/matrix.hpp"
#include "repsys/puzzle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace repsys {

struct PreimageRecord {
    enum class Target { Curve, Null, Peripheral };
    Target target = Target::Curve;
    std::string curve;  // universe id when target == Curve
    int degree = 1;

    static PreimageRecord to_curve(std::string id, int degree) {
        return {Target::Curve, std::move(id), degree};
    }
    static PreimageRecord null(int degree = 1) { return {Target::Null, {}, degree}; }
    static PreimageRecord peripheral(int degree = 1) { return {Target::Peripheral, {}, degree}; }

    bool is_curve() const { return target == Target::Curve; }
};

class PullbackTable {
public:
    PullbackTable() = default;
    PullbackTable(std::vector<std::string> universe,
                  std::map<std::string, std::vector<PreimageRecord>> rows)
        : universe_(std::move(universe)), rows_(std::move(rows)) {
        for (const auto& [curve, records] : rows_) {
            require_in_universe(curve);
            for (const auto& r : records) {
                if (r.degree < 1) throw Error("preimage degree must be positive");
                if (r.is_curve()) require_in_universe(r.curve);
            }
        }
    }

    const std::vector<std::string>& universe() const { return universe_; }

    bool in_universe(const std::string& id) const {
        return std::find(universe_.begin(), universe_.end(), id) != universe_.end();
    }

    bool has_row(const std::string& id) const { return rows_.count(id) != 0; }

    const std::vector<PreimageRecord>& row(const std::string& id) const {
        const auto it = rows_.find(id);
        if (it == rows_.end()) throw Error("pullback table has no row for '" + id + "'");
        return it->second;
    }

    /// Closed: every universe curve has a row (so pullbacks never leave the
    /// table).
    bool closed() const {
        return std::all_of(universe_.begin(), universe_.end(),
                           [&](const std::string& id) { return has_row(id); });
    }

    const std::map<std::string, std::vector<PreimageRecord>>& rows() const { return rows_; }

private:
    void require_in_universe(const std::string& id) const {
        if (!in_universe(id)) throw Error("curve '" + id + "' is outside the universe");
    }

    std::vector<std::string> universe_;
    std::map<std::string, std::vector<PreimageRecord>> rows_;
};

struct TransitionMatrix {
    std::vector<std::string> index;  // curve ids, row/column order
    NonNegMatrix matrix;

    std::optional<std::size_t> position(const std::string& id) const {
        const auto it = std::find(index.begin(), index.end(), id);
        if (it == index.end()) return std::nullopt;
        return static_cast<std::size_t>(it - index.begin());
    }
};

/// b_ij = sum of 1/degree over preimage records of curve j whose class is
/// curve i; zero when there are none.
inline TransitionMatrix transition_matrix(const std::vector<std::string>& curves,
                                          const PullbackTable& table) {
    TransitionMatrix out;
    out.index = curves;
    out.matrix = NonNegMatrix(curves.size());
    for (std::size_t j = 0; j < curves.size(); ++j) {
        if (!table.in_universe(curves[j]))
            throw Error("curve '" + curves[j] + "' is outside the universe");
        if (!table.has_row(curves[j])) continue;
        for (const auto& r : table.row(curves[j])) {
            if (!r.is_curve()) continue;
            const auto i = out.position(r.curve);
            if (!i) continue;
            out.matrix.add(*i, j, Rational(1, r.degree));
        }
    }
    return out;
}

/// Deduplicated classes of the non-null, non-peripheral preimages.
inline std::vector<std::string> pullback(const std::vector<std::string>& curves,
                                         const PullbackTable& table) {
    std::vector<std::string> out;
    for (const auto& id : curves) {
        if (!table.in_universe(id)) throw Error("curve '" + id + "' is outside the universe");
        for (const auto& r : table.row(id))
            if (r.is_curve() && std::find(out.begin(), out.end(), r.curve) == out.end())
                out.push_back(r.curve);
    }
    return out;
}

struct StabilizeResult {
    std::vector<std::string> stable;
    std::size_t steps = 0;
};

/// Iterates curves := curves + pullback(curves) to the set fixpoint; at most
/// |universe| rounds since the set grows strictly until stable.
inline StabilizeResult stabilize(const std::vector<std::string>& start,
                                 const PullbackTable& table) {
    StabilizeResult result;
    result.stable = start;
    std::sort(result.stable.begin(), result.stable.end());
    result.stable.erase(std::unique(result.stable.begin(), result.stable.end()),
                        result.stable.end());
    for (;;) {
        const auto pulled = pullback(result.stable, table);
        std::vector<std::string> merged = result.stable;
        for (const auto& id : pulled)
            if (std::find(merged.begin(), merged.end(), id) == merged.end()) merged.push_back(id);
        std::sort(merged.begin(), merged.end());
        if (merged == result.stable) break;
        result.stable = std::move(merged);
        ++result.steps;
    }
    return result;
}

struct ObstructionReport {
    bool obstructed = false;
    // scope qualifier is part of the contract: the verdict quantifies only
    // over the supplied universe
    std::string scope = "within-universe";

    // obstructed case: an irreducible sub-multicurve with lambda >= 1
    std::vector<std::string> irreducible_curves;
    TransitionMatrix irreducible_matrix;
    NotSubunitCertificate certificate{Rational(0), {}};
    std::vector<std::string> stabilized;

    // unobstructed case: enclosure of the maximal lambda over the universe
    Enclosure lambda{Rational(0), Rational(0)};
    SubunitWitness witness;  // for the full universe matrix
};

/// Builds the transition digraph on the whole universe, condenses it into
/// strongly connected components, and decides each diagonal block exactly.
/// Any block with lambda >= 1 yields Obstructed together with its
/// stabilization; otherwise the verdict is unobstructed-within-universe with
/// a numeric lambda enclosure.
inline ObstructionReport obstruction_verdict(const PullbackTable& table,
                                             const Rational& tol = Rational(kDefaultTol)) {
    if (!table.closed()) throw Error("pullback table is not closed over its universe");
    const auto& universe = table.universe();
    const TransitionMatrix full = transition_matrix(universe, table);

    ObstructionReport report;
    // adjacency from the matrix support; the SCC partition is the same in
    // either orientation
    std::vector<std::vector<std::size_t>> adj(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = 0; j < universe.size(); ++j)
            if (full.matrix(i, j) != 0) adj[i].push_back(j);

    auto comps = detail::strongly_connected_components(adj);
    std::sort(comps.begin(), comps.end());
    for (const auto& comp : comps) {
        const NonNegMatrix block = full.matrix.submatrix(comp);
        const SubunitVerdict verdict = subunit_certificate(block);
        if (verdict.is_subunit()) continue;

        report.obstructed = true;
        for (const std::size_t idx : comp) report.irreducible_curves.push_back(universe[idx]);
        report.irreducible_matrix =
            TransitionMatrix{report.irreducible_curves, block};
        report.certificate = verdict.certificate();
        report.stabilized = stabilize(report.irreducible_curves, table).stable;
        return report;
    }

    report.lambda = spectral_radius(full.matrix, tol);
    report.witness = subunit_certificate(full.matrix).witness();
    return report;
}

}  // namespace repsys
