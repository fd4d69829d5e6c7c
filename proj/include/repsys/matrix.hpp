#pragma once

// Non-negative square matrices over exact rationals: leading-eigenvalue
// certificates, rigorous enclosures, block projections, nilpotency.
//
// Two separate routes to the leading eigenvalue lambda(D):
//
//   * subunit_certificate decides lambda(D) < 1 exactly. Solve (I-D)v = 1
//     over the rationals; lambda < 1 iff the system is solvable with v > 0
//     and Dv < v, both checkable without tolerances. (If lambda < 1 then
//     (I-D)^-1 = sum D^k >= 0, so v >= 1 > 0 and Dv = v - 1 < v; conversely
//     a positive v with Dv < v forces lambda < 1.)
//
//   * spectral_radius returns an enclosure [lo, hi] with hi - lo <= tol.
//     The bracket is sound for every positive test vector v:
//         min_i (Dv)_i / v_i  <=  lambda(D)  <=  max_i (Dv)_i / v_i,
//     and the ratios are evaluated in exact arithmetic on power-iterated
//     vectors, so the true lambda always lies in [lo, hi]. Reducible
//     matrices are condensed over strongly connected components first;
//     lambda(D) is the maximum over the diagonal blocks.

#include "repsys/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace repsys {

class InvalidMatrix : public Error {
public:
    using Error::Error;
};

class NonNegMatrix {
public:
    NonNegMatrix() = default;

    explicit NonNegMatrix(std::size_t n) : n_(n), a_(n * n, Rational(0)) {}

    static NonNegMatrix from_rows(const std::vector<std::vector<Rational>>& rows) {
        NonNegMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw InvalidMatrix("matrix is not square");
            for (std::size_t j = 0; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
        }
        return m;
    }

    std::size_t size() const { return n_; }

    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, const Rational& value) {
        if (value < 0) throw InvalidMatrix("negative entry");
        a_[i * n_ + j] = value;
    }

    void add(std::size_t i, std::size_t j, const Rational& value) {
        set(i, j, (*this)(i, j) + value);
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const Rational& x) { return x == 0; });
    }

    NonNegMatrix multiply(const NonNegMatrix& rhs) const {
        if (rhs.n_ != n_) throw InvalidMatrix("dimension mismatch");
        NonNegMatrix out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                const Rational& aik = (*this)(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < n_; ++j)
                    if (rhs(k, j) != 0) out.a_[i * n_ + j] += aik * rhs(k, j);
            }
        return out;
    }

    /// Square submatrix on the given (distinct) indices, in the given order.
    NonNegMatrix submatrix(const std::vector<std::size_t>& idx) const {
        NonNegMatrix out(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out.set(i, j, (*this)(idx[i], idx[j]));
        return out;
    }

    std::vector<Rational> apply(const std::vector<Rational>& v) const {
        if (v.size() != n_) throw InvalidMatrix("vector dimension mismatch");
        std::vector<Rational> out(n_, Rational(0));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if ((*this)(i, j) != 0) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    bool operator==(const NonNegMatrix& rhs) const { return n_ == rhs.n_ && a_ == rhs.a_; }

private:
    std::size_t n_ = 0;
    std::vector<Rational> a_;  // row-major
};

/// Exact witness: v > 0 with Dv < v entrywise, hence lambda(D) < 1.
struct SubunitWitness {
    std::vector<Rational> v;
};

/// lambda(D) >= 1, certified by an exact Collatz-Wielandt lower bound on an
/// irreducible block, together with an approximate eigenvector (zero outside
/// the block).
struct NotSubunitCertificate {
    Rational lambda_lower_bound;
    std::vector<double> eigenvector;
};

class SubunitVerdict {
public:
    static SubunitVerdict subunit(SubunitWitness w) { return SubunitVerdict(std::move(w)); }
    static SubunitVerdict not_subunit(NotSubunitCertificate c) { return SubunitVerdict(std::move(c)); }

    bool is_subunit() const { return std::holds_alternative<SubunitWitness>(value_); }
    const SubunitWitness& witness() const { return std::get<SubunitWitness>(value_); }
    const NotSubunitCertificate& certificate() const { return std::get<NotSubunitCertificate>(value_); }

private:
    explicit SubunitVerdict(std::variant<SubunitWitness, NotSubunitCertificate> v)
        : value_(std::move(v)) {}
    std::variant<SubunitWitness, NotSubunitCertificate> value_;
};

/// Rigorous bracket around the leading eigenvalue: lo <= lambda <= hi.
struct Enclosure {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    double lo_d() const { return to_double(lo); }
    double hi_d() const { return to_double(hi); }
    double mid_d() const { return to_double((lo + hi) / 2); }
};

namespace detail {

/// Strongly connected components (iterative Tarjan). Components are emitted
/// in reverse topological order of the condensation; each component lists its
/// vertices in increasing order.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kNone), low(n, 0), edge_pos(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack, call;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t next_index = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        call.push_back(root);
        while (!call.empty()) {
            const std::size_t v = call.back();
            if (index[v] == kNone) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (edge_pos[v] < adj[v].size()) {
                const std::size_t w = adj[v][edge_pos[v]];
                if (index[w] == kNone) {
                    call.push_back(w);
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
                ++edge_pos[v];
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                for (;;) {
                    const std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                    if (w == v) break;
                }
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back();
                low[parent] = std::min(low[parent], low[v]);
                ++edge_pos[parent];
            }
        }
    }
    return comps;
}

/// Exact Gaussian elimination; returns the solution of Ax = b or nullopt
/// when A is singular.
inline std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a,
                                                         std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const Rational factor = a[row][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
            b[row] -= factor * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Exact Collatz-Wielandt bracket of lambda(block) from a positive double
/// vector: ratios of (B + I)v over v, minus one.
inline Enclosure exact_bracket(const NonNegMatrix& block, const std::vector<double>& v) {
    std::vector<Rational> vr(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double clamped = std::max(v[i], 1e-300);
        vr[i] = rational_from_double(clamped);
    }
    std::vector<Rational> w = block.apply(vr);
    Rational lo, hi;
    for (std::size_t i = 0; i < vr.size(); ++i) {
        const Rational ratio = (w[i] + vr[i]) / vr[i] - 1;
        if (i == 0 || ratio < lo) lo = ratio;
        if (i == 0 || ratio > hi) hi = ratio;
    }
    if (lo < 0) lo = 0;
    return Enclosure{lo, hi};
}

/// Enclosure of lambda on one irreducible block, to width <= tol. Power
/// iteration on B + I (primitive, so convergent) drives the exact bracket;
/// repeated squaring takes over if plain iteration stalls.
inline Enclosure irreducible_enclosure(const NonNegMatrix& block, const Rational& tol,
                                       std::vector<double>* eigenvector_out = nullptr) {
    const std::size_t m = block.size();
    if (m == 1) {
        if (eigenvector_out) *eigenvector_out = {1.0};
        return Enclosure{block(0, 0), block(0, 0)};
    }

    std::vector<std::vector<double>> p(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) p[i][j] = to_double(block(i, j));
        p[i][i] += 1.0;
    }
    const auto normalize = [](std::vector<double>& x) {
        const double top = *std::max_element(x.begin(), x.end());
        for (double& e : x) e /= top;
    };
    const auto apply_p = [&](const std::vector<double>& x) {
        std::vector<double> y(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) y[i] += p[i][j] * x[j];
        return y;
    };

    std::vector<double> v(m, 1.0);
    Enclosure best = exact_bracket(block, v);
    std::size_t round = 0;
    while (best.width() > tol) {
        if (round < 24) {
            for (int k = 0; k < 16; ++k) {
                v = apply_p(v);
                normalize(v);
            }
        } else if (round < 90) {
            // square P; quadratic convergence in the exponent
            std::vector<std::vector<double>> q(m, std::vector<double>(m, 0.0));
            double top = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t j = 0; j < m; ++j) {
                        q[i][j] += p[i][k] * p[k][j];
                        top = std::max(top, q[i][j]);
                    }
            for (auto& row : q)
                for (double& e : row) e /= top;
            p = std::move(q);
            v.assign(m, 1.0);
            v = apply_p(v);
            normalize(v);
        } else {
            throw Error("spectral_radius: enclosure did not reach the requested tolerance");
        }
        const Enclosure next = exact_bracket(block, v);
        if (next.width() < best.width()) best = next;
        ++round;
    }
    if (eigenvector_out) *eigenvector_out = v;
    return best;
}

inline void validate(const NonNegMatrix& d) {
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d(i, j) < 0) throw InvalidMatrix("negative entry");
}

inline std::vector<std::vector<std::size_t>> support_components(const NonNegMatrix& d) {
    std::vector<std::vector<std::size_t>> adj(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d(i, j) != 0) adj[i].push_back(j);
    return strongly_connected_components(adj);
}

}  // namespace detail

/// Enclosure [lo, hi] of the leading eigenvalue with hi - lo <= tol and the
/// true lambda(D) guaranteed inside. Reducible input is condensed over
/// strongly connected components.
inline Enclosure spectral_radius(const NonNegMatrix& d, const Rational& tol) {
    if (tol <= 0) throw Error("spectral_radius: tol must be positive");
    detail::validate(d);
    if (d.size() == 0) return Enclosure{Rational(0), Rational(0)};
    Enclosure out{Rational(0), Rational(0)};
    for (const auto& comp : detail::support_components(d)) {
        const Enclosure e = detail::irreducible_enclosure(d.submatrix(comp), tol);
        out.lo = std::max(out.lo, e.lo);
        out.hi = std::max(out.hi, e.hi);
    }
    return out;
}

inline constexpr double kDefaultTol = 1e-9;

/// Exact dichotomy lambda(D) < 1 vs lambda(D) >= 1. The Subunit branch
/// carries v > 0 with Dv < v (verified in rational arithmetic); the
/// NotSubunit branch carries a numeric lower bound on lambda.
inline SubunitVerdict subunit_certificate(const NonNegMatrix& d) {
    detail::validate(d);
    const std::size_t n = d.size();
    if (n == 0) return SubunitVerdict::subunit(SubunitWitness{{}});

    std::vector<std::vector<Rational>> lhs(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lhs[i][j] = (i == j ? Rational(1) : Rational(0)) - d(i, j);
    const auto solved = detail::solve_linear(std::move(lhs), std::vector<Rational>(n, Rational(1)));

    if (solved) {
        const auto& v = *solved;
        bool ok = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x > 0; });
        if (ok) {
            const auto dv = d.apply(v);
            for (std::size_t i = 0; ok && i < n; ++i) ok = dv[i] < v[i];
        }
        if (ok) return SubunitVerdict::subunit(SubunitWitness{v});
    }

    // lambda >= 1: certify with the widest block and its approximate eigenvector
    NotSubunitCertificate cert{Rational(0), std::vector<double>(n, 0.0)};
    for (const auto& comp : detail::support_components(d)) {
        std::vector<double> local;
        const Enclosure e =
            detail::irreducible_enclosure(d.submatrix(comp), Rational(kDefaultTol), &local);
        if (e.lo >= cert.lambda_lower_bound) {
            cert.lambda_lower_bound = e.lo;
            std::fill(cert.eigenvector.begin(), cert.eigenvector.end(), 0.0);
            for (std::size_t i = 0; i < comp.size(); ++i) cert.eigenvector[comp[i]] = local[i];
        }
    }
    return SubunitVerdict::not_subunit(std::move(cert));
}

/// Failure evidence for project_blocks: two columns of block (block_row,
/// block_col) with different sums.
struct NotProjected {
    std::size_t block_row;
    std::size_t block_col;
    std::size_t column_a;  // global column indices
    std::size_t column_b;
};

namespace detail {

inline void validate_partition(std::size_t n, const std::vector<std::vector<std::size_t>>& partition) {
    std::vector<bool> seen(n, false);
    for (const auto& group : partition) {
        if (group.empty()) throw Error("partition group is empty");
        for (std::size_t idx : group) {
            if (idx >= n || seen[idx]) throw Error("partition does not cover indices disjointly");
            seen[idx] = true;
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw Error("partition does not cover all indices");
}

inline Rational block_column_sum(const NonNegMatrix& a, const std::vector<std::size_t>& rows,
                                 std::size_t col) {
    Rational s(0);
    for (std::size_t r : rows) s += a(r, col);
    return s;
}

}  // namespace detail

/// Collapses a projected block decomposition to the matrix of its block
/// column sums; lambda is preserved. Fails with the offending column pair
/// when some block has non-constant column sums.
inline std::variant<NonNegMatrix, NotProjected> project_blocks(
    const NonNegMatrix& a, const std::vector<std::vector<std::size_t>>& partition) {
    detail::validate(a);
    detail::validate_partition(a.size(), partition);
    const std::size_t k = partition.size();
    NonNegMatrix b(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const Rational first = detail::block_column_sum(a, partition[i], partition[j][0]);
            for (std::size_t c = 1; c < partition[j].size(); ++c) {
                if (detail::block_column_sum(a, partition[i], partition[j][c]) != first)
                    return NotProjected{i, j, partition[j][0], partition[j][c]};
            }
            b.set(i, j, first);
        }
    return b;
}

/// True iff every block column sum of a is at most the matching entry of
/// bound; then lambda(a) <= lambda(bound).
inline bool column_bound_compare(const NonNegMatrix& a,
                                 const std::vector<std::vector<std::size_t>>& partition,
                                 const NonNegMatrix& bound) {
    detail::validate(a);
    detail::validate_partition(a.size(), partition);
    if (bound.size() != partition.size()) throw Error("column_bound_compare: shape mismatch");
    for (std::size_t i = 0; i < partition.size(); ++i)
        for (std::size_t j = 0; j < partition.size(); ++j)
            for (std::size_t c : partition[j])
                if (detail::block_column_sum(a, partition[i], c) > bound(i, j)) return false;
    return true;
}

/// Smallest q >= 1 with M^q = 0 (exact powers), or nullopt. q <= n whenever
/// it exists.
inline std::optional<std::size_t> nilpotency_index(const NonNegMatrix& m) {
    detail::validate(m);
    if (m.size() == 0) return 1;
    NonNegMatrix power = m;
    for (std::size_t q = 1; q <= m.size(); ++q) {
        if (power.is_zero()) return q;
        power = power.multiply(m);
    }
    return std::nullopt;
}

/// Structure report for a partition X | Z of the index set: the X-row /
/// Z-column block must vanish and the Z diagonal block must be nilpotent;
/// then lambda(W_X) = lambda(W) (checked numerically to tol).
struct BlockSplitReport {
    bool x_z_block_zero = false;
    std::optional<std::size_t> z_nilpotency;
    std::optional<Enclosure> lambda_x;
    std::optional<Enclosure> lambda_full;
    std::optional<bool> lambda_agree;

    bool structure_holds() const { return x_z_block_zero && z_nilpotency.has_value(); }
};

inline BlockSplitReport block_split_check(const NonNegMatrix& w, std::vector<std::size_t> x,
                                          std::vector<std::size_t> z,
                                          const Rational& tol = Rational(kDefaultTol)) {
    detail::validate(w);
    {
        auto partition = std::vector<std::vector<std::size_t>>{};
        if (!x.empty()) partition.push_back(x);
        if (!z.empty()) partition.push_back(z);
        detail::validate_partition(w.size(), partition);
    }
    BlockSplitReport report;
    report.x_z_block_zero = true;
    for (std::size_t i : x)
        for (std::size_t j : z)
            if (w(i, j) != 0) report.x_z_block_zero = false;
    report.z_nilpotency = nilpotency_index(w.submatrix(z));
    if (!report.structure_holds()) return report;

    report.lambda_x = spectral_radius(w.submatrix(x), tol);
    report.lambda_full = spectral_radius(w, tol);
    const Rational gap = std::max(report.lambda_x->lo, report.lambda_full->lo) -
                         std::min(report.lambda_x->hi, report.lambda_full->hi);
    report.lambda_agree = gap <= tol;
    return report;
}

}  // namespace repsys
