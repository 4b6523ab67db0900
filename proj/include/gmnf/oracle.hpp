#ifndef GMNF_ORACLE_HPP
#define GMNF_ORACLE_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "gmnf/caps.hpp"
#include "gmnf/instance.hpp"

namespace gmnf {

// Ground-truth solver result. Every optimal vertex of the feasible polytope
// is enumerated, so `unique` is decided exactly.
struct OracleResult {
    enum class Status { optimal, infeasible };
    Status status = Status::infeasible;
    Rat value;
    std::vector<std::vector<Rat>> optima;  // distinct optimal vertex solutions
    bool unique = false;
};

namespace detail {

// Exact Gaussian elimination to reduced row echelon form of [A | rhs].
// Pivot selection: nonzero entry in the current column with the smallest
// numerator bit length (deterministic, keeps numbers small).
struct Rref {
    std::vector<std::vector<Rat>> mat;  // rows x (cols + 1)
    std::vector<int> pivot_cols;
    std::vector<int> pivot_rows;        // original row index of each pivot row
    bool inconsistent = false;          // a row 0 = nonzero appeared
};

inline Rref rref(std::vector<std::vector<Rat>> mat, int cols) {
    Rref out;
    const int rows = static_cast<int>(mat.size());
    std::vector<int> row_origin(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) row_origin[static_cast<std::size_t>(i)] = i;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int best = -1;
        std::size_t best_bits = 0;
        for (int i = r; i < rows; ++i) {
            const Rat& x = mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (sgn(x) == 0) continue;
            std::size_t bits = mpz_sizeinbase(x.get_num().get_mpz_t(), 2);
            if (best == -1 || bits < best_bits) {
                best = i;
                best_bits = bits;
            }
        }
        if (best == -1) continue;
        std::swap(mat[static_cast<std::size_t>(r)], mat[static_cast<std::size_t>(best)]);
        std::swap(row_origin[static_cast<std::size_t>(r)], row_origin[static_cast<std::size_t>(best)]);
        Rat inv = 1 / mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        for (auto& x : mat[static_cast<std::size_t>(r)]) x *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            Rat factor = mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (sgn(factor) == 0) continue;
            for (std::size_t j = 0; j < mat[static_cast<std::size_t>(i)].size(); ++j)
                mat[static_cast<std::size_t>(i)][j] -= factor * mat[static_cast<std::size_t>(r)][j];
        }
        out.pivot_cols.push_back(c);
        out.pivot_rows.push_back(row_origin[static_cast<std::size_t>(r)]);
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (sgn(mat[static_cast<std::size_t>(i)].back()) != 0) out.inconsistent = true;
    out.mat = std::move(mat);
    return out;
}

// Solves the square system M * x = rhs exactly; nullopt when singular.
inline std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> m,
                                                    std::vector<std::vector<Rat>> rhs_cols) {
    const int r = static_cast<int>(m.size());
    const int k = static_cast<int>(rhs_cols.size());
    for (int i = 0; i < r; ++i)
        m[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(r + k));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < r; ++i)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(r + j)] =
                rhs_cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto red = rref(std::move(m), r);
    if (static_cast<int>(red.pivot_cols.size()) != r) return std::nullopt;
    std::vector<Rat> flat(static_cast<std::size_t>(r * k));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < k; ++j)
            flat[static_cast<std::size_t>(j * r + i)] =
                red.mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(r + j)];
    return flat;
}

}  // namespace detail

// Checks balance rows (where masked in) exactly and the box constraints.
inline bool flow_feasible(const GmnfInstance<Rat>& inst, const std::vector<Rat>& x,
                          const std::vector<bool>* balance_mask = nullptr) {
    for (int e = 0; e < inst.m(); ++e) {
        if (x[static_cast<std::size_t>(e)] < 0) return false;
        if (x[static_cast<std::size_t>(e)] > inst.capacity[static_cast<std::size_t>(e)]) return false;
    }
    for (int v = 0; v < inst.n(); ++v) {
        if (balance_mask && !(*balance_mask)[static_cast<std::size_t>(v)]) continue;
        Rat sum = 0;
        for (int e : inst.graph.incident[static_cast<std::size_t>(v)])
            sum += inst.coeff(v, e) * x[static_cast<std::size_t>(e)];
        if (sum != inst.balance[static_cast<std::size_t>(v)]) return false;
    }
    return true;
}

// Exact optimum by enumerating basic solutions: for every column subset B
// with |B| = rank of the balance system, every off-basis variable is pinned
// to 0 or its capacity and the balance equations are solved for x_B. The
// feasible region is a polytope, so the optimum is attained at such a
// vertex and the enumeration is complete.
//
// `balance_mask` (optional) selects which vertices carry balance rows; used
// to pose computation-tree problems with free frontier vertices.
inline OracleResult solve_exact(const GmnfInstance<Rat>& inst,
                                const std::vector<bool>* balance_mask = nullptr) {
    const int m = inst.m();
    const int n = inst.n();
    if (m > caps().oracle_edges)
        throw SizeCapError("oracle limited to " + std::to_string(caps().oracle_edges) + " edges");

    std::vector<int> rows;
    for (int v = 0; v < n; ++v)
        if (!balance_mask || (*balance_mask)[static_cast<std::size_t>(v)]) rows.push_back(v);

    // A over the masked rows, with the rhs appended for the consistency check.
    std::vector<std::vector<Rat>> a(rows.size(), std::vector<Rat>(static_cast<std::size_t>(m) + 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int v = rows[i];
        for (int e : inst.graph.incident[static_cast<std::size_t>(v)])
            a[i][static_cast<std::size_t>(e)] += inst.coeff(v, e);
        a[i][static_cast<std::size_t>(m)] = inst.balance[static_cast<std::size_t>(v)];
    }

    OracleResult result;
    auto red = detail::rref(a, m);
    if (red.inconsistent) return result;  // equality system unsolvable
    const int rank = static_cast<int>(red.pivot_cols.size());

    // Independent-row restriction of the original system; the dropped rows
    // are linear combinations of these and stay satisfied automatically.
    std::vector<std::vector<Rat>> ar(static_cast<std::size_t>(rank),
                                     std::vector<Rat>(static_cast<std::size_t>(m)));
    std::vector<Rat> fr(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i) {
        std::size_t src = static_cast<std::size_t>(red.pivot_rows[static_cast<std::size_t>(i)]);
        for (int e = 0; e < m; ++e)
            ar[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] =
                a[src][static_cast<std::size_t>(e)];
        fr[static_cast<std::size_t>(i)] = a[src][static_cast<std::size_t>(m)];
    }

    std::set<std::vector<Rat>> best_set;
    Rat best_value;
    bool have_best = false;

    auto offer = [&](const std::vector<Rat>& x) {
        Rat value = objective(inst, x);
        if (!have_best || value < best_value) {
            have_best = true;
            best_value = value;
            best_set.clear();
            best_set.insert(x);
        } else if (value == best_value) {
            best_set.insert(x);
        }
    };

    // Iterate subsets B of size `rank` in lexicographic order.
    std::vector<int> basis(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i) basis[static_cast<std::size_t>(i)] = i;
    std::vector<Rat> x(static_cast<std::size_t>(m));

    auto process_basis = [&]() {
        // Factor A_B once: solve A_B * [x0 | W_j...] = [fr | A_j...].
        std::vector<std::vector<Rat>> ab(static_cast<std::size_t>(rank),
                                         std::vector<Rat>(static_cast<std::size_t>(rank)));
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j)
                ab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    ar[static_cast<std::size_t>(i)][static_cast<std::size_t>(basis[static_cast<std::size_t>(j)])];
        std::vector<int> nonbasic;
        for (int e = 0, bi = 0; e < m; ++e) {
            if (bi < rank && basis[static_cast<std::size_t>(bi)] == e) {
                ++bi;
                continue;
            }
            nonbasic.push_back(e);
        }
        std::vector<std::vector<Rat>> rhs;
        rhs.push_back(fr);
        for (int j : nonbasic) {
            std::vector<Rat> col(static_cast<std::size_t>(rank));
            for (int i = 0; i < rank; ++i)
                col[static_cast<std::size_t>(i)] =
                    ar[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            rhs.push_back(std::move(col));
        }
        auto solved = detail::solve_square(ab, rhs);
        if (!solved) return;  // singular basis
        const auto& flat = *solved;
        auto w = [&](std::size_t j, int i) {  // solution column for nonbasic j
            return flat[(j + 1) * static_cast<std::size_t>(rank) + static_cast<std::size_t>(i)];
        };

        std::vector<Rat> xb(static_cast<std::size_t>(rank));
        for (int i = 0; i < rank; ++i) xb[static_cast<std::size_t>(i)] = flat[static_cast<std::size_t>(i)];

        // Gray-code walk over nonbasic bound patterns (skip capacity-0 vars:
        // both bounds coincide).
        std::vector<std::size_t> flips;
        for (std::size_t j = 0; j < nonbasic.size(); ++j)
            if (sgn(inst.capacity[static_cast<std::size_t>(nonbasic[j])]) > 0) flips.push_back(j);
        const std::size_t patterns = std::size_t{1} << flips.size();
        std::vector<char> at_upper(nonbasic.size(), 0);

        for (std::size_t code = 0;; ++code) {
            bool ok = true;
            for (int i = 0; i < rank && ok; ++i) {
                const Rat& xi = xb[static_cast<std::size_t>(i)];
                ok = sgn(xi) >= 0 && xi <= inst.capacity[static_cast<std::size_t>(
                                               basis[static_cast<std::size_t>(i)])];
            }
            if (ok) {
                for (int e = 0; e < m; ++e) x[static_cast<std::size_t>(e)] = 0;
                for (int i = 0; i < rank; ++i)
                    x[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
                        xb[static_cast<std::size_t>(i)];
                for (std::size_t j = 0; j < nonbasic.size(); ++j)
                    if (at_upper[j])
                        x[static_cast<std::size_t>(nonbasic[j])] =
                            inst.capacity[static_cast<std::size_t>(nonbasic[j])];
                offer(x);
            }
            if (code + 1 >= patterns) break;
            // flip the Gray-code bit and update xb incrementally
            std::size_t bit = 0;
            while (((code + 1) >> bit & 1) == 0) ++bit;
            std::size_t j = flips[bit];
            const Rat& cap = inst.capacity[static_cast<std::size_t>(nonbasic[j])];
            if (!at_upper[j]) {
                for (int i = 0; i < rank; ++i) xb[static_cast<std::size_t>(i)] -= cap * w(j, i);
                at_upper[j] = 1;
            } else {
                for (int i = 0; i < rank; ++i) xb[static_cast<std::size_t>(i)] += cap * w(j, i);
                at_upper[j] = 0;
            }
        }
    };

    if (rank == 0) {
        process_basis();
    } else {
        for (;;) {
            process_basis();
            // next combination
            int i = rank - 1;
            while (i >= 0 && basis[static_cast<std::size_t>(i)] == m - rank + i) --i;
            if (i < 0) break;
            ++basis[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < rank; ++j)
                basis[static_cast<std::size_t>(j)] = basis[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

    if (!have_best) return result;  // no feasible vertex
    result.status = OracleResult::Status::optimal;
    result.value = best_value;
    result.optima.assign(best_set.begin(), best_set.end());
    result.unique = result.optima.size() == 1;
    return result;
}

inline bool is_unique(const GmnfInstance<Rat>& inst) {
    auto res = solve_exact(inst);
    return res.status == OracleResult::Status::optimal && res.unique;
}

}  // namespace gmnf

#endif
