#include "efs/matching.hpp"

#include <limits>

namespace efs {

namespace {

constexpr Value kInf = std::numeric_limits<Value>::max() / 4;

} // namespace

// Potential-based Hungarian algorithm on the negated matrix (minimization
// form), one Dijkstra-style augmentation per row. Columns and rows are
// shifted by one internally; index 0 is the virtual start column.
AssignmentResult solve_assignment(const WeightMatrix& w) {
    const int n = static_cast<int>(w.size());
    if (n < 1) throw ContractError("assignment needs a nonempty matrix");
    for (const auto& row : w) {
        if (static_cast<int>(row.size()) != n)
            throw ContractError("assignment matrix must be square");
        for (Value x : row)
            if (x < 0) throw ContractError("assignment weights must be nonnegative");
    }

    // cost[i][j] = -w[i][j]
    std::vector<Value> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<Value> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            Value delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Value cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    AssignmentResult res;
    res.assignment.assign(n, -1);
    res.row_duals.assign(n, 0);
    res.col_duals.assign(n, 0);
    for (int j = 1; j <= n; ++j) res.assignment[match[j] - 1] = j - 1;
    // Minimization duals satisfy u_i + v_j <= -w[i][j]; negate to get
    // max-form duals with U_i + V_j >= w[i][j].
    for (int i = 1; i <= n; ++i) res.row_duals[i - 1] = -u[i];
    for (int j = 1; j <= n; ++j) res.col_duals[j - 1] = -v[j];
    for (int i = 0; i < n; ++i) res.total += w[i][res.assignment[i]];
    return res;
}

std::pair<std::vector<int>, Value> max_weight_perfect_matching(const WeightMatrix& w) {
    AssignmentResult res = solve_assignment(w);
    return {std::move(res.assignment), res.total};
}

} // namespace efs
