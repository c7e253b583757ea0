#include "riskcast/dbn.hpp"

#include "riskcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace riskcast {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kVarFloor = 1e-300;

// ---------------------------------------------------------------------------
// Partial correlation machinery on the cached correlation matrix.
// ---------------------------------------------------------------------------

double partial_correlation(const TwoSliceDataset& d, int x, int y, std::span<const int> s) {
    const auto& R = d.corr;
    if (s.empty()) return R(x, y);
    const int m = static_cast<int>(s.size());
    Eigen::MatrixXd Rss(m, m);
    Eigen::VectorXd Rsx(m), Rsy(m);
    for (int i = 0; i < m; ++i) {
        Rsx(i) = R(s[i], x);
        Rsy(i) = R(s[i], y);
        for (int j = 0; j < m; ++j) Rss(i, j) = R(s[i], s[j]);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(Rss);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < 1e-10).any())
        throw NumericalError("ci_test: singular conditioning set (collinear regressors)");
    const Eigen::VectorXd bx = ldlt.solve(Rsx);
    const Eigen::VectorXd by = ldlt.solve(Rsy);
    const double num = R(x, y) - Rsx.dot(by);
    const double denx = 1.0 - Rsx.dot(bx);
    const double deny = 1.0 - Rsy.dot(by);
    // A variable fully explained by the conditioning set carries no residual
    // variation, so it is conditionally independent of everything else.
    if (denx < 1e-12 || deny < 1e-12) return 0.0;
    return num / std::sqrt(denx * deny);
}

// ---------------------------------------------------------------------------
// Candidate-edge rules shared by the learners. Every edge must end in the
// current slice, lag slices carry no internal structure, and nothing leaves
// the current-slice target.
// ---------------------------------------------------------------------------

bool pair_allowed(const TwoSliceDataset& d, int a, int b) {
    if (a == b) return false;
    return d.is_current(a) || d.is_current(b);
}

bool direction_allowed(const TwoSliceDataset& d, int parent, int child) {
    if (parent == child) return false;
    if (!d.is_current(child)) return false;
    if (d.is_current(parent) && parent == d.target_node()) return false;
    return true;
}

// Lexicographic k-subset enumeration; visit returns true to stop early.
template <typename Visit>
bool for_each_subset(const std::vector<int>& pool, int k, const Visit& visit) {
    const int n = static_cast<int>(pool.size());
    if (k == 0) {
        static const std::vector<int> empty;
        return visit(empty);
    }
    if (k > n) return false;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> subset(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        if (visit(subset)) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

// Does any subset (sizes 0..cap) of pool separate x from y at level alpha?
bool has_separating_set(const TwoSliceDataset& d, int x, int y, const std::vector<int>& pool,
                        int cap, double alpha) {
    for (int k = 0; k <= cap; ++k) {
        const bool found = for_each_subset(pool, k, [&](const std::vector<int>& s) {
            return ci_test(d, x, y, s) > alpha;
        });
        if (found) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Standardized-space node scoring used by the AIC passes. With population-
// standardized columns the OLS residual variance given parents P is
// 1 - R_yP * R_PP^-1 * R_Py, so scores come straight off the correlation
// matrix with no data pass.
// ---------------------------------------------------------------------------

double std_resid_var(const TwoSliceDataset& d, int y, const std::vector<int>& parents) {
    if (parents.empty()) return 1.0;
    const int m = static_cast<int>(parents.size());
    Eigen::MatrixXd Rpp(m, m);
    Eigen::VectorXd Rpy(m);
    for (int i = 0; i < m; ++i) {
        Rpy(i) = d.corr(parents[static_cast<std::size_t>(i)], y);
        for (int j = 0; j < m; ++j)
            Rpp(i, j) = d.corr(parents[static_cast<std::size_t>(i)], parents[static_cast<std::size_t>(j)]);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(Rpp);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < 1e-10).any())
        return std::numeric_limits<double>::quiet_NaN();
    const double rv = 1.0 - Rpy.dot(ldlt.solve(Rpy));
    return rv;
}

// Node AIC contribution up to a structure-independent constant:
// 2*(2 + |parents|) + n*ln(resid_var).
double node_aic(const TwoSliceDataset& d, int y, const std::vector<int>& parents) {
    const double rv = std_resid_var(d, y, parents);
    if (!std::isfinite(rv) || rv < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return 2.0 * (2.0 + static_cast<double>(parents.size())) +
           static_cast<double>(d.n_rows()) * std::log(rv);
}

// ---------------------------------------------------------------------------
// DAG bookkeeping over current-slice nodes (lag nodes are roots and cannot
// participate in cycles).
// ---------------------------------------------------------------------------

struct Dag {
    const TwoSliceDataset* data;
    std::vector<std::vector<int>> parents; // per node, sorted
    explicit Dag(const TwoSliceDataset& d) : data(&d), parents(static_cast<std::size_t>(d.n_nodes())) {}

    bool has_edge(int p, int c) const {
        const auto& ps = parents[static_cast<std::size_t>(c)];
        return std::binary_search(ps.begin(), ps.end(), p);
    }
    void add_edge(int p, int c) {
        auto& ps = parents[static_cast<std::size_t>(c)];
        ps.insert(std::upper_bound(ps.begin(), ps.end(), p), p);
    }
    void remove_edge(int p, int c) {
        auto& ps = parents[static_cast<std::size_t>(c)];
        ps.erase(std::find(ps.begin(), ps.end(), p));
    }
    // Is `to` reachable from `from` along current-slice edges?
    bool reaches(int from, int to) const {
        if (from == to) return true;
        std::vector<int> stack{from};
        std::vector<bool> seen(parents.size(), false);
        seen[static_cast<std::size_t>(from)] = true;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            for (int c = data->n_vars * data->order; c < data->n_nodes(); ++c) {
                if (seen[static_cast<std::size_t>(c)] || !has_edge(cur, c)) continue;
                if (c == to) return true;
                seen[static_cast<std::size_t>(c)] = true;
                stack.push_back(c);
            }
        }
        return false;
    }
    bool creates_cycle(int p, int c) const {
        if (!data->is_current(p)) return false;
        return reaches(c, p);
    }
    std::vector<DbnEdge> edges_sorted() const {
        std::vector<DbnEdge> out;
        for (int c = 0; c < static_cast<int>(parents.size()); ++c)
            for (int p : parents[static_cast<std::size_t>(c)]) out.push_back({p, c});
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Resolves undirected current-slice pairs on top of the forced lag edges:
// each pair is kept and pointed the way that yields the lower AIC.
Dag orient_with_aic(const TwoSliceDataset& d, const std::vector<std::pair<int, int>>& lag_pairs,
                    std::vector<std::pair<int, int>> undirected) {
    Dag dag(d);
    for (const auto& [l, c] : lag_pairs) dag.add_edge(l, c);
    std::sort(undirected.begin(), undirected.end());
    for (const auto& [a, b] : undirected) {
        const bool ab_ok = direction_allowed(d, a, b) && !dag.creates_cycle(a, b);
        const bool ba_ok = direction_allowed(d, b, a) && !dag.creates_cycle(b, a);
        if (!ab_ok && !ba_ok) continue; // both directions blocked: drop the edge
        double delta_ab = std::numeric_limits<double>::infinity();
        double delta_ba = std::numeric_limits<double>::infinity();
        if (ab_ok) {
            auto with = dag.parents[static_cast<std::size_t>(b)];
            with.insert(std::upper_bound(with.begin(), with.end(), a), a);
            const double before = node_aic(d, b, dag.parents[static_cast<std::size_t>(b)]);
            const double after = node_aic(d, b, with);
            if (std::isfinite(before) && std::isfinite(after)) delta_ab = after - before;
        }
        if (ba_ok) {
            auto with = dag.parents[static_cast<std::size_t>(a)];
            with.insert(std::upper_bound(with.begin(), with.end(), b), b);
            const double before = node_aic(d, a, dag.parents[static_cast<std::size_t>(a)]);
            const double after = node_aic(d, a, with);
            if (std::isfinite(before) && std::isfinite(after)) delta_ba = after - before;
        }
        if (!std::isfinite(delta_ab) && !std::isfinite(delta_ba)) continue;
        if (delta_ab <= delta_ba)
            dag.add_edge(a, b);
        else
            dag.add_edge(b, a);
    }
    return dag;
}

DbnStructure structure_from_dag(const TwoSliceDataset& d, const Dag& dag) {
    DbnStructure s;
    s.n_vars = d.n_vars;
    s.order = d.order;
    s.target_var = d.target_var;
    s.node_names.reserve(static_cast<std::size_t>(d.n_nodes()));
    for (int i = 0; i < d.n_nodes(); ++i) s.node_names.push_back(d.node_name(i));
    s.edges = dag.edges_sorted();
    return s;
}

// ---------------------------------------------------------------------------
// PC-stable skeleton.
// ---------------------------------------------------------------------------

DbnStructure learn_pc_stable(const TwoSliceDataset& d, const LearnerParams& params) {
    const int n = d.n_nodes();
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (pair_allowed(d, a, b)) adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;

    for (int level = 0; level <= params.max_condition; ++level) {
        const auto snapshot = adj; // stable variant: neighborhoods frozen per level
        std::vector<std::pair<int, int>> removals;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (!adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
                std::vector<int> na, nb;
                for (int k = 0; k < n; ++k) {
                    if (k != b && snapshot[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)]) na.push_back(k);
                    if (k != a && snapshot[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)]) nb.push_back(k);
                }
                bool separated = for_each_subset(na, level, [&](const std::vector<int>& s) {
                    return ci_test(d, a, b, s) > params.significance;
                });
                if (!separated && level > 0)
                    separated = for_each_subset(nb, level, [&](const std::vector<int>& s) {
                        return ci_test(d, a, b, s) > params.significance;
                    });
                if (separated) removals.emplace_back(a, b);
            }
        }
        for (const auto& [a, b] : removals)
            adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = false;
    }

    std::vector<std::pair<int, int>> lag_pairs, undirected;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
                if (!d.is_current(a))
                    lag_pairs.emplace_back(a, b);
                else
                    undirected.emplace_back(a, b);
            }
    return structure_from_dag(d, orient_with_aic(d, lag_pairs, std::move(undirected)));
}

// ---------------------------------------------------------------------------
// Semi-interleaved HITON-PC per current node, then AND-rule symmetry.
// ---------------------------------------------------------------------------

std::vector<int> hiton_pc_set(const TwoSliceDataset& d, int t, const LearnerParams& params) {
    struct Cand {
        int node;
        double p;
    };
    std::vector<Cand> queue;
    for (int x = 0; x < d.n_nodes(); ++x) {
        if (!pair_allowed(d, t, x)) continue;
        const double p = ci_test(d, t, x, {});
        if (p <= params.significance) queue.push_back({x, p});
    }
    std::stable_sort(queue.begin(), queue.end(), [](const Cand& a, const Cand& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.node < b.node;
    });

    std::vector<int> pc;
    for (const Cand& c : queue) {
        // Admit, then try to eliminate the newcomer against the current set.
        std::vector<int> others = pc;
        bool separated = false;
        for (int k = 1; k <= params.max_condition && !separated; ++k)
            separated = for_each_subset(others, k, [&](const std::vector<int>& s) {
                return ci_test(d, t, c.node, s) > params.significance;
            });
        if (!separated) pc.push_back(c.node);
    }
    // Backward pass over the final set.
    for (std::size_t i = 0; i < pc.size();) {
        std::vector<int> others;
        for (std::size_t j = 0; j < pc.size(); ++j)
            if (j != i) others.push_back(pc[j]);
        if (has_separating_set(d, t, pc[i], others, params.max_condition, params.significance))
            pc.erase(pc.begin() + static_cast<std::ptrdiff_t>(i));
        else
            ++i;
    }
    return pc;
}

DbnStructure learn_si_hiton_pc(const TwoSliceDataset& d, const LearnerParams& params) {
    const int c0 = d.n_vars * d.order;
    std::vector<std::vector<bool>> member(static_cast<std::size_t>(d.n_nodes()),
                                          std::vector<bool>(static_cast<std::size_t>(d.n_nodes()), false));
    for (int t = c0; t < d.n_nodes(); ++t)
        for (int x : hiton_pc_set(d, t, params)) member[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] = true;

    std::vector<std::pair<int, int>> lag_pairs, undirected;
    for (int t = c0; t < d.n_nodes(); ++t) {
        for (int x = 0; x < d.n_nodes(); ++x) {
            if (!member[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)]) continue;
            if (!d.is_current(x)) {
                lag_pairs.emplace_back(x, t);
            } else if (x > t && member[static_cast<std::size_t>(x)][static_cast<std::size_t>(t)]) {
                undirected.emplace_back(t, x); // AND-rule symmetry
            }
        }
    }
    return structure_from_dag(d, orient_with_aic(d, lag_pairs, std::move(undirected)));
}

// ---------------------------------------------------------------------------
// MMHC: max-min parents-and-children, then AIC hill-climbing over the
// restricted candidate sets.
// ---------------------------------------------------------------------------

std::vector<int> mmpc_set(const TwoSliceDataset& d, int t, const LearnerParams& params) {
    std::vector<int> cands;
    for (int x = 0; x < d.n_nodes(); ++x)
        if (pair_allowed(d, t, x)) cands.push_back(x);

    std::vector<int> cpc;
    std::vector<bool> in_cpc(static_cast<std::size_t>(d.n_nodes()), false);
    // Once some subset of CPC separates a candidate it stays separated as CPC
    // grows, so disqualified candidates never need re-testing.
    std::vector<bool> dead(static_cast<std::size_t>(d.n_nodes()), false);
    while (true) {
        int best = -1;
        double best_maxp = std::numeric_limits<double>::infinity();
        for (int x : cands) {
            if (in_cpc[static_cast<std::size_t>(x)] || dead[static_cast<std::size_t>(x)]) continue;
            // Max over conditioning subsets of the p-value ("min association").
            double maxp = 0.0;
            bool disqualified = false;
            for (int k = 0; k <= params.max_condition && !disqualified; ++k) {
                disqualified = for_each_subset(cpc, k, [&](const std::vector<int>& s) {
                    maxp = std::max(maxp, ci_test(d, t, x, s));
                    return maxp > params.significance;
                });
            }
            if (disqualified) {
                dead[static_cast<std::size_t>(x)] = true;
                continue;
            }
            if (maxp < best_maxp) {
                best_maxp = maxp;
                best = x;
            }
        }
        if (best < 0) break;
        cpc.push_back(best);
        in_cpc[static_cast<std::size_t>(best)] = true;
    }
    // Backward elimination.
    for (std::size_t i = 0; i < cpc.size();) {
        std::vector<int> others;
        for (std::size_t j = 0; j < cpc.size(); ++j)
            if (j != i) others.push_back(cpc[j]);
        if (has_separating_set(d, t, cpc[i], others, params.max_condition, params.significance))
            cpc.erase(cpc.begin() + static_cast<std::ptrdiff_t>(i));
        else
            ++i;
    }
    return cpc;
}

DbnStructure learn_mmhc(const TwoSliceDataset& d, const LearnerParams& params) {
    const int c0 = d.n_vars * d.order;
    const int n = d.n_nodes();
    std::vector<std::vector<bool>> member(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int t = c0; t < n; ++t)
        for (int x : mmpc_set(d, t, params)) member[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] = true;

    // Candidate parents per current node (AND-rule between current nodes).
    std::vector<std::vector<int>> cand(static_cast<std::size_t>(n));
    for (int t = c0; t < n; ++t) {
        for (int x = 0; x < n; ++x) {
            if (!member[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] || !direction_allowed(d, x, t)) continue;
            if (d.is_current(x) && !member[static_cast<std::size_t>(x)][static_cast<std::size_t>(t)]) continue;
            cand[static_cast<std::size_t>(t)].push_back(x);
        }
    }

    Dag dag(d);
    std::vector<double> aic(static_cast<std::size_t>(n), 0.0);
    for (int t = c0; t < n; ++t) aic[static_cast<std::size_t>(t)] = node_aic(d, t, {});

    struct Move {
        int kind = -1; // 0 add, 1 delete, 2 reverse
        int parent = 0, child = 0;
        double delta = 0.0;
    };
    while (true) {
        Move best;
        auto consider = [&](int kind, int p, int c, double delta) {
            if (!(delta < -1e-9)) return; // require strict improvement
            if (best.kind >= 0) {
                if (delta > best.delta) return;
                if (delta == best.delta) {
                    // Tie: prefer deletion, then the lexicographically smallest edge.
                    const int rank = kind == 1 ? 0 : 1;
                    const int best_rank = best.kind == 1 ? 0 : 1;
                    if (rank > best_rank) return;
                    if (rank == best_rank &&
                        std::pair(p, c) >= std::pair(best.parent, best.child))
                        return;
                }
            }
            best = {kind, p, c, delta};
        };

        for (int t = c0; t < n; ++t) {
            const auto& ps = dag.parents[static_cast<std::size_t>(t)];
            for (int x : cand[static_cast<std::size_t>(t)]) {
                if (dag.has_edge(x, t)) {
                    auto without = ps;
                    without.erase(std::find(without.begin(), without.end(), x));
                    const double a = node_aic(d, t, without);
                    if (std::isfinite(a)) consider(1, x, t, a - aic[static_cast<std::size_t>(t)]);
                    // Reverse only between current nodes.
                    if (d.is_current(x) && direction_allowed(d, t, x)) {
                        const bool x_has_t_cand =
                            std::find(cand[static_cast<std::size_t>(x)].begin(), cand[static_cast<std::size_t>(x)].end(), t) != cand[static_cast<std::size_t>(x)].end();
                        if (x_has_t_cand) {
                            dag.remove_edge(x, t);
                            const bool cyc = dag.creates_cycle(t, x);
                            dag.add_edge(x, t);
                            if (!cyc) {
                                auto xps = dag.parents[static_cast<std::size_t>(x)];
                                xps.insert(std::upper_bound(xps.begin(), xps.end(), t), t);
                                const double ax = node_aic(d, x, xps);
                                if (std::isfinite(a) && std::isfinite(ax))
                                    consider(2, x, t,
                                             (a - aic[static_cast<std::size_t>(t)]) + (ax - aic[static_cast<std::size_t>(x)]));
                            }
                        }
                    }
                } else {
                    if (dag.creates_cycle(x, t)) continue;
                    auto with = ps;
                    with.insert(std::upper_bound(with.begin(), with.end(), x), x);
                    const double a = node_aic(d, t, with);
                    if (std::isfinite(a)) consider(0, x, t, a - aic[static_cast<std::size_t>(t)]);
                }
            }
        }
        if (best.kind < 0) break;
        if (best.kind == 0) {
            dag.add_edge(best.parent, best.child);
        } else if (best.kind == 1) {
            dag.remove_edge(best.parent, best.child);
        } else {
            dag.remove_edge(best.parent, best.child);
            dag.add_edge(best.child, best.parent);
            aic[static_cast<std::size_t>(best.parent)] =
                node_aic(d, best.parent, dag.parents[static_cast<std::size_t>(best.parent)]);
        }
        aic[static_cast<std::size_t>(best.child)] =
            node_aic(d, best.child, dag.parents[static_cast<std::size_t>(best.child)]);
    }
    return structure_from_dag(d, dag);
}

} // namespace

std::string TwoSliceDataset::node_name(int node) const {
    const int slice = node / n_vars;
    const int var = node % n_vars;
    if (slice == order) return "t:" + var_names[static_cast<std::size_t>(var)];
    return "t-" + std::to_string(order - slice) + ":" + var_names[static_cast<std::size_t>(var)];
}

TwoSliceDataset build_slices(const VariablePanel& panel, Date from, Date to, int order) {
    if (order < 1) throw DomainError("build_slices: order must be >= 1");
    const std::size_t i0 = panel.lower_bound(from);
    std::size_t i1 = panel.lower_bound(to);
    if (i1 == panel.n_days() || panel.dates()[i1] != to) {
        if (i1 == 0) throw DomainError("build_slices: window outside panel");
        --i1; // last grid date <= to
    }
    if (i1 >= panel.n_days() || i0 > i1) throw DomainError("build_slices: window outside panel");
    const std::size_t days = i1 - i0 + 1;
    if (days < static_cast<std::size_t>(order) + 1)
        throw DomainError("build_slices: window shorter than order + 1 days");

    TwoSliceDataset d;
    d.n_vars = static_cast<int>(panel.n_vars());
    d.order = order;
    d.target_var = static_cast<int>(panel.target_index());
    d.var_names = panel.ids();
    const int n_rows = static_cast<int>(days) - order;
    const int n_nodes = d.n_nodes();
    d.rows.resize(n_rows, n_nodes);
    d.dates.reserve(static_cast<std::size_t>(n_rows));
    for (int r = 0; r < n_rows; ++r) {
        for (int slice = 0; slice <= order; ++slice) {
            const std::size_t day = i0 + static_cast<std::size_t>(r + slice);
            for (int v = 0; v < d.n_vars; ++v)
                d.rows(r, slice * d.n_vars + v) = panel.at(day, static_cast<std::size_t>(v));
        }
        d.dates.push_back(panel.dates()[i0 + static_cast<std::size_t>(r + order)]);
    }

    d.mean.resize(static_cast<std::size_t>(n_nodes));
    d.sd.resize(static_cast<std::size_t>(n_nodes));
    Eigen::MatrixXd z = d.rows;
    for (int c = 0; c < n_nodes; ++c) {
        const double mu = z.col(c).mean();
        const double var = (z.col(c).array() - mu).square().mean();
        const double sd = std::sqrt(std::max(var, 0.0));
        d.mean[static_cast<std::size_t>(c)] = mu;
        d.sd[static_cast<std::size_t>(c)] = sd;
        if (sd > 0)
            z.col(c) = (z.col(c).array() - mu) / sd;
        else
            z.col(c).setZero();
    }
    d.corr = (z.transpose() * z) / static_cast<double>(n_rows);
    return d;
}

double ci_test(const TwoSliceDataset& data, int x, int y, std::span<const int> given) {
    if (x == y) throw InputError("ci_test: identical columns");
    if (data.n_rows() <= static_cast<int>(given.size()) + 3)
        throw DomainError("ci_test: too few rows for the conditioning set");
    double r = partial_correlation(data, x, y, given);
    r = std::clamp(r, -1.0, 1.0);
    const double dof = static_cast<double>(data.n_rows()) - static_cast<double>(given.size()) - 3.0;
    const double z = std::sqrt(dof) * std::atanh(std::clamp(r, -1.0 + 1e-16, 1.0 - 1e-16));
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

const char* to_string(StructAlgo algo) {
    switch (algo) {
    case StructAlgo::pc_stable: return "pc-stable";
    case StructAlgo::mmhc: return "mmhc";
    case StructAlgo::si_hiton_pc: return "si-hiton-pc";
    }
    return "?";
}

std::vector<std::string> DbnStructure::edge_list_text() const {
    std::vector<std::string> out;
    out.reserve(edges.size());
    for (const auto& e : edges)
        out.push_back(node_names[static_cast<std::size_t>(e.parent)] + " -> " +
                      node_names[static_cast<std::size_t>(e.child)]);
    return out;
}

DbnStructure learn_structure(const TwoSliceDataset& data, StructAlgo algo,
                             const LearnerParams& params) {
    switch (algo) {
    case StructAlgo::pc_stable: return learn_pc_stable(data, params);
    case StructAlgo::mmhc: return learn_mmhc(data, params);
    case StructAlgo::si_hiton_pc: return learn_si_hiton_pc(data, params);
    }
    throw UnsupportedError("learn_structure: unknown algorithm");
}

GaussianDbn fit_parameters(const DbnStructure& structure, const TwoSliceDataset& data) {
    if (structure.n_nodes() != data.n_nodes())
        throw InputError("fit_parameters: structure does not match the dataset");
    const int n_nodes = data.n_nodes();
    const double n = static_cast<double>(data.n_rows());

    GaussianDbn model;
    model.structure = structure;
    model.node_params.resize(static_cast<std::size_t>(n_nodes));
    for (const auto& e : structure.edges)
        model.node_params[static_cast<std::size_t>(e.child)].parents.push_back(e.parent);

    double loglik = 0.0;
    double k_total = 0.0;
    for (int y = 0; y < n_nodes; ++y) {
        NodeParams& np = model.node_params[static_cast<std::size_t>(y)];
        std::sort(np.parents.begin(), np.parents.end());
        const int m = static_cast<int>(np.parents.size());
        const double mu_y = data.mean[static_cast<std::size_t>(y)];
        const double s_y = data.sd[static_cast<std::size_t>(y)];
        double resid_var_std = 1.0;
        np.coef.assign(static_cast<std::size_t>(m), 0.0);
        if (m > 0) {
            Eigen::MatrixXd Rpp(m, m);
            Eigen::VectorXd Rpy(m);
            for (int i = 0; i < m; ++i) {
                Rpy(i) = data.corr(np.parents[static_cast<std::size_t>(i)], y);
                for (int j = 0; j < m; ++j)
                    Rpp(i, j) = data.corr(np.parents[static_cast<std::size_t>(i)],
                                          np.parents[static_cast<std::size_t>(j)]);
            }
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(Rpp);
            if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < 1e-10).any())
                throw NumericalError("fit_parameters: rank-deficient parent matrix for node " +
                                     structure.node_names[static_cast<std::size_t>(y)]);
            const Eigen::VectorXd b = ldlt.solve(Rpy);
            resid_var_std = std::max(0.0, 1.0 - Rpy.dot(b));
            double intercept = mu_y;
            for (int i = 0; i < m; ++i) {
                const int p = np.parents[static_cast<std::size_t>(i)];
                const double s_p = data.sd[static_cast<std::size_t>(p)];
                const double coef = s_p > 0 ? s_y * b(i) / s_p : 0.0;
                np.coef[static_cast<std::size_t>(i)] = coef;
                intercept -= coef * data.mean[static_cast<std::size_t>(p)];
            }
            np.intercept = intercept;
        } else {
            np.intercept = mu_y;
        }
        np.resid_var = resid_var_std * s_y * s_y;
        loglik += -0.5 * n * (kLogTwoPi + std::log(std::max(np.resid_var, kVarFloor)) + 1.0);
        k_total += 2.0 + static_cast<double>(m);
    }
    model.loglik = loglik;
    model.fit_aic = 2.0 * k_total - 2.0 * loglik;
    return model;
}

double forecast_one_step(const GaussianDbn& model, std::span<const double> evidence) {
    const auto& s = model.structure;
    const int n_lag = s.n_vars * s.order;
    if (static_cast<int>(evidence.size()) != n_lag)
        throw InputError("forecast_one_step: evidence must cover every lag-slice variable");
    for (double v : evidence)
        if (!std::isfinite(v)) throw InputError("forecast_one_step: non-finite evidence value");

    std::vector<double> value(static_cast<std::size_t>(s.n_nodes()), 0.0);
    for (int i = 0; i < n_lag; ++i) value[static_cast<std::size_t>(i)] = evidence[static_cast<std::size_t>(i)];

    // Current-slice nodes in topological order (Kahn over current-slice edges).
    const int n_cur = s.n_vars;
    std::vector<int> indegree(static_cast<std::size_t>(n_cur), 0);
    for (const auto& e : s.edges)
        if (s.is_current(e.parent)) ++indegree[static_cast<std::size_t>(e.child - n_lag)];
    std::vector<int> ready;
    for (int i = 0; i < n_cur; ++i)
        if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    std::vector<int> topo;
    for (std::size_t head = 0; head < ready.size(); ++head) {
        const int cur = ready[head];
        topo.push_back(cur);
        for (const auto& e : s.edges)
            if (e.parent == n_lag + cur && --indegree[static_cast<std::size_t>(e.child - n_lag)] == 0)
                ready.push_back(e.child - n_lag);
    }
    if (static_cast<int>(topo.size()) != n_cur)
        throw NumericalError("forecast_one_step: structure contains a cycle");

    for (int cur : topo) {
        const int node = n_lag + cur;
        const NodeParams& np = model.node_params[static_cast<std::size_t>(node)];
        double v = np.intercept;
        for (std::size_t i = 0; i < np.parents.size(); ++i)
            v += np.coef[i] * value[static_cast<std::size_t>(np.parents[i])];
        value[static_cast<std::size_t>(node)] = v;
    }
    return value[static_cast<std::size_t>(s.target_node())];
}

double forecast_return(double predicted_close, double last_close) {
    if (!(predicted_close > 0.0) || !(last_close > 0.0))
        throw DomainError("forecast_return: closes must be positive");
    return std::log(predicted_close / last_close);
}

} // namespace riskcast
