#pragma once

#include "riskcast/panel.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace riskcast {

/// Lagged design built from contiguous day pairs of one panel window. Columns
/// hold the raw values; per-column mean/sd and the correlation matrix are
/// cached for the learners. Node layout: `order` lag slices oldest-first, then
/// the current slice.
struct TwoSliceDataset {
    int n_vars = 0;
    int order = 1;
    int target_var = 0;
    std::vector<std::string> var_names;
    Eigen::MatrixXd rows; // n_rows x n_nodes, raw values
    std::vector<double> mean, sd;
    Eigen::MatrixXd corr;
    std::vector<Date> dates; // current-slice date per row

    int n_rows() const { return static_cast<int>(rows.rows()); }
    int n_nodes() const { return n_vars * (order + 1); }
    bool is_current(int node) const { return node >= n_vars * order; }
    int target_node() const { return n_vars * order + target_var; }
    std::string node_name(int node) const;
};

/// Rows pair each day with its `order` predecessors inside [from, to].
TwoSliceDataset build_slices(const VariablePanel& panel, Date from, Date to, int order = 1);

/// Fisher-z test of the partial correlation of columns x and y given a
/// conditioning set; returns the two-sided p-value. A singular conditioning
/// regression raises NumericalError.
double ci_test(const TwoSliceDataset& data, int x, int y, std::span<const int> given);

enum class StructAlgo { pc_stable, mmhc, si_hiton_pc };
const char* to_string(StructAlgo algo);

struct LearnerParams {
    double significance = 0.05;
    int max_condition = 3;
};

struct DbnEdge {
    int parent = 0;
    int child = 0;
    auto operator<=>(const DbnEdge&) const = default;
};

/// Directed acyclic structure over the slice-tagged nodes. Every edge ends in
/// the current slice and none leaves the current-slice target.
struct DbnStructure {
    int n_vars = 0;
    int order = 1;
    int target_var = 0;
    std::vector<std::string> node_names;
    std::vector<DbnEdge> edges;

    int n_nodes() const { return n_vars * (order + 1); }
    int target_node() const { return n_vars * order + target_var; }
    bool is_current(int node) const { return node >= n_vars * order; }
    /// One `parent -> child` line per edge, in stored order.
    std::vector<std::string> edge_list_text() const;
};

/// Learns a structure with the requested algorithm. Deterministic given data
/// and params; an empty edge set is a valid result.
DbnStructure learn_structure(const TwoSliceDataset& data, StructAlgo algo,
                             const LearnerParams& params = {});

struct NodeParams {
    double intercept = 0.0;
    std::vector<int> parents;
    std::vector<double> coef;
    double resid_var = 0.0;
};

struct GaussianDbn {
    DbnStructure structure;
    std::vector<NodeParams> node_params; // one per node
    double fit_aic = 0.0;
    double loglik = 0.0;
};

/// Per-node least-squares linear-Gaussian fit on the structure's parents;
/// fit_aic = 2k - 2 loglik with k counting intercepts, coefficients and
/// variances. Rank-deficient parent sets raise NumericalError naming the node.
GaussianDbn fit_parameters(const DbnStructure& structure, const TwoSliceDataset& data);

/// Conditional mean of the current-slice target given a full set of lag-slice
/// values, marginalizing the other current-slice nodes exactly. The evidence
/// spans the lag slices oldest-first (n_vars * order values).
double forecast_one_step(const GaussianDbn& model, std::span<const double> evidence);

/// ln(predicted_close / last_close); inputs must be positive.
double forecast_return(double predicted_close, double last_close);

} // namespace riskcast
