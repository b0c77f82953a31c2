#pragma once

#include <string>
#include <utility>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/norms.hpp"

namespace otlab {

// Coupling between source and target; row sums match source weights, column
// sums match target weights (1e-10), entries nonnegative.
struct TransportPlan {
    DiscreteMeasure source;
    DiscreteMeasure target;
    Mat mass;  // m x k
};

struct SolverStats {
    int iterations = 0;
    std::string status;        // "optimal" on success
    double min_reduced_cost = 0.0;
};

struct OTResult {
    double distance = 0.0;  // W_p value
    double cost_p = 0.0;    // distance^p
    TransportPlan plan;
    SolverStats stats;
};

// Entry (i, j) = N(x_i - y_j)^p.
Mat cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                const NormSpec& spec, double p);

// Exact discrete W_p via the transportation simplex. Optimality is certified
// by dual feasibility (reduced costs >= -1e-9). Entropic regularization is
// deliberately absent: every identity checked downstream is exact.
OTResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
               const NormSpec& spec, double p);

// Independent oracle: expands both measures to D uniform unit atoms (common
// denominator D recovered from the weights, each within 1e-12 of a fraction
// with denominator <= 120) and minimizes over all assignments exhaustively
// (bitmask dynamic program). Throws OracleUnavailable when the weights are
// not rational enough or D is too large to enumerate.
double brute_force_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const NormSpec& spec, double p);

struct PlanCheck {
    bool ok = false;
    double max_row_err = 0.0;
    double max_col_err = 0.0;
    double min_entry = 0.0;
};

PlanCheck check_plan(const TransportPlan& plan);

struct CycleCheck {
    bool ok = true;
    std::vector<int> cycle;  // indices into `pairs` of a violating cycle
    double slack = 0.0;      // most negative cycle slack found
};

// Exhaustive c-cyclical monotonicity check over all cycles of length
// 2..max_cycle (max_cycle <= 6), cost c = N^p.
CycleCheck cyclical_monotonicity_check(const std::vector<std::pair<Vec, Vec>>& pairs,
                                       const NormSpec& spec, double p, int max_cycle);

}  // namespace otlab
