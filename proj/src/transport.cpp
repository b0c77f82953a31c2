#include "otlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace otlab {

Mat cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                const NormSpec& spec, double p) {
    if (mu.dim != nu.dim) throw DomainError("cost_matrix: dimension mismatch");
    if (!(p >= 1.0) || !std::isfinite(p))
        throw DomainError("cost_matrix: p must be a finite real >= 1");
    const int m = static_cast<int>(mu.atoms.size());
    const int k = static_cast<int>(nu.atoms.size());
    Mat c(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j)
            c(i, j) = std::pow(
                norm_eval(spec, sub(mu.atoms[static_cast<size_t>(i)].point,
                                    nu.atoms[static_cast<size_t>(j)].point)),
                p);
    return c;
}

namespace {

// Transportation simplex over the basis spanning tree. Supplies carry the
// perturbation eps_i = i * 1e-13 (added to the last demand to stay balanced),
// which keeps bases nondegenerate; the reported plan is re-solved on the
// final tree with unperturbed marginals.
class TransportSimplex {
public:
    TransportSimplex(const Mat& cost, Vec supply, Vec demand)
        : c_(cost),
          m_(static_cast<int>(supply.size())),
          k_(static_cast<int>(demand.size())),
          a_(std::move(supply)),
          b_(std::move(demand)) {}

    void run() {
        perturb();
        northwest_corner();
        double cmax = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < k_; ++j) cmax = std::max(cmax, std::abs(c_(i, j)));
        const double opt_tol = 1e-12 * (1.0 + cmax);
        const long bland_after = 40L * (m_ + k_) * std::max(m_, k_) + 2000;
        const long hard_cap = 4 * bland_after + 100000;

        compute_duals();
        while (true) {
            int ei = -1, ej = -1;
            double best = -opt_tol;
            const bool bland = iterations_ > bland_after;
            for (int i = 0; i < m_ && ei < 0; ++i) {
                for (int j = 0; j < k_; ++j) {
                    if (basic_(i, j)) continue;
                    double rc = c_(i, j) - u_[static_cast<size_t>(i)] - v_[static_cast<size_t>(j)];
                    if (rc < best) {
                        best = rc;
                        ei = i;
                        ej = j;
                        if (bland) break;  // first improving arc
                    }
                }
                if (bland && ei >= 0) break;
            }
            if (ei < 0) break;
            pivot(ei, ej);
            ++iterations_;
            if (iterations_ > hard_cap) {
                status_ = "iteration-limit";
                return;
            }
            compute_duals();
        }
        min_reduced_cost_ = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < k_; ++j) {
                double rc = c_(i, j) - u_[static_cast<size_t>(i)] - v_[static_cast<size_t>(j)];
                min_reduced_cost_ = std::min(min_reduced_cost_, rc);
            }
        status_ = min_reduced_cost_ >= -1e-9 ? "optimal" : "dual-infeasible";
        resolve_unperturbed();
    }

    const Mat& flow() const { return flow_; }
    int iterations() const { return iterations_; }
    const std::string& status() const { return status_; }
    double min_reduced_cost() const { return min_reduced_cost_; }

private:
    int node_of_source(int i) const { return i; }
    int node_of_sink(int j) const { return m_ + j; }

    void perturb() {
        a0_ = a_;
        b0_ = b_;
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
            double eps = static_cast<double>(i + 1) * 1e-13;
            a_[static_cast<size_t>(i)] += eps;
            total += eps;
        }
        b_[static_cast<size_t>(k_ - 1)] += total;
    }

    void northwest_corner() {
        basic_ = Mat(m_, k_);
        flow_ = Mat(m_, k_);
        Vec ra = a_, rb = b_;
        int i = 0, j = 0;
        while (i < m_ && j < k_) {
            double f = std::min(ra[static_cast<size_t>(i)], rb[static_cast<size_t>(j)]);
            basic_(i, j) = 1.0;
            flow_(i, j) = f;
            ra[static_cast<size_t>(i)] -= f;
            rb[static_cast<size_t>(j)] -= f;
            if (i == m_ - 1 && j == k_ - 1) break;
            if (j == k_ - 1) {
                ++i;
            } else if (i == m_ - 1) {
                ++j;
            } else if (ra[static_cast<size_t>(i)] <= rb[static_cast<size_t>(j)]) {
                ++i;
            } else {
                ++j;
            }
        }
        rebuild_adjacency();
    }

    void rebuild_adjacency() {
        adj_.assign(static_cast<size_t>(m_ + k_), {});
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < k_; ++j)
                if (basic_(i, j)) {
                    adj_[static_cast<size_t>(node_of_source(i))].push_back(node_of_sink(j));
                    adj_[static_cast<size_t>(node_of_sink(j))].push_back(node_of_source(i));
                }
    }

    void compute_duals() {
        u_.assign(static_cast<size_t>(m_), 0.0);
        v_.assign(static_cast<size_t>(k_), 0.0);
        std::vector<char> seen(static_cast<size_t>(m_ + k_), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            for (int nb : adj_[static_cast<size_t>(n)]) {
                if (seen[static_cast<size_t>(nb)]) continue;
                seen[static_cast<size_t>(nb)] = 1;
                if (n < m_) {
                    int i = n, j = nb - m_;
                    v_[static_cast<size_t>(j)] = c_(i, j) - u_[static_cast<size_t>(i)];
                } else {
                    int j = n - m_, i = nb;
                    u_[static_cast<size_t>(i)] = c_(i, j) - v_[static_cast<size_t>(j)];
                }
                stack.push_back(nb);
            }
        }
    }

    // Tree path from node s to node t (inclusive).
    std::vector<int> tree_path(int s, int t) const {
        std::vector<int> parent(static_cast<size_t>(m_ + k_), -2);
        std::vector<int> stack = {s};
        parent[static_cast<size_t>(s)] = -1;
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            if (n == t) break;
            for (int nb : adj_[static_cast<size_t>(n)]) {
                if (parent[static_cast<size_t>(nb)] != -2) continue;
                parent[static_cast<size_t>(nb)] = n;
                stack.push_back(nb);
            }
        }
        std::vector<int> path;
        for (int n = t; n != -1; n = parent[static_cast<size_t>(n)]) path.push_back(n);
        std::reverse(path.begin(), path.end());
        return path;
    }

    void pivot(int ei, int ej) {
        // cycle: entering arc plus the tree path sink(ej) -> source(ei);
        // cells along the path alternate signs starting with -.
        std::vector<int> path = tree_path(node_of_sink(ej), node_of_source(ei));
        struct Cell {
            int i, j, sign;
        };
        std::vector<Cell> cells;
        cells.push_back({ei, ej, +1});
        int sign = -1;
        for (size_t s = 0; s + 1 < path.size(); ++s) {
            int n1 = path[s], n2 = path[s + 1];
            int i = n1 < m_ ? n1 : n2;
            int j = n1 < m_ ? n2 - m_ : n1 - m_;
            cells.push_back({i, j, sign});
            sign = -sign;
        }
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (size_t s = 1; s < cells.size(); ++s) {
            if (cells[s].sign < 0 && flow_(cells[s].i, cells[s].j) < theta) {
                theta = flow_(cells[s].i, cells[s].j);
                leave = static_cast<int>(s);
            }
        }
        for (size_t s = 1; s < cells.size(); ++s)
            flow_(cells[s].i, cells[s].j) += cells[s].sign * theta;
        flow_(ei, ej) = theta;
        basic_(ei, ej) = 1.0;
        basic_(cells[static_cast<size_t>(leave)].i, cells[static_cast<size_t>(leave)].j) = 0.0;
        flow_(cells[static_cast<size_t>(leave)].i, cells[static_cast<size_t>(leave)].j) = 0.0;
        rebuild_adjacency();
    }

    // Unique flows on the final basis tree for the unperturbed marginals,
    // found by peeling leaves.
    void resolve_unperturbed() {
        Vec ra = a0_, rb = b0_;
        std::vector<int> deg(static_cast<size_t>(m_ + k_), 0);
        std::vector<std::vector<std::pair<int, int>>> arcs_at(static_cast<size_t>(m_ + k_));
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < k_; ++j)
                if (basic_(i, j)) {
                    arcs_at[static_cast<size_t>(node_of_source(i))].push_back({i, j});
                    arcs_at[static_cast<size_t>(node_of_sink(j))].push_back({i, j});
                    ++deg[static_cast<size_t>(node_of_source(i))];
                    ++deg[static_cast<size_t>(node_of_sink(j))];
                }
        Mat removed(m_, k_);
        std::vector<int> queue;
        for (int n = 0; n < m_ + k_; ++n)
            if (deg[static_cast<size_t>(n)] == 1) queue.push_back(n);
        while (!queue.empty()) {
            int n = queue.back();
            queue.pop_back();
            if (deg[static_cast<size_t>(n)] != 1) continue;
            int ai = -1, aj = -1;
            for (auto [i, j] : arcs_at[static_cast<size_t>(n)]) {
                if (!removed(i, j) && basic_(i, j)) {
                    ai = i;
                    aj = j;
                    break;
                }
            }
            if (ai < 0) break;
            double f = n < m_ ? ra[static_cast<size_t>(ai)] : rb[static_cast<size_t>(aj)];
            flow_(ai, aj) = f;
            ra[static_cast<size_t>(ai)] -= f;
            rb[static_cast<size_t>(aj)] -= f;
            removed(ai, aj) = 1.0;
            int other = n < m_ ? node_of_sink(aj) : node_of_source(ai);
            --deg[static_cast<size_t>(n)];
            --deg[static_cast<size_t>(other)];
            if (deg[static_cast<size_t>(other)] == 1) queue.push_back(other);
        }
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < k_; ++j)
                if (flow_(i, j) < 0.0) {
                    if (flow_(i, j) < -1e-9) status_ = "degenerate-repair-failed";
                    flow_(i, j) = 0.0;
                }
    }

    Mat c_;
    int m_, k_;
    Vec a_, b_;    // perturbed marginals
    Vec a0_, b0_;  // original marginals
    Mat basic_;
    Mat flow_;
    Vec u_, v_;
    std::vector<std::vector<int>> adj_;
    int iterations_ = 0;
    std::string status_ = "init";
    double min_reduced_cost_ = 0.0;
};

}  // namespace

OTResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
               const NormSpec& spec, double p) {
    const size_t m = mu.atoms.size();
    const size_t k = nu.atoms.size();
    if (m * k > 1000000) throw DomainError("solve: support product exceeds 10^6");
    Mat c = cost_matrix(mu, nu, spec, p);
    Vec a(m), b(k);
    for (size_t i = 0; i < m; ++i) a[i] = mu.atoms[i].weight;
    for (size_t j = 0; j < k; ++j) b[j] = nu.atoms[j].weight;

    TransportSimplex simplex(c, a, b);
    simplex.run();
    if (simplex.status() != "optimal")
        throw DomainError("solve: simplex failed to certify optimality (" + simplex.status() + ")");

    OTResult res;
    res.plan.source = mu;
    res.plan.target = nu;
    res.plan.mass = simplex.flow();
    double cost = 0.0;
    for (int i = 0; i < static_cast<int>(m); ++i)
        for (int j = 0; j < static_cast<int>(k); ++j)
            cost += res.plan.mass(i, j) * c(i, j);
    res.cost_p = cost;
    res.distance = std::pow(cost, 1.0 / p);
    res.stats.iterations = simplex.iterations();
    res.stats.status = simplex.status();
    res.stats.min_reduced_cost = simplex.min_reduced_cost();
    return res;
}

namespace {

// Smallest common denominator D <= 120 reproducing every weight within 1e-12.
int common_denominator(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    for (int d = 1; d <= 120; ++d) {
        bool ok = true;
        for (const DiscreteMeasure* m : {&mu, &nu}) {
            for (const Atom& a : m->atoms) {
                double scaled = a.weight * d;
                if (std::abs(scaled - std::round(scaled)) > 1e-12 * d) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (ok) return d;
    }
    throw OracleUnavailable(
        "weights are not fractions with a common denominator <= 120");
}

std::vector<const Atom*> expand_uniform(const DiscreteMeasure& mu, int d) {
    std::vector<const Atom*> out;
    for (const Atom& a : mu.atoms) {
        int copies = static_cast<int>(std::round(a.weight * d));
        for (int c = 0; c < copies; ++c) out.push_back(&a);
    }
    return out;
}

}  // namespace

double brute_force_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const NormSpec& spec, double p) {
    if (mu.dim != nu.dim) throw DomainError("brute_force_oracle: dimension mismatch");
    if (!(p >= 1.0)) throw DomainError("brute_force_oracle: p must be >= 1");
    const int d = common_denominator(mu, nu);
    if (d > 20)
        throw OracleUnavailable("common denominator " + std::to_string(d) +
                                " too large for exhaustive assignment search");
    std::vector<const Atom*> xs = expand_uniform(mu, d);
    std::vector<const Atom*> ys = expand_uniform(nu, d);
    if (static_cast<int>(xs.size()) != d || static_cast<int>(ys.size()) != d)
        throw OracleUnavailable("expansion did not produce D unit atoms per side");

    Mat c(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            c(i, j) = std::pow(
                norm_eval(spec, sub(xs[static_cast<size_t>(i)]->point,
                                    ys[static_cast<size_t>(j)]->point)),
                p);

    // dp over subsets of targets: dp[mask] = min cost of assigning the first
    // popcount(mask) sources to exactly the targets in mask. Covers every
    // permutation.
    const uint32_t full = (d >= 32) ? 0u : (1u << d) - 1u;
    std::vector<double> dp(static_cast<size_t>(full) + 1,
                           std::numeric_limits<double>::infinity());
    dp[0] = 0.0;
    for (uint32_t mask = 1; mask <= full; ++mask) {
        int i = __builtin_popcount(mask) - 1;
        double best = std::numeric_limits<double>::infinity();
        uint32_t rest = mask;
        while (rest) {
            uint32_t bit = rest & (~rest + 1u);
            int j = __builtin_ctz(bit);
            double v = dp[mask ^ bit] + c(i, j);
            if (v < best) best = v;
            rest ^= bit;
        }
        dp[mask] = best;
    }
    return std::pow(dp[full] / d, 1.0 / p);
}

PlanCheck check_plan(const TransportPlan& plan) {
    PlanCheck pc;
    const int m = plan.mass.rows();
    const int k = plan.mass.cols();
    pc.min_entry = 0.0;
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < k; ++j) {
            row += plan.mass(i, j);
            pc.min_entry = std::min(pc.min_entry, plan.mass(i, j));
        }
        pc.max_row_err = std::max(
            pc.max_row_err, std::abs(row - plan.source.atoms[static_cast<size_t>(i)].weight));
    }
    for (int j = 0; j < k; ++j) {
        double col = 0.0;
        for (int i = 0; i < m; ++i) col += plan.mass(i, j);
        pc.max_col_err = std::max(
            pc.max_col_err, std::abs(col - plan.target.atoms[static_cast<size_t>(j)].weight));
    }
    pc.ok = pc.max_row_err <= 1e-10 && pc.max_col_err <= 1e-10 && pc.min_entry >= -1e-15;
    return pc;
}

namespace {

void cycle_search(const Mat& c, std::vector<int>& chosen, std::vector<char>& used,
                  int depth, int len, int first, CycleCheck& out) {
    const int n = c.rows();
    if (depth == len) {
        // chosen is a cyclic order; compare shifted cost vs diagonal cost
        double base = 0.0, shifted = 0.0;
        for (int s = 0; s < len; ++s) {
            int a = chosen[static_cast<size_t>(s)];
            int b = chosen[static_cast<size_t>((s + 1) % len)];
            base += c(a, a);
            shifted += c(a, b);
        }
        double slack = shifted - base;
        if (slack < out.slack) {
            out.slack = slack;
            if (slack < -1e-10) {
                out.ok = false;
                out.cycle = chosen;
            }
        }
        return;
    }
    for (int i = first; i < n; ++i) {
        if (used[static_cast<size_t>(i)]) continue;
        // the first slot fixes the smallest index; later slots permute freely
        used[static_cast<size_t>(i)] = 1;
        chosen.push_back(i);
        cycle_search(c, chosen, used, depth + 1, len, depth == 0 ? i + 1 : first, out);
        chosen.pop_back();
        used[static_cast<size_t>(i)] = 0;
    }
}

}  // namespace

CycleCheck cyclical_monotonicity_check(const std::vector<std::pair<Vec, Vec>>& pairs,
                                       const NormSpec& spec, double p, int max_cycle) {
    if (max_cycle > 6) throw DomainError("cyclical_monotonicity_check: max_cycle <= 6");
    CycleCheck out;
    const int n = static_cast<int>(pairs.size());
    if (n < 2 || max_cycle < 2) return out;
    Mat c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            c(i, j) = std::pow(
                norm_eval(spec, sub(pairs[static_cast<size_t>(i)].first,
                                    pairs[static_cast<size_t>(j)].second)),
                p);
    for (int len = 2; len <= std::min(max_cycle, n); ++len) {
        std::vector<int> chosen;
        std::vector<char> used(static_cast<size_t>(n), 0);
        cycle_search(c, chosen, used, 0, len, 0, out);
        if (!out.ok) return out;
    }
    return out;
}

}  // namespace otlab
