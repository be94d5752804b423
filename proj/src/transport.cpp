#include "torfek/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "torfek/errors.hpp"

namespace torfek {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path LAP solver. Minimizes sum_i cost[i][sigma(i)].
// On return u,v satisfy cost[i][j] - u[i] - v[j] >= -eps with equality on the
// matching (complementary slackness certificate).
void solve_lap(const std::vector<std::vector<double>>& cost, std::vector<int>& rowsol,
               std::vector<double>& u, std::vector<double>& v) {
    int nn = static_cast<int>(cost.size());
    std::vector<double> u1(nn + 1, 0), v1(nn + 1, 0);
    std::vector<int> p(nn + 1, 0), way(nn + 1, 0);
    for (int i = 1; i <= nn; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(nn + 1, kInf);
        std::vector<char> used(nn + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= nn; ++j)
                if (!used[j]) {
                    double cur = cost[i0 - 1][j - 1] - u1[i0] - v1[j];
                    if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                    if (minv[j] < delta) { delta = minv[j]; j1 = j; }
                }
            for (int j = 0; j <= nn; ++j) {
                if (used[j]) { u1[p[j]] += delta; v1[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    rowsol.assign(nn, -1);
    for (int j = 1; j <= nn; ++j)
        if (p[j]) rowsol[p[j] - 1] = j - 1;
    u.assign(nn, 0);
    v.assign(nn, 0);
    for (int i = 0; i < nn; ++i) u[i] = u1[i + 1];
    for (int j = 0; j < nn; ++j) v[j] = v1[j + 1];
}

// Second optimal matching exists iff the digraph row i -> row i' (edge when
// (i, sigma(i')) is tight, i != i') has a directed cycle.
bool has_alternate_matching(const std::vector<std::vector<double>>& cost, const std::vector<int>& perm,
                            const std::vector<double>& u, const std::vector<double>& v) {
    int nn = static_cast<int>(cost.size());
    double scale = 1.0;
    for (auto& row : cost)
        for (double c : row) scale = std::max(scale, std::fabs(c));
    double eps = 1e-9 * scale;
    std::vector<std::vector<int>> adj(nn);
    for (int i = 0; i < nn; ++i)
        for (int ip = 0; ip < nn; ++ip)
            if (i != ip && std::fabs(cost[i][perm[ip]] - u[i] - v[perm[ip]]) <= eps)
                adj[i].push_back(ip);
    std::vector<int> color(nn, 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int s = 0; s < nn; ++s) {
        if (color[s]) continue;
        stack.push_back({s, 0});
        color[s] = 1;
        while (!stack.empty()) {
            auto& [node, idx] = stack.back();
            if (idx < adj[node].size()) {
                int nxt = adj[node][idx++];
                if (color[nxt] == 1) return true;
                if (color[nxt] == 0) {
                    color[nxt] = 1;
                    stack.push_back({nxt, 0});
                }
            } else {
                color[node] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

std::vector<std::vector<double>> bilinear_cost(const std::vector<Vec>& x, const std::vector<Vec>& p, int n) {
    size_t N = x.size();
    std::vector<std::vector<double>> cost(N, std::vector<double>(N));
    for (size_t i = 0; i < N; ++i)
        for (size_t l = 0; l < N; ++l) cost[i][l] = -dot(n, x[i], p[l]);
    return cost;
}

}  // namespace

AssignmentResult assignment(const std::vector<Vec>& x, const std::vector<Vec>& p, int n) {
    if (x.empty()) throw Error("assignment: empty instance");
    if (x.size() != p.size()) throw Error("assignment: point lists must have equal length");
    for (auto& v : x)
        if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw Error("assignment: non-finite coordinate");
    for (auto& v : p)
        if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw Error("assignment: non-finite coordinate");
    auto cost = bilinear_cost(x, p, n);
    AssignmentResult res;
    solve_lap(cost, res.perm, res.u, res.v);
    double total = 0;
    for (size_t i = 0; i < x.size(); ++i) total += cost[i][res.perm[i]];
    res.cost = total / static_cast<double>(x.size());
    res.unique = !has_alternate_matching(cost, res.perm, res.u, res.v);
    return res;
}

bool uniqueness_probe(const std::vector<Vec>& x, const std::vector<Vec>& p, int n) {
    return assignment(x, p, n).unique;
}

// ---------------------------------------------------------------------------
// Transportation simplex for general discrete OT.

namespace {

struct TransportLP {
    int m, k;  // supplies, demands
    const std::vector<double>&a, &b;
    std::vector<std::vector<double>> c;

    struct Cell {
        int i, j;
        double flow;
    };
    std::vector<Cell> basis;

    explicit TransportLP(const std::vector<double>& a_, const std::vector<double>& b_,
                         std::vector<std::vector<double>> c_)
        : m(static_cast<int>(a_.size())), k(static_cast<int>(b_.size())), a(a_), b(b_), c(std::move(c_)) {}

    void northwest_init() {
        std::vector<double> ra = a, rb = b;
        int i = 0, j = 0;
        while (i < m && j < k) {
            double f = std::min(ra[i], rb[j]);
            basis.push_back({i, j, f});
            ra[i] -= f;
            rb[j] -= f;
            bool ilast = (i == m - 1), jlast = (j == k - 1);
            if (!ilast && (ra[i] <= rb[j] || jlast)) ++i;
            else if (!jlast) ++j;
            else break;
        }
        // degenerate corner: ensure spanning tree size m+k-1
        while (static_cast<int>(basis.size()) < m + k - 1) basis.push_back({m - 1, k - 1, 0.0});
    }

    double solve() {
        northwest_init();
        const int max_iter = 200 * (m + k) * (m + k) + 20000;
        for (int iter = 0; iter < max_iter; ++iter) {
            // duals from the basis tree
            std::vector<double> u(m, kInf), v(k, kInf);
            std::vector<std::vector<int>> rows(m), cols(k);
            for (size_t t = 0; t < basis.size(); ++t) {
                rows[basis[t].i].push_back(static_cast<int>(t));
                cols[basis[t].j].push_back(static_cast<int>(t));
            }
            u[0] = 0;
            std::vector<int> stack = {0};  // encoded: row r -> r, col j -> m+j
            while (!stack.empty()) {
                int node = stack.back();
                stack.pop_back();
                if (node < m) {
                    for (int t : rows[node]) {
                        int j = basis[t].j;
                        if (v[j] == kInf) { v[j] = c[node][j] - u[node]; stack.push_back(m + j); }
                    }
                } else {
                    int j = node - m;
                    for (int t : cols[j]) {
                        int i = basis[t].i;
                        if (u[i] == kInf) { u[i] = c[i][j] - v[j]; stack.push_back(i); }
                    }
                }
            }
            for (int i = 0; i < m; ++i)
                if (u[i] == kInf) throw Error("transport: basis tree disconnected");
            for (int j = 0; j < k; ++j)
                if (v[j] == kInf) throw Error("transport: basis tree disconnected");

            // entering cell: most negative reduced cost
            double scale = 1.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < k; ++j) scale = std::max(scale, std::fabs(c[i][j]));
            double best = -1e-12 * scale;
            int bi = -1, bj = -1;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < k; ++j) {
                    double r = c[i][j] - u[i] - v[j];
                    if (r < best) { best = r; bi = i; bj = j; }
                }
            if (bi < 0) break;  // optimal

            // unique tree path from row bi to column bj
            std::vector<int> parent_edge(m + k, -1), parent_node(m + k, -1);
            std::vector<char> seen(m + k, false);
            std::vector<int> q = {bi};
            seen[bi] = true;
            while (!q.empty()) {
                int node = q.back();
                q.pop_back();
                if (node == m + bj) break;
                if (node < m) {
                    for (int t : rows[node]) {
                        int nxt = m + basis[t].j;
                        if (!seen[nxt]) { seen[nxt] = true; parent_edge[nxt] = t; parent_node[nxt] = node; q.push_back(nxt); }
                    }
                } else {
                    for (int t : cols[node - m]) {
                        int nxt = basis[t].i;
                        if (!seen[nxt]) { seen[nxt] = true; parent_edge[nxt] = t; parent_node[nxt] = node; q.push_back(nxt); }
                    }
                }
            }
            if (!seen[m + bj]) throw Error("transport: no cycle found (corrupt basis)");
            // cycle alternates +entering, -path edges from col side
            std::vector<int> path;  // basis edge indices along bj -> bi
            for (int node = m + bj; node != bi; node = parent_node[node]) path.push_back(parent_edge[node]);
            double theta = kInf;
            int leave = -1;
            for (size_t t = 0; t < path.size(); t += 2) {  // minus-labelled edges
                if (basis[path[t]].flow < theta - 1e-18 ||
                    (leave >= 0 && basis[path[t]].flow <= theta && path[t] < leave)) {
                    theta = basis[path[t]].flow;
                    leave = path[t];
                }
            }
            if (leave < 0) throw Error("transport: unbounded pivot");
            for (size_t t = 0; t < path.size(); ++t) {
                if (t % 2 == 0) basis[path[t]].flow -= theta;
                else basis[path[t]].flow += theta;
            }
            basis[leave] = {bi, bj, theta};
            if (iter == max_iter - 1) throw Error("transport: simplex iteration budget exceeded");
        }
        double total = 0;
        for (auto& cell : basis) total += cell.flow * c[cell.i][cell.j];
        return total;
    }
};

double transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, bool euclidean) {
    if (mu.n != nu.n) throw Error("transport: dimension mismatch");
    std::vector<double> a, b;
    for (auto& at : mu.atoms) a.push_back(at.w);
    for (auto& at : nu.atoms) b.push_back(at.w);
    std::vector<std::vector<double>> c(a.size(), std::vector<double>(b.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            if (euclidean) {
                double dx = mu.atoms[i].p[0] - nu.atoms[j].p[0];
                double dy = mu.n > 1 ? mu.atoms[i].p[1] - nu.atoms[j].p[1] : 0.0;
                c[i][j] = std::sqrt(dx * dx + dy * dy);
            } else {
                c[i][j] = -dot(mu.n, mu.atoms[i].p, nu.atoms[j].p);
            }
        }
    TransportLP lp(a, b, std::move(c));
    return lp.solve();
}

}  // namespace

double ot_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return transport_cost(mu, nu, false);
}

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return transport_cost(mu, nu, true);
}

// ---------------------------------------------------------------------------
// Bottleneck R via max-flow feasibility on snapped thresholds.

namespace {

struct Dinic {
    struct Edge {
        int to;
        std::int64_t cap;
        int rev;
    };
    std::vector<std::vector<Edge>> g;
    std::vector<int> level, it;

    explicit Dinic(int n) : g(n), level(n), it(n) {}

    void add_edge(int from, int to, std::int64_t cap) {
        g[from].push_back({to, cap, static_cast<int>(g[to].size())});
        g[to].push_back({from, 0, static_cast<int>(g[from].size()) - 1});
    }

    bool bfs(int s, int t) {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (auto& e : g[v])
                if (e.cap > 0 && level[e.to] < 0) {
                    level[e.to] = level[v] + 1;
                    q.push(e.to);
                }
        }
        return level[t] >= 0;
    }

    std::int64_t dfs(int v, int t, std::int64_t f) {
        if (v == t) return f;
        for (int& i = it[v]; i < static_cast<int>(g[v].size()); ++i) {
            Edge& e = g[v][i];
            if (e.cap > 0 && level[v] < level[e.to]) {
                std::int64_t d = dfs(e.to, t, std::min(f, e.cap));
                if (d > 0) {
                    e.cap -= d;
                    g[e.to][e.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    std::int64_t max_flow(int s, int t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            std::fill(it.begin(), it.end(), 0);
            std::int64_t f;
            while ((f = dfs(s, t, INT64_MAX)) > 0) flow += f;
        }
        return flow;
    }
};

}  // namespace

BottleneckResult bottleneck_probe(const DiscreteMeasure& nu, const DiscreteMeasure& nup) {
    if (nu.n != nup.n) throw Error("bottleneck_R: dimension mismatch");
    if (!nu.uniform_weights() || !nup.uniform_weights())
        throw Error("bottleneck_R: unsupported instance (weights must be uniform within each measure)");
    std::int64_t N = static_cast<std::int64_t>(nu.atoms.size());
    std::int64_t M = static_cast<std::int64_t>(nup.atoms.size());
    std::int64_t L = std::lcm(N, M);
    std::vector<double> dist(static_cast<size_t>(N) * M);
    for (std::int64_t i = 0; i < N; ++i)
        for (std::int64_t j = 0; j < M; ++j) {
            double dx = nu.atoms[i].p[0] - nup.atoms[j].p[0];
            double dy = nu.n > 1 ? nu.atoms[i].p[1] - nup.atoms[j].p[1] : 0.0;
            dist[i * M + j] = std::sqrt(dx * dx + dy * dy);
        }
    std::vector<double> cand = dist;
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto feasible = [&](double t) {
        Dinic flow(static_cast<int>(N + M + 2));
        int src = static_cast<int>(N + M), snk = src + 1;
        for (std::int64_t i = 0; i < N; ++i) flow.add_edge(src, static_cast<int>(i), L / N);
        for (std::int64_t j = 0; j < M; ++j) flow.add_edge(static_cast<int>(N + j), snk, L / M);
        for (std::int64_t i = 0; i < N; ++i)
            for (std::int64_t j = 0; j < M; ++j)
                if (dist[i * M + j] <= t) flow.add_edge(static_cast<int>(i), static_cast<int>(N + j), L);
        return flow.max_flow(src, snk) == L;
    };

    BottleneckResult out;
    size_t lo = 0, hi = cand.size() - 1;
    if (feasible(cand[0])) {
        out.probes.push_back({cand[0], true});
        out.value = cand[0];
        return out;
    }
    out.probes.push_back({cand[0], false});
    while (lo + 1 < hi) {
        size_t mid = (lo + hi) / 2;
        bool ok = feasible(cand[mid]);
        out.probes.push_back({cand[mid], ok});
        (ok ? hi : lo) = mid;
    }
    if (!feasible(cand[hi])) throw Error("bottleneck_R: no feasible threshold (corrupt instance)");
    out.value = cand[hi];
    return out;
}

double bottleneck_R(const DiscreteMeasure& nu, const DiscreteMeasure& nup) {
    return bottleneck_probe(nu, nup).value;
}

PerturbationReport perturbation_report(const DiscreteMeasure& mu, const DiscreteMeasure& mup,
                                       const DiscreteMeasure& nu, const DiscreteMeasure& nup) {
    PerturbationReport r;
    r.c_mu_nu = ot_cost(mu, nu);
    r.c_mup_nu = ot_cost(mup, nu);
    r.c_mu_nup = ot_cost(mu, nup);
    r.w1_mu_mup = wasserstein1(mu, mup);
    r.esssup_nu = nu.esssup_norm();
    r.first_moment_mu = mu.first_moment();
    r.r_nu_nup = bottleneck_R(nu, nup);
    r.lhs1 = std::fabs(r.c_mu_nu - r.c_mup_nu);
    r.rhs1 = r.w1_mu_mup * r.esssup_nu;
    r.lhs2 = std::fabs(r.c_mu_nu - r.c_mu_nup);
    r.rhs2 = r.first_moment_mu * r.r_nu_nup;
    double slack1 = 1e-9 * (1.0 + std::fabs(r.rhs1));
    double slack2 = 1e-9 * (1.0 + std::fabs(r.rhs2));
    r.holds1 = r.lhs1 <= r.rhs1 + slack1;
    r.holds2 = r.lhs2 <= r.rhs2 + slack2;
    return r;
}

}  // namespace torfek
