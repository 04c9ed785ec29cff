#include "mlpr/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlpr/rng.hpp"

namespace mlpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool edge_usable(const Instance& instance, const EdgeMask* mask, int i, int j) {
    return mask == nullptr || mask->kept[instance.edge_index(i, j)] != 0;
}

void check_mask(const Instance& instance, const EdgeMask* mask, const char* who) {
    if (mask && !mask->matches(instance))
        throw std::invalid_argument(std::string(who) + ": mask does not match instance");
}

double tour_cost_raw(const Instance& instance, const std::vector<int>& order) {
    const int n = instance.n();
    double total = 0.0;
    for (int p = 0; p + 1 < n; ++p) total += instance.cost(order[p], order[p + 1]);
    return total + instance.cost(order[n - 1], order[0]);
}

// Predecessor bitmasks (bit v set = city v must come earlier). City 0 never
// appears as a bit; it is always first.
std::vector<std::uint64_t> predecessor_masks(const Instance& instance) {
    std::vector<std::uint64_t> pred(instance.n(), 0);
    for (const auto& [a, b] : instance.precedence())
        if (a != 0) pred[b] |= std::uint64_t{1} << a;
    return pred;
}

struct DpResult {
    std::vector<int> order;
    double cost;
    std::uint64_t transitions;
};

// Shared subset-DP core. When `pred` is non-empty a state (S, last) may only
// extend to cities whose predecessors are all inside S.
DpResult subset_dp(const Instance& instance, const EdgeMask* mask,
                   const std::vector<std::uint64_t>& pred) {
    const int n = instance.n();
    const int k = n - 1; // cities 1..n-1 mapped to bits 0..k-1
    const std::size_t states = std::size_t{1} << k;
    std::vector<double> dp(states * k, kInf);
    std::vector<std::int16_t> parent(states * k, -1);
    std::uint64_t transitions = 0;

    auto pred_bits = [&](int city) {
        return pred.empty() ? std::uint64_t{0} : pred[city] >> 1; // shift into bit space
    };

    for (int t = 0; t < k; ++t) {
        const int city = t + 1;
        if (pred_bits(city) != 0) continue; // something must precede it
        if (!edge_usable(instance, mask, 0, city)) continue;
        dp[(std::size_t{1} << t) * k + t] = instance.cost(0, city);
    }

    for (std::size_t set = 1; set < states; ++set) {
        for (int t = 0; t < k; ++t) {
            if (!(set >> t & 1)) continue;
            const double here = dp[set * k + t];
            if (here == kInf) continue;
            const int from = t + 1;
            for (int u = 0; u < k; ++u) {
                if (set >> u & 1) continue;
                const int to = u + 1;
                ++transitions;
                if ((pred_bits(to) & ~set) != 0) continue;
                if (!edge_usable(instance, mask, from, to)) continue;
                const double cand = here + instance.cost(from, to);
                const std::size_t idx = (set | std::size_t{1} << u) * k + u;
                if (cand < dp[idx]) {
                    dp[idx] = cand;
                    parent[idx] = static_cast<std::int16_t>(t);
                }
            }
        }
    }

    const std::size_t full = states - 1;
    double best = kInf;
    int best_last = -1;
    for (int t = 0; t < k; ++t) {
        if (dp[full * k + t] == kInf) continue;
        if (!edge_usable(instance, mask, t + 1, 0)) continue;
        const double total = dp[full * k + t] + instance.cost(t + 1, 0);
        if (total < best) {
            best = total;
            best_last = t;
        }
    }
    if (best_last < 0) throw InfeasibleError("subset DP: no feasible tour");

    std::vector<int> order(n);
    std::size_t set = full;
    int t = best_last;
    for (int pos = n - 1; pos >= 1; --pos) {
        order[pos] = t + 1;
        const int prev = parent[set * k + t];
        set &= ~(std::size_t{1} << t);
        t = prev;
    }
    order[0] = 0;
    return DpResult{std::move(order), best, transitions};
}

} // namespace

SolveReport solve_held_karp(const Instance& instance, const EdgeMask* mask,
                            const SolveOptions& options) {
    check_mask(instance, mask, "solve_held_karp");
    if (instance.n() > options.held_karp_cap)
        throw CapExceededError("solve_held_karp: n exceeds the subset-DP cap");
    const auto start = Clock::now();
    auto result = instance.kind() == ProblemKind::Sop
                      ? subset_dp(instance, mask, predecessor_masks(instance))
                      : subset_dp(instance, mask, {});
    SolveReport report;
    report.tour = Tour{std::move(result.order), result.cost};
    report.optimal = true;
    report.nodes_expanded = result.transitions;
    report.wall_seconds = seconds_since(start);
    return report;
}

SolveReport solve_sop_exact(const Instance& instance, const SolveOptions& options) {
    if (instance.kind() != ProblemKind::Sop)
        throw std::invalid_argument("solve_sop_exact: instance is not a SOP");
    if (instance.n() > options.held_karp_cap)
        throw CapExceededError("solve_sop_exact: n exceeds the subset-DP cap");
    const auto start = Clock::now();
    auto result = subset_dp(instance, nullptr, predecessor_masks(instance));
    SolveReport report;
    report.tour = Tour{std::move(result.order), result.cost};
    report.optimal = true;
    report.nodes_expanded = result.transitions;
    report.wall_seconds = seconds_since(start);
    return report;
}

bool validate_tour(const Instance& instance, const Tour& tour, const EdgeMask* mask) {
    const int n = instance.n();
    const auto& order = tour.order;
    if (static_cast<int>(order.size()) != n || order[0] != 0) return false;
    std::vector<int> position(n, -1);
    for (int p = 0; p < n; ++p) {
        const int city = order[p];
        if (city < 0 || city >= n || position[city] != -1) return false;
        position[city] = p;
    }
    if (mask) {
        if (!mask->matches(instance)) return false;
        for (int p = 0; p < n; ++p)
            if (!mask->kept[instance.edge_index(order[p], order[(p + 1) % n])]) return false;
    }
    for (const auto& [a, b] : instance.precedence())
        if (position[a] >= position[b]) return false;
    return true;
}

namespace {

// A segment reversal order[i..j] is applicable iff the replacement edges are
// kept and, for SOP, no precedence pair has both endpoints inside the
// segment (the reversal would flip their order).
bool reversal_allowed(const Instance& instance, const EdgeMask* mask,
                      const std::vector<int>& order, const std::vector<int>& position,
                      int i, int j) {
    const int n = instance.n();
    const int a = order[i - 1], b = order[i], c = order[j], d = order[(j + 1) % n];
    if (!edge_usable(instance, mask, a, c) || !edge_usable(instance, mask, b, d)) return false;
    if (instance.directed()) {
        for (int p = i; p < j; ++p)
            if (!edge_usable(instance, mask, order[p + 1], order[p])) return false;
    }
    if (instance.kind() == ProblemKind::Sop) {
        for (const auto& [x, y] : instance.precedence()) {
            const int px = position[x], py = position[y];
            if (px >= i && px <= j && py >= i && py <= j) return false;
        }
    }
    return true;
}

double reversal_delta(const Instance& instance, const std::vector<int>& order, int i, int j) {
    const int n = instance.n();
    const int a = order[i - 1], b = order[i], c = order[j], d = order[(j + 1) % n];
    double delta = instance.cost(a, c) + instance.cost(b, d) - instance.cost(a, b) -
                   instance.cost(c, d);
    if (instance.directed()) {
        for (int p = i; p < j; ++p)
            delta += instance.cost(order[p + 1], order[p]) - instance.cost(order[p], order[p + 1]);
    }
    return delta;
}

void apply_reversal(std::vector<int>& order, std::vector<int>& position, int i, int j) {
    std::reverse(order.begin() + i, order.begin() + j + 1);
    for (int p = i; p <= j; ++p) position[order[p]] = p;
}

} // namespace

Tour improve_2opt(const Instance& instance, const Tour& tour, const EdgeMask* mask) {
    check_mask(instance, mask, "improve_2opt");
    require_permutation(instance, tour.order);
    const int n = instance.n();
    std::vector<int> order = tour.order;
    std::vector<int> position(n);
    for (int p = 0; p < n; ++p) position[order[p]] = p;

    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i < n - 1 && !improved; ++i) {
            for (int j = i + 1; j < n && !improved; ++j) {
                const double delta = reversal_delta(instance, order, i, j);
                if (delta >= -1e-9) continue;
                if (!reversal_allowed(instance, mask, order, position, i, j)) continue;
                apply_reversal(order, position, i, j);
                improved = true;
            }
        }
    }
    return Tour{order, tour_cost_raw(instance, order)};
}

namespace {

// Deterministic precedence-feasible order: city 1 first, then smallest-index
// ready city.
std::vector<int> topological_order(const Instance& instance) {
    const int n = instance.n();
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> succ(n);
    for (const auto& [a, b] : instance.precedence()) {
        succ[a].push_back(b);
        ++indegree[b];
    }
    std::vector<int> order;
    order.reserve(n);
    std::vector<std::uint8_t> placed(n, 0);
    order.push_back(0);
    placed[0] = 1;
    for (int w : succ[0]) --indegree[w];
    while (static_cast<int>(order.size()) < n) {
        int pick = -1;
        for (int v = 1; v < n; ++v)
            if (!placed[v] && indegree[v] == 0) {
                pick = v;
                break;
            }
        if (pick < 0) throw InfeasibleError("topological_order: cyclic precedence");
        order.push_back(pick);
        placed[pick] = 1;
        for (int w : succ[pick]) --indegree[w];
    }
    return order;
}

} // namespace

Tour multistart_2opt(const Instance& instance, const EdgeMask* mask, const Tour* warm_start,
                     int restarts, std::uint64_t seed) {
    check_mask(instance, mask, "multistart_2opt");
    if (mask && !warm_start)
        throw std::invalid_argument("multistart_2opt: a mask requires a warm-start tour");
    const int n = instance.n();
    Rng rng(mix_seed(seed, 0x326f7074));
    Tour best;
    if (warm_start) {
        best = improve_2opt(instance, *warm_start, mask);
    } else {
        std::vector<int> order = instance.kind() == ProblemKind::Sop
                                     ? topological_order(instance)
                                     : [&] {
                                           std::vector<int> o(n);
                                           std::iota(o.begin(), o.end(), 0);
                                           return o;
                                       }();
        best = improve_2opt(instance, Tour{order, tour_cost_raw(instance, order)}, mask);
    }

    const bool random_restarts = mask == nullptr && instance.kind() != ProblemKind::Sop;
    std::vector<int> position(n);
    for (int r = 0; r < restarts; ++r) {
        std::vector<int> order;
        if (random_restarts) {
            order.resize(n);
            std::iota(order.begin(), order.end(), 0);
            for (int i = 1; i + 1 < n; ++i) {
                const int j = i + static_cast<int>(rng.below(n - i));
                std::swap(order[i], order[j]);
            }
        } else {
            // Perturb the incumbent with a few random valid reversals.
            order = best.order;
            for (int p = 0; p < n; ++p) position[order[p]] = p;
            int applied = 0;
            for (int attempt = 0; attempt < 8 * n && applied < 3; ++attempt) {
                int i = 1 + static_cast<int>(rng.below(n - 2));
                int j = i + 1 + static_cast<int>(rng.below(n - i - 1));
                if (reversal_allowed(instance, mask, order, position, i, j)) {
                    apply_reversal(order, position, i, j);
                    ++applied;
                }
            }
        }
        Tour candidate = improve_2opt(instance, Tour{order, tour_cost_raw(instance, order)}, mask);
        if (candidate.cost < best.cost) best = candidate;
    }
    return best;
}

namespace {

struct BnbSearch {
    const Instance& instance;
    const EdgeMask* mask;
    int n;
    bool symmetric;
    bool sop;
    std::vector<std::uint64_t> pred;
    std::vector<std::vector<int>> neighbors; // usable targets, ascending cost
    std::vector<double> static_half;         // per-city bound contribution
    double upper;
    std::vector<int> best_order;
    bool have_tour = false;
    std::uint64_t nodes = 0;
    std::uint64_t node_limit;
    double time_limit;
    Clock::time_point start;
    bool aborted = false;
    std::vector<int> path;
    std::uint64_t visited = 1;
    // Prim scratch and visited-set cache for the MST refinement.
    mutable std::vector<int> mst_verts;
    mutable std::vector<double> mst_dist;
    mutable std::vector<std::uint8_t> mst_done;
    mutable std::unordered_map<std::uint64_t, double> mst_cache;

    BnbSearch(const Instance& inst, const EdgeMask* m, const SolveOptions& opt)
        : instance(inst), mask(m), n(inst.n()),
          symmetric(!inst.directed()), sop(inst.kind() == ProblemKind::Sop),
          node_limit(opt.node_limit), time_limit(opt.time_limit_seconds) {
        if (n > 60) throw CapExceededError("solve_bnb: n exceeds 60 (bitmask search)");
        if (sop) pred = predecessor_masks(instance);
        neighbors.resize(n);
        static_half.assign(n, 0.0);
        for (int v = 0; v < n; ++v) {
            auto& list = neighbors[v];
            for (int u = 0; u < n; ++u)
                if (u != v && edge_usable(instance, mask, v, u)) list.push_back(u);
            std::sort(list.begin(), list.end(), [&](int a, int b) {
                return instance.cost(v, a) < instance.cost(v, b);
            });
            if (symmetric) {
                // Two cheapest usable incident edges (usable both ways for the
                // undirected key, so the outgoing list is the incident list).
                if (list.size() < 2) throw InfeasibleError("solve_bnb: city of degree < 2");
                static_half[v] = instance.cost(v, list[0]) + instance.cost(v, list[1]);
            } else {
                if (list.empty()) throw InfeasibleError("solve_bnb: city without outgoing edges");
                static_half[v] = instance.cost(v, list[0]);
            }
        }
    }

    bool budget_exhausted() {
        if (node_limit && nodes >= node_limit) return true;
        if (time_limit > 0.0 && (nodes & 1023) == 0 && seconds_since(start) > time_limit)
            return true;
        return false;
    }

    // Completion edges incident to an unvisited city can only lead to other
    // unvisited cities or to the path endpoints, so the two-cheapest terms
    // are taken over those candidates. Interior visited cities are excluded.
    double lower_bound(int last, double g) const {
        double into_unvisited = kInf, start_link = kInf;
        for (int u : neighbors[last])
            if (!(visited >> u & 1)) {
                into_unvisited = instance.cost(last, u);
                break;
            }
        if (into_unvisited == kInf) return kInf;

        if (!symmetric) {
            double sum = 0.0;
            for (int u = 1; u < n; ++u) {
                if (visited >> u & 1) continue;
                double cheapest = kInf;
                for (int t : neighbors[u]) {
                    if (t != 0 && (visited >> t & 1)) continue;
                    cheapest = instance.cost(u, t);
                    break;
                }
                if (cheapest == kInf) return kInf;
                sum += cheapest;
            }
            return g + into_unvisited + sum;
        }

        for (int u : neighbors[0])
            if (!(visited >> u & 1)) {
                start_link = instance.cost(0, u);
                break;
            }
        if (start_link == kInf) return kInf;
        double sum = 0.0;
        for (int u = 1; u < n; ++u) {
            if (visited >> u & 1) continue;
            int found = 0;
            double pair_sum = 0.0;
            for (int t : neighbors[u]) {
                if ((visited >> t & 1) && t != last && t != 0) continue;
                pair_sum += instance.cost(u, t);
                if (++found == 2) break;
            }
            if (found < 2) return kInf;
            sum += pair_sum;
        }
        double bound = g + 0.5 * (sum + into_unvisited + start_link);
        if (bound >= upper) return bound;
        // Refinement: the completion path visits every unvisited city and
        // attaches to both path endpoints, so MST(unvisited) plus the two
        // cheapest endpoint links is also a valid completion lower bound.
        // The MST depends only on the visited set, so it is cached.
        const double mst = mst_unvisited();
        if (mst == kInf) return kInf;
        return std::max(bound, g + mst + into_unvisited + start_link);
    }

    double mst_unvisited() const {
        const auto cached = mst_cache.find(visited);
        if (cached != mst_cache.end()) return cached->second;
        mst_verts.clear();
        for (int u = 1; u < n; ++u)
            if (!(visited >> u & 1)) mst_verts.push_back(u);
        const int k = static_cast<int>(mst_verts.size());
        double total = 0.0;
        if (k > 1) {
            mst_dist.assign(k, kInf);
            mst_done.assign(k, 0);
            mst_dist[0] = 0.0;
            for (int round = 0; round < k; ++round) {
                int pick = -1;
                double best = kInf;
                for (int v = 0; v < k; ++v)
                    if (!mst_done[v] && mst_dist[v] < best) {
                        best = mst_dist[v];
                        pick = v;
                    }
                if (pick < 0) {
                    total = kInf; // disconnected under the mask
                    break;
                }
                mst_done[pick] = 1;
                total += best;
                const int c = mst_verts[pick];
                for (int v = 0; v < k; ++v) {
                    if (mst_done[v]) continue;
                    const int d = mst_verts[v];
                    if (!edge_usable(instance, mask, c, d)) continue;
                    const double w = instance.cost(c, d);
                    if (w < mst_dist[v]) mst_dist[v] = w;
                }
            }
        }
        if (mst_cache.size() >= (std::size_t{1} << 20)) mst_cache.clear();
        mst_cache.emplace(visited, total);
        return total;
    }

    void dfs(int last, double g) {
        if (aborted) return;
        ++nodes;
        if (budget_exhausted()) {
            aborted = true;
            return;
        }
        if (static_cast<int>(path.size()) == n) {
            if (!edge_usable(instance, mask, last, 0)) return;
            const double total = g + instance.cost(last, 0);
            if (total < upper) {
                upper = total;
                best_order = path;
                have_tour = true;
            }
            return;
        }
        if (lower_bound(last, g) >= upper) return;
        for (int next : neighbors[last]) {
            if (visited >> next & 1) continue;
            if (sop && (pred[next] & ~visited) != 0) continue;
            path.push_back(next);
            visited |= std::uint64_t{1} << next;
            dfs(next, g + instance.cost(last, next));
            visited &= ~(std::uint64_t{1} << next);
            path.pop_back();
            if (aborted) return;
        }
    }
};

} // namespace

SolveReport solve_bnb(const Instance& instance, const EdgeMask* mask, const SolveOptions& options,
                      const Tour* warm_start) {
    check_mask(instance, mask, "solve_bnb");
    const auto start = Clock::now();
    BnbSearch search(instance, mask, options);
    search.start = start;

    Tour incumbent;
    bool have_incumbent = false;
    if (warm_start) {
        if (!validate_tour(instance, *warm_start, mask))
            throw std::invalid_argument("solve_bnb: warm start is not feasible");
        incumbent = multistart_2opt(instance, mask, warm_start, options.restarts, options.seed);
        have_incumbent = true;
    } else if (!mask && instance.kind() != ProblemKind::Sop) {
        incumbent = multistart_2opt(instance, nullptr, nullptr, options.restarts, options.seed);
        have_incumbent = true;
    }
    search.upper = have_incumbent ? incumbent.cost : kInf;
    search.have_tour = have_incumbent;
    if (have_incumbent) search.best_order = incumbent.order;

    search.path.assign(1, 0);
    search.dfs(0, 0.0);

    if (!search.have_tour) {
        if (search.aborted)
            throw InfeasibleError("solve_bnb: no feasible tour found within the budget");
        throw InfeasibleError("solve_bnb: masked instance has no feasible tour");
    }
    SolveReport report;
    report.tour = Tour{search.best_order, tour_cost_raw(instance, search.best_order)};
    report.optimal = !search.aborted;
    report.nodes_expanded = search.nodes;
    report.wall_seconds = seconds_since(start);
    return report;
}

} // namespace mlpr
