#include "mlpr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mlpr/rng.hpp"

namespace mlpr {

namespace {

Matrix euclidean_costs(const std::vector<std::pair<double, double>>& pts, CostRounding rounding) {
    const int n = static_cast<int>(pts.size());
    Matrix costs = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = pts[i].first - pts[j].first;
            const double dy = pts[i].second - pts[j].second;
            double d = std::hypot(dx, dy);
            if (rounding == CostRounding::NearestInteger) d = std::nearbyint(d);
            costs(i, j) = costs(j, i) = d;
        }
    }
    return costs;
}

std::string tagged_name(const char* family, int n, std::uint64_t seed) {
    return std::string(family) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
}

// Box-Muller from two uniform draws; deterministic per Rng state.
double gaussian(Rng& rng) {
    double u1 = rng.unit();
    while (u1 <= 0.0) u1 = rng.unit();
    const double u2 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace

Instance generate_random_euclidean(int n, int coord_max, std::uint64_t seed,
                                   CostRounding rounding) {
    if (n < 3 || coord_max < 1)
        throw std::invalid_argument("generate_random_euclidean: need n >= 3, coord_max >= 1");
    Rng rng(mix_seed(seed, 0x45756331));
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) {
        p.first = static_cast<double>(rng.uniform_int(0, coord_max));
        p.second = static_cast<double>(rng.uniform_int(0, coord_max));
    }
    return Instance(n, euclidean_costs(pts, rounding), ProblemKind::SymmetricTsp, {},
                    tagged_name("euclidean", n, seed));
}

Instance generate_clustered_euclidean(int n, int coord_max, int clusters, std::uint64_t seed,
                                      CostRounding rounding) {
    if (n < 3 || coord_max < 1 || clusters < 1)
        throw std::invalid_argument("generate_clustered_euclidean: bad parameters");
    Rng rng(mix_seed(seed, 0x436c7573));
    std::vector<std::pair<double, double>> centers(clusters);
    for (auto& c : centers) {
        c.first = static_cast<double>(rng.uniform_int(0, coord_max));
        c.second = static_cast<double>(rng.uniform_int(0, coord_max));
    }
    const double spread = coord_max / 20.0;
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) {
        const auto& c = centers[rng.below(clusters)];
        p.first = std::clamp(c.first + spread * gaussian(rng), 0.0, double(coord_max));
        p.second = std::clamp(c.second + spread * gaussian(rng), 0.0, double(coord_max));
    }
    return Instance(n, euclidean_costs(pts, rounding), ProblemKind::SymmetricTsp, {},
                    tagged_name("clustered", n, seed));
}

Instance generate_random_matrix(int n, int cost_max, std::uint64_t seed) {
    if (n < 3 || cost_max < 1)
        throw std::invalid_argument("generate_random_matrix: need n >= 3, cost_max >= 1");
    Rng rng(mix_seed(seed, 0x4d617472));
    Matrix costs = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            costs(i, j) = costs(j, i) = static_cast<double>(rng.uniform_int(1, cost_max));
    return Instance(n, std::move(costs), ProblemKind::SymmetricTsp, {},
                    tagged_name("randmatrix", n, seed));
}

Instance generate_random_atsp(int n, int cost_max, std::uint64_t seed) {
    if (n < 3 || cost_max < 1)
        throw std::invalid_argument("generate_random_atsp: need n >= 3, cost_max >= 1");
    Rng rng(mix_seed(seed, 0x41747370));
    Matrix costs = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) costs(i, j) = static_cast<double>(rng.uniform_int(1, cost_max));
    return Instance(n, std::move(costs), ProblemKind::AsymmetricTsp, {},
                    tagged_name("atsp", n, seed));
}

Instance generate_random_sop(int n, int cost_max, int precedence_count, std::uint64_t seed) {
    if (n < 3 || cost_max < 1 || precedence_count < 0)
        throw std::invalid_argument("generate_random_sop: bad parameters");
    Rng rng(mix_seed(seed, 0x536f7021));
    Matrix costs = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) costs(i, j) = static_cast<double>(rng.uniform_int(1, cost_max));

    // Acyclic by construction: pairs are oriented along a random hidden order
    // of cities 1..n-1 (0-based), so the relation embeds in a total order.
    std::vector<int> hidden(n - 1);
    for (int v = 1; v < n; ++v) hidden[v - 1] = v;
    for (int i = 0; i + 1 < n - 1; ++i) {
        const int j = i + static_cast<int>(rng.below(n - 1 - i));
        std::swap(hidden[i], hidden[j]);
    }
    std::set<PrecedencePair> chosen;
    const long long max_pairs = static_cast<long long>(n - 1) * (n - 2) / 2;
    const int want = static_cast<int>(std::min<long long>(precedence_count, max_pairs));
    while (static_cast<int>(chosen.size()) < want) {
        int a = static_cast<int>(rng.below(n - 1));
        int b = static_cast<int>(rng.below(n - 1));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        chosen.insert({hidden[a], hidden[b]});
    }
    std::vector<PrecedencePair> precedence(chosen.begin(), chosen.end());
    // Mirror costs on reversed-precedence entries so the -1 file encoding
    // recovers the same matrix (transposed-entry convention).
    for (const auto& [a, b] : precedence) costs(b, a) = costs(a, b);
    return Instance(n, std::move(costs), ProblemKind::Sop, std::move(precedence),
                    tagged_name("sop", n, seed));
}

} // namespace mlpr
