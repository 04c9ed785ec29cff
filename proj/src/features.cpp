#include "mlpr/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mlpr/format.hpp"
#include "mlpr/parallel.hpp"

namespace mlpr {

Eigen::Matrix<double, Eigen::Dynamic, 4> graph_features(const Instance& instance) {
    const int n = instance.n();
    const auto& costs = instance.costs();

    // Row/column extrema and means over k != i / k != j.
    Vector row_min(n), row_max(n), row_mean(n), col_min(n), col_max(n), col_mean(n);
    for (int i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            const double c = costs(i, k);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            sum += c;
        }
        row_min[i] = lo;
        row_max[i] = hi;
        row_mean[i] = sum / (n - 1);
    }
    for (int j = 0; j < n; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double c = costs(k, j);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            sum += c;
        }
        col_min[j] = lo;
        col_max[j] = hi;
        col_mean[j] = sum / (n - 1);
    }

    const auto& pairs = instance.edge_pairs();
    Eigen::Matrix<double, Eigen::Dynamic, 4> out(pairs.size(), 4);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        const auto [i, j] = pairs[e];
        const double c = costs(i, j);
        const double row_spread = row_max[i] - row_min[i];
        const double col_spread = col_max[j] - col_min[j];
        out(e, 0) = row_spread > 0 ? (c - row_min[i]) / row_spread : 0.0;
        out(e, 1) = col_spread > 0 ? (c - col_min[j]) / col_spread : 0.0;
        out(e, 2) = row_spread > 0 ? (c - row_mean[i]) / row_spread : 0.0;
        out(e, 3) = col_spread > 0 ? (c - col_mean[j]) / col_spread : 0.0;
    }
    return out;
}

MeasureAccumulator statistical_measures(const Instance& instance, const SampleBatch& batch) {
    const int n = instance.n();
    const int m = batch.m;
    if (m < 1) throw std::invalid_argument("statistical_measures: empty batch");
    const std::size_t edges = static_cast<std::size_t>(instance.edge_count());

    MeasureAccumulator acc;
    acc.y_mean = batch.objectives.mean();
    acc.y_diff = (batch.objectives.array() - acc.y_mean).sum();
    acc.y_var = (batch.objectives.array() - acc.y_mean).square().sum();
    acc.f_r = Vector::Zero(edges);
    acc.s1 = Vector::Zero(edges);
    std::vector<long long> count(edges, 0);

    struct Partial {
        Vector f_r, s1;
        std::vector<long long> count;
    };

    // Chunk partials are computed in parallel but merged in chunk order, in
    // waves of at most `workers` live buffers, so the floating-point result
    // is identical at any thread count.
    const int chunks = chunk_count(m);
    const int workers = std::min(chunks, max_threads());
    std::vector<Partial> buffers(workers);

    auto accumulate_chunk = [&](Partial& p, int begin, int end) {
        p.f_r.setZero(edges);
        p.s1.setZero(edges);
        p.count.assign(edges, 0);
        for (int k = begin; k < end; ++k) {
            const double inv_rank = 1.0 / batch.rankings[k];
            const double dev = batch.objectives[k] - acc.y_mean;
            const auto& order = batch.tours[k];
            for (int pos = 0; pos < n; ++pos) {
                const int a = order[pos];
                const int b = order[pos + 1 == n ? 0 : pos + 1];
                const int e = instance.edge_index(a, b);
                p.f_r[e] += inv_rank;
                p.s1[e] += dev;
                ++p.count[e];
            }
        }
    };

    for (int wave = 0; wave < chunks; wave += workers) {
        const int live = std::min(workers, chunks - wave);
        if (live == 1) {
            accumulate_chunk(buffers[0], wave * kChunkSize,
                             std::min(m, (wave + 1) * kChunkSize));
        } else {
            std::vector<std::thread> pool;
            pool.reserve(live);
            for (int w = 0; w < live; ++w)
                pool.emplace_back([&, w] {
                    const int c = wave + w;
                    accumulate_chunk(buffers[w], c * kChunkSize,
                                     std::min(m, (c + 1) * kChunkSize));
                });
            for (auto& t : pool) t.join();
        }
        for (int w = 0; w < live; ++w) {
            acc.f_r += buffers[w].f_r;
            acc.s1 += buffers[w].s1;
            for (std::size_t e = 0; e < edges; ++e) count[e] += buffers[w].count[e];
        }
    }

    acc.presence.resize(edges);
    acc.f_c.resize(edges);
    for (std::size_t e = 0; e < edges; ++e) {
        const double x_bar = static_cast<double>(count[e]) / m;
        acc.presence[e] = x_bar;
        if (count[e] == 0 || count[e] == m || acc.y_var == 0.0) {
            acc.f_c[e] = 0.0;
            continue;
        }
        const double cov = (1.0 - x_bar) * acc.s1[e] - x_bar * (acc.y_diff - acc.s1[e]);
        const double var_x = x_bar * (1.0 - x_bar) * m;
        acc.f_c[e] = cov / std::sqrt(var_x * acc.y_var);
    }
    return acc;
}

std::pair<Vector, Vector> normalize_measures(const Vector& f_r, const Vector& f_c) {
    Vector f5 = Vector::Zero(f_r.size());
    Vector f6 = Vector::Zero(f_c.size());
    if (f_r.size() == 0) return {f5, f6};
    const double max_rank = f_r.maxCoeff();
    if (max_rank > 0.0) f5 = f_r / max_rank;
    const double min_corr = f_c.minCoeff();
    if (min_corr < 0.0) f6 = f_c / min_corr;
    return {f5, f6};
}

Eigen::VectorXi label_edges(const Instance& instance, const Tour& optimal) {
    require_permutation(instance, optimal.order);
    const int n = instance.n();
    std::vector<int> position(n);
    for (int p = 0; p < n; ++p) position[optimal.order[p]] = p;
    for (const auto& [a, b] : instance.precedence())
        if (position[a] >= position[b])
            throw std::invalid_argument("label_edges: tour violates a precedence pair");

    Eigen::VectorXi labels = Eigen::VectorXi::Constant(instance.edge_count(), -1);
    for (int p = 0; p < n; ++p) {
        const int a = optimal.order[p];
        const int b = optimal.order[p + 1 == n ? 0 : p + 1];
        labels[instance.edge_index(a, b)] = 1;
    }
    return labels;
}

EdgeFeatureTable build_feature_table(const Instance& instance, const SampleBatch& batch,
                                     const Tour* optimal) {
    EdgeFeatureTable table;
    table.instance_name = instance.name();
    table.edges = instance.edge_pairs();

    const auto graph = graph_features(instance);
    const auto measures = statistical_measures(instance, batch);
    const auto [f5, f6] = normalize_measures(measures.f_r, measures.f_c);

    table.features.resize(graph.rows(), kFeatureCount);
    table.features.leftCols<4>() = graph;
    table.features.col(4) = f5;
    table.features.col(5) = f6;
    if (optimal) table.labels = label_edges(instance, *optimal);
    return table;
}

std::string feature_table_csv(const EdgeFeatureTable& table) {
    std::ostringstream out;
    out << "i,j,f1,f2,f3,f4,f5,f6,label\n";
    for (Eigen::Index e = 0; e < table.rows(); ++e) {
        out << (table.edges[e].first + 1) << ',' << (table.edges[e].second + 1);
        for (int f = 0; f < kFeatureCount; ++f) out << ',' << format_number(table.features(e, f));
        out << ',';
        if (table.labels) out << (*table.labels)[e];
        out << '\n';
    }
    return out.str();
}

} // namespace mlpr
