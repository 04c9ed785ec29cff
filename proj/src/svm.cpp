#include "mlpr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "mlpr/format.hpp"

namespace mlpr {

std::pair<double, double> class_weights(Eigen::Index n_pos, Eigen::Index n_neg, double eps_m) {
    if (n_pos < 1 || n_neg < 1)
        throw std::invalid_argument("class_weights: both classes must be present");
    if (eps_m <= 0.0) throw std::invalid_argument("class_weights: eps_m must be positive");
    return {eps_m * static_cast<double>(n_neg) / static_cast<double>(n_pos), 1.0};
}

namespace {

struct TrainingView {
    const FeatureMatrix& rows;
    Vector labels; // +1 / -1 as doubles
    Eigen::Index n_pos = 0, n_neg = 0;
};

TrainingView labeled_view(const EdgeFeatureTable& table) {
    if (!table.labels) throw std::invalid_argument("training requires a labeled table");
    if (!table.features.allFinite())
        throw std::invalid_argument("training rows must be finite");
    TrainingView view{table.features, Vector(table.rows())};
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        const int l = (*table.labels)[i];
        if (l != 1 && l != -1) throw std::invalid_argument("labels must be +1 or -1");
        view.labels[i] = l;
        (l == 1 ? view.n_pos : view.n_neg)++;
    }
    if (view.n_pos == 0 || view.n_neg == 0)
        throw std::invalid_argument("training requires both classes");
    return view;
}

std::pair<double, double> resolve_weights(const TrainingView& view, const TrainConfig& config) {
    if (config.weight_override) return *config.weight_override;
    return class_weights(view.n_pos, view.n_neg, config.eps_m);
}

// Kernel rows against the full training set, with an LRU cache.
class KernelCache {
public:
    KernelCache(const FeatureMatrix& rows, KernelKind kind, double gamma, double budget_mb)
        : rows_(rows), kind_(kind), gamma_(gamma) {
        if (kind_ == KernelKind::Rbf) norms_ = rows_.rowwise().squaredNorm();
        const double bytes_per_row = 8.0 * static_cast<double>(rows_.rows());
        capacity_ = static_cast<std::size_t>(
            std::max(2.0, budget_mb * 1024.0 * 1024.0 / std::max(1.0, bytes_per_row)));
    }

    const Vector& row(Eigen::Index i) {
        auto hit = index_.find(i);
        if (hit != index_.end()) {
            order_.splice(order_.begin(), order_, hit->second);
            return hit->second->second;
        }
        if (index_.size() >= capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
        order_.emplace_front(i, compute(i));
        index_[i] = order_.begin();
        return order_.front().second;
    }

private:
    Vector compute(Eigen::Index i) const {
        if (kind_ == KernelKind::Linear) return rows_ * rows_.row(i).transpose();
        Vector dots = rows_ * rows_.row(i).transpose();
        return (-gamma_ * (norms_.array() + norms_[i] - 2.0 * dots.array())).exp();
    }

    const FeatureMatrix& rows_;
    KernelKind kind_;
    double gamma_;
    Vector norms_;
    std::size_t capacity_;
    std::list<std::pair<Eigen::Index, Vector>> order_;
    std::unordered_map<Eigen::Index, std::list<std::pair<Eigen::Index, Vector>>::iterator> index_;
};

} // namespace

SvmModel train_dual(const EdgeFeatureTable& table, const TrainConfig& config) {
    if (config.rescale_features)
        throw std::invalid_argument("train_dual: feature rescaling is not supported for kernels");
    if (config.kernel == KernelKind::Rbf && config.gamma <= 0.0)
        throw std::invalid_argument("train_dual: gamma must be positive");
    if (config.tol <= 0.0) throw std::invalid_argument("train_dual: tol must be positive");

    const TrainingView view = labeled_view(table);
    const auto [r_plus, r_minus] = resolve_weights(view, config);
    const Eigen::Index m = view.labels.size();
    const Vector& y = view.labels;
    Vector box(m);
    for (Eigen::Index i = 0; i < m; ++i) box[i] = y[i] > 0 ? r_plus : r_minus;

    KernelCache cache(view.rows, config.kernel, config.gamma, config.cache_mb);
    Vector alpha = Vector::Zero(m);
    Vector grad = Vector::Constant(m, -1.0); // G = Q alpha - e at alpha = 0

    const double snap_eps = 1e-12;
    auto snapped = [&](double v, double c) {
        if (v < snap_eps * (1.0 + c)) return 0.0;
        if (v > c - snap_eps * (1.0 + c)) return c;
        return v;
    };

    double violation = std::numeric_limits<double>::infinity();
    bool converged = false;
    long long iterations = 0;
    double g_max = 0.0, g_min = 0.0;

    while (iterations < config.max_iter) {
        // Maximal violating pair: i maximizes -y G over I_up, j minimizes it
        // over I_low.
        g_max = -std::numeric_limits<double>::infinity();
        g_min = std::numeric_limits<double>::infinity();
        Eigen::Index sel_i = -1, sel_j = -1;
        for (Eigen::Index t = 0; t < m; ++t) {
            const double v = -y[t] * grad[t];
            const bool up = (y[t] > 0 && alpha[t] < box[t]) || (y[t] < 0 && alpha[t] > 0);
            const bool low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < box[t]);
            if (up && v > g_max) {
                g_max = v;
                sel_i = t;
            }
            if (low && v < g_min) {
                g_min = v;
                sel_j = t;
            }
        }
        violation = g_max - g_min;
        if (violation < config.tol || sel_i < 0 || sel_j < 0) {
            converged = violation < config.tol;
            break;
        }

        const Eigen::Index i = sel_i, j = sel_j;
        const double di = 1.0;
        const double dj = y[i] == y[j] ? -1.0 : 1.0; // keeps y.d = 0 with d_i = +1
        const Vector& ki = cache.row(i);
        const Vector& kj = cache.row(j);
        double quad = ki[i] + kj[j] - 2.0 * ki[j];
        if (quad <= 0.0) quad = 1e-12;
        const double slope = di * grad[i] + dj * grad[j];
        double delta = -slope / quad;

        const double lo_i = di > 0 ? -alpha[i] : alpha[i] - box[i];
        const double hi_i = di > 0 ? box[i] - alpha[i] : alpha[i];
        const double lo_j = dj > 0 ? -alpha[j] : alpha[j] - box[j];
        const double hi_j = dj > 0 ? box[j] - alpha[j] : alpha[j];
        delta = std::clamp(delta, std::max(lo_i, lo_j), std::min(hi_i, hi_j));

        double new_i = alpha[i] + delta * di;
        double new_j = alpha[j] + delta * dj;
        // Snap the binding coordinate to its exact bound and re-derive the
        // other so the equality constraint is preserved.
        if (double s = snapped(new_i, box[i]); s != new_i) {
            new_i = s;
            delta = (new_i - alpha[i]) * di;
            new_j = alpha[j] + delta * dj;
        } else if (double s2 = snapped(new_j, box[j]); s2 != new_j) {
            new_j = s2;
            delta = (new_j - alpha[j]) * dj;
            new_i = alpha[i] + delta * di;
        }
        if (delta == 0.0) {
            converged = false; // numerically stuck below the requested tol
            break;
        }
        const double change_i = new_i - alpha[i];
        const double change_j = new_j - alpha[j];
        alpha[i] = new_i;
        alpha[j] = new_j;
        grad += (y[i] * change_i) * y.cwiseProduct(ki) + (y[j] * change_j) * y.cwiseProduct(kj);
        ++iterations;
    }
    if (iterations >= config.max_iter) converged = false;
    const double dual_objective = 0.5 * (alpha.dot(grad) - alpha.sum());

    // Bias from free support vectors, else the midpoint of the bound-derived
    // limits.
    double free_sum = 0.0;
    Eigen::Index free_count = 0;
    for (Eigen::Index t = 0; t < m; ++t) {
        const double margin = 1e-8 * (1.0 + box[t]);
        if (alpha[t] > margin && alpha[t] < box[t] - margin) {
            free_sum += -y[t] * grad[t];
            ++free_count;
        }
    }
    const double bias = free_count > 0 ? free_sum / free_count : 0.5 * (g_max + g_min);

    SvmModel model;
    model.kind = SvmModel::Kind::DualRbf;
    model.kernel = config.kernel;
    model.gamma = config.gamma;
    model.bias = bias;
    model.r_plus = r_plus;
    model.r_minus = r_minus;
    model.converged = converged;
    model.kkt_violation = violation;
    model.dual_objective = dual_objective;
    const Eigen::Index nsv = (alpha.array() > 0.0).count();
    model.support_vectors.resize(nsv, kFeatureCount);
    model.coefficients.resize(nsv);
    Eigen::Index out = 0;
    for (Eigen::Index t = 0; t < m; ++t) {
        if (alpha[t] <= 0.0) continue;
        model.support_vectors.row(out) = view.rows.row(t);
        model.coefficients[out] = alpha[t] * y[t];
        ++out;
    }
    return model;
}

namespace {

struct PrimalProblem {
    const FeatureMatrix& x;
    const Vector& y;
    Vector row_weight; // r+ or r- per row

    double objective(const FeatureVector& w, double b) const {
        Vector xi = (1.0 - y.array() * ((x * w).array() + b)).max(0.0).matrix();
        return 0.5 * w.squaredNorm() + xi.array().square().matrix().dot(row_weight);
    }
};

} // namespace

SvmModel train_primal_linear(const EdgeFeatureTable& table, const TrainConfig& config) {
    if (config.tol <= 0.0) throw std::invalid_argument("train_primal_linear: tol must be positive");
    const TrainingView view = labeled_view(table);
    const auto [r_plus, r_minus] = resolve_weights(view, config);
    const Eigen::Index m = view.labels.size();

    // Optional standardization, folded back into (w, b) afterwards.
    FeatureMatrix scaled;
    FeatureVector mu = FeatureVector::Zero(), sigma = FeatureVector::Ones();
    const FeatureMatrix* rows = &view.rows;
    if (config.rescale_features) {
        mu = view.rows.colwise().mean();
        for (int c = 0; c < kFeatureCount; ++c) {
            const double var =
                (view.rows.col(c).array() - mu[c]).square().sum() / std::max<double>(1, m - 1);
            sigma[c] = var > 0 ? std::sqrt(var) : 1.0;
        }
        scaled = (view.rows.rowwise() - mu.transpose()).array().rowwise() /
                 sigma.transpose().array();
        rows = &scaled;
    }

    PrimalProblem problem{*rows, view.labels, Vector(m)};
    for (Eigen::Index i = 0; i < m; ++i)
        problem.row_weight[i] = view.labels[i] > 0 ? r_plus : r_minus;

    FeatureVector w = FeatureVector::Zero();
    double b = 0.0;
    bool converged = false;

    Vector margins(m), xi(m), active_weight(m);
    auto refresh = [&] {
        margins = ((problem.x * w).array() + b).matrix();
        xi = (1.0 - problem.y.array() * margins.array()).max(0.0).matrix();
        active_weight = (xi.array() > 0.0).select(problem.row_weight, Vector::Zero(m));
    };

    refresh();
    FeatureVector grad_w;
    double grad_b = 0.0;
    auto gradient = [&] {
        Vector t = (active_weight.array() * xi.array() * problem.y.array()).matrix();
        grad_w = w - 2.0 * (problem.x.transpose() * t);
        grad_b = -2.0 * t.sum();
    };
    gradient();
    const double g0 = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);

    for (int outer = 0; outer < config.newton_max_iter && g0 > 0.0; ++outer) {
        const double gnorm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
        if (gnorm <= config.tol * g0) {
            converged = true;
            break;
        }

        // CG on the generalized Hessian; products stream over the rows.
        auto hess = [&](const FeatureVector& v, double vb, FeatureVector& hv, double& hb) {
            Vector u = ((problem.x * v).array() + vb).matrix();
            Vector t = (2.0 * active_weight.array() * u.array()).matrix();
            hv = v + problem.x.transpose() * t;
            hb = t.sum();
        };
        FeatureVector p = FeatureVector::Zero(), r = -grad_w, d = r;
        double pb = 0.0, rb = -grad_b, db = rb;
        double rr = r.squaredNorm() + rb * rb;
        const double cg_target = std::max(1e-24, 1e-8 * rr);
        for (int it = 0; it < 64 && rr > cg_target; ++it) {
            FeatureVector hd;
            double hdb;
            hess(d, db, hd, hdb);
            const double dhd = d.dot(hd) + db * hdb;
            if (dhd <= 0.0) break;
            const double step = rr / dhd;
            p += step * d;
            pb += step * db;
            r -= step * hd;
            rb -= step * hdb;
            const double rr_next = r.squaredNorm() + rb * rb;
            d = r + (rr_next / rr) * d;
            db = rb + (rr_next / rr) * db;
            rr = rr_next;
        }
        if (p.squaredNorm() + pb * pb == 0.0) break;

        // Armijo backtracking on the exact objective.
        const double slope = grad_w.dot(p) + grad_b * pb;
        const double base = problem.objective(w, b);
        double step = 1.0;
        for (int half = 0; half < 40; ++half) {
            if (problem.objective(w + step * p, b + step * pb) <= base + 1e-4 * step * slope)
                break;
            step *= 0.5;
        }
        w += step * p;
        b += step * pb;
        refresh();
        gradient();
    }
    if (g0 == 0.0) converged = true;

    SvmModel model;
    model.kind = SvmModel::Kind::PrimalLinear;
    model.r_plus = r_plus;
    model.r_minus = r_minus;
    model.converged = converged;
    if (config.rescale_features) {
        model.weights = (w.array() / sigma.array()).matrix();
        model.bias = b - (w.array() * mu.array() / sigma.array()).sum();
    } else {
        model.weights = w;
        model.bias = b;
    }
    return model;
}

double decision_value(const SvmModel& model, const FeatureVector& f) {
    if (model.kind == SvmModel::Kind::PrimalLinear) return model.weights.dot(f) + model.bias;
    double sum = model.bias;
    for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
        const auto sv = model.support_vectors.row(i);
        const double k = model.kernel == KernelKind::Linear
                             ? sv.dot(f.transpose())
                             : std::exp(-model.gamma * (sv.transpose() - f).squaredNorm());
        sum += model.coefficients[i] * k;
    }
    return sum;
}

Vector decision_values(const SvmModel& model, const EdgeFeatureTable& table) {
    const Eigen::Index rows = table.rows();
    if (model.kind == SvmModel::Kind::PrimalLinear)
        return ((table.features * model.weights).array() + model.bias).matrix();

    Vector out(rows);
    const Vector sv_norms = model.support_vectors.rowwise().squaredNorm();
    constexpr Eigen::Index block = 4096;
    for (Eigen::Index start = 0; start < rows; start += block) {
        const Eigen::Index count = std::min(block, rows - start);
        const auto chunk = table.features.middleRows(start, count);
        Matrix dots = chunk * model.support_vectors.transpose(); // count x nsv
        if (model.kernel == KernelKind::Rbf) {
            const Vector row_norms = chunk.rowwise().squaredNorm();
            for (Eigen::Index r = 0; r < count; ++r)
                out[start + r] =
                    model.bias +
                    ((-model.gamma *
                      (row_norms[r] + sv_norms.array() - 2.0 * dots.row(r).transpose().array()))
                         .exp() *
                     model.coefficients.array())
                        .sum();
        } else {
            out.segment(start, count) =
                ((dots * model.coefficients).array() + model.bias).matrix();
        }
    }
    return out;
}

Eigen::VectorXi predict(const SvmModel& model, const EdgeFeatureTable& table) {
    const Vector values = decision_values(model, table);
    Eigen::VectorXi labels(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) labels[i] = values[i] >= 0.0 ? 1 : -1;
    return labels;
}

std::string save_model(const SvmModel& model) {
    std::ostringstream out;
    if (model.kind == SvmModel::Kind::DualRbf) {
        if (model.kernel != KernelKind::Rbf)
            throw std::runtime_error("save_model: only RBF dual models have a file form");
        out << "MLPR-SVM v1 dual-rbf\n";
        out << "gamma " << format_number(model.gamma) << "\n";
        out << "bias " << format_number(model.bias) << "\n";
        out << "nsv " << model.coefficients.size() << "\n";
        for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
            out << format_number(model.coefficients[i]);
            for (int c = 0; c < kFeatureCount; ++c)
                out << ' ' << format_number(model.support_vectors(i, c));
            out << "\n";
        }
    } else {
        out << "MLPR-SVM v1 primal-linear\n";
        out << "bias " << format_number(model.bias) << "\n";
        out << "w";
        for (int c = 0; c < kFeatureCount; ++c) out << ' ' << format_number(model.weights[c]);
        out << "\n";
    }
    return out.str();
}

SvmModel load_model(const std::string& text) {
    std::istringstream in(text);
    std::string magic, version, kind;
    if (!(in >> magic >> version >> kind) || magic != "MLPR-SVM")
        throw std::runtime_error("load_model: not an MLPR-SVM file");
    if (version != "v1") throw std::runtime_error("load_model: unsupported version " + version);

    auto expect_key = [&](const char* key) {
        std::string k;
        if (!(in >> k) || k != key)
            throw std::runtime_error(std::string("load_model: expected '") + key + "'");
    };
    auto read_double = [&](const char* what) {
        double v;
        if (!(in >> v) || !std::isfinite(v))
            throw std::runtime_error(std::string("load_model: bad number for ") + what);
        return v;
    };

    SvmModel model;
    if (kind == "dual-rbf") {
        model.kind = SvmModel::Kind::DualRbf;
        model.kernel = KernelKind::Rbf;
        expect_key("gamma");
        model.gamma = read_double("gamma");
        if (model.gamma <= 0.0) throw std::runtime_error("load_model: gamma must be positive");
        expect_key("bias");
        model.bias = read_double("bias");
        expect_key("nsv");
        long long nsv;
        if (!(in >> nsv) || nsv < 0) throw std::runtime_error("load_model: bad nsv count");
        model.support_vectors.resize(nsv, kFeatureCount);
        model.coefficients.resize(nsv);
        for (long long i = 0; i < nsv; ++i) {
            model.coefficients[i] = read_double("coefficient");
            for (int c = 0; c < kFeatureCount; ++c)
                model.support_vectors(i, c) = read_double("support vector");
        }
    } else if (kind == "primal-linear") {
        model.kind = SvmModel::Kind::PrimalLinear;
        expect_key("bias");
        model.bias = read_double("bias");
        expect_key("w");
        for (int c = 0; c < kFeatureCount; ++c) model.weights[c] = read_double("weight");
    } else {
        throw std::runtime_error("load_model: unknown model kind '" + kind + "'");
    }
    return model;
}

} // namespace mlpr
