#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mlpr/features.hpp"
#include "mlpr/types.hpp"

namespace mlpr {

enum class KernelKind { Rbf, Linear };

struct TrainConfig {
    KernelKind kernel = KernelKind::Rbf;
    double gamma = 1.0 / kFeatureCount; // RBF width, the library default 1/n_f
    double eps_m = 10.0;                // positive-class penalty multiplier
    double tol = 1e-3;
    long long max_iter = 10'000'000; // SMO pair updates
    int newton_max_iter = 1000;      // outer Newton-CG iterations
    double cache_mb = 64.0;          // kernel row cache budget
    bool rescale_features = false;   // off: f1..f6 are normalized by construction
    /// Explicit (r+, r-) regularization weights; when absent they come from
    /// class_weights(counts, eps_m).
    std::optional<std::pair<double, double>> weight_override;
};

struct SvmModel {
    enum class Kind { DualRbf, PrimalLinear } kind = Kind::PrimalLinear;

    // Dual model: decision(f) = sum_i coefficients[i] K(sv_i, f) + bias,
    // coefficients[i] = alpha_i * label_i.
    KernelKind kernel = KernelKind::Rbf;
    double gamma = 1.0 / kFeatureCount;
    FeatureMatrix support_vectors;
    Vector coefficients;

    // Linear model: decision(f) = weights . f + bias.
    FeatureVector weights = FeatureVector::Zero();

    double bias = 0.0;
    double r_plus = 1.0, r_minus = 1.0; // training-time class weights
    bool converged = true;

    // Dual training diagnostics (not persisted).
    double kkt_violation = 0.0;
    double dual_objective = 0.0;
};

/// r- = 1 and r+ = eps_m * n_neg / n_pos: misclassifying a positive edge
/// costs optimality, misclassifying a negative one only grows the reduced
/// problem.
std::pair<double, double> class_weights(Eigen::Index n_pos, Eigen::Index n_neg, double eps_m);

/// L1-SVM dual via SMO-style decomposition: maximal-KKT-violation pair
/// selection, class-dependent boxes, LRU kernel row cache. Stops when the
/// maximum violation drops below tol; a hit of the iteration cap returns the
/// model with converged = false.
SvmModel train_dual(const EdgeFeatureTable& table, const TrainConfig& config);

/// L2-SVM primal (squared hinge) via Newton-CG with matrix-free
/// Hessian-vector products; never materializes anything quadratic in the
/// row count. Converges when |grad| < tol * |grad at start|.
SvmModel train_primal_linear(const EdgeFeatureTable& table, const TrainConfig& config);

double decision_value(const SvmModel& model, const FeatureVector& f);

/// Per-edge labels: sign of the decision value with 0 mapped to +1 (a
/// borderline edge is kept).
Eigen::VectorXi predict(const SvmModel& model, const EdgeFeatureTable& table);

/// Decision values for every row of the table.
Vector decision_values(const SvmModel& model, const EdgeFeatureTable& table);

/// Versioned text container, shared by both model kinds.
std::string save_model(const SvmModel& model);
SvmModel load_model(const std::string& text);

} // namespace mlpr
