#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qosrec/dataset.hpp"
#include "qosrec/similarity.hpp"

namespace qosrec {

enum class NbVariant { nbmodel1, nbmodel2, nbmodel3 };

NbVariant parse_nb_variant(const std::string& name);
std::string nb_variant_name(NbVariant v);

struct TrainConfig {
    double lambda1 = 0.001;  // w_uv regularization
    double lambda2 = 0.001;  // b_u, b_i
    double lambda3 = 0.001;  // w_u, w_i
    double gamma1 = 0.001;   // bias / feature-weight step
    double gamma2 = 0.001;   // interaction-weight step
    double decay = 0.9;      // per-epoch step multiplier
    int epochs = 100;
    double early_stop_tol = 1e-5;  // training-RMSE improvement threshold
    std::uint64_t shuffle_seed = 0;
};

/// Learned neighborhood model: two-tier prediction, a baseline component
/// (variant-dependent) plus a normalized sum of weighted neighbor residuals.
class NbModel {
public:
    NbVariant variant = NbVariant::nbmodel1;
    int k = 80;
    double clamp_max = 20.0;
    MatrixStats stats;  // frozen from the training matrix

    std::vector<double> b_u, b_i;  // variants 1, 3
    std::vector<double> w_u, w_i;  // variants 2, 3
    // interaction weights, per user aligned with `neighbors`: w_uv[u][j] is the
    // weight toward neighbors[u][j]
    std::vector<std::vector<int>> neighbors;   // N^k_u, in top-k order
    std::vector<std::vector<double>> w_uv;

    // zero-initialized parameters over the index's top-k lists
    static NbModel init(NbVariant variant, const MatrixStats& stats, const SimilarityIndex& index,
                        double clamp_max = 20.0);

    bool uses_biases() const { return variant != NbVariant::nbmodel2; }
    bool uses_feature_weights() const { return variant != NbVariant::nbmodel1; }

    // variant baseline b_ui; cold means fall back to the global mean
    double baseline(int u, int i) const;
    // frozen residual baseline: max(0, mu_v + mu_i - mu) with cold fallbacks
    double residual_baseline(int v, int i) const;

    double predict_raw(int u, int i, const QosMatrix& train) const;
    double predict(int u, int i, const QosMatrix& train) const;  // clamped to [0, clamp_max]

    bool all_finite() const;
};

NbModel nb_train(const QosMatrix& train, NbVariant variant, const TrainConfig& cfg,
                 const SimilarityIndex& index, double clamp_max = 20.0);

// Regularized least-squares objective; regularization terms are accumulated
// per observed entry, matching the per-case SGD updates.
double nb_objective(const NbModel& model, const QosMatrix& train, const TrainConfig& cfg);

// One full accumulation of SGD update directions at frozen parameters, with
// unit step sizes. Test hook for gradient verification.
struct NbGradAccum {
    std::vector<double> b_u, b_i, w_u, w_i;
    std::vector<std::vector<double>> w_uv;
};
NbGradAccum nb_accumulate_updates(const NbModel& model, const QosMatrix& train,
                                  const TrainConfig& cfg);

}  // namespace qosrec
