#pragma once

#include <memory>
#include <string>

#include "qosrec/dataset.hpp"
#include "qosrec/similarity.hpp"

namespace qosrec {

enum class HeuristicKind { gmean, umean, imean, upcc, ipcc, uipcc };

HeuristicKind parse_heuristic_kind(const std::string& name);

/// Statistical (GMEAN/UMEAN/IMEAN) and heuristic CF (UPCC/IPCC/UIPCC) predictors.
/// Predictions are total: cold users/services fall back along
/// personalized -> axis mean -> global mean.
class HeuristicModel {
public:
    struct Options {
        int user_k = 10;
        int service_k = 50;
        double blend = 0.5;  // uipcc only
        int threads = 1;     // index construction
    };

    // The model keeps a reference to `train`; it must outlive the model.
    HeuristicModel(HeuristicKind kind, const QosMatrix& train, Options opts);
    HeuristicModel(HeuristicKind kind, const QosMatrix& train)
        : HeuristicModel(kind, train, Options{}) {}

    double predict(int u, int i) const;
    HeuristicKind kind() const { return kind_; }
    const MatrixStats& stats() const { return stats_; }

private:
    double predict_upcc(int u, int i, double* confidence) const;
    double predict_ipcc(int u, int i, double* confidence) const;

    HeuristicKind kind_;
    const QosMatrix* train_;
    MatrixStats stats_;
    std::shared_ptr<const SimilarityIndex> user_index_;
    std::shared_ptr<const SimilarityIndex> service_index_;
    double blend_;
};

}  // namespace qosrec
