#include "qosrec/heuristics.hpp"

#include <cmath>
#include <stdexcept>

namespace qosrec {

HeuristicKind parse_heuristic_kind(const std::string& name) {
    if (name == "gmean") return HeuristicKind::gmean;
    if (name == "umean") return HeuristicKind::umean;
    if (name == "imean") return HeuristicKind::imean;
    if (name == "upcc") return HeuristicKind::upcc;
    if (name == "ipcc") return HeuristicKind::ipcc;
    if (name == "uipcc") return HeuristicKind::uipcc;
    throw std::invalid_argument("unknown heuristic kind: " + name);
}

HeuristicModel::HeuristicModel(HeuristicKind kind, const QosMatrix& train, Options opts)
    : kind_(kind), train_(&train), stats_(compute_stats(train)), blend_(opts.blend) {
    SimilarityIndex::Options iopts;
    iopts.threads = opts.threads;
    const bool need_user = kind == HeuristicKind::upcc || kind == HeuristicKind::uipcc;
    const bool need_service = kind == HeuristicKind::ipcc || kind == HeuristicKind::uipcc;
    if (need_user)
        user_index_ = std::make_shared<SimilarityIndex>(
            SimilarityIndex::build(train, Axis::user, opts.user_k, iopts));
    if (need_service)
        service_index_ = std::make_shared<SimilarityIndex>(
            SimilarityIndex::build(train, Axis::service, opts.service_k, iopts));
}

double HeuristicModel::predict_upcc(int u, int i, double* confidence) const {
    if (confidence) *confidence = 0.0;
    if (!stats_.has_user(u)) return stats_.global_mean;
    const double mu_u = stats_.user_mean[u];
    double num = 0.0, den = 0.0, con = 0.0;
    for (const Neighbor& nb : user_index_->neighbors(u)) {
        double r_vi = train_->value_or_nan(nb.id, i);
        if (std::isnan(r_vi)) continue;
        num += nb.sim * (r_vi - stats_.user_mean_or(nb.id, stats_.global_mean));
        den += nb.sim;
        con += nb.sim * nb.sim;
    }
    if (den <= 0.0) return mu_u;
    if (confidence) *confidence = con / den;  // similarity-weighted mean similarity
    return mu_u + num / den;
}

double HeuristicModel::predict_ipcc(int u, int i, double* confidence) const {
    if (confidence) *confidence = 0.0;
    if (!stats_.has_service(i)) return stats_.global_mean;
    const double mu_i = stats_.service_mean[i];
    double num = 0.0, den = 0.0, con = 0.0;
    for (const Neighbor& nb : service_index_->neighbors(i)) {
        double r_uj = train_->value_or_nan(u, nb.id);
        if (std::isnan(r_uj)) continue;
        num += nb.sim * (r_uj - stats_.service_mean_or(nb.id, stats_.global_mean));
        den += nb.sim;
        con += nb.sim * nb.sim;
    }
    if (den <= 0.0) return mu_i;
    if (confidence) *confidence = con / den;
    return mu_i + num / den;
}

double HeuristicModel::predict(int u, int i) const {
    switch (kind_) {
        case HeuristicKind::gmean:
            return stats_.global_mean;
        case HeuristicKind::umean:
            return stats_.user_mean_or(u, stats_.global_mean);
        case HeuristicKind::imean:
            return stats_.service_mean_or(i, stats_.global_mean);
        case HeuristicKind::upcc:
            return predict_upcc(u, i, nullptr);
        case HeuristicKind::ipcc:
            return predict_ipcc(u, i, nullptr);
        case HeuristicKind::uipcc: {
            double con_u = 0.0, con_i = 0.0;
            double pu = predict_upcc(u, i, &con_u);
            double pi = predict_ipcc(u, i, &con_i);
            double wu;
            double a = blend_ * con_u, b = (1.0 - blend_) * con_i;
            if (a + b > 0.0)
                wu = a / (a + b);
            else
                wu = blend_;  // neither side found neighbors
            return wu * pu + (1.0 - wu) * pi;
        }
    }
    return stats_.global_mean;
}

}  // namespace qosrec
