#include "qosrec/nbmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qosrec/errors.hpp"

namespace qosrec {

NbVariant parse_nb_variant(const std::string& name) {
    if (name == "nbmodel1") return NbVariant::nbmodel1;
    if (name == "nbmodel2") return NbVariant::nbmodel2;
    if (name == "nbmodel3") return NbVariant::nbmodel3;
    throw std::invalid_argument("unknown neighborhood variant: " + name);
}

std::string nb_variant_name(NbVariant v) {
    switch (v) {
        case NbVariant::nbmodel1: return "nbmodel1";
        case NbVariant::nbmodel2: return "nbmodel2";
        case NbVariant::nbmodel3: return "nbmodel3";
    }
    return "?";
}

NbModel NbModel::init(NbVariant variant, const MatrixStats& stats, const SimilarityIndex& index,
                      double clamp_max) {
    if (index.axis() != Axis::user)
        throw std::invalid_argument("NbModel: similarity index must be user-axis");
    NbModel m;
    m.variant = variant;
    m.k = index.k();
    m.clamp_max = clamp_max;
    m.stats = stats;
    const int nu = static_cast<int>(stats.user_count.size());
    const int ni = static_cast<int>(stats.service_count.size());
    m.b_u.assign(nu, 0.0);
    m.b_i.assign(ni, 0.0);
    m.w_u.assign(nu, 0.0);
    m.w_i.assign(ni, 0.0);
    m.neighbors.resize(nu);
    m.w_uv.resize(nu);
    for (int u = 0; u < nu; ++u) {
        auto nbs = index.neighbors(u);
        m.neighbors[u].reserve(nbs.size());
        for (const Neighbor& nb : nbs) m.neighbors[u].push_back(nb.id);
        m.w_uv[u].assign(nbs.size(), 0.0);
    }
    return m;
}

double NbModel::baseline(int u, int i) const {
    const double mu = stats.global_mean;
    double b = 0.0;
    if (uses_biases()) b += mu + b_u[u] + b_i[i];
    if (uses_feature_weights())
        b += w_u[u] * stats.user_mean_or(u, mu) + w_i[i] * stats.service_mean_or(i, mu);
    return b;
}

double NbModel::residual_baseline(int v, int i) const {
    const double mu = stats.global_mean;
    double b = stats.user_mean_or(v, mu) + stats.service_mean_or(i, mu) - mu;
    return std::max(0.0, b);
}

double NbModel::predict_raw(int u, int i, const QosMatrix& train) const {
    double acc = 0.0;
    int count = 0;
    const auto& nbs = neighbors[u];
    const auto& w = w_uv[u];
    for (std::size_t j = 0; j < nbs.size(); ++j) {
        double r_vi = train.value_or_nan(nbs[j], i);
        if (std::isnan(r_vi)) continue;
        acc += (r_vi - residual_baseline(nbs[j], i)) * w[j];
        ++count;
    }
    double pred = baseline(u, i);
    if (count > 0) pred += acc / std::sqrt(static_cast<double>(count));
    return pred;
}

double NbModel::predict(int u, int i, const QosMatrix& train) const {
    return std::clamp(predict_raw(u, i, train), 0.0, clamp_max);
}

bool NbModel::all_finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!(ok(b_u) && ok(b_i) && ok(w_u) && ok(w_i))) return false;
    for (const auto& row : w_uv)
        if (!ok(row)) return false;
    return true;
}

namespace {

// Per-entry neighborhood cache: qualifying neighbor slots and frozen residuals.
struct CaseCache {
    std::vector<std::size_t> off;     // |E|+1
    std::vector<int> slot;            // slot into w_uv[u]
    std::vector<double> resid;        // r_vi - b~_vi
    std::vector<double> norm;         // |N^k_(i;u)|^(-1/2), 0 if empty
};

CaseCache build_cache(const NbModel& model, const QosMatrix& train) {
    CaseCache c;
    const std::size_t n = train.num_observed();
    c.off.assign(n + 1, 0);
    c.norm.assign(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        int u = static_cast<int>(train.entry_user(e));
        int i = static_cast<int>(train.entry_service(e));
        const auto& nbs = model.neighbors[u];
        std::size_t before = c.slot.size();
        for (std::size_t j = 0; j < nbs.size(); ++j) {
            double r_vi = train.value_or_nan(nbs[j], i);
            if (std::isnan(r_vi)) continue;
            c.slot.push_back(static_cast<int>(j));
            c.resid.push_back(r_vi - model.residual_baseline(nbs[j], i));
        }
        std::size_t cnt = c.slot.size() - before;
        c.off[e + 1] = c.slot.size();
        if (cnt > 0) c.norm[e] = 1.0 / std::sqrt(static_cast<double>(cnt));
    }
    return c;
}

}  // namespace

NbModel nb_train(const QosMatrix& train, NbVariant variant, const TrainConfig& cfg,
                 const SimilarityIndex& index, double clamp_max) {
    if (train.num_observed() == 0) throw EmptyDataError("nb_train: empty training matrix");
    if (cfg.epochs < 0) throw std::invalid_argument("nb_train: negative epoch count");
    MatrixStats stats = compute_stats(train);
    NbModel model = NbModel::init(variant, stats, index, clamp_max);
    if (cfg.epochs == 0) return model;

    const CaseCache cache = build_cache(model, train);
    const std::size_t n = train.num_observed();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 gen(cfg.shuffle_seed);

    const double mu = stats.global_mean;
    double g1 = cfg.gamma1, g2 = cfg.gamma2;
    double prev_rmse = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates reshuffle each epoch
        for (std::size_t j = 0; j + 1 < n; ++j) {
            std::size_t r = j + static_cast<std::size_t>(gen() % (n - j));
            std::swap(order[j], order[r]);
        }

        double sq_err = 0.0;
        for (std::size_t e : order) {
            const int u = static_cast<int>(train.entry_user(e));
            const int i = static_cast<int>(train.entry_service(e));
            const double r = train.entry_value(e);
            const double norm = cache.norm[e];

            double nb_term = 0.0;
            auto& w = model.w_uv[u];
            for (std::size_t t = cache.off[e]; t < cache.off[e + 1]; ++t)
                nb_term += cache.resid[t] * w[cache.slot[t]];
            const double err = r - (model.baseline(u, i) + norm * nb_term);
            sq_err += err * err;

            if (model.uses_biases()) {
                model.b_u[u] += g1 * (err - cfg.lambda2 * model.b_u[u]);
                model.b_i[i] += g1 * (err - cfg.lambda2 * model.b_i[i]);
            }
            if (model.uses_feature_weights()) {
                model.w_u[u] += g1 * (err * stats.user_mean_or(u, mu) - cfg.lambda3 * model.w_u[u]);
                model.w_i[i] +=
                    g1 * (err * stats.service_mean_or(i, mu) - cfg.lambda3 * model.w_i[i]);
            }
            for (std::size_t t = cache.off[e]; t < cache.off[e + 1]; ++t) {
                double& wv = w[cache.slot[t]];
                wv += g2 * (norm * err * cache.resid[t] - cfg.lambda1 * wv);
            }
        }

        double rmse = std::sqrt(sq_err / static_cast<double>(n));
        if (!std::isfinite(rmse) || !model.all_finite())
            throw TrainingDivergedError("nbmodel training diverged", epoch);
        if (prev_rmse - rmse < cfg.early_stop_tol) break;
        prev_rmse = rmse;
        g1 *= cfg.decay;
        g2 *= cfg.decay;
    }
    return model;
}

double nb_objective(const NbModel& model, const QosMatrix& train, const TrainConfig& cfg) {
    double obj = 0.0;
    for (std::size_t e = 0; e < train.num_observed(); ++e) {
        const int u = static_cast<int>(train.entry_user(e));
        const int i = static_cast<int>(train.entry_service(e));
        const double err = train.entry_value(e) - model.predict_raw(u, i, train);
        obj += err * err;
        // regularizers accumulate once per observed entry
        const auto& nbs = model.neighbors[u];
        for (std::size_t j = 0; j < nbs.size(); ++j)
            if (train.has(nbs[j], i)) obj += cfg.lambda1 * model.w_uv[u][j] * model.w_uv[u][j];
        if (model.uses_biases())
            obj += cfg.lambda2 * (model.b_u[u] * model.b_u[u] + model.b_i[i] * model.b_i[i]);
        if (model.uses_feature_weights())
            obj += cfg.lambda3 * (model.w_u[u] * model.w_u[u] + model.w_i[i] * model.w_i[i]);
    }
    return obj;
}

NbGradAccum nb_accumulate_updates(const NbModel& model, const QosMatrix& train,
                                  const TrainConfig& cfg) {
    NbGradAccum acc;
    acc.b_u.assign(model.b_u.size(), 0.0);
    acc.b_i.assign(model.b_i.size(), 0.0);
    acc.w_u.assign(model.w_u.size(), 0.0);
    acc.w_i.assign(model.w_i.size(), 0.0);
    acc.w_uv.resize(model.w_uv.size());
    for (std::size_t u = 0; u < model.w_uv.size(); ++u) acc.w_uv[u].assign(model.w_uv[u].size(), 0.0);

    const double mu = model.stats.global_mean;
    for (std::size_t e = 0; e < train.num_observed(); ++e) {
        const int u = static_cast<int>(train.entry_user(e));
        const int i = static_cast<int>(train.entry_service(e));
        const double err = train.entry_value(e) - model.predict_raw(u, i, train);
        const auto& nbs = model.neighbors[u];
        int count = 0;
        for (std::size_t j = 0; j < nbs.size(); ++j)
            if (train.has(nbs[j], i)) ++count;
        const double norm = count > 0 ? 1.0 / std::sqrt(static_cast<double>(count)) : 0.0;

        if (model.uses_biases()) {
            acc.b_u[u] += err - cfg.lambda2 * model.b_u[u];
            acc.b_i[i] += err - cfg.lambda2 * model.b_i[i];
        }
        if (model.uses_feature_weights()) {
            acc.w_u[u] += err * model.stats.user_mean_or(u, mu) - cfg.lambda3 * model.w_u[u];
            acc.w_i[i] += err * model.stats.service_mean_or(i, mu) - cfg.lambda3 * model.w_i[i];
        }
        for (std::size_t j = 0; j < nbs.size(); ++j) {
            double r_vi = train.value_or_nan(nbs[j], i);
            if (std::isnan(r_vi)) continue;
            double resid = r_vi - model.residual_baseline(nbs[j], i);
            acc.w_uv[u][j] += norm * err * resid - cfg.lambda1 * model.w_uv[u][j];
        }
    }
    return acc;
}

}  // namespace qosrec
