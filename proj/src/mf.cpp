#include "qosrec/mf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qosrec/errors.hpp"
#include "qosrec/kernels.hpp"

namespace qosrec {

MfKind parse_mf_kind(const std::string& name) {
    if (name == "pmf") return MfKind::pmf;
    if (name == "biasedmf") return MfKind::biasedmf;
    throw std::invalid_argument("unknown MF kind: " + name);
}

std::string mf_kind_name(MfKind k) { return k == MfKind::pmf ? "pmf" : "biasedmf"; }

double MfModel::predict_raw(int u, int i) const {
    double pred = kern::dot(user_factors(u), service_factors(i));
    if (kind == MfKind::biasedmf) pred += mu + b_u[u] + b_i[i];
    return pred;
}

double MfModel::predict(int u, int i) const {
    if (user_count[u] == 0 || service_count[i] == 0) return std::clamp(mu, 0.0, clamp_max);
    return std::clamp(predict_raw(u, i), 0.0, clamp_max);
}

bool MfModel::all_finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    return ok(b_u) && ok(b_i) && ok(p) && ok(q);
}

MfModel mf_train(const QosMatrix& train, MfKind kind, const MfConfig& cfg, double clamp_max) {
    if (train.num_observed() == 0) throw EmptyDataError("mf_train: empty training matrix");
    if (cfg.f <= 0) throw std::invalid_argument("mf_train: latent dimension must be positive");
    MatrixStats stats = compute_stats(train);

    MfModel m;
    m.kind = kind;
    m.f = cfg.f;
    m.clamp_max = clamp_max;
    m.mu = stats.global_mean;
    m.user_count = stats.user_count;
    m.service_count = stats.service_count;
    const int nu = train.num_users(), ni = train.num_services();
    m.b_u.assign(nu, 0.0);
    m.b_i.assign(ni, 0.0);
    m.p.resize(static_cast<std::size_t>(nu) * cfg.f);
    m.q.resize(static_cast<std::size_t>(ni) * cfg.f);
    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> init(-cfg.init_scale, cfg.init_scale);
    for (double& x : m.p) x = init(gen);
    for (double& x : m.q) x = init(gen);

    const std::size_t n = train.num_observed();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    double g = cfg.gamma;
    double prev_rmse = std::numeric_limits<double>::infinity();
    std::vector<double> p_old(cfg.f);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            std::size_t r = j + static_cast<std::size_t>(gen() % (n - j));
            std::swap(order[j], order[r]);
        }

        double sq_err = 0.0;
        for (std::size_t e : order) {
            const int u = static_cast<int>(train.entry_user(e));
            const int i = static_cast<int>(train.entry_service(e));
            const double err = train.entry_value(e) - m.predict_raw(u, i);
            sq_err += err * err;

            double* pu = m.p.data() + static_cast<std::size_t>(u) * cfg.f;
            double* qi = m.q.data() + static_cast<std::size_t>(i) * cfg.f;
            std::copy(pu, pu + cfg.f, p_old.begin());
            for (int t = 0; t < cfg.f; ++t) {
                pu[t] += g * (err * qi[t] - cfg.lambda_u * pu[t]);
                qi[t] += g * (err * p_old[t] - cfg.lambda_v * qi[t]);
            }
            if (kind == MfKind::biasedmf) {
                m.b_u[u] += g * (err - cfg.lambda_u * m.b_u[u]);
                m.b_i[i] += g * (err - cfg.lambda_v * m.b_i[i]);
            }
        }

        double rmse = std::sqrt(sq_err / static_cast<double>(n));
        if (!std::isfinite(rmse) || !m.all_finite())
            throw TrainingDivergedError("mf training diverged", epoch);
        if (prev_rmse - rmse < cfg.early_stop_tol) break;
        prev_rmse = rmse;
        g *= cfg.decay;
    }
    return m;
}

double mf_objective(const MfModel& model, const QosMatrix& train, const MfConfig& cfg) {
    double obj = 0.0;
    for (std::size_t e = 0; e < train.num_observed(); ++e) {
        const int u = static_cast<int>(train.entry_user(e));
        const int i = static_cast<int>(train.entry_service(e));
        const double err = train.entry_value(e) - model.predict_raw(u, i);
        obj += err * err;
        auto pu = model.user_factors(u);
        auto qi = model.service_factors(i);
        obj += cfg.lambda_u * kern::dot(pu, pu) + cfg.lambda_v * kern::dot(qi, qi);
        if (model.kind == MfKind::biasedmf)
            obj += cfg.lambda_u * model.b_u[u] * model.b_u[u] +
                   cfg.lambda_v * model.b_i[i] * model.b_i[i];
    }
    return obj;
}

MfGradAccum mf_accumulate_updates(const MfModel& model, const QosMatrix& train,
                                  const MfConfig& cfg) {
    MfGradAccum acc;
    acc.b_u.assign(model.b_u.size(), 0.0);
    acc.b_i.assign(model.b_i.size(), 0.0);
    acc.p.assign(model.p.size(), 0.0);
    acc.q.assign(model.q.size(), 0.0);
    for (std::size_t e = 0; e < train.num_observed(); ++e) {
        const int u = static_cast<int>(train.entry_user(e));
        const int i = static_cast<int>(train.entry_service(e));
        const double err = train.entry_value(e) - model.predict_raw(u, i);
        const double* pu = model.p.data() + static_cast<std::size_t>(u) * model.f;
        const double* qi = model.q.data() + static_cast<std::size_t>(i) * model.f;
        for (int t = 0; t < model.f; ++t) {
            acc.p[static_cast<std::size_t>(u) * model.f + t] += err * qi[t] - cfg.lambda_u * pu[t];
            acc.q[static_cast<std::size_t>(i) * model.f + t] += err * pu[t] - cfg.lambda_v * qi[t];
        }
        if (model.kind == MfKind::biasedmf) {
            acc.b_u[u] += err - cfg.lambda_u * model.b_u[u];
            acc.b_i[i] += err - cfg.lambda_v * model.b_i[i];
        }
    }
    return acc;
}

}  // namespace qosrec
