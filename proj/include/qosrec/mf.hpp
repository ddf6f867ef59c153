#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qosrec/dataset.hpp"

namespace qosrec {

enum class MfKind { pmf, biasedmf };

MfKind parse_mf_kind(const std::string& name);
std::string mf_kind_name(MfKind k);

struct MfConfig {
    int f = 10;  // latent dimension
    double lambda_u = 0.001;
    double lambda_v = 0.001;
    double gamma = 0.001;
    double decay = 0.9;
    int epochs = 100;
    double early_stop_tol = 1e-5;
    double init_scale = 0.01;  // factors start uniform in [-init_scale, init_scale]
    std::uint64_t seed = 0;
};

/// Latent-factor baselines: plain inner-product PMF and BiasedMF
/// (global mean + user/service offsets + inner product).
class MfModel {
public:
    MfKind kind = MfKind::pmf;
    int f = 10;
    double clamp_max = 20.0;
    double mu = 0.0;
    std::vector<int> user_count, service_count;  // for cold-id fallback
    std::vector<double> b_u, b_i;                // biasedmf only
    std::vector<double> p, q;                    // row-major [id * f]

    std::span<const double> user_factors(int u) const { return {p.data() + static_cast<std::size_t>(u) * f, static_cast<std::size_t>(f)}; }
    std::span<const double> service_factors(int i) const { return {q.data() + static_cast<std::size_t>(i) * f, static_cast<std::size_t>(f)}; }

    double predict_raw(int u, int i) const;
    double predict(int u, int i) const;  // clamped, cold ids fall back to mu

    bool all_finite() const;
};

MfModel mf_train(const QosMatrix& train, MfKind kind, const MfConfig& cfg, double clamp_max = 20.0);

// Per-case-regularized squared-error objective, matching the SGD updates.
double mf_objective(const MfModel& model, const QosMatrix& train, const MfConfig& cfg);

// Accumulated unit-step SGD update directions at frozen parameters (test hook).
struct MfGradAccum {
    std::vector<double> b_u, b_i, p, q;
};
MfGradAccum mf_accumulate_updates(const MfModel& model, const QosMatrix& train, const MfConfig& cfg);

}  // namespace qosrec
