#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qosrec/errors.hpp"
#include "qosrec/mf.hpp"
#include "qosrec/model_io.hpp"

using namespace qosrec;

namespace {

const double kFd = 1e-6;

double fd_grad(MfModel& model, const QosMatrix& train, const MfConfig& cfg, double& param) {
    const double orig = param;
    param = orig + kFd;
    double hi = mf_objective(model, train, cfg);
    param = orig - kFd;
    double lo = mf_objective(model, train, cfg);
    param = orig;
    return (hi - lo) / (2.0 * kFd);
}

}  // namespace

TEST_CASE("inner-product prediction") {
    MfModel m;
    m.kind = MfKind::pmf;
    m.f = 1;
    m.mu = 3.0;
    m.user_count = {1};
    m.service_count = {1};
    m.b_u = {0.0};
    m.b_i = {0.0};
    m.p = {2.0};
    m.q = {3.0};
    CHECK(m.predict_raw(0, 0) == doctest::Approx(6.0));
    CHECK(m.predict(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("zero factors fall back") {
    SUBCASE("pmf with zero factors predicts 0 raw, clamped at 0") {
        MfModel m;
        m.kind = MfKind::pmf;
        m.f = 2;
        m.mu = 5.0;
        m.user_count = {3};
        m.service_count = {2};
        m.p = {0.0, 0.0};
        m.q = {0.0, 0.0};
        m.b_u = {0.0};
        m.b_i = {0.0};
        CHECK(m.predict_raw(0, 0) == 0.0);
    }
    SUBCASE("cold ids use the train global mean") {
        QosMatrix train(3, 3, {{0, 0, 2.0}, {0, 1, 4.0}, {1, 0, 6.0}});
        MfConfig cfg;
        cfg.epochs = 5;
        MfModel m = mf_train(train, MfKind::pmf, cfg);
        CHECK(m.predict(2, 0) == doctest::Approx(m.mu));  // user 2 unseen
        CHECK(m.predict(0, 2) == doctest::Approx(m.mu));  // service 2 unseen
    }
    SUBCASE("biasedmf with zero factors reproduces the additive baseline exactly") {
        MfModel m;
        m.kind = MfKind::biasedmf;
        m.f = 2;
        m.mu = 2.0;
        m.user_count = {1};
        m.service_count = {1};
        m.b_u = {1.0};
        m.b_i = {-0.5};
        m.p = {0.0, 0.0};
        m.q = {0.0, 0.0};
        CHECK(m.predict_raw(0, 0) == 2.5);  // mu + b_u + b_i
    }
}

TEST_CASE("0 epochs leaves predictions near mu for biasedmf") {
    QosMatrix train = testutil::random_matrix(8, 10, 0.5, 3);
    MfConfig cfg;
    cfg.epochs = 0;
    MfModel m = mf_train(train, MfKind::biasedmf, cfg);
    double bound = cfg.f * cfg.init_scale * cfg.init_scale;
    for (int u = 0; u < 8; ++u)
        for (int i = 0; i < 10; ++i)
            if (m.user_count[u] > 0 && m.service_count[i] > 0)
                CHECK(std::abs(m.predict_raw(u, i) - m.mu) <= bound);
}

TEST_CASE("rank-1 synthetic recovery") {
    // r_ui = a_u * c_i, recoverable with f=1
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> d(0.5, 2.0);
    std::vector<double> a(15), c(20);
    for (double& x : a) x = d(gen);
    for (double& x : c) x = d(gen);
    std::vector<Entry> entries;
    for (int u = 0; u < 15; ++u)
        for (int i = 0; i < 20; ++i)
            if (gen() % 10 < 7) entries.push_back({u, i, a[u] * c[i]});
    QosMatrix train(15, 20, std::move(entries));

    MfConfig cfg;
    cfg.f = 1;
    cfg.gamma = 0.02;
    cfg.decay = 0.999;
    cfg.epochs = 500;
    cfg.early_stop_tol = 1e-9;
    MfModel m = mf_train(train, MfKind::pmf, cfg);

    double sq = 0.0;
    for (std::size_t e = 0; e < train.num_observed(); ++e) {
        double err = train.entry_value(e) -
                     m.predict_raw(static_cast<int>(train.entry_user(e)),
                                   static_cast<int>(train.entry_service(e)));
        sq += err * err;
    }
    double rmse = std::sqrt(sq / static_cast<double>(train.num_observed()));
    CHECK(rmse < 0.05);
}

TEST_CASE("accumulated SGD directions match finite differences of the objective") {
    QosMatrix train(3, 3,
                    {{0, 0, 2.0}, {0, 1, 4.0}, {1, 1, 3.0}, {1, 2, 1.0}, {2, 0, 5.0}, {2, 2, 2.5}});
    MfConfig cfg;
    cfg.f = 2;
    for (MfKind kind : {MfKind::pmf, MfKind::biasedmf}) {
        CAPTURE(mf_kind_name(kind));
        MfConfig init = cfg;
        init.epochs = 0;
        init.seed = 77;
        init.init_scale = 0.3;
        MfModel model = mf_train(train, kind, init, 20.0);
        if (kind == MfKind::biasedmf) {
            model.b_u = {0.2, -0.1, 0.4};
            model.b_i = {-0.3, 0.1, 0.2};
        }
        MfGradAccum acc = mf_accumulate_updates(model, train, cfg);

        auto check_param = [&](double update, double& param) {
            double fd = fd_grad(model, train, cfg, param);
            if (std::abs(fd) < 1e-8 && std::abs(update) < 1e-8) return;
            CHECK(update == doctest::Approx(-0.5 * fd).epsilon(1e-4));
        };
        for (std::size_t t = 0; t < model.p.size(); ++t) check_param(acc.p[t], model.p[t]);
        for (std::size_t t = 0; t < model.q.size(); ++t) check_param(acc.q[t], model.q[t]);
        if (kind == MfKind::biasedmf) {
            for (int u = 0; u < 3; ++u) check_param(acc.b_u[u], model.b_u[u]);
            for (int i = 0; i < 3; ++i) check_param(acc.b_i[i], model.b_i[i]);
        }
    }
}

TEST_CASE("objective is non-increasing across early epochs") {
    QosMatrix train = testutil::random_matrix(10, 10, 0.5, 9);
    MfConfig cfg;
    cfg.decay = 1.0;
    cfg.early_stop_tol = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int epochs = 1; epochs <= 5; ++epochs) {
        MfConfig c = cfg;
        c.epochs = epochs;
        MfModel m = mf_train(train, MfKind::biasedmf, c);
        double obj = mf_objective(m, train, cfg);
        CHECK(obj <= prev + 1e-9);
        prev = obj;
    }
}

TEST_CASE("training is deterministic given the seed") {
    QosMatrix train = testutil::random_matrix(8, 8, 0.5, 21);
    MfConfig cfg;
    cfg.seed = 4;
    cfg.epochs = 10;
    MfModel a = mf_train(train, MfKind::biasedmf, cfg);
    MfModel b = mf_train(train, MfKind::biasedmf, cfg);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.b_u == b.b_u);
}

TEST_CASE("divergence raises a training-diverged error") {
    QosMatrix train = testutil::random_matrix(8, 8, 0.6, 25);
    MfConfig cfg;
    cfg.gamma = 1e8;
    cfg.decay = 1.0;
    cfg.early_stop_tol = 0.0;
    CHECK_THROWS_AS(mf_train(train, MfKind::pmf, cfg), TrainingDivergedError);
}

TEST_CASE("save/load round-trips predictions bit-exactly") {
    QosMatrix train = testutil::random_matrix(6, 7, 0.6, 31);
    MfConfig cfg;
    cfg.epochs = 20;
    for (MfKind kind : {MfKind::pmf, MfKind::biasedmf}) {
        MfModel model = mf_train(train, kind, cfg);
        testutil::TmpFile f("mf_" + mf_kind_name(kind) + ".txt");
        save_model(model, f.path);
        AnyModel loaded = load_model(f.path);
        REQUIRE(std::holds_alternative<MfModel>(loaded));
        const MfModel& got = std::get<MfModel>(loaded);
        for (int u = 0; u < 6; ++u)
            for (int i = 0; i < 7; ++i) CHECK(got.predict(u, i) == model.predict(u, i));
    }
}
