#include "qosrec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "qosrec/errors.hpp"
#include "qosrec/kernels.hpp"

namespace qosrec {

Metrics evaluate(const Predictor& predict, const QosMatrix& test) {
    const std::size_t n = test.num_observed();
    if (n == 0) throw EmptyDataError("evaluate: empty test set");
    std::vector<double> truth(n), pred(n);
    for (std::size_t e = 0; e < n; ++e) {
        truth[e] = test.entry_value(e);
        pred[e] = predict(static_cast<int>(test.entry_user(e)),
                          static_cast<int>(test.entry_service(e)));
        if (!std::isfinite(pred[e]))
            throw std::runtime_error("evaluate: non-finite prediction");
    }
    Metrics m;
    m.n = n;
    m.mae = kern::sum_abs_diff(truth, pred) / static_cast<double>(n);
    m.rmse = std::sqrt(kern::sum_sq_diff(truth, pred) / static_cast<double>(n));
    return m;
}

bool EvalReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const EvalRow& r) { return !r.failed; });
}

void EvalReport::write_csv(std::ostream& out, bool zero_timing) const {
    out << "model,density,seed,k,mae,rmse,train_seconds\n";
    char buf[256];
    for (const EvalRow& r : rows) {
        std::string seed_field = r.is_mean ? "mean" : std::to_string(r.seed);
        if (r.failed) {
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%s,%d,nan,nan,%.6f\n", r.model.c_str(),
                          r.density, seed_field.c_str(), r.k, 0.0);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%s,%d,%.6f,%.6f,%.6f\n", r.model.c_str(),
                          r.density, seed_field.c_str(), r.k, r.mae, r.rmse,
                          zero_timing ? 0.0 : r.train_seconds);
        }
        out << buf;
    }
}

const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names = {"gmean", "umean",    "imean",    "upcc",
                                                   "ipcc",  "uipcc",    "pmf",      "biasedmf",
                                                   "nbmodel1", "nbmodel2", "nbmodel3"};
    return names;
}

namespace {

bool is_known_model(const std::string& name) {
    const auto& ks = known_models();
    return std::find(ks.begin(), ks.end(), name) != ks.end();
}

int model_k(const std::string& name, const GridOptions& opts) {
    if (name.rfind("nbmodel", 0) == 0) return opts.nb_k;
    if (name == "upcc" || name == "uipcc") return opts.user_k;
    if (name == "ipcc") return opts.service_k;
    return 0;
}

// Fits the named model on `train` and returns a predictor closed over it.
// The returned closure keeps its model state alive via shared_ptrs.
Predictor fit_model(const std::string& name, const QosMatrix& train, const GridOptions& opts,
                    std::uint64_t seed) {
    if (name == "pmf" || name == "biasedmf") {
        MfConfig cfg = opts.mf_cfg;
        cfg.seed = seed;
        auto model = std::make_shared<MfModel>(
            mf_train(train, parse_mf_kind(name), cfg, opts.clamp_max));
        return [model](int u, int i) { return model->predict(u, i); };
    }
    if (name.rfind("nbmodel", 0) == 0) {
        SimilarityIndex::Options iopts;
        iopts.threads = opts.index_threads;
        auto index = SimilarityIndex::build(train, Axis::user, opts.nb_k, iopts);
        TrainConfig cfg = opts.nb_cfg;
        cfg.shuffle_seed = seed;
        auto model = std::make_shared<NbModel>(
            nb_train(train, parse_nb_variant(name), cfg, index, opts.clamp_max));
        auto train_ptr = std::make_shared<QosMatrix>(train);
        return [model, train_ptr](int u, int i) { return model->predict(u, i, *train_ptr); };
    }
    HeuristicModel::Options hopts;
    hopts.user_k = opts.user_k;
    hopts.service_k = opts.service_k;
    hopts.blend = opts.blend;
    hopts.threads = opts.index_threads;
    auto train_ptr = std::make_shared<QosMatrix>(train);
    auto model =
        std::make_shared<HeuristicModel>(parse_heuristic_kind(name), *train_ptr, hopts);
    return [model, train_ptr](int u, int i) { return model->predict(u, i); };
}

void run_rows(const QosMatrix& source, EvalReport& report, const GridOptions& opts,
              const std::function<void(const QosMatrix&, const QosMatrix&, EvalRow&)>& fit_eval) {
    auto run_one = [&](EvalRow& row) {
        try {
            TrainTestSplit s = split(source, row.density, row.seed);
            auto t0 = std::chrono::steady_clock::now();
            fit_eval(s.train, s.test, row);
            row.train_seconds = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
        } catch (const std::exception& ex) {
            row.failed = true;
            row.error = ex.what();
        }
    };
    int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || report.rows.size() < 2) {
        for (EvalRow& row : report.rows)
            if (!row.failed) run_one(row);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= report.rows.size()) return;
                if (!report.rows[idx].failed) run_one(report.rows[idx]);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
}

// Appends a seed-averaged row per (model, density, k) group when the group has
// more than one successful seed row.
void append_mean_rows(EvalReport& report) {
    std::vector<EvalRow> means;
    for (std::size_t a = 0; a < report.rows.size(); ++a) {
        const EvalRow& r = report.rows[a];
        if (r.failed || r.is_mean) continue;
        bool first = true;
        for (std::size_t b = 0; b < a; ++b) {
            const EvalRow& p = report.rows[b];
            if (!p.failed && p.model == r.model && p.density == r.density && p.k == r.k) {
                first = false;
                break;
            }
        }
        if (!first) continue;
        EvalRow mean = r;
        mean.is_mean = true;
        int count = 0;
        mean.mae = mean.rmse = mean.train_seconds = 0.0;
        for (const EvalRow& q : report.rows) {
            if (q.failed || q.is_mean) continue;
            if (q.model == r.model && q.density == r.density && q.k == r.k) {
                mean.mae += q.mae;
                mean.rmse += q.rmse;
                mean.train_seconds += q.train_seconds;
                ++count;
            }
        }
        if (count < 2) continue;
        mean.mae /= count;
        mean.rmse /= count;
        mean.train_seconds /= count;
        means.push_back(mean);
    }
    report.rows.insert(report.rows.end(), means.begin(), means.end());
}

}  // namespace

EvalReport run_grid(const QosMatrix& source, const std::vector<std::string>& models,
                    const std::vector<double>& densities, const std::vector<std::uint64_t>& seeds,
                    const GridOptions& opts) {
    EvalReport report;
    for (const std::string& name : models)
        for (double d : densities)
            for (std::uint64_t seed : seeds) {
                EvalRow row;
                row.model = name;
                row.density = d;
                row.seed = seed;
                row.k = model_k(name, opts);
                if (name == "nmf") {
                    row.failed = true;  // multiplicative-update NMF is not reproduced here
                    row.error = "nmf baseline not reproduced";
                } else if (!is_known_model(name)) {
                    row.failed = true;
                    row.error = "unknown model: " + name;
                }
                report.rows.push_back(std::move(row));
            }

    run_rows(source, report, opts,
             [&](const QosMatrix& train, const QosMatrix& test, EvalRow& row) {
                 Predictor p = fit_model(row.model, train, opts, row.seed);
                 Metrics m = evaluate(p, test);
                 row.mae = m.mae;
                 row.rmse = m.rmse;
             });
    if (seeds.size() > 1) append_mean_rows(report);
    return report;
}

EvalReport topk_sweep(const QosMatrix& source, NbVariant variant,
                      const std::vector<double>& densities, const std::vector<int>& k_values,
                      std::uint64_t seed, const GridOptions& opts) {
    if (k_values.empty()) throw std::invalid_argument("topk_sweep: no k values");
    EvalReport report;
    for (double d : densities)
        for (int k : k_values) {
            EvalRow row;
            row.model = nb_variant_name(variant);
            row.density = d;
            row.seed = seed;
            row.k = k;
            report.rows.push_back(std::move(row));
        }

    run_rows(source, report, opts,
             [&](const QosMatrix& train, const QosMatrix& test, EvalRow& row) {
                 GridOptions o = opts;
                 o.nb_k = row.k;
                 Predictor p = fit_model(row.model, train, o, row.seed);
                 Metrics m = evaluate(p, test);
                 row.mae = m.mae;
                 row.rmse = m.rmse;
             });
    return report;
}

}  // namespace qosrec
