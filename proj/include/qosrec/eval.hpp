#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qosrec/dataset.hpp"
#include "qosrec/heuristics.hpp"
#include "qosrec/mf.hpp"
#include "qosrec/nbmodel.hpp"

namespace qosrec {

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

using Predictor = std::function<double(int u, int i)>;

// MAE/RMSE over every observed entry of `test`. Throws on empty test or a
// non-finite prediction.
Metrics evaluate(const Predictor& predict, const QosMatrix& test);

struct EvalRow {
    std::string model;
    double density = 0.0;
    std::uint64_t seed = 0;
    bool is_mean = false;  // seed-averaged summary row
    int k = 0;
    double mae = 0.0;
    double rmse = 0.0;
    double train_seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    bool all_ok() const;
    void write_csv(std::ostream& out, bool zero_timing = false) const;
};

struct GridOptions {
    int user_k = 10;     // heuristic CF neighborhoods
    int service_k = 50;
    int nb_k = 80;       // learned neighborhood models
    double blend = 0.5;  // uipcc
    TrainConfig nb_cfg;
    MfConfig mf_cfg;
    double clamp_max = 20.0;
    int jobs = 1;
    int index_threads = 1;
};

// Known model selector names for run_grid.
const std::vector<std::string>& known_models();

// One row per (model, density, seed): split, fit on train only, score on the
// held-out complement. Failures are recorded per row; remaining rows still run.
EvalReport run_grid(const QosMatrix& source, const std::vector<std::string>& models,
                    const std::vector<double>& densities, const std::vector<std::uint64_t>& seeds,
                    const GridOptions& opts = {});

// One row per (density, k) for a single learned neighborhood variant.
EvalReport topk_sweep(const QosMatrix& source, NbVariant variant,
                      const std::vector<double>& densities, const std::vector<int>& k_values,
                      std::uint64_t seed, const GridOptions& opts = {});

}  // namespace qosrec
