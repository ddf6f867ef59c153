#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qosrec/eval.hpp"
#include "qosrec/model_io.hpp"

using namespace qosrec;

namespace {

struct CommonHyper {
    GridOptions opts;

    void attach(CLI::App* cmd) {
        cmd->add_option("--k-users", opts.user_k, "Top-k user neighborhood for UPCC/UIPCC")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--k-services", opts.service_k, "Top-k service neighborhood for IPCC/UIPCC")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--k", opts.nb_k, "Top-k neighborhood for learned models")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--blend", opts.blend, "UIPCC user/service blend weight")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--lambda1", opts.nb_cfg.lambda1, "Interaction-weight regularization")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--lambda2", opts.nb_cfg.lambda2, "Bias regularization")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--lambda3", opts.nb_cfg.lambda3, "Feature-weight regularization")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--gamma1", opts.nb_cfg.gamma1, "Bias/feature learning rate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--gamma2", opts.nb_cfg.gamma2, "Interaction learning rate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--decay", opts.nb_cfg.decay, "Per-epoch learning-rate decay")
            ->check(CLI::Range(1e-9, 1.0));
        cmd->add_option("--epochs", opts.nb_cfg.epochs, "SGD epoch cap")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--factors", opts.mf_cfg.f, "Latent dimension for MF baselines")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--mf-gamma", opts.mf_cfg.gamma, "MF learning rate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--clamp-max", opts.clamp_max, "Prediction clamp upper bound (seconds)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--jobs", opts.jobs, "Parallel grid rows")->check(CLI::PositiveNumber);
        cmd->add_option("--index-threads", opts.index_threads, "Similarity index build threads")
            ->check(CLI::PositiveNumber);
    }

    void finalize() {
        // MF shares the epoch/decay schedule flags
        opts.mf_cfg.epochs = opts.nb_cfg.epochs;
        opts.mf_cfg.decay = opts.nb_cfg.decay;
        opts.mf_cfg.lambda_u = opts.mf_cfg.lambda_v = opts.nb_cfg.lambda1;
    }
};

void print_report(const EvalReport& report, bool zero_timing) {
    std::printf("%-10s %8s %6s %5s %10s %10s %10s\n", "model", "density", "seed", "k", "mae",
                "rmse", "sec");
    for (const EvalRow& r : report.rows) {
        std::string seed = r.is_mean ? "mean" : std::to_string(r.seed);
        if (r.failed)
            std::printf("%-10s %8.4f %6s %5d FAILED: %s\n", r.model.c_str(), r.density,
                        seed.c_str(), r.k, r.error.c_str());
        else
            std::printf("%-10s %8.4f %6s %5d %10.4f %10.4f %10.3f\n", r.model.c_str(), r.density,
                        seed.c_str(), r.k, r.mae, r.rmse, zero_timing ? 0.0 : r.train_seconds);
    }
}

int write_report(const EvalReport& report, const std::string& path, bool zero_timing) {
    print_report(report, zero_timing);
    if (!path.empty()) {
        std::ofstream out(path);
        if (!out) {
            std::cerr << "error: cannot write report to " << path << "\n";
            return 1;
        }
        report.write_csv(out, zero_timing);
    }
    return report.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighborhood-based QoS prediction for cloud services"};
    app.require_subcommand(1);

    std::string data_path, format_name = "dense", report_path;
    std::vector<std::string> models;
    std::vector<double> densities;
    std::vector<std::uint64_t> seeds{0};
    bool deterministic_timing = false;

    // --- evaluate ---
    auto* eval_cmd = app.add_subcommand("evaluate", "Run the density x model benchmark grid");
    eval_cmd->add_option("--data", data_path, "QoS matrix file")->required();
    eval_cmd->add_option("--format", format_name, "dense|triplet")
        ->check(CLI::IsMember({"dense", "triplet"}));
    eval_cmd->add_option("--models", models, "Model names (e.g. gmean umean nbmodel3)")
        ->required()
        ->delimiter(',');
    eval_cmd->add_option("--densities", densities, "Train densities in (0,1)")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    eval_cmd->add_option("--seeds", seeds, "Split/shuffle seeds")->delimiter(',');
    eval_cmd->add_option("--report", report_path, "CSV report output path");
    eval_cmd->add_flag("--deterministic-timing", deterministic_timing,
                       "Zero the timing column for snapshot-stable reports");
    CommonHyper eval_hyper;
    eval_hyper.attach(eval_cmd);

    // --- sweep-k ---
    auto* sweep_cmd = app.add_subcommand("sweep-k", "Sweep the learned-model neighborhood size");
    std::string variant_name = "nbmodel1";
    std::vector<int> k_values;
    std::uint64_t sweep_seed = 0;
    sweep_cmd->add_option("--data", data_path, "QoS matrix file")->required();
    sweep_cmd->add_option("--format", format_name, "dense|triplet")
        ->check(CLI::IsMember({"dense", "triplet"}));
    sweep_cmd->add_option("--variant", variant_name, "nbmodel1|nbmodel2|nbmodel3")
        ->check(CLI::IsMember({"nbmodel1", "nbmodel2", "nbmodel3"}));
    sweep_cmd->add_option("--densities", densities, "Train densities in (0,1)")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    sweep_cmd->add_option("--k-values", k_values, "Neighborhood sizes to sweep")
        ->required()
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--seed", sweep_seed, "Split/shuffle seed");
    sweep_cmd->add_option("--report", report_path, "CSV report output path");
    sweep_cmd->add_flag("--deterministic-timing", deterministic_timing,
                        "Zero the timing column for snapshot-stable reports");
    CommonHyper sweep_hyper;
    sweep_hyper.attach(sweep_cmd);

    // --- train ---
    auto* train_cmd = app.add_subcommand("train", "Train a learned model on a full matrix");
    std::string model_name = "nbmodel3", model_out;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--data", data_path, "Training QoS matrix file")->required();
    train_cmd->add_option("--format", format_name, "dense|triplet")
        ->check(CLI::IsMember({"dense", "triplet"}));
    train_cmd->add_option("--model", model_name, "nbmodel1|nbmodel2|nbmodel3|pmf|biasedmf")
        ->check(CLI::IsMember({"nbmodel1", "nbmodel2", "nbmodel3", "pmf", "biasedmf"}));
    train_cmd->add_option("--seed", train_seed, "Shuffle/init seed");
    train_cmd->add_option("--out", model_out, "Model output path")->required();
    CommonHyper train_hyper;
    train_hyper.attach(train_cmd);

    // --- predict ---
    auto* pred_cmd = app.add_subcommand("predict", "Predict QoS values with a saved model");
    std::string model_in, pairs_path, pred_out;
    int pred_user = -1, pred_service = -1;
    pred_cmd->add_option("--model", model_in, "Saved model path")->required();
    pred_cmd->add_option("--data", data_path,
                         "Training matrix file (needed for neighborhood models)");
    pred_cmd->add_option("--format", format_name, "dense|triplet")
        ->check(CLI::IsMember({"dense", "triplet"}));
    pred_cmd->add_option("--user", pred_user, "User id");
    pred_cmd->add_option("--service", pred_service, "Service id");
    pred_cmd->add_option("--pairs", pairs_path, "CSV of user_id,service_id pairs (with header)");
    pred_cmd->add_option("--out", pred_out, "CSV output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval_cmd->parsed()) {
            eval_hyper.finalize();
            QosMatrix m = load_matrix(data_path, parse_format(format_name));
            EvalReport report = run_grid(m, models, densities, seeds, eval_hyper.opts);
            return write_report(report, report_path, deterministic_timing);
        }

        if (sweep_cmd->parsed()) {
            sweep_hyper.finalize();
            QosMatrix m = load_matrix(data_path, parse_format(format_name));
            EvalReport report = topk_sweep(m, parse_nb_variant(variant_name), densities, k_values,
                                           sweep_seed, sweep_hyper.opts);
            return write_report(report, report_path, deterministic_timing);
        }

        if (train_cmd->parsed()) {
            train_hyper.finalize();
            QosMatrix m = load_matrix(data_path, parse_format(format_name));
            const GridOptions& o = train_hyper.opts;
            if (model_name == "pmf" || model_name == "biasedmf") {
                MfConfig cfg = o.mf_cfg;
                cfg.seed = train_seed;
                MfModel model = mf_train(m, parse_mf_kind(model_name), cfg, o.clamp_max);
                save_model(model, model_out);
            } else {
                SimilarityIndex::Options iopts;
                iopts.threads = o.index_threads;
                SimilarityIndex index = SimilarityIndex::build(m, Axis::user, o.nb_k, iopts);
                TrainConfig cfg = o.nb_cfg;
                cfg.shuffle_seed = train_seed;
                NbModel model =
                    nb_train(m, parse_nb_variant(model_name), cfg, index, o.clamp_max);
                save_model(model, model_out);
            }
            std::cout << "saved " << model_name << " model to " << model_out << "\n";
            return 0;
        }

        // predict
        AnyModel any = load_model(model_in);
        std::shared_ptr<QosMatrix> train_matrix;
        if (std::holds_alternative<NbModel>(any)) {
            if (data_path.empty()) {
                std::cerr << "error: --data is required for neighborhood models\n";
                return 1;
            }
            train_matrix =
                std::make_shared<QosMatrix>(load_matrix(data_path, parse_format(format_name)));
        }
        auto predict_one = [&](int u, int i) {
            return std::visit(
                [&](const auto& model) -> double {
                    if constexpr (std::is_same_v<std::decay_t<decltype(model)>, NbModel>)
                        return model.predict(u, i, *train_matrix);
                    else
                        return model.predict(u, i);
                },
                any);
        };

        std::ostringstream out;
        out.precision(17);
        if (!pairs_path.empty()) {
            std::ifstream in(pairs_path);
            if (!in) {
                std::cerr << "error: cannot open " << pairs_path << "\n";
                return 1;
            }
            std::string line;
            std::getline(in, line);  // header
            out << "user_id,service_id,prediction\n";
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
                int u, i;
                if (std::sscanf(line.c_str(), "%d,%d", &u, &i) != 2) {
                    std::cerr << "error: bad pair line: " << line << "\n";
                    return 1;
                }
                out << u << ',' << i << ',' << predict_one(u, i) << '\n';
            }
        } else {
            if (pred_user < 0 || pred_service < 0) {
                std::cerr << "error: need --user and --service, or --pairs\n";
                return 1;
            }
            out << predict_one(pred_user, pred_service) << '\n';
        }
        if (pred_out.empty()) {
            std::cout << out.str();
        } else {
            std::ofstream f(pred_out);
            f << out.str();
        }
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
