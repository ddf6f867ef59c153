#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "qosrec/dataset.hpp"
#include "qosrec/model_io.hpp"
#include "qosrec/nbmodel.hpp"

using namespace qosrec;
using testutil::TmpFile;

namespace {

const char* kCli = QOSREC_CLI_PATH;

int run(const std::string& args, std::string* output = nullptr) {
    TmpFile out("cli_stdout.txt");
    std::string cmd = std::string(kCli) + " " + args + " > " + out.path.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (output) *output = testutil::slurp(out.path);
    return WEXITSTATUS(rc);
}

// 20x30 synthetic dense fixture
TmpFile make_fixture() {
    TmpFile f("cli_fixture.txt");
    std::mt19937_64 gen(123);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    std::ostringstream os;
    os.precision(10);
    for (int u = 0; u < 20; ++u) {
        for (int i = 0; i < 30; ++i) {
            if (i) os << ' ';
            if (gen() % 10 < 6)
                os << val(gen);
            else
                os << -1;
        }
        os << '\n';
    }
    f.write(os.str());
    return f;
}

}  // namespace

TEST_CASE("no command prints usage and exits nonzero") {
    std::string out;
    CHECK(run("", &out) != 0);
}

TEST_CASE("out-of-range density is rejected") {
    TmpFile f = make_fixture();
    std::string out;
    int rc = run("evaluate --data " + f.path.string() +
                     " --models gmean --densities 1.5 --seeds 1",
                 &out);
    CHECK(rc != 0);
    CHECK(out.find("densities") != std::string::npos);
}

TEST_CASE("unknown flag is rejected") {
    std::string out;
    CHECK(run("evaluate --no-such-flag", &out) != 0);
}

TEST_CASE("evaluate writes the expected report rows") {
    TmpFile f = make_fixture();
    TmpFile report("cli_report.csv");
    int rc = run("evaluate --data " + f.path.string() +
                 " --format dense --models gmean,umean --densities 0.2,0.4 --seeds 1 --epochs 3"
                 " --report " + report.path.string() + " --deterministic-timing");
    CHECK(rc == 0);
    std::string csv = testutil::slurp(report.path);
    // header + 2 models x 2 densities
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.rfind("model,density,seed,k,mae,rmse,train_seconds\n", 0) == 0);
}

TEST_CASE("identical invocations produce byte-identical reports") {
    TmpFile f = make_fixture();
    TmpFile r1("cli_r1.csv"), r2("cli_r2.csv");
    std::string args = "evaluate --data " + f.path.string() +
                       " --models gmean,upcc,nbmodel1 --densities 0.3 --seeds 1,2 --epochs 3"
                       " --deterministic-timing --report ";
    CHECK(run(args + r1.path.string()) == 0);
    CHECK(run(args + r2.path.string()) == 0);
    std::string a = testutil::slurp(r1.path), b = testutil::slurp(r2.path);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
}

TEST_CASE("sweep-k emits one row per (density, k)") {
    TmpFile f = make_fixture();
    TmpFile report("cli_sweep.csv");
    int rc = run("sweep-k --data " + f.path.string() +
                 " --variant nbmodel1 --densities 0.3 --k-values 0,4,8 --seed 1 --epochs 3"
                 " --report " + report.path.string() + " --deterministic-timing");
    CHECK(rc == 0);
    std::string csv = testutil::slurp(report.path);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}

TEST_CASE("train then predict matches in-process predictions") {
    TmpFile f = make_fixture();
    TmpFile model_file("cli_model.txt");
    int rc = run("train --data " + f.path.string() +
                 " --model nbmodel3 --k 5 --epochs 5 --seed 7 --out " + model_file.path.string());
    REQUIRE(rc == 0);

    // in-process reference
    QosMatrix m = load_matrix(f.path, MatrixFormat::dense);
    SimilarityIndex idx = SimilarityIndex::build(m, Axis::user, 5);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.shuffle_seed = 7;
    NbModel reference = nb_train(m, NbVariant::nbmodel3, cfg, idx);

    std::string out;
    rc = run("predict --model " + model_file.path.string() + " --data " + f.path.string() +
                 " --user 3 --service 14",
             &out);
    REQUIRE(rc == 0);
    CHECK(std::stod(out) == doctest::Approx(reference.predict(3, 14, m)).epsilon(1e-12));

    SUBCASE("pairs file") {
        TmpFile pairs("cli_pairs.csv");
        pairs.write("user_id,service_id\n0,0\n3,14\n19,29\n");
        TmpFile preds("cli_preds.csv");
        rc = run("predict --model " + model_file.path.string() + " --data " + f.path.string() +
                 " --pairs " + pairs.path.string() + " --out " + preds.path.string());
        REQUIRE(rc == 0);
        std::string csv = testutil::slurp(preds.path);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
        CHECK(csv.rfind("user_id,service_id,prediction\n", 0) == 0);
    }
}

TEST_CASE("missing data file exits nonzero with a message") {
    std::string out;
    int rc = run("evaluate --data /nonexistent/file.txt --models gmean --densities 0.3", &out);
    CHECK(rc != 0);
    CHECK(out.find("error") != std::string::npos);
}
