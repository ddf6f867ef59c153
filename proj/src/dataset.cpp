#include "qosrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qosrec/errors.hpp"
#include "qosrec/kernels.hpp"

namespace qosrec {

QosMatrix::QosMatrix(int num_users, int num_services, std::vector<Entry> entries)
    : num_users_(num_users), num_services_(num_services) {
    if (num_users <= 0 || num_services <= 0)
        throw std::invalid_argument("QosMatrix: non-positive dimensions");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.user != b.user ? a.user < b.user : a.service < b.service;
    });
    const std::size_t n = entries.size();
    entry_users_.reserve(n);
    entry_services_.reserve(n);
    values_.reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const Entry& e = entries[idx];
        if (e.user < 0 || e.user >= num_users || e.service < 0 || e.service >= num_services)
            throw std::invalid_argument("QosMatrix: entry id out of range");
        if (!std::isfinite(e.value) || e.value < 0.0)
            throw std::invalid_argument("QosMatrix: entry value not finite and non-negative");
        if (idx > 0 && entries[idx - 1].user == e.user && entries[idx - 1].service == e.service)
            throw std::invalid_argument("QosMatrix: duplicate (user, service) entry");
        entry_users_.push_back(e.user);
        entry_services_.push_back(e.service);
        values_.push_back(e.value);
    }

    row_off_.assign(static_cast<std::size_t>(num_users) + 1, 0);
    for (int u : entry_users_) ++row_off_[static_cast<std::size_t>(u) + 1];
    std::partial_sum(row_off_.begin(), row_off_.end(), row_off_.begin());

    // Column-major copy for per-service scans.
    col_off_.assign(static_cast<std::size_t>(num_services) + 1, 0);
    for (int i : entry_services_) ++col_off_[static_cast<std::size_t>(i) + 1];
    std::partial_sum(col_off_.begin(), col_off_.end(), col_off_.begin());
    col_users_.resize(n);
    col_values_.resize(n);
    std::vector<std::size_t> cur(col_off_.begin(), col_off_.end() - 1);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t pos = cur[entry_services_[idx]]++;
        col_users_[pos] = entry_users_[idx];
        col_values_[pos] = values_[idx];
    }
}

std::span<const int> QosMatrix::user_services(int u) const {
    return {entry_services_.data() + row_off_[u], row_off_[u + 1] - row_off_[u]};
}

std::span<const double> QosMatrix::user_values(int u) const {
    return {values_.data() + row_off_[u], row_off_[u + 1] - row_off_[u]};
}

std::span<const int> QosMatrix::service_users(int i) const {
    return {col_users_.data() + col_off_[i], col_off_[i + 1] - col_off_[i]};
}

std::span<const double> QosMatrix::service_values(int i) const {
    return {col_values_.data() + col_off_[i], col_off_[i + 1] - col_off_[i]};
}

bool QosMatrix::has(int u, int i) const {
    auto row = user_services(u);
    return std::binary_search(row.begin(), row.end(), i);
}

double QosMatrix::value_or_nan(int u, int i) const {
    auto row = user_services(u);
    auto it = std::lower_bound(row.begin(), row.end(), i);
    if (it == row.end() || *it != i) return std::nan("");
    return values_[row_off_[u] + static_cast<std::size_t>(it - row.begin())];
}

MatrixFormat parse_format(const std::string& name) {
    if (name == "dense") return MatrixFormat::dense;
    if (name == "triplet") return MatrixFormat::triplet;
    throw std::invalid_argument("unknown matrix format: " + name);
}

namespace {

QosMatrix load_dense(std::istream& in) {
    std::vector<Entry> entries;
    std::string line;
    long lineno = 0;
    int num_cols = -1;
    int row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string tok;
        int col = 0;
        while (ls >> tok) {
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ParseError("dense: non-numeric token '" + tok + "'", lineno);
            // negative or non-finite cells are missing markers
            if (std::isfinite(v) && v >= 0.0) entries.push_back({row, col, v});
            ++col;
        }
        if (num_cols < 0)
            num_cols = col;
        else if (col != num_cols)
            throw ParseError("dense: expected " + std::to_string(num_cols) + " columns, got " +
                                 std::to_string(col),
                             lineno);
        ++row;
    }
    if (row == 0 || num_cols <= 0) throw EmptyDataError("dense: no rows");
    if (entries.empty()) throw EmptyDataError("dense: no observed values");
    return QosMatrix(row, num_cols, std::move(entries));
}

QosMatrix load_triplet(std::istream& in) {
    std::vector<Entry> entries;
    std::string line;
    long lineno = 0;
    int max_u = -1, max_i = -1;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (!header_seen) {  // header row
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string f[3];
        if (!std::getline(ls, f[0], ',') || !std::getline(ls, f[1], ',') || !std::getline(ls, f[2]))
            throw ParseError("triplet: expected 3 comma-separated fields", lineno);
        char* end = nullptr;
        long u = std::strtol(f[0].c_str(), &end, 10);
        if (end == f[0].c_str() || u < 0) throw ParseError("triplet: bad user id '" + f[0] + "'", lineno);
        long i = std::strtol(f[1].c_str(), &end, 10);
        if (end == f[1].c_str() || i < 0)
            throw ParseError("triplet: bad service id '" + f[1] + "'", lineno);
        double v = std::strtod(f[2].c_str(), &end);
        if (end == f[2].c_str()) throw ParseError("triplet: bad value '" + f[2] + "'", lineno);
        max_u = std::max(max_u, static_cast<int>(u));
        max_i = std::max(max_i, static_cast<int>(i));
        if (std::isfinite(v) && v >= 0.0)
            entries.push_back({static_cast<int>(u), static_cast<int>(i), v});
    }
    if (entries.empty()) throw EmptyDataError("triplet: no observed values");
    return QosMatrix(max_u + 1, max_i + 1, std::move(entries));
}

}  // namespace

QosMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return format == MatrixFormat::dense ? load_dense(in) : load_triplet(in);
}

void save_triplet(const QosMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "user_id,service_id,value\n";
    out.precision(17);
    for (int u = 0; u < m.num_users(); ++u) {
        auto svc = m.user_services(u);
        auto val = m.user_values(u);
        for (std::size_t j = 0; j < svc.size(); ++j)
            out << u << ',' << svc[j] << ',' << val[j] << '\n';
    }
}

MatrixStats compute_stats(const QosMatrix& m) {
    if (m.num_observed() == 0) throw EmptyDataError("compute_stats: empty matrix");
    MatrixStats st;
    st.user_mean.assign(m.num_users(), 0.0);
    st.service_mean.assign(m.num_services(), 0.0);
    st.user_count.assign(m.num_users(), 0);
    st.service_count.assign(m.num_services(), 0);
    double total = 0.0;
    for (int u = 0; u < m.num_users(); ++u) {
        auto vals = m.user_values(u);
        if (vals.empty()) continue;
        double s = kern::sum(vals);
        total += s;
        st.user_count[u] = static_cast<int>(vals.size());
        st.user_mean[u] = s / static_cast<double>(vals.size());
    }
    for (int i = 0; i < m.num_services(); ++i) {
        auto vals = m.service_values(i);
        if (vals.empty()) continue;
        st.service_count[i] = static_cast<int>(vals.size());
        st.service_mean[i] = kern::sum(vals) / static_cast<double>(vals.size());
    }
    st.global_mean = total / static_cast<double>(m.num_observed());
    return st;
}

TrainTestSplit split(const QosMatrix& m, double density, std::uint64_t seed) {
    if (!(density > 0.0 && density < 1.0))
        throw std::invalid_argument("split: density must be in (0,1)");
    const std::size_t n = m.num_observed();
    if (n < 2) throw DegenerateSplitError("split: need at least 2 observed entries");
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(density * static_cast<double>(n) + 0.5));
    if (n_train == 0 || n_train >= n)
        throw DegenerateSplitError("split: density " + std::to_string(density) +
                                   " leaves train or test empty");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 gen(seed);
    // partial Fisher-Yates; modulo draw, documented in the README
    for (std::size_t j = 0; j < n_train; ++j) {
        std::size_t r = j + static_cast<std::size_t>(gen() % (n - j));
        std::swap(idx[j], idx[r]);
    }

    std::vector<Entry> train_e, test_e;
    train_e.reserve(n_train);
    test_e.reserve(n - n_train);
    std::vector<char> in_train(n, 0);
    for (std::size_t j = 0; j < n_train; ++j) in_train[idx[j]] = 1;
    for (std::size_t e = 0; e < n; ++e) {
        Entry en{static_cast<int>(m.entry_user(e)), static_cast<int>(m.entry_service(e)),
                 m.entry_value(e)};
        (in_train[e] ? train_e : test_e).push_back(en);
    }
    return TrainTestSplit{QosMatrix(m.num_users(), m.num_services(), std::move(train_e)),
                          QosMatrix(m.num_users(), m.num_services(), std::move(test_e)), density,
                          seed};
}

}  // namespace qosrec
