#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qosrec {

struct Entry {
    int user;
    int service;
    double value;
};

/// Sparse user x service matrix of observed QoS values (response times, seconds).
/// Immutable after construction; rows and columns are stored contiguously so
/// per-user and per-service value slices can feed the reduction kernels.
class QosMatrix {
public:
    // entries may arrive in any order; duplicates or out-of-range ids throw.
    QosMatrix(int num_users, int num_services, std::vector<Entry> entries);

    int num_users() const { return num_users_; }
    int num_services() const { return num_services_; }
    std::size_t num_observed() const { return values_.size(); }

    // Row-major (per-user) view, sorted by service id.
    std::span<const int> user_services(int u) const;
    std::span<const double> user_values(int u) const;

    // Column-major (per-service) view, sorted by user id.
    std::span<const int> service_users(int i) const;
    std::span<const double> service_values(int i) const;

    bool has(int u, int i) const;
    // NaN when (u,i) is unobserved.
    double value_or_nan(int u, int i) const;

    // Flat entry view, sorted by (user, service). Entry index is stable and
    // shared with user_values offsets.
    std::size_t entry_user(std::size_t idx) const { return entry_users_[idx]; }
    std::size_t entry_service(std::size_t idx) const { return entry_services_[idx]; }
    double entry_value(std::size_t idx) const { return values_[idx]; }

private:
    int num_users_ = 0;
    int num_services_ = 0;
    std::vector<int> entry_users_;      // |E|
    std::vector<int> entry_services_;   // |E|, row-major sorted
    std::vector<double> values_;        // |E|
    std::vector<std::size_t> row_off_;  // num_users+1
    std::vector<int> col_users_;        // |E|, column-major sorted
    std::vector<double> col_values_;    // |E|
    std::vector<std::size_t> col_off_;  // num_services+1
};

struct MatrixStats {
    double global_mean = 0.0;
    std::vector<double> user_mean;     // valid only where user_count > 0
    std::vector<double> service_mean;  // valid only where service_count > 0
    std::vector<int> user_count;
    std::vector<int> service_count;

    bool has_user(int u) const { return user_count[u] > 0; }
    bool has_service(int i) const { return service_count[i] > 0; }
    double user_mean_or(int u, double fb) const { return has_user(u) ? user_mean[u] : fb; }
    double service_mean_or(int i, double fb) const { return has_service(i) ? service_mean[i] : fb; }
};

struct TrainTestSplit {
    QosMatrix train;
    QosMatrix test;
    double density;
    std::uint64_t seed;
};

enum class MatrixFormat { dense, triplet };

MatrixFormat parse_format(const std::string& name);

// Dense: one text row per user, whitespace separated; value < 0 means missing.
// Triplet: CSV with header user_id,service_id,value.
QosMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_triplet(const QosMatrix& m, const std::filesystem::path& path);

MatrixStats compute_stats(const QosMatrix& m);

// Deterministic split: |train| = floor(density*|E| + 0.5) entries drawn by a
// partial Fisher-Yates shuffle over std::mt19937_64(seed).
TrainTestSplit split(const QosMatrix& m, double density, std::uint64_t seed);

}  // namespace qosrec
