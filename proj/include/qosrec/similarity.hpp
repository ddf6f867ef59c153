#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "qosrec/dataset.hpp"

namespace qosrec {

enum class Axis { user, service };

struct Neighbor {
    int id;
    double sim;
};

// Pearson correlation over co-observed values (equal-length, aligned).
// Returns 0 for fewer than 2 pairs or zero variance on either side.
double pcc(std::span<const double> a, std::span<const double> b);

/// Top-k PCC neighbor lists along one axis. Lists keep only strictly positive
/// similarities, sorted descending, ties broken by ascending id.
class SimilarityIndex {
public:
    struct Options {
        // retain every computed pairwise similarity, not just top-k survivors;
        // only sensible for small matrices
        bool keep_all_sims = false;
        int threads = 1;
    };

    static SimilarityIndex build(const QosMatrix& m, Axis axis, int k, Options opts);
    static SimilarityIndex build(const QosMatrix& m, Axis axis, int k) {
        return build(m, axis, k, Options{});
    }

    Axis axis() const { return axis_; }
    int k() const { return k_; }
    int size() const { return static_cast<int>(topk_.size()); }
    std::span<const Neighbor> neighbors(int id) const { return topk_[id]; }

    // Looks up the stored similarity; falls back to scanning top-k lists.
    std::optional<double> sim(int a, int b) const;

private:
    Axis axis_ = Axis::user;
    int k_ = 0;
    std::vector<std::vector<Neighbor>> topk_;
    std::unordered_map<std::uint64_t, double> all_sims_;  // only with keep_all_sims
    bool has_all_sims_ = false;
};

struct NeighborSet {
    std::vector<int> members;  // in top-k order
    double normalizer;         // |members|^(-1/2), 0 when empty
};

// N^k_(i;u): top-k neighbors of u that observed service i in the training matrix.
NeighborSet neighbor_set(const SimilarityIndex& index, int u, int i, const QosMatrix& train);

}  // namespace qosrec
