#include "qosrec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qosrec/kernels.hpp"

namespace qosrec {

double pcc(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n < 2 || b.size() != n) return 0.0;
    const double dn = static_cast<double>(n);
    double sa = kern::sum(a);
    double sb = kern::sum(b);
    double saa = kern::dot(a, a);
    double sbb = kern::dot(b, b);
    double sab = kern::dot(a, b);
    double va = saa - sa * sa / dn;
    double vb = sbb - sb * sb / dn;
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    double r = (sab - sa * sb / dn) / std::sqrt(va * vb);
    return std::clamp(r, -1.0, 1.0);
}

namespace {

struct Moments {
    double n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
};

double pcc_from_moments(const Moments& m) {
    if (m.n < 2) return 0.0;
    double va = m.saa - m.sa * m.sa / m.n;
    double vb = m.sbb - m.sb * m.sb / m.n;
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    double r = (m.sab - m.sa * m.sb / m.n) / std::sqrt(va * vb);
    return std::clamp(r, -1.0, 1.0);
}

// All similarities of one target against every co-observing peer.
// Returned pairs are (peer_id, sim) for peers with >= 1 co-observation.
void target_sims(const QosMatrix& m, Axis axis, int target, std::vector<Moments>& scratch,
                 std::vector<int>& touched, std::vector<std::pair<int, double>>& out) {
    touched.clear();
    out.clear();
    if (axis == Axis::user) {
        auto svc = m.user_services(target);
        auto val = m.user_values(target);
        for (std::size_t j = 0; j < svc.size(); ++j) {
            const double a = val[j];
            auto users = m.service_users(svc[j]);
            auto uvals = m.service_values(svc[j]);
            for (std::size_t t = 0; t < users.size(); ++t) {
                int v = users[t];
                if (v == target) continue;
                Moments& mo = scratch[v];
                if (mo.n == 0) touched.push_back(v);
                const double b = uvals[t];
                mo.n += 1;
                mo.sa += a;
                mo.sb += b;
                mo.saa += a * a;
                mo.sbb += b * b;
                mo.sab += a * b;
            }
        }
    } else {
        auto users = m.service_users(target);
        auto uvals = m.service_values(target);
        for (std::size_t t = 0; t < users.size(); ++t) {
            const double a = uvals[t];
            auto svc = m.user_services(users[t]);
            auto val = m.user_values(users[t]);
            for (std::size_t j = 0; j < svc.size(); ++j) {
                int sid = svc[j];
                if (sid == target) continue;
                Moments& mo = scratch[sid];
                if (mo.n == 0) touched.push_back(sid);
                const double b = val[j];
                mo.n += 1;
                mo.sa += a;
                mo.sb += b;
                mo.saa += a * a;
                mo.sbb += b * b;
                mo.sab += a * b;
            }
        }
    }
    for (int peer : touched) {
        out.emplace_back(peer, pcc_from_moments(scratch[peer]));
        scratch[peer] = Moments{};
    }
}

}  // namespace

SimilarityIndex SimilarityIndex::build(const QosMatrix& m, Axis axis, int k, Options opts) {
    if (k < 0) throw std::invalid_argument("build_index: k must be >= 0");
    const int n = axis == Axis::user ? m.num_users() : m.num_services();
    SimilarityIndex idx;
    idx.axis_ = axis;
    idx.k_ = k;
    idx.topk_.resize(n);
    idx.has_all_sims_ = opts.keep_all_sims;

    std::vector<std::vector<std::pair<int, double>>> all(opts.keep_all_sims ? n : 0);

    int threads = std::max(1, opts.threads);
    threads = std::min<int>(threads, n);
    auto worker = [&](int begin, int end) {
        std::vector<Moments> scratch(n);
        std::vector<int> touched;
        std::vector<std::pair<int, double>> sims;
        for (int id = begin; id < end; ++id) {
            target_sims(m, axis, id, scratch, touched, sims);
            auto& list = idx.topk_[id];
            for (auto& [peer, s] : sims)
                if (s > 0.0) list.push_back({peer, s});
            std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
                return a.sim != b.sim ? a.sim > b.sim : a.id < b.id;
            });
            if (static_cast<int>(list.size()) > k) list.resize(k);
            list.shrink_to_fit();
            if (opts.keep_all_sims) all[id] = sims;
        }
    };
    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker, t * chunk, std::min(n, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    if (opts.keep_all_sims) {
        for (int id = 0; id < n; ++id)
            for (auto& [peer, s] : all[id])
                if (id < peer)
                    idx.all_sims_.emplace((static_cast<std::uint64_t>(id) << 32) |
                                              static_cast<std::uint32_t>(peer),
                                          s);
    }
    return idx;
}

std::optional<double> SimilarityIndex::sim(int a, int b) const {
    if (a == b) return std::nullopt;
    if (has_all_sims_) {
        int lo = std::min(a, b), hi = std::max(a, b);
        auto it = all_sims_.find((static_cast<std::uint64_t>(lo) << 32) |
                                 static_cast<std::uint32_t>(hi));
        if (it == all_sims_.end()) return std::nullopt;
        return it->second;
    }
    for (const Neighbor& nb : topk_[a])
        if (nb.id == b) return nb.sim;
    return std::nullopt;
}

NeighborSet neighbor_set(const SimilarityIndex& index, int u, int i, const QosMatrix& train) {
    if (index.axis() != Axis::user)
        throw std::invalid_argument("neighbor_set: index axis must be user");
    NeighborSet ns;
    for (const Neighbor& nb : index.neighbors(u))
        if (train.has(nb.id, i)) ns.members.push_back(nb.id);
    ns.normalizer =
        ns.members.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(ns.members.size()));
    return ns;
}

}  // namespace qosrec
