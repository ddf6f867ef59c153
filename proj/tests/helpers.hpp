#pragma once

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "qosrec/dataset.hpp"

namespace testutil {

// Scratch file removed on destruction.
struct TmpFile {
    std::filesystem::path path;
    explicit TmpFile(const std::string& name) {
        path = std::filesystem::temp_directory_path() /
               ("qosrec_test_" + std::to_string(::getpid()) + "_" + name);
    }
    ~TmpFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Random sparse matrix with values in [0, 20), each cell kept with probability
// `density`; always keeps at least two entries.
inline qosrec::QosMatrix random_matrix(int users, int services, double density,
                                       std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> val(0.0, 20.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<qosrec::Entry> entries;
    for (int u = 0; u < users; ++u)
        for (int i = 0; i < services; ++i)
            if (coin(gen) < density) entries.push_back({u, i, val(gen)});
    while (entries.size() < 2) {
        int u = static_cast<int>(gen() % users);
        int i = static_cast<int>(gen() % services);
        bool dup = false;
        for (auto& e : entries) dup |= (e.user == u && e.service == i);
        if (!dup) entries.push_back({u, i, val(gen)});
    }
    return qosrec::QosMatrix(users, services, std::move(entries));
}

}  // namespace testutil
