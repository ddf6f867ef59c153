#include "qosrec/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qosrec {

namespace {

void write_vec(std::ostream& out, const std::string& name, const std::vector<double>& v) {
    out << name << ' ' << v.size() << '\n';
    for (std::size_t i = 0; i < v.size(); ++i) out << i << ' ' << v[i] << '\n';
}

void write_stats(std::ostream& out, const std::string& name, const std::vector<int>& count,
                 const std::vector<double>& mean) {
    std::size_t n = 0;
    for (int c : count)
        if (c > 0) ++n;
    out << name << ' ' << n << '\n';
    for (std::size_t i = 0; i < count.size(); ++i)
        if (count[i] > 0) out << i << ' ' << count[i] << ' ' << mean[i] << '\n';
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    return out;
}

void expect(std::istream& in, const std::string& token) {
    std::string got;
    in >> got;
    if (got != token)
        throw std::runtime_error("model file: expected '" + token + "', got '" + got + "'");
}

std::size_t read_count(std::istream& in, const std::string& token) {
    expect(in, token);
    std::size_t n;
    if (!(in >> n)) throw std::runtime_error("model file: bad count after " + token);
    return n;
}

void read_vec(std::istream& in, const std::string& name, std::vector<double>& v) {
    std::size_t n = read_count(in, name);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t id;
        double val;
        if (!(in >> id >> val) || id >= v.size())
            throw std::runtime_error("model file: bad " + name + " row");
        v[id] = val;
    }
}

void read_stats(std::istream& in, const std::string& name, std::vector<int>& count,
                std::vector<double>& mean) {
    std::size_t n = read_count(in, name);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t id;
        int c;
        double m;
        if (!(in >> id >> c >> m) || id >= count.size())
            throw std::runtime_error("model file: bad " + name + " row");
        count[id] = c;
        mean[id] = m;
    }
}

}  // namespace

void save_model(const NbModel& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "qosmodel 1\n";
    out << "kind " << nb_variant_name(m.variant) << '\n';
    out << "users " << m.stats.user_count.size() << '\n';
    out << "services " << m.stats.service_count.size() << '\n';
    out << "k " << m.k << '\n';
    out << "clamp " << m.clamp_max << '\n';
    out << "mu " << m.stats.global_mean << '\n';
    write_stats(out, "user_stats", m.stats.user_count, m.stats.user_mean);
    write_stats(out, "service_stats", m.stats.service_count, m.stats.service_mean);
    if (m.uses_biases()) {
        write_vec(out, "b_u", m.b_u);
        write_vec(out, "b_i", m.b_i);
    }
    if (m.uses_feature_weights()) {
        write_vec(out, "w_u", m.w_u);
        write_vec(out, "w_i", m.w_i);
    }
    std::size_t n_w = 0;
    for (const auto& row : m.w_uv) n_w += row.size();
    out << "w_uv " << n_w << '\n';
    for (std::size_t u = 0; u < m.w_uv.size(); ++u)
        for (std::size_t j = 0; j < m.w_uv[u].size(); ++j)
            out << u << ' ' << m.neighbors[u][j] << ' ' << m.w_uv[u][j] << '\n';
    out << "end\n";
}

void save_model(const MfModel& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "qosmodel 1\n";
    out << "kind " << mf_kind_name(m.kind) << '\n';
    out << "users " << m.user_count.size() << '\n';
    out << "services " << m.service_count.size() << '\n';
    out << "f " << m.f << '\n';
    out << "clamp " << m.clamp_max << '\n';
    out << "mu " << m.mu << '\n';
    out << "user_count " << m.user_count.size() << '\n';
    for (std::size_t u = 0; u < m.user_count.size(); ++u) out << u << ' ' << m.user_count[u] << '\n';
    out << "service_count " << m.service_count.size() << '\n';
    for (std::size_t i = 0; i < m.service_count.size(); ++i)
        out << i << ' ' << m.service_count[i] << '\n';
    if (m.kind == MfKind::biasedmf) {
        write_vec(out, "b_u", m.b_u);
        write_vec(out, "b_i", m.b_i);
    }
    out << "p " << m.user_count.size() << '\n';
    for (std::size_t u = 0; u < m.user_count.size(); ++u) {
        out << u;
        for (int t = 0; t < m.f; ++t) out << ' ' << m.p[u * m.f + t];
        out << '\n';
    }
    out << "q " << m.service_count.size() << '\n';
    for (std::size_t i = 0; i < m.service_count.size(); ++i) {
        out << i;
        for (int t = 0; t < m.f; ++t) out << ' ' << m.q[i * m.f + t];
        out << '\n';
    }
    out << "end\n";
}

AnyModel load_model(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect(in, "qosmodel");
    int version;
    in >> version;
    if (version != 1) throw std::runtime_error("model file: unsupported version");
    expect(in, "kind");
    std::string kind;
    in >> kind;
    std::size_t users = read_count(in, "users");
    std::size_t services = read_count(in, "services");

    if (kind == "pmf" || kind == "biasedmf") {
        MfModel m;
        m.kind = parse_mf_kind(kind);
        m.f = static_cast<int>(read_count(in, "f"));
        expect(in, "clamp");
        in >> m.clamp_max;
        expect(in, "mu");
        in >> m.mu;
        m.user_count.assign(users, 0);
        m.service_count.assign(services, 0);
        std::size_t n = read_count(in, "user_count");
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t id;
            in >> id >> m.user_count.at(id);
        }
        n = read_count(in, "service_count");
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t id;
            in >> id >> m.service_count.at(id);
        }
        m.b_u.assign(users, 0.0);
        m.b_i.assign(services, 0.0);
        if (m.kind == MfKind::biasedmf) {
            read_vec(in, "b_u", m.b_u);
            read_vec(in, "b_i", m.b_i);
        }
        m.p.assign(users * m.f, 0.0);
        m.q.assign(services * m.f, 0.0);
        n = read_count(in, "p");
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t id;
            in >> id;
            for (int t = 0; t < m.f; ++t) in >> m.p.at(id * m.f + t);
        }
        n = read_count(in, "q");
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t id;
            in >> id;
            for (int t = 0; t < m.f; ++t) in >> m.q.at(id * m.f + t);
        }
        expect(in, "end");
        if (!in) throw std::runtime_error("model file: truncated");
        return m;
    }

    NbModel m;
    m.variant = parse_nb_variant(kind);
    m.k = static_cast<int>(read_count(in, "k"));
    expect(in, "clamp");
    in >> m.clamp_max;
    expect(in, "mu");
    in >> m.stats.global_mean;
    m.stats.user_count.assign(users, 0);
    m.stats.user_mean.assign(users, 0.0);
    m.stats.service_count.assign(services, 0);
    m.stats.service_mean.assign(services, 0.0);
    read_stats(in, "user_stats", m.stats.user_count, m.stats.user_mean);
    read_stats(in, "service_stats", m.stats.service_count, m.stats.service_mean);
    m.b_u.assign(users, 0.0);
    m.b_i.assign(services, 0.0);
    m.w_u.assign(users, 0.0);
    m.w_i.assign(services, 0.0);
    if (m.uses_biases()) {
        read_vec(in, "b_u", m.b_u);
        read_vec(in, "b_i", m.b_i);
    }
    if (m.uses_feature_weights()) {
        read_vec(in, "w_u", m.w_u);
        read_vec(in, "w_i", m.w_i);
    }
    m.neighbors.resize(users);
    m.w_uv.resize(users);
    std::size_t n_w = read_count(in, "w_uv");
    for (std::size_t j = 0; j < n_w; ++j) {
        std::size_t u;
        int v;
        double w;
        if (!(in >> u >> v >> w) || u >= users)
            throw std::runtime_error("model file: bad w_uv row");
        m.neighbors[u].push_back(v);
        m.w_uv[u].push_back(w);
    }
    expect(in, "end");
    if (!in) throw std::runtime_error("model file: truncated");
    return m;
}

}  // namespace qosrec
