#include "kuramoto/trajectory_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kuramoto {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::ProjectedRk4: return "projected-rk4";
        case Method::LieEuler: return "lie-euler";
        case Method::EulerMaruyama: return "euler-maruyama";
    }
    return "projected-rk4";
}

Method method_from_name(const std::string& name) {
    if (name == "projected-rk4") return Method::ProjectedRk4;
    if (name == "lie-euler") return Method::LieEuler;
    if (name == "euler-maruyama") return Method::EulerMaruyama;
    throw InvalidParams("unknown integrator method: " + name);
}

std::vector<std::vector<double>> flatten_snapshot(const PhaseEnsemble& m) {
    std::vector<std::vector<double>> out;
    for (int i = 0; i < m.phases.size(); ++i) out.push_back({m.phases[i]});
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const GlobalCircleModel& m) {
    std::vector<std::vector<double>> out;
    for (int i = 0; i < m.z.size(); ++i) out.push_back({m.z[i].real(), m.z[i].imag()});
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const SubEnsembleModel& m) {
    std::vector<std::vector<double>> out;
    for (const auto& g : m.groups)
        for (int i = 0; i < g.size(); ++i) out.push_back({g[i]});
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const SphereEnsemble& m) {
    std::vector<std::vector<double>> out;
    for (const auto& x : m.states) out.emplace_back(x.data(), x.data() + x.size());
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const ComplexSphereEnsemble& m) {
    std::vector<std::vector<double>> out;
    for (const auto& x : m.states) {
        std::vector<double> row;
        for (int i = 0; i < x.size(); ++i) {
            row.push_back(x[i].real());
            row.push_back(x[i].imag());
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const SoEnsemble& m) {
    std::vector<std::vector<double>> out;
    for (const auto& q : m.states) {
        std::vector<double> row;
        for (int r = 0; r < q.rows(); ++r)
            for (int c = 0; c < q.cols(); ++c) row.push_back(q(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<double>> flatten_snapshot(const UnitaryEnsemble& m) {
    std::vector<std::vector<double>> out;
    for (const auto& u : m.states) {
        std::vector<double> row;
        for (int r = 0; r < u.rows(); ++r)
            for (int c = 0; c < u.cols(); ++c) {
                row.push_back(u(r, c).real());
                row.push_back(u(r, c).imag());
            }
        out.push_back(std::move(row));
    }
    return out;
}

const char* model_tag(const PhaseEnsemble&) { return "phase"; }
const char* model_tag(const GlobalCircleModel&) { return "global-circle"; }
const char* model_tag(const SubEnsembleModel&) { return "subensemble"; }
const char* model_tag(const SphereEnsemble&) { return "sphere"; }
const char* model_tag(const ComplexSphereEnsemble&) { return "complex-sphere"; }
const char* model_tag(const SoEnsemble&) { return "so"; }
const char* model_tag(const UnitaryEnsemble&) { return "unitary"; }

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << contents;
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path + " (" + ec.message() + ")");
}

void save_trajectory_csv(const FlatTrajectory& traj, const std::string& path) {
    std::ostringstream out;
    out << "t,particle_id,component_index,value\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        const std::string t = fmt17(traj.times[s]);
        for (std::size_t p = 0; p < snap.size(); ++p)
            for (std::size_t c = 0; c < snap[p].size(); ++c)
                out << t << ',' << p << ',' << c << ',' << fmt17(snap[p][c]) << '\n';
    }
    atomic_write(path, out.str());
}

void save_trajectory_json(const FlatTrajectory& traj, const std::string& path) {
    nlohmann::json doc;
    doc["model"] = traj.model;
    doc["seed"] = traj.rng_seed;
    doc["dt"] = traj.step_size;
    doc["method"] = traj.method;
    doc["times"] = traj.times;
    doc["snapshots"] = traj.snapshots;
    atomic_write(path, doc.dump());
}

FlatTrajectory load_trajectory_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw IoError(std::string("bad trajectory json: ") + e.what());
    }
    FlatTrajectory traj;
    traj.model = doc.at("model").get<std::string>();
    traj.rng_seed = doc.at("seed").get<std::uint64_t>();
    traj.step_size = doc.at("dt").get<double>();
    traj.method = doc.at("method").get<std::string>();
    traj.times = doc.at("times").get<std::vector<double>>();
    traj.snapshots = doc.at("snapshots").get<std::vector<std::vector<std::vector<double>>>>();
    if (traj.snapshots.size() != traj.times.size())
        throw IoError("trajectory json: snapshot/time count mismatch");
    return traj;
}

void save_samples_csv(const std::vector<std::vector<double>>& points, const std::string& path) {
    std::ostringstream out;
    out << "point_id,component_index,value\n";
    for (std::size_t p = 0; p < points.size(); ++p)
        for (std::size_t c = 0; c < points[p].size(); ++c)
            out << p << ',' << c << ',' << fmt17(points[p][c]) << '\n';
    atomic_write(path, out.str());
}

std::vector<std::vector<double>> load_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty samples file: " + path);
    std::vector<std::vector<double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t id, comp;
        double value;
        if (std::sscanf(line.c_str(), "%zu,%zu,%lf", &id, &comp, &value) != 3)
            throw IoError("bad samples row: " + line);
        if (id >= out.size()) out.resize(id + 1);
        if (comp != out[id].size()) throw IoError("samples rows out of order: " + line);
        out[id].push_back(value);
    }
    return out;
}

std::vector<std::vector<double>> flatten_points(const std::vector<double>& angles) {
    std::vector<std::vector<double>> out;
    for (double a : angles) out.push_back({a});
    return out;
}

std::vector<std::vector<double>> flatten_points(const std::vector<VectorXd>& pts) {
    std::vector<std::vector<double>> out;
    for (const auto& p : pts) out.emplace_back(p.data(), p.data() + p.size());
    return out;
}

std::vector<std::vector<double>> flatten_points(const std::vector<VectorXcd>& pts) {
    std::vector<std::vector<double>> out;
    for (const auto& p : pts) {
        std::vector<double> row;
        for (int i = 0; i < p.size(); ++i) {
            row.push_back(p[i].real());
            row.push_back(p[i].imag());
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace kuramoto
