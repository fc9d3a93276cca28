#pragma once

#include <string>
#include <vector>

#include "kuramoto/dynamics.hpp"

namespace kuramoto {

// Model-independent view of a saved trajectory; doubles survive the JSON
// round trip bit-exactly (shortest-representation decimal encoding).
struct FlatTrajectory {
    std::string model;
    std::vector<double> times;
    // snapshots[time][particle][component]
    std::vector<std::vector<std::vector<double>>> snapshots;
    std::uint64_t rng_seed = 0;
    double step_size = 0.0;
    std::string method;
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// per-model flattening used by both writers
std::vector<std::vector<double>> flatten_snapshot(const PhaseEnsemble& m);
std::vector<std::vector<double>> flatten_snapshot(const GlobalCircleModel& m);
std::vector<std::vector<double>> flatten_snapshot(const SubEnsembleModel& m);
std::vector<std::vector<double>> flatten_snapshot(const SphereEnsemble& m);
std::vector<std::vector<double>> flatten_snapshot(const ComplexSphereEnsemble& m);
std::vector<std::vector<double>> flatten_snapshot(const SoEnsemble& m);
std::vector<std::vector<double>> flatten_snapshot(const UnitaryEnsemble& m);

const char* model_tag(const PhaseEnsemble&);
const char* model_tag(const GlobalCircleModel&);
const char* model_tag(const SubEnsembleModel&);
const char* model_tag(const SphereEnsemble&);
const char* model_tag(const ComplexSphereEnsemble&);
const char* model_tag(const SoEnsemble&);
const char* model_tag(const UnitaryEnsemble&);

template <class Model>
FlatTrajectory flatten(const Trajectory<Model>& traj) {
    FlatTrajectory f;
    f.model = model_tag(traj.snapshots.front());
    f.times = traj.times;
    f.rng_seed = traj.rng_seed;
    f.step_size = traj.step_size;
    f.method = method_name(traj.method);
    for (const auto& snap : traj.snapshots) f.snapshots.push_back(flatten_snapshot(snap));
    return f;
}

// CSV with header `t,particle_id,component_index,value`, 17 significant digits.
void save_trajectory_csv(const FlatTrajectory& traj, const std::string& path);

// JSON document carrying seed, dt, method and the snapshot array; bit-exact
// re-import guaranteed.
void save_trajectory_json(const FlatTrajectory& traj, const std::string& path);
FlatTrajectory load_trajectory_json(const std::string& path);

// Samples: CSV with header `point_id,component_index,value`.
void save_samples_csv(const std::vector<std::vector<double>>& points, const std::string& path);
std::vector<std::vector<double>> load_samples_csv(const std::string& path);

// flatteners for sample containers
std::vector<std::vector<double>> flatten_points(const std::vector<double>& angles);
std::vector<std::vector<double>> flatten_points(const std::vector<VectorXd>& pts);
std::vector<std::vector<double>> flatten_points(const std::vector<VectorXcd>& pts);

// write-to-temp-then-rename; all writers above go through this
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace kuramoto
