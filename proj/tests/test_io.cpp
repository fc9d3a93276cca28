#include <cstdio>
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/geometry.hpp"
#include "kuramoto/trajectory_io.hpp"

using namespace kuramoto;

TEST_CASE("trajectory json round trip is bit-exact") {
    Rng rng(151);
    SphereEnsemble m;
    for (int i = 0; i < 4; ++i) m.states.push_back(random_unit_vector(3, rng));
    m.a = random_antisymmetric(3, 0.8, rng);
    m.coupling = SphereGlobalCoupling{1.0};
    m.noise_kappa = 0.3;
    auto traj = simulate(m, {Method::EulerMaruyama, 1e-2, true}, 1.0, 10, 2024);

    const FlatTrajectory flat = flatten(traj);
    const std::string path = "test_traj_roundtrip.json";
    save_trajectory_json(flat, path);
    const FlatTrajectory back = load_trajectory_json(path);

    CHECK(back.model == "sphere");
    CHECK(back.rng_seed == 2024);
    CHECK(back.method == "euler-maruyama");
    REQUIRE(back.times.size() == flat.times.size());
    for (std::size_t s = 0; s < flat.times.size(); ++s) {
        CHECK(std::memcmp(&back.times[s], &flat.times[s], sizeof(double)) == 0);
        for (std::size_t p = 0; p < flat.snapshots[s].size(); ++p)
            for (std::size_t c = 0; c < flat.snapshots[s][p].size(); ++c)
                CHECK(std::memcmp(&back.snapshots[s][p][c], &flat.snapshots[s][p][c],
                                  sizeof(double)) == 0);
    }
    std::remove(path.c_str());
}

TEST_CASE("trajectory csv carries the documented header and full precision") {
    PhaseEnsemble m;
    m.phases = (VectorXd(2) << 0.1, 1.0 / 3.0).finished();
    m.coupling = UniformCoupling{0.0, 0.0};
    auto traj = simulate(m, {Method::ProjectedRk4, 1e-2, true}, 0.0, 1, 1);
    const std::string path = "test_traj.csv";
    save_trajectory_csv(flatten(traj), path);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "t,particle_id,component_index,value");
    std::getline(in, row);
    CHECK(row == "0,0,0,0.10000000000000001");
    std::getline(in, row);
    CHECK(row == "0,1,0,0.33333333333333331");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("samples csv round trip") {
    Rng rng(152);
    std::vector<VectorXd> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_unit_vector(3, rng));
    const std::string path = "test_samples.csv";
    save_samples_csv(flatten_points(pts), path);
    auto back = load_samples_csv(path);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int c = 0; c < 3; ++c) CHECK(back[i][c] == pts[i][c]);
    std::remove(path.c_str());

    std::ifstream head(path);
    CHECK(!head.good());
    CHECK_THROWS_AS(load_samples_csv("does_not_exist.csv"), IoError);
}

TEST_CASE("method names round trip; unknown rejected") {
    for (Method m : {Method::ProjectedRk4, Method::LieEuler, Method::EulerMaruyama})
        CHECK(method_from_name(method_name(m)) == m);
    CHECK_THROWS_AS(method_from_name("rk45"), InvalidParams);
}
