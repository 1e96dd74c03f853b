#include "slaterlab/trajectory.hpp"

#include "slaterlab/matrix_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>

namespace slaterlab {

std::string to_string(StateRep rep) {
    switch (rep) {
        case StateRep::DenseTensor: return "dense-tensor";
        case StateRep::Occupation: return "occupation";
        case StateRep::OneBody: return "one-body";
    }
    return "?";
}

StateRep state_rep_from_string(const std::string& s) {
    if (s == "dense-tensor") return StateRep::DenseTensor;
    if (s == "occupation") return StateRep::Occupation;
    if (s == "one-body") return StateRep::OneBody;
    throw std::invalid_argument("unknown state representation: " + s);
}

int Trajectory::index_of_time(double t, double tol) const {
    for (int k = 0; k < size(); ++k)
        if (std::abs(times[k] - t) <= tol) return k;
    throw std::invalid_argument("trajectory has no sample at t = " + std::to_string(t));
}

void Trajectory::check_uniform_grid() const {
    if (times.size() != states.size())
        throw std::invalid_argument("trajectory: times/states length mismatch");
    for (int k = 0; k < size(); ++k)
        if (std::abs(times[k] - (times[0] + k * dt)) > 1e-9)
            throw std::invalid_argument("trajectory: non-uniform time grid");
}

namespace {
std::string sample_name(const std::string& stem, int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%06d.mat", k);
    return stem + buf;
}
}  // namespace

void save_trajectory(const std::filesystem::path& dir, const std::string& stem, const Trajectory& traj) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["schema"] = "slaterlab-trajectory-v1";
    meta["rep"] = to_string(traj.rep);
    meta["d"] = traj.d;
    meta["N"] = traj.N;
    meta["dt"] = traj.dt;
    meta["hbar"] = traj.hbar;
    meta["seed"] = traj.seed;
    meta["scheme"] = traj.scheme;
    meta["times"] = traj.times;
    std::vector<std::string> files;
    files.reserve(traj.states.size());
    for (int k = 0; k < traj.size(); ++k) {
        const std::string name = sample_name(stem, k);
        write_matrix(dir / name, traj.states[k]);
        files.push_back(name);
    }
    meta["files"] = files;
    std::ofstream os(dir / (stem + ".json"));
    if (!os) throw std::runtime_error("save_trajectory: cannot open sidecar for " + stem);
    os << std::setw(2) << meta << "\n";
}

Trajectory load_trajectory(const std::filesystem::path& dir, const std::string& stem) {
    std::ifstream is(dir / (stem + ".json"));
    if (!is) throw std::runtime_error("load_trajectory: missing sidecar for " + stem);
    nlohmann::json meta;
    is >> meta;
    if (meta.value("schema", "") != "slaterlab-trajectory-v1")
        throw std::runtime_error("load_trajectory: unsupported checkpoint schema for " + stem);
    Trajectory traj;
    traj.rep = state_rep_from_string(meta.at("rep").get<std::string>());
    traj.d = meta.at("d").get<int>();
    traj.N = meta.at("N").get<int>();
    traj.dt = meta.at("dt").get<double>();
    traj.hbar = meta.at("hbar").get<double>();
    traj.seed = meta.at("seed").get<std::uint64_t>();
    traj.scheme = meta.at("scheme").get<std::string>();
    traj.times = meta.at("times").get<std::vector<double>>();
    for (const auto& name : meta.at("files").get<std::vector<std::string>>())
        traj.states.push_back(read_matrix(dir / name));
    if (traj.times.size() != traj.states.size())
        throw std::runtime_error("load_trajectory: corrupt checkpoint for " + stem);
    return traj;
}

}  // namespace slaterlab
