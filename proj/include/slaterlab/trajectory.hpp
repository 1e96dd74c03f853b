#ifndef SLATERLAB_TRAJECTORY_HPP
#define SLATERLAB_TRAJECTORY_HPP

#include "slaterlab/spaces.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace slaterlab {

// Which coordinates the stored states use.
enum class StateRep {
    DenseTensor,  // operators on Tensor(d, N)
    Occupation,   // operators on Antisym(d, N) in Fock coordinates
    OneBody,      // operators on Single(d)
};

std::string to_string(StateRep rep);
StateRep state_rep_from_string(const std::string& s);

// Time-stamped density operators plus the run metadata needed to replay them.
struct Trajectory {
    StateRep rep = StateRep::OneBody;
    int d = 0;
    int N = 0;
    double dt = 0.0;
    double hbar = 1.0;
    std::uint64_t seed = 0;
    std::string scheme;  // e.g. "spectral", "strang-midpoint"

    std::vector<double> times;
    std::vector<Matrix> states;

    int size() const { return static_cast<int>(times.size()); }
    // index of a grid time, or throws when t is not on the grid
    int index_of_time(double t, double tol = 1e-9) const;
    void check_uniform_grid() const;  // verifies times[k] = times[0] + k dt
};

// Checkpoint layout: <stem>.json metadata sidecar next to one binary matrix
// file per sample, <stem>_000000.mat etc.
void save_trajectory(const std::filesystem::path& dir, const std::string& stem, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& dir, const std::string& stem);

}  // namespace slaterlab

#endif
