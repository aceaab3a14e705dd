#pragma once

#include "qclt/grid.hpp"

#include <string>
#include <vector>

namespace qclt {

struct PotentialSpec {
    std::string kind = "gaussian"; // gaussian | soft-coulomb | box | custom-table
    double amplitude = 1.0;
    double width = 1.0;     // gaussian
    double softening = 0.5; // soft-coulomb
    double radius = 1.0;    // box
    std::vector<double> table; // custom-table
};

struct ObservableSpec {
    std::string kind = "cosine"; // cosine | gaussian-window | custom
    int harmonic = 1;            // cosine
    double center = 0.0;         // gaussian-window
    double width = 1.0;          // gaussian-window
    std::vector<std::vector<double>> matrix; // custom, 2M x M of re,im pairs rows
};

struct InitialStateSpec {
    std::string kind = "gaussian-bump"; // gaussian-bump | constant | custom
    double center = 0.0;
    double width = 1.0;
    std::vector<std::vector<double>> values; // custom: rows [re, im]
};

struct Tolerances {
    double mass = 1e-9;
    double energy = 1e-6;
    double symplectic_ceiling = 1e-3;
    double krylov = 1e-12;
    double hermiticity = 1e-10;
};

struct RunConfig {
    std::string scenario = "standard";
    int grid_dim = 1;
    int grid_points = 4;
    double grid_length = 4.0;
    PotentialSpec potential;
    double kappa = 1.0;
    double horizon = 0.5;
    double dt = 1e-3;
    int sample_stride = 1;
    std::vector<int> sweep = {4, 8, 12};
    ObservableSpec observable;
    InitialStateSpec initial_state;
    int k_max = 4;
    std::string centering = "hartree"; // hartree | reduced
    Tolerances tolerances;
    int truncation_factor = 4; // nmax = truncation_factor * N for Fock oracles
    std::uint64_t seed = 12345;
    std::string output_dir = "runs/out";

    void validate() const;
};

RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

/// The repo's standard desk scenario (M = 4 ring, bounded Gaussian V).
RunConfig standard_config();

// Builders for the scientific objects a config describes.
Grid make_grid(const RunConfig& cfg);
PairPotential make_potential(const RunConfig& cfg, const Grid& g);
MatC make_observable(const RunConfig& cfg, const Grid& g);
WaveFunction make_initial_state(const RunConfig& cfg, const Grid& g);

} // namespace qclt
