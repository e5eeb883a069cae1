#pragma once

#include <string>
#include <vector>

#include "squeezelab/spin_ops.hpp"

namespace sqz {

// Initial transverse atomic variance: N_A j / 2 (coherent state) or N_A / 4
// (the J_0 normalization used by the QND figures of merit).
enum class TransverseVariance { CoherentState, QuarterNA };

struct GaussParams {
    double n_atoms = 2e6;
    double n_photons = 5e8;
    double g = 1e-7;  // coupling per pulse, interaction time absorbed
    double eta = 0.5e-9;  // scattering rate per photon
    double j_atom = 1.0;
    bool backaction = true;  // J_y^out = J_y + g <J_x> S_z
    TransverseVariance init_variance = TransverseVariance::CoherentState;

    void validate() const;
};

// Vector (J_x, J_y, J_z, S_x^(1), S_y^(1), S_z^(1), ...); pulses are 0-based.
struct GaussianState {
    GaussParams params;
    std::vector<std::string> labels;
    RVec mean;
    RMat cov;
    std::vector<bool> interacted, projected;

    int n_pulses() const { return static_cast<int>(interacted.size()); }
    static int jx() { return 0; }
    static int jy() { return 1; }
    static int jz() { return 2; }
    static int sx(int p) { return 3 * (p + 1); }
    static int sy(int p) { return 3 * (p + 1) + 1; }
    static int sz(int p) { return 3 * (p + 1) + 2; }

    // (Delta J_y)^2 (Delta J_z)^2 - <J_x>^2 / 4.
    double heisenberg_margin() const;
};

struct MeterRecord {
    int pulse_index = 0;
    bool recorded = false;
    double pre_projection_variance = 0.0;
    RVec cross_covariances;  // row of S_y^(i) before conditioning
};

GaussianState init_state(const GaussParams& params, int n_pulses);

// Rotation of the atomic spin about x by theta.
GaussianState rotate_atoms(const GaussianState& s, double theta);

GaussianState qnd_interact(const GaussianState& s, int pulse, double g);
inline GaussianState qnd_interact(const GaussianState& s, int pulse) { return qnd_interact(s, pulse, s.params.g); }

// Conditions the covariance on S_y of the pulse; the mean is left unchanged
// (outcomes are not sampled).
std::pair<GaussianState, MeterRecord> project_meter(const GaussianState& s, int pulse, bool record);

// Polarization loss with survival chi = exp(-eta N_L).
GaussianState scatter(const GaussianState& s, double chi);
double survival(const GaussParams& p);

// 1 / (1 + S J g^2) with S = N_L / 2, J = N_A j.
double conditional_squeezing(double n_atoms, double n_photons, double g, double j);

}  // namespace sqz
