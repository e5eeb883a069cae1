#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "squeezelab/gaussian.hpp"

namespace sqz {

struct Step {
    enum class Kind { Rotate, Measure };
    Kind kind = Kind::Rotate;
    double theta = 0.0;  // Rotate
    int index = 0;  // Measure: pulse number, consecutive from 1
    bool recorded = true;
    int label = 0;  // Measure: time slot of the measurement in its protocol
};

struct MeasurementSequence {
    std::string name;
    std::vector<Step> steps;

    void validate() const;
    int n_measurements() const;

    // Measurements at the given time slots (ascending), free rotation by theta
    // per elapsed slot, no rotation before the first measurement.
    static MeasurementSequence slots(const std::vector<int>& slots, double theta, const std::string& name = "");
};

enum class ScatterOrder { AfterInteraction, BeforeInteraction };

struct LgParams {
    GaussParams gauss;
    bool scattering = true;  // apply scatter(exp(-eta N_L)) once per pulse
    ScatterOrder order = ScatterOrder::AfterInteraction;
};

struct SimResult {
    std::vector<int> labels;  // slot labels of the recorded measurements
    RMat cov;  // joint covariance of recorded S_y
    RVec mean;
};

// Runs the sequence and returns the joint distribution of the recorded meter
// outcomes. Projections are deferred: conditioning on earlier outcomes does
// not change the unconditional joint Gaussian of all outcomes.
SimResult simulate(const MeasurementSequence& seq, const LgParams& params);

double correlator_discrete(double A, double B, double C);
double orthant_prob(const Eigen::Matrix2d& G);
// E[f(y_i) f(y_j)] with f(y) = y/c on [-c,c] and sgn(y) outside.
double correlator_truncated(const Eigen::Matrix2d& G, double c);

struct PairCorrelator {
    double value = 0.0;
    std::vector<int> sequence;  // slots measured in the optimal sequence
};

using SlotPair = std::pair<int, int>;

// For every pair i<j of slots 1..n, the smallest correlator over all
// sequences that measure a subset of the slots containing i and j.
std::map<SlotPair, PairCorrelator> best_correlators(int n, double theta, const LgParams& p, double c = 0.0);

double k_n(double theta, int n, const LgParams& p, double c = 0.0);
double k_n_qubit(double theta, int n);

struct TripleResult {
    double k3 = 0.0;
    std::array<int, 3> triple{};
    std::array<std::vector<int>, 3> sequences;  // for (a,b), (b,c), (a,c)
};

TripleResult k3_triple(int n, double theta, const LgParams& p, double c = 0.0);

// A fixed LG test: for each correlator pair the sequence used to measure it,
// plus the reference sequence common to all of them.
struct Protocol {
    int n_quantities = 3;  // measurements entering the LG combination
    std::vector<int> reference;
    std::map<SlotPair, std::vector<int>> sequences;
};

// Triple (3,5,7) taken from the 7-measurement scheme.
Protocol protocol_k3_from7();

// Reference sequence plus the extra measurements of seq, each moved to zero
// delay right before the next reference measurement (dropped if none follows).
MeasurementSequence auxiliary_sequence(const std::vector<int>& reference, const std::vector<int>& seq, double theta);

// sum over the four sign outcomes of |P_aux(y_i,y_j) - P_ref(y_i,y_j)|.
double invasivity(const Protocol& pr, SlotPair pair, double theta, const LgParams& p);

struct KiResult {
    double k = 0.0;
    double ki = 0.0;
    std::map<SlotPair, double> correlators;
    std::map<SlotPair, double> invasivity;
};

KiResult ki_n(const Protocol& pr, double theta, const LgParams& p);

struct QndFom {
    double dX2_M = 0.0, dX2_S = 0.0, dX2_SgivenM = 0.0, r_A = 0.0;
    bool defined = true;
    std::string reason;
};

// Three pulses without rotation; phases referred to the atomic input,
// phi_i = S_y^(i) / (g <S_x^(i)>), J_0 = N_A / 4.
QndFom qnd_fom(const LgParams& p);

}  // namespace sqz
