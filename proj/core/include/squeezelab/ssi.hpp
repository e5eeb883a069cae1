#pragma once

#include <array>
#include <string>
#include <vector>

#include "squeezelab/moments.hpp"
#include "squeezelab/spin_ops.hpp"

namespace sqz {

struct ModifiedMoments {
    Vec3 jt2;  // <J~_k^2> = <J_k^2> - sum_n <(j_k^(n))^2>
    Vec3 dt2;  // <J~_k^2> - <J_k>^2
};

ModifiedMoments modified_moments(const MomentData& md);

// Subset I is a bitmask over the axes of md's frame (bit k set <=> k in I).
// Returns (N-1) sum_{l in I} dt2_l - sum_{l notin I} jt2_l + N(N-1) j^2.
double compact_slack(const MomentData& md, unsigned subset);

// Named inequalities: 0 = second-moment sum (I empty), 1 = total variance
// (I = all), 2 = Dicke type (I = {m}), 3 = planar type (I = {k,l}).
// Entries 2 and 3 are minimized over the axis choice within the frame.
struct SsiReport {
    std::array<double, 4> slacks{};
    std::array<bool, 4> violated{};
    std::array<double, 8> compact{};
    Mat3 axes = Mat3::Identity();

    double min_slack() const;
};

// Rows of axes form the frame; must be orthonormal to 1e-10.
SsiReport ssi_set_check(const MomentData& md, const Mat3& axes);

// Frame that minimizes the smallest named slack: 10 degree Euler grid
// followed by a local descent.
SsiReport ssi_search(const MomentData& md);

struct XiGResult {
    double value = 0.0;
    Vec3 eigenvalues = Vec3::Zero();  // ascending
    Mat3 eigenvectors = Mat3::Identity();  // columns match eigenvalues
    std::vector<Vec3> squeezed_directions;
    double trace_gamma = 0.0;
};

// The matrix (N-1) Gamma + C - N^2 Q divided by N-1.
Mat3 z_matrix(const MomentData& md);
XiGResult xi_G(const MomentData& md);

bool rotation_invariance_check(const MomentData& md, const Mat3& O, double tol = 1e-8);

// Parameter value or a tag explaining why it does not apply.
struct NamedParam {
    double value = 0.0;
    bool defined = false;
    std::string reason;
    // numerator - denominator: negative exactly when the parameter is below
    // one, and well conditioned where the ratio is 0/0.
    double slack = 0.0;
};

struct NamedParameters {
    NamedParam xi_orig, xi_ent_j, xi_dicke_j, xi_planar_j, xi_singlet_j, xi_P, xi_T;
};

// Evaluated in the frame given by the rows of axes (x = first row).
NamedParameters named_parameters(const MomentData& md, const Mat3& axes = Mat3::Identity());

// Spin-1/2 reference quantities for N spin-j particles.
struct HalfSpinImage {
    Vec3 mean;
    Vec3 jt2;
};

HalfSpinImage map_half_to_j(const Vec3& mean, const Vec3& jt2, double j);

// Moments of N spin-1/2 particles with the given image (local moments N/4).
MomentData half_spin_moments(const HalfSpinImage& img, double N, const Mat3& offdiag_C = Mat3::Zero());

struct FluctuatingEnsemble {
    struct Component {
        double weight = 0.0;
        MomentData md;
    };
    std::vector<Component> components;

    double mean_n() const;
    void validate() const;
};

double xi_G_fluctuating(const FluctuatingEnsemble& ens);

// Chain data for the translationally invariant inequalities.
struct TiChain {
    int n = 0;
    double j = 0.5;
    std::array<RMat, 3> corr;  // <j_l^(n) j_l^(m)>, n != m entries used
    std::array<RVec, 3> means;  // <j_l^(n)>

    // Periodic chain from a distance-dependent correlation C_l(d), d = 1..N-1.
    static TiChain from_distance(int n, double j, const std::array<RVec, 3>& corr_d,
                                 const Vec3& site_mean);
};

struct TiMoments {
    Vec3 jt2;  // <(J~_TI)_l^2>(q)
    Vec3 dt2;
};

TiMoments ti_moments(const TiChain& chain, double q);
double ti_ssi_check(const TiChain& chain, double q, unsigned subset);

// su(d) inequalities with generators normalized Tr(g_k g_l) = 2 delta_kl.
struct SudMoments {
    int n = 0;
    int d = 2;
    RVec mean;  // <G_k>
    RVec second;  // <G_k^2>
    RVec local;  // sum_n <(g_k^(n))^2>
};

double sud_ssi_check(const SudMoments& m, const std::vector<bool>& subset);

// Coarse-grained depth inequality, z axis of md's frame. Negative => depth > k.
double linear_depth_check(const MomentData& md, int k);

struct TwoBodyForm {
    Vec3 corr;  // <j_l (x) j_l>_av2
    Vec3 mean;  // <j_l (x) 1>_av2
    double sigma = 0.0;
    std::array<double, 8> slack{};  // N sum_{l in I}(corr - mean^2) - (sigma - j^2)
};

TwoBodyForm two_body_form(const MomentData& md);

// Worst value of <A(x)A> - <A(x)1>^2 over Hermitian A spanned by a local
// basis, from the symmetric av2 correlations T_kl = <b_k (x) b_l> and means.
// Negative means the symmetric two-particle state is not PPT.
struct PptResult {
    double min_value = 0.0;
    RVec worst_direction;
};

PptResult ppt_symmetric_check(const RMat& corr, const RVec& mean);

// Two-body density matrix (d^2 x d^2) version; A ranges over all Hermitian
// operators. Throws if rho is not a valid symmetric density matrix.
PptResult ppt_symmetric_check(const CMat& rho_av2);

double concurrence_symmetric(double corr_xx, double corr_yy, double corr_zz, double mean_z);

}  // namespace sqz
