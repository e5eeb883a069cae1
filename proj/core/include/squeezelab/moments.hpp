#pragma once

#include <Eigen/Dense>

namespace sqz {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// First and second collective-spin moments of an N-particle spin-j state.
//   C     symmetrized second moments 1/2 <{J_k, J_l}>
//   Q     particle-averaged local moments (1/N) sum_n 1/2 <{j_k^(n), j_l^(n)}>
//   local sum_n <(j_k^(n))^2>, i.e. N * diag(Q) when Q is exact
struct MomentData {
    double n = 0.0;
    double j = 0.5;
    Vec3 mean = Vec3::Zero();
    Mat3 C = Mat3::Zero();
    Mat3 Q = Mat3::Zero();
    Vec3 local = Vec3::Zero();

    Mat3 gamma() const { return C - mean * mean.transpose(); }
    double second_moment(int k) const { return C(k, k); }
    double var(int k) const { return C(k, k) - mean(k) * mean(k); }
};

// Throws std::invalid_argument when a type invariant is broken (see README).
void validate(const MomentData& md);

// Moments expressed in a new frame: rows of O are the new axes.
MomentData rotated(const MomentData& md, const Mat3& O);

// Fills local from Q (local = N diag Q).
void sync_local(MomentData& md);

// White noise rho -> (1-p) rho + p I/(2j+1)^N at the level of moments.
MomentData mix_white_noise(const MomentData& md, double p);

// Mixture sum_i w_i md_i of states with the same N and j.
MomentData mix(const MomentData& a, const MomentData& b, double wa);

// Rotation taking e_z to the unit vector n.
Mat3 rotation_from_z(const Vec3& n);

bool is_orthogonal(const Mat3& O, double tol = 1e-10);

}  // namespace sqz
