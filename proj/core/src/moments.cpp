#include "squeezelab/moments.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>
#include <string>

#include "squeezelab/spin_ops.hpp"

namespace sqz {

namespace {

double max_asym(const Mat3& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

void validate(const MomentData& md) {
    if (!(md.n > 0.0)) throw std::invalid_argument("moments: N must be positive");
    if (!(md.j > 0.0) || !is_half_integer(md.j))
        throw std::invalid_argument("moments: j must be a positive half-integer");
    const double n2 = std::max(1.0, md.n * md.n);
    if (max_asym(md.C) > 1e-9 * n2) throw std::invalid_argument("moments: C is not symmetric");
    if (max_asym(md.Q) > 1e-9) throw std::invalid_argument("moments: Q is not symmetric");
    const double casimir = md.j * (md.j + 1.0);
    if (std::abs(md.Q.trace() - casimir) > 1e-9 * std::max(1.0, casimir))
        throw std::invalid_argument("moments: Tr Q = " + std::to_string(md.Q.trace()) +
                                    " differs from j(j+1) = " + std::to_string(casimir));
    if (md.mean.norm() > md.n * md.j + 1e-9)
        throw std::invalid_argument("moments: |<J>| exceeds N j");
    Eigen::SelfAdjointEigenSolver<Mat3> es(md.gamma());
    if (es.eigenvalues()(0) < -1e-9 * n2)
        throw std::invalid_argument("moments: covariance matrix is not positive semidefinite");
    if ((md.local - md.n * md.Q.diagonal()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, md.n))
        throw std::invalid_argument("moments: local second moments inconsistent with N diag(Q)");
}

void sync_local(MomentData& md) { md.local = md.n * md.Q.diagonal(); }

MomentData rotated(const MomentData& md, const Mat3& O) {
    MomentData out = md;
    out.mean = O * md.mean;
    out.C = O * md.C * O.transpose();
    out.Q = O * md.Q * O.transpose();
    sync_local(out);
    return out;
}

MomentData mix_white_noise(const MomentData& md, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("white noise weight must lie in [0,1]");
    const double c = md.j * (md.j + 1.0) / 3.0;
    MomentData out = md;
    out.mean = (1.0 - p) * md.mean;
    out.C = (1.0 - p) * md.C + p * md.n * c * Mat3::Identity();
    out.Q = (1.0 - p) * md.Q + p * c * Mat3::Identity();
    sync_local(out);
    return out;
}

MomentData mix(const MomentData& a, const MomentData& b, double wa) {
    if (a.n != b.n || a.j != b.j) throw std::invalid_argument("mix: N and j must agree");
    MomentData out = a;
    out.mean = wa * a.mean + (1.0 - wa) * b.mean;
    out.C = wa * a.C + (1.0 - wa) * b.C;
    out.Q = wa * a.Q + (1.0 - wa) * b.Q;
    sync_local(out);
    return out;
}

Mat3 rotation_from_z(const Vec3& n) {
    const double len = n.norm();
    if (len == 0.0) throw std::invalid_argument("zero axis");
    const Vec3 u = n / len;
    return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), u).toRotationMatrix();
}

bool is_orthogonal(const Mat3& O, double tol) {
    return (O * O.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < tol;
}

}  // namespace sqz
