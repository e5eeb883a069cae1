#include "squeezelab/states.hpp"

#include <cmath>
#include <stdexcept>

namespace sqz {

namespace {

void require_particles(int N) {
    if (N < 1) throw std::invalid_argument("number of particles must be positive");
}

bool integer_valued(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

MomentData css_moments(int N, double j, const Vec3& axis) {
    require_particles(N);
    if (axis.norm() == 0.0) throw std::invalid_argument("css_moments: zero axis");
    spin_dim(j);
    MomentData md;
    md.n = N;
    md.j = j;
    md.mean = Vec3(0, 0, N * j);
    md.C = Vec3(N * j / 2, N * j / 2, double(N) * N * j * j).asDiagonal();
    md.Q = Vec3(j / 2, j / 2, j * j).asDiagonal();
    const Mat3 R = rotation_from_z(axis);
    md = rotated(md, R);
    return md;
}

MomentData dicke_moments(int N, int m, const Vec3& axis) {
    require_particles(N);
    if (m < 0 || m > N) throw std::invalid_argument("dicke_moments: m out of range");
    const double J = N / 2.0;
    const double M = m - J;
    MomentData md;
    md.n = N;
    md.j = 0.5;
    md.mean = Vec3(0, 0, M);
    const double perp = (J * (J + 1) - M * M) / 2;
    md.C = Vec3(perp, perp, M * M).asDiagonal();
    md.Q = 0.25 * Mat3::Identity();
    return rotated(md, rotation_from_z(axis));
}

MomentData dicke_moments_spin_j(int N, double j) {
    require_particles(N);
    spin_dim(j);
    const double Nj = N * j;
    if (!integer_valued(Nj)) throw std::invalid_argument("dicke_moments_spin_j: N j must be an integer");
    if (2 * Nj - 1 <= 0) throw std::invalid_argument("dicke_moments_spin_j: needs 2 N j > 1");
    MomentData md;
    md.n = N;
    md.j = j;
    md.C = Vec3(Nj * (Nj + 1) / 2, Nj * (Nj + 1) / 2, 0.0).asDiagonal();
    const double qzz = (N - 1) * j * j / (2 * Nj - 1);
    const double qperp = (j * (j + 1) - qzz) / 2;
    md.Q = Vec3(qperp, qperp, qzz).asDiagonal();
    sync_local(md);
    return md;
}

MomentData singlet_moments(int N, double j) {
    require_particles(N);
    spin_dim(j);
    if (!integer_valued(N * j)) throw std::invalid_argument("singlet_moments: N j must be an integer");
    MomentData md;
    md.n = N;
    md.j = j;
    md.Q = (j * (j + 1) / 3) * Mat3::Identity();
    sync_local(md);
    return md;
}

MomentData polarized_sss_moments(int N, double xi2) {
    require_particles(N);
    if (!(xi2 > 0.0)) throw std::invalid_argument("polarized_sss_moments: xi2 must be positive");
    const double vx = xi2 * N / 4, vy = N / (4 * xi2);
    const double jz2 = N * N / 4.0 + N / 2.0 - vx - vy;
    if (jz2 < 0) throw std::invalid_argument("polarized_sss_moments: xi2 too extreme for N");
    MomentData md;
    md.n = N;
    md.j = 0.5;
    md.mean = Vec3(0, 0, std::sqrt(jz2));
    md.C = Vec3(vx, vy, jz2).asDiagonal();
    md.Q = 0.25 * Mat3::Identity();
    sync_local(md);
    return md;
}

MomentData symmetric_qubit_moments(const StateVector& s, int N) {
    const SpinOperatorSet ops = spin_matrices(N / 2.0);
    if (s.amplitudes.size() != ops.dim) throw std::invalid_argument("state dimension does not match N+1");
    const CMat* J[3] = {&ops.jx, &ops.jy, &ops.jz};
    CVec applied[3];
    MomentData md;
    md.n = N;
    md.j = 0.5;
    for (int k = 0; k < 3; ++k) {
        applied[k] = (*J[k]) * s.amplitudes;
        md.mean(k) = s.amplitudes.dot(applied[k]).real();
    }
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) md.C(k, l) = applied[k].dot(applied[l]).real();
    md.Q = 0.25 * Mat3::Identity();
    sync_local(md);
    return md;
}

OatResult oat_state(int N, double chi_t, double field) {
    require_particles(N);
    if (N + 1 > 1024) throw std::invalid_argument("oat_state: symmetric dimension above 1024");
    const SpinOperatorSet ops = spin_matrices(N / 2.0);
    CVec psi = CVec::Zero(ops.dim);
    psi(0) = 1.0;
    if (chi_t != 0.0) {
        const CMat H = ops.jx * ops.jx + field * ops.jz;
        psi = unitary_from_hermitian(H, chi_t) * psi;
        psi.normalize();
    }
    OatResult r;
    r.state = StateVector{ops.J, psi};
    r.moments = symmetric_qubit_moments(r.state, N);
    return r;
}

StateVector extreme_state(double Jtot, double mu) {
    if (Jtot > 200) throw std::invalid_argument("extreme_state: J above 200");
    const SpinOperatorSet ops = spin_matrices(Jtot);
    const CMat H = ops.jx * ops.jx + mu * ops.jz;
    return StateVector{ops.J, ground_state(H).vector};
}

Mat3 adapted_frame(const MomentData& md) {
    const Mat3 G = md.gamma();
    const double len = md.mean.norm();
    if (len <= 1e-12 * std::max(1.0, md.n * md.j)) {
        Eigen::SelfAdjointEigenSolver<Mat3> es(G);
        Mat3 O = es.eigenvectors().transpose();
        if (O.determinant() < 0) O.row(2) *= -1.0;
        return O;
    }
    const Vec3 z = md.mean / len;
    // orthonormal basis of the plane perpendicular to z
    Vec3 a = z.unitOrthogonal();
    Vec3 b = z.cross(a);
    Eigen::Matrix2d P;
    P << a.dot(G * a), a.dot(G * b), b.dot(G * a), b.dot(G * b);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(P);
    const Eigen::Vector2d v = es.eigenvectors().col(0);
    const Vec3 x = (v(0) * a + v(1) * b).normalized();
    Mat3 O;
    O.row(0) = x.transpose();
    O.row(1) = z.cross(x).transpose();
    O.row(2) = z.transpose();
    return O;
}

}  // namespace sqz
