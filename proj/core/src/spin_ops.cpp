#include "squeezelab/spin_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqz {

bool is_half_integer(double J) {
    if (!(J >= 0.0) || !std::isfinite(J)) return false;
    double twice = 2.0 * J;
    return std::abs(twice - std::round(twice)) < 1e-9;
}

int spin_dim(double J) {
    if (!is_half_integer(J))
        throw std::invalid_argument("spin must be a non-negative half-integer, got " + std::to_string(J));
    return static_cast<int>(std::lround(2.0 * J)) + 1;
}

SpinOperatorSet spin_matrices(double J) {
    const int dim = spin_dim(J);
    J = 0.5 * (dim - 1);
    SpinOperatorSet ops;
    ops.J = J;
    ops.dim = dim;
    CMat jp = CMat::Zero(dim, dim);
    ops.jz = CMat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = J - i;
        ops.jz(i, i) = m;
        // J_+ |J,m> = sqrt(J(J+1) - m(m+1)) |J,m+1>; row i-1 holds m+1
        if (i > 0) jp(i - 1, i) = std::sqrt(J * (J + 1) - m * (m + 1));
    }
    const CMat jm = jp.adjoint();
    ops.jx = 0.5 * (jp + jm);
    ops.jy = cplx(0.0, -0.5) * (jp - jm);
    return ops;
}

GeneratorBasis gellmann_basis(int d) {
    if (d < 2) throw std::invalid_argument("gellmann_basis needs d >= 2");
    GeneratorBasis basis;
    basis.d = d;
    // symmetric and antisymmetric off-diagonal generators
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            CMat s = CMat::Zero(d, d);
            s(a, b) = 1.0;
            s(b, a) = 1.0;
            basis.generators.push_back(s);
            CMat t = CMat::Zero(d, d);
            t(a, b) = cplx(0.0, -1.0);
            t(b, a) = cplx(0.0, 1.0);
            basis.generators.push_back(t);
        }
    }
    // diagonal generators
    for (int l = 1; l < d; ++l) {
        CMat g = CMat::Zero(d, d);
        const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int k = 0; k < l; ++k) g(k, k) = norm;
        g(l, l) = -l * norm;
        basis.generators.push_back(g);
    }
    return basis;
}

void fix_phase(CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = std::abs(v(i));
        if (r > 1e-12) {
            v *= std::conj(v(i)) / r;
            v(i) = cplx(v(i).real(), 0.0);
            return;
        }
    }
}

GroundState ground_state(const CMat& H) {
    if (H.rows() != H.cols() || H.rows() == 0)
        throw std::invalid_argument("ground_state: matrix must be square and non-empty");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("ground_state: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");
    GroundState gs;
    gs.energy = es.eigenvalues()(0);
    gs.vector = es.eigenvectors().col(0);
    gs.vector.normalize();
    fix_phase(gs.vector);
    return gs;
}

GroundState ground_state_tridiagonal(const RVec& diag, const RVec& offdiag) {
    const Eigen::Index n = diag.size();
    if (n == 0 || offdiag.size() != std::max<Eigen::Index>(n - 1, 0))
        throw std::invalid_argument("ground_state_tridiagonal: inconsistent sizes");
    GroundState gs;
    if (n == 1) {
        gs.energy = diag(0);
        gs.vector = CVec::Ones(1);
        return gs;
    }
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver failed");
    gs.energy = es.eigenvalues()(0);
    gs.vector = es.eigenvectors().col(0).cast<cplx>();
    gs.vector.normalize();
    fix_phase(gs.vector);
    return gs;
}

CMat unitary_from_hermitian(const CMat& H, double t) {
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    const RVec& w = es.eigenvalues();
    CVec phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(cplx(0.0, -t * w(i)));
    const CMat& V = es.eigenvectors();
    return V * phases.asDiagonal() * V.adjoint();
}

CVec rotate_state(const CVec& state, const Eigen::Vector3d& axis, double angle,
                  const SpinOperatorSet& ops) {
    if (state.size() != ops.dim) throw std::invalid_argument("rotate_state: dimension mismatch");
    const double n = axis.norm();
    if (n == 0.0) throw std::invalid_argument("rotate_state: zero axis");
    if (angle == 0.0) return state;
    const Eigen::Vector3d u = axis / n;
    const CMat gen = u.x() * ops.jx + u.y() * ops.jy + u.z() * ops.jz;
    CVec out = unitary_from_hermitian(gen, angle) * state;
    out.normalize();
    return out;
}

double expectation(const CMat& op, const CVec& psi) {
    return psi.dot(op * psi).real();
}

double variance(const CMat& op, const CVec& psi) {
    const CVec v = op * psi;
    const double m = psi.dot(v).real();
    return v.squaredNorm() - m * m;
}

}  // namespace sqz
