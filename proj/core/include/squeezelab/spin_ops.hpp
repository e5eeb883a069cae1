#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace sqz {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Spin matrices in the |J,m> basis with m descending, [Ja,Jb] = i eps_abc Jc.
struct SpinOperatorSet {
    double J = 0.0;
    int dim = 0;
    CMat jx, jy, jz;
};

struct GeneratorBasis {
    int d = 0;
    std::vector<CMat> generators;  // Tr(g_k g_l) = 2 delta_kl
};

struct GroundState {
    double energy = 0.0;
    CVec vector;
};

// True when 2J is a non-negative integer (to 1e-9).
bool is_half_integer(double J);
int spin_dim(double J);

SpinOperatorSet spin_matrices(double J);
GeneratorBasis gellmann_basis(int d);

GroundState ground_state(const CMat& H);

// Lowest eigenpair of a real symmetric tridiagonal matrix given by its
// diagonal and off-diagonal.
GroundState ground_state_tridiagonal(const RVec& diag, const RVec& offdiag);

// exp(-i angle (axis . J)) |state>.
CVec rotate_state(const CVec& state, const Eigen::Vector3d& axis, double angle,
                  const SpinOperatorSet& ops);

// exp(-i t H) for Hermitian H, via eigendecomposition.
CMat unitary_from_hermitian(const CMat& H, double t);

double expectation(const CMat& op, const CVec& psi);
double variance(const CMat& op, const CVec& psi);

// Fixes the global phase so the first entry with modulus > 1e-12 is real positive.
void fix_phase(CVec& v);

}  // namespace sqz
