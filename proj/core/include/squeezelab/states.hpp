#pragma once

#include "squeezelab/moments.hpp"
#include "squeezelab/spin_ops.hpp"

namespace sqz {

// Collective state in the |J,m> basis (m descending).
struct StateVector {
    double total_J = 0.0;
    CVec amplitudes;
};

MomentData css_moments(int N, double j, const Vec3& axis);

// Symmetric spin-1/2 Dicke state |D_N^m> (m excitations), quantized along axis.
MomentData dicke_moments(int N, int m, const Vec3& axis = Vec3::UnitZ());

// Unpolarized spin-j Dicke state |Nj, 0>; requires N j integer and 2 N j > 1.
MomentData dicke_moments_spin_j(int N, double j);

MomentData singlet_moments(int N, double j);

// Moment-level model of a z-polarized spin-1/2 squeezed state: variance
// xi2 N/4 along x, N/(4 xi2) along y, <J_z> fixed by the Casimir of J = N/2.
MomentData polarized_sss_moments(int N, double xi2);

// Moments of an N-qubit state living in the symmetric sector (J = N/2).
MomentData symmetric_qubit_moments(const StateVector& s, int N);

struct OatResult {
    StateVector state;
    MomentData moments;
};

// |N/2, N/2>_z evolved under exp(-i chi_t (J_x^2 + field J_z)).
OatResult oat_state(int N, double chi_t, double field = 0.0);

// Ground state of J_x^2 + mu J_z. mu > 0 drives <J_z> negative.
StateVector extreme_state(double Jtot, double mu);

// Frame whose z axis is the mean spin and whose x axis is the direction of
// minimal variance orthogonal to it; rows are the axes. Falls back to the
// eigenframe of the covariance matrix when the state is unpolarized.
Mat3 adapted_frame(const MomentData& md);

}  // namespace sqz
