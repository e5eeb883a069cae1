#include "squeezelab/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqz {

void GaussParams::validate() const {
    if (!(n_atoms > 0) || !(n_photons > 0)) throw std::invalid_argument("gaussian: atom and photon numbers must be positive");
    if (!(g >= 0) || !(eta >= 0)) throw std::invalid_argument("gaussian: coupling and scattering rate must be non-negative");
    if (!(j_atom > 0) || !is_half_integer(j_atom)) throw std::invalid_argument("gaussian: atom spin must be a positive half-integer");
}

double GaussianState::heisenberg_margin() const {
    return cov(1, 1) * cov(2, 2) - 0.25 * mean(0) * mean(0);
}

GaussianState init_state(const GaussParams& p, int n_pulses) {
    p.validate();
    if (n_pulses < 0) throw std::invalid_argument("init_state: negative pulse count");
    GaussianState s;
    s.params = p;
    const int dim = 3 * (n_pulses + 1);
    s.mean = RVec::Zero(dim);
    s.cov = RMat::Zero(dim, dim);
    s.labels = {"Jx", "Jy", "Jz"};
    s.mean(0) = p.n_atoms * p.j_atom;
    const double tv = p.init_variance == TransverseVariance::CoherentState ? p.n_atoms * p.j_atom / 2 : p.n_atoms / 4;
    s.cov(1, 1) = s.cov(2, 2) = tv;
    for (int i = 0; i < n_pulses; ++i) {
        const std::string k = std::to_string(i + 1);
        s.labels.insert(s.labels.end(), {"Sx" + k, "Sy" + k, "Sz" + k});
        s.mean(GaussianState::sx(i)) = p.n_photons / 2;
        s.cov(GaussianState::sy(i), GaussianState::sy(i)) = p.n_photons / 4;
        s.cov(GaussianState::sz(i), GaussianState::sz(i)) = p.n_photons / 4;
    }
    s.interacted.assign(n_pulses, false);
    s.projected.assign(n_pulses, false);
    return s;
}

GaussianState rotate_atoms(const GaussianState& s, double theta) {
    if (theta == 0.0) return s;
    GaussianState out = s;
    const double c = std::cos(theta), sn = std::sin(theta);
    // only rows J_y, J_z mix: O = [[1,0,0],[0,c,-s],[0,s,c]] on the atomic block
    const RVec ry = s.cov.row(1), rz = s.cov.row(2);
    out.cov.row(1) = c * ry - sn * rz;
    out.cov.row(2) = sn * ry + c * rz;
    const RVec cy = out.cov.col(1), cz = out.cov.col(2);
    out.cov.col(1) = c * cy - sn * cz;
    out.cov.col(2) = sn * cy + c * cz;
    out.mean(1) = c * s.mean(1) - sn * s.mean(2);
    out.mean(2) = sn * s.mean(1) + c * s.mean(2);
    return out;
}

GaussianState qnd_interact(const GaussianState& s, int pulse, double g) {
    if (pulse < 0 || pulse >= s.n_pulses()) throw std::out_of_range("qnd_interact: pulse index out of range");
    if (s.interacted[pulse] || s.projected[pulse]) throw std::logic_error("qnd_interact: pulse already consumed");
    GaussianState out = s;
    out.interacted[pulse] = true;
    if (g == 0.0) return out;
    const int dim = static_cast<int>(s.mean.size());
    RMat M = RMat::Identity(dim, dim);
    // S_y^out = S_y + g <S_x> J_z, J_y^out = J_y + g <J_x> S_z
    M(GaussianState::sy(pulse), 2) = g * s.mean(GaussianState::sx(pulse));
    if (s.params.backaction) M(1, GaussianState::sz(pulse)) = g * s.mean(0);
    out.mean = M * s.mean;
    out.cov = M * s.cov * M.transpose();
    return out;
}

std::pair<GaussianState, MeterRecord> project_meter(const GaussianState& s, int pulse, bool record) {
    if (pulse < 0 || pulse >= s.n_pulses()) throw std::out_of_range("project_meter: pulse index out of range");
    if (s.projected[pulse]) throw std::logic_error("project_meter: pulse already projected");
    const int k = GaussianState::sy(pulse);
    const double v = s.cov(k, k);
    if (!(v > 1e-12)) throw std::domain_error("project_meter: degenerate meter variance");
    MeterRecord rec;
    rec.pulse_index = pulse;
    rec.recorded = record;
    rec.pre_projection_variance = v;
    rec.cross_covariances = s.cov.row(k).transpose();
    GaussianState out = s;
    out.cov = s.cov - rec.cross_covariances * rec.cross_covariances.transpose() / v;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    out.projected[pulse] = true;
    return {out, rec};
}

double survival(const GaussParams& p) { return std::exp(-p.eta * p.n_photons); }

GaussianState scatter(const GaussianState& s, double chi) {
    if (!(chi > 0.0 && chi <= 1.0)) throw std::invalid_argument("scatter: chi must lie in (0, 1]");
    if (chi == 1.0) return s;
    GaussianState out = s;
    const double na = s.params.n_atoms;
    out.mean.head<3>() *= chi;
    out.cov.topRows<3>() *= chi;
    out.cov.leftCols<3>() *= chi;
    const double noise = chi * (1 - chi) * na / 2 + (1 - chi) * (2.0 / 3.0) * na;
    out.cov.topLeftCorner<3, 3>() += noise * Eigen::Matrix3d::Identity();
    return out;
}

double conditional_squeezing(double n_atoms, double n_photons, double g, double j) {
    if (!(n_atoms > 0) || !(n_photons > 0) || !(j > 0)) throw std::invalid_argument("conditional_squeezing: inputs must be positive");
    const double S = n_photons / 2, J = n_atoms * j;
    return 1.0 / (1.0 + S * J * g * g);
}

}  // namespace sqz
