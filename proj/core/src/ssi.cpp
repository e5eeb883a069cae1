#include "squeezelab/ssi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqz {

namespace {

double violation_eps(const MomentData& md) {
    return 1e-10 * std::max(1.0, md.n * md.n * md.j * md.j);
}

Mat3 euler_zyz(double a, double b, double c) {
    const Mat3 R = (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
                    Eigen::AngleAxisd(c, Vec3::UnitZ()))
                       .toRotationMatrix();
    return R.transpose();  // rows are the rotated axes
}

// Denominators at rounding level (relative to scale) leave a 0/0 ratio; those
// are reported as undefined.
NamedParam ratio(double num, double den, const char* why, double scale) {
    NamedParam p;
    p.slack = num - den;
    if (den > 1e-10 * scale && std::isfinite(num)) {
        p.value = num / den;
        p.defined = true;
    } else {
        p.reason = why;
    }
    return p;
}

}  // namespace

ModifiedMoments modified_moments(const MomentData& md) {
    ModifiedMoments mm;
    for (int k = 0; k < 3; ++k) {
        mm.jt2(k) = md.C(k, k) - md.local(k);
        mm.dt2(k) = mm.jt2(k) - md.mean(k) * md.mean(k);
    }
    return mm;
}

double compact_slack(const MomentData& md, unsigned subset) {
    const ModifiedMoments mm = modified_moments(md);
    double s = md.n * (md.n - 1) * md.j * md.j;
    for (int l = 0; l < 3; ++l) {
        if (subset & (1u << l))
            s += (md.n - 1) * mm.dt2(l);
        else
            s -= mm.jt2(l);
    }
    return s;
}

double SsiReport::min_slack() const { return *std::min_element(slacks.begin(), slacks.end()); }

SsiReport ssi_set_check(const MomentData& md, const Mat3& axes) {
    if (!is_orthogonal(axes, 1e-10)) throw std::invalid_argument("ssi_set_check: axes are not orthonormal");
    const MomentData r = rotated(md, axes);
    SsiReport rep;
    rep.axes = axes;
    for (unsigned I = 0; I < 8; ++I) rep.compact[I] = compact_slack(r, I);
    rep.slacks[0] = rep.compact[0];
    rep.slacks[1] = rep.compact[7];
    rep.slacks[2] = std::min({rep.compact[1], rep.compact[2], rep.compact[4]});
    rep.slacks[3] = std::min({rep.compact[3], rep.compact[5], rep.compact[6]});
    const double eps = violation_eps(md);
    for (int i = 0; i < 4; ++i) rep.violated[i] = rep.slacks[i] < -eps;
    return rep;
}

SsiReport ssi_search(const MomentData& md) {
    const double deg = M_PI / 180.0;
    double best = std::numeric_limits<double>::infinity();
    Vec3 arg(0, 0, 0);
    auto objective = [&](const Vec3& e) {
        return ssi_set_check(md, euler_zyz(e(0), e(1), e(2))).min_slack();
    };
    for (int a = 0; a < 36; ++a)
        for (int b = 0; b <= 18; ++b)
            for (int c = 0; c < 36; ++c) {
                const Vec3 e(a * 10 * deg, b * 10 * deg, c * 10 * deg);
                const double v = objective(e);
                if (v < best) {
                    best = v;
                    arg = e;
                }
            }
    // pattern search around the best grid point
    double step = 5 * deg;
    while (step > 1e-9) {
        bool moved = false;
        for (int k = 0; k < 3; ++k)
            for (double sgn : {1.0, -1.0}) {
                Vec3 e = arg;
                e(k) += sgn * step;
                const double v = objective(e);
                if (v < best) {
                    best = v;
                    arg = e;
                    moved = true;
                }
            }
        if (!moved) step /= 2;
    }
    return ssi_set_check(md, euler_zyz(arg(0), arg(1), arg(2)));
}

Mat3 z_matrix(const MomentData& md) {
    if (md.n < 2) throw std::invalid_argument("xi_G: needs N >= 2");
    const Mat3 X = (md.n - 1) * md.gamma() + md.C - md.n * md.n * md.Q;
    return X / (md.n - 1);
}

XiGResult xi_G(const MomentData& md) {
    const Mat3 Z = z_matrix(md);
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (Z + Z.transpose()));
    XiGResult r;
    r.eigenvalues = es.eigenvalues();
    r.eigenvectors = es.eigenvectors();
    r.trace_gamma = md.gamma().trace();
    double pos = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (r.eigenvalues(k) > 0) pos += r.eigenvalues(k);
        if (r.eigenvalues(k) < 0) r.squeezed_directions.push_back(r.eigenvectors.col(k));
    }
    r.value = (r.trace_gamma - pos) / (md.n * md.j);
    return r;
}

bool rotation_invariance_check(const MomentData& md, const Mat3& O, double tol) {
    if (!is_orthogonal(O, 1e-10)) throw std::invalid_argument("rotation_invariance_check: O is not orthogonal");
    return std::abs(xi_G(rotated(md, O)).value - xi_G(md).value) <= tol;
}

NamedParameters named_parameters(const MomentData& md, const Mat3& axes) {
    if (!is_orthogonal(axes, 1e-10)) throw std::invalid_argument("named_parameters: axes are not orthonormal");
    const MomentData r = rotated(md, axes);
    const ModifiedMoments mm = modified_moments(r);
    const double N = r.n, j = r.j;
    const Vec3& m = r.mean;
    const double pol_yz = m(1) * m(1) + m(2) * m(2);
    const double pol_xy = m(0) * m(0) + m(1) * m(1);
    const double tot = r.var(0) + r.var(1) + r.var(2);
    NamedParameters p;
    const double s2 = (N * j) * (N * j);
    p.xi_orig = ratio(2 * N * j * r.var(0), pol_yz, "no polarization orthogonal to x", s2);
    p.xi_ent_j = ratio(N * (mm.dt2(0) + N * j * j), pol_yz, "no polarization orthogonal to x", s2);
    p.xi_dicke_j = ratio((N - 1) * (mm.dt2(0) + N * j * j), mm.jt2(1) + mm.jt2(2),
                         "non-positive <J~_y^2> + <J~_z^2>", s2);
    p.xi_planar_j = ratio((N - 1) * (mm.dt2(0) + mm.dt2(1) + 2 * N * j * j), mm.jt2(2) + N * (N - 1) * j * j,
                          "non-positive <J~_z^2> + N(N-1)j^2", s2);
    p.xi_singlet_j = ratio(tot, N * j, "N j must be positive", N * j);
    p.xi_T = p.xi_singlet_j;
    p.xi_P = ratio(N * j * (r.var(0) + r.var(1)), pol_xy, "no polarization in the x-y plane", s2);
    return p;
}

HalfSpinImage map_half_to_j(const Vec3& mean, const Vec3& jt2, double j) {
    if (!(j > 0)) throw std::invalid_argument("map_half_to_j: j must be positive");
    return HalfSpinImage{mean / (2 * j), jt2 / (4 * j * j)};
}

MomentData half_spin_moments(const HalfSpinImage& img, double N, const Mat3& offdiag_C) {
    MomentData md;
    md.n = N;
    md.j = 0.5;
    md.mean = img.mean;
    md.Q = 0.25 * Mat3::Identity();
    md.C = offdiag_C;
    for (int k = 0; k < 3; ++k) md.C(k, k) = img.jt2(k) + N / 4;
    sync_local(md);
    return md;
}

double FluctuatingEnsemble::mean_n() const {
    double s = 0;
    for (const auto& c : components) s += c.weight * c.md.n;
    return s;
}

void FluctuatingEnsemble::validate() const {
    if (components.empty()) throw std::invalid_argument("ensemble: no components");
    double w = 0;
    for (const auto& c : components) {
        if (c.weight < 0) throw std::invalid_argument("ensemble: negative weight");
        if (c.md.n < 2) throw std::invalid_argument("ensemble: component with N < 2");
        if (c.md.j != components.front().md.j) throw std::invalid_argument("ensemble: components differ in j");
        sqz::validate(c.md);
        w += c.weight;
    }
    if (std::abs(w - 1) > 1e-12) throw std::invalid_argument("ensemble: weights do not sum to 1");
}

double xi_G_fluctuating(const FluctuatingEnsemble& ens) {
    ens.validate();
    Vec3 mean = Vec3::Zero();
    Mat3 C = Mat3::Zero(), mixed = Mat3::Zero(), QQ = Mat3::Zero();
    for (const auto& c : ens.components) {
        const double n = c.md.n;
        mean += c.weight * c.md.mean;
        C += c.weight * c.md.C;
        mixed += c.weight * c.md.C / (n - 1);
        QQ += c.weight * n * n * c.md.Q / (n - 1);
    }
    const Mat3 gamma = C - mean * mean.transpose();
    const Mat3 Z = gamma + mixed - QQ;
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (Z + Z.transpose()));
    double pos = 0;
    for (int k = 0; k < 3; ++k) pos += std::max(0.0, es.eigenvalues()(k));
    return (gamma.trace() - pos) / (ens.mean_n() * ens.components.front().md.j);
}

TiChain TiChain::from_distance(int n, double j, const std::array<RVec, 3>& corr_d, const Vec3& site_mean) {
    if (n < 2) throw std::invalid_argument("TiChain: needs N >= 2");
    TiChain ch;
    ch.n = n;
    ch.j = j;
    for (int l = 0; l < 3; ++l) {
        if (corr_d[l].size() != n - 1) throw std::invalid_argument("TiChain: C_l(d) needs N-1 entries");
        ch.corr[l] = RMat::Zero(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) ch.corr[l](a, b) = corr_d[l](((b - a) % n + n) % n - 1);
        ch.means[l] = RVec::Constant(n, site_mean(l));
    }
    return ch;
}

TiMoments ti_moments(const TiChain& ch, double q) {
    const int n = ch.n;
    TiMoments t;
    for (int l = 0; l < 3; ++l) {
        const RMat& c = ch.corr[l];
        if (c.rows() != n || c.cols() != n || ch.means[l].size() != n)
            throw std::invalid_argument("ti_moments: inconsistent chain dimensions");
        if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("ti_moments: correlation matrix is not symmetric");
        double s = 0;
        cplx f = 0;
        for (int a = 0; a < n; ++a) {
            f += std::polar(1.0, q * a) * ch.means[l](a);
            for (int b = 0; b < n; ++b)
                if (a != b) s += std::cos(q * (a - b)) * c(a, b);
        }
        t.jt2(l) = s;
        t.dt2(l) = s - std::norm(f);
    }
    return t;
}

double ti_ssi_check(const TiChain& ch, double q, unsigned subset) {
    const TiMoments t = ti_moments(ch, q);
    const double N = ch.n;
    double s = N * (N - 1) * ch.j * ch.j;
    for (int l = 0; l < 3; ++l) s += (subset & (1u << l)) ? (N - 1) * t.dt2(l) : -t.jt2(l);
    return s;
}

double sud_ssi_check(const SudMoments& m, const std::vector<bool>& subset) {
    const Eigen::Index g = static_cast<Eigen::Index>(m.d) * m.d - 1;
    if (m.d < 2 || m.mean.size() != g || m.second.size() != g || m.local.size() != g ||
        static_cast<Eigen::Index>(subset.size()) != g)
        throw std::invalid_argument("sud_ssi_check: expected d^2-1 generator entries");
    const double N = m.n;
    double s = 2 * N * (N - 1) * (m.d - 1) / m.d;
    for (Eigen::Index k = 0; k < g; ++k) {
        const double gt2 = m.second(k) - m.local(k);
        s += subset[k] ? (N - 1) * (gt2 - m.mean(k) * m.mean(k)) : -gt2;
    }
    return s;
}

double linear_depth_check(const MomentData& md, int k) {
    const double N = md.n;
    if (k < 1 || k >= N) throw std::invalid_argument("linear_depth_check: k must satisfy 1 <= k < N");
    const ModifiedMoments mm = modified_moments(md);
    const double f = (N - k) / (N - 1);
    return ((N - k) / k) * (f * mm.jt2(2) - md.mean(2) * md.mean(2)) - f * (mm.jt2(0) + mm.jt2(1)) +
           N * (N - k) * md.j * md.j;
}

TwoBodyForm two_body_form(const MomentData& md) {
    const double N = md.n;
    if (N < 2) throw std::invalid_argument("two_body_form: needs N >= 2");
    const ModifiedMoments mm = modified_moments(md);
    TwoBodyForm t;
    t.corr = mm.jt2 / (N * (N - 1));
    t.mean = md.mean / N;
    t.sigma = t.corr.sum();
    for (unsigned I = 0; I < 8; ++I) {
        double s = -(t.sigma - md.j * md.j);
        for (int l = 0; l < 3; ++l)
            if (I & (1u << l)) s += N * (t.corr(l) - t.mean(l) * t.mean(l));
        t.slack[I] = s;
    }
    return t;
}

PptResult ppt_symmetric_check(const RMat& corr, const RVec& mean) {
    if (corr.rows() != corr.cols() || corr.rows() != mean.size() || mean.size() == 0)
        throw std::invalid_argument("ppt_symmetric_check: inconsistent dimensions");
    if ((corr - corr.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("ppt_symmetric_check: correlations of a symmetric state must be symmetric");
    // <A(x)A> - <A(x)1>^2 = a^T (T - m m^T) a for A = a0 + sum a_k b_k
    const RMat M = corr - mean * mean.transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (M + M.transpose()));
    return PptResult{es.eigenvalues()(0), es.eigenvectors().col(0)};
}

PptResult ppt_symmetric_check(const CMat& rho) {
    const Eigen::Index D = rho.rows();
    const int d = static_cast<int>(std::lround(std::sqrt(double(D))));
    if (rho.cols() != D || d * d != D || d < 2) throw std::invalid_argument("ppt_symmetric_check: rho must be d^2 x d^2");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("ppt_symmetric_check: rho not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw std::invalid_argument("ppt_symmetric_check: rho not normalized");
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    if (es.eigenvalues()(0) < -1e-10) throw std::invalid_argument("ppt_symmetric_check: rho not positive");
    CMat swap = CMat::Zero(D, D);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) swap(b * d + a, a * d + b) = 1.0;
    if ((swap * rho * swap - rho).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("ppt_symmetric_check: rho is not permutation symmetric");
    const GeneratorBasis gb = gellmann_basis(d);
    const Eigen::Index g = static_cast<Eigen::Index>(gb.generators.size());
    const CMat id = CMat::Identity(d, d);
    auto kron = [d](const CMat& A, const CMat& B) {
        CMat K(d * d, d * d);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) K.block(i * d, k * d, d, d) = A(i, k) * B;
        return K;
    };
    RMat T(g, g);
    RVec m(g);
    for (Eigen::Index k = 0; k < g; ++k) {
        m(k) = (rho * kron(gb.generators[k], id)).trace().real();
        for (Eigen::Index l = 0; l < g; ++l) T(k, l) = (rho * kron(gb.generators[k], gb.generators[l])).trace().real();
    }
    T = 0.5 * (T + T.transpose());
    return ppt_symmetric_check(T, m);
}

double concurrence_symmetric(double xx, double yy, double zz, double mz) {
    const double c1 = std::abs(xx + yy) - std::sqrt(std::max(0.0, (1 + zz) * (1 + zz) - 4 * mz * mz));
    const double c2 = std::abs(xx - yy) - std::abs(1 - zz);
    return 0.5 * std::max({0.0, c1, c2});
}

}  // namespace sqz
