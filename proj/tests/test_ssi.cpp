#include <doctest.h>

#include <cmath>
#include <random>

#include "squeezelab/oracle.hpp"
#include "squeezelab/ssi.hpp"
#include "squeezelab/states.hpp"
#include "test_util.hpp"

using namespace sqz;

namespace {

CMat kron(const CMat& a, const CMat& b) {
    CMat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index l = 0; l < a.cols(); ++l) k.block(i * b.rows(), l * b.cols(), b.rows(), b.cols()) = a(i, l) * b;
    return k;
}

// op acting on site n of N d-level sites, site 0 most significant.
CMat site_op(const CMat& op, int n, int N) {
    const Eigen::Index d = op.rows();
    CMat out = CMat::Identity(1, 1);
    for (int s = 0; s < N; ++s) out = kron(out, s == n ? op : CMat::Identity(d, d));
    return out;
}

double ev(const CMat& op, const CVec& psi) { return (psi.adjoint() * op * psi)(0, 0).real(); }

std::array<CMat, 3> half_ops() {
    const auto s = spin_matrices(0.5);
    return {s.jx, s.jy, s.jz};
}

// Random PI moment set: symmetric-sector state, possibly mixed with noise.
MomentData random_pi_moments(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(2, 30);
    std::normal_distribution<double> g;
    const int N = nd(rng);
    StateVector s;
    s.total_J = N / 2.0;
    s.amplitudes = CVec(N + 1);
    for (int i = 0; i <= N; ++i) s.amplitudes(i) = cplx(g(rng), g(rng));
    s.amplitudes.normalize();
    MomentData md = symmetric_qubit_moments(s, N);
    std::uniform_real_distribution<double> u(0, 1);
    if (u(rng) < 0.3) md = mix_white_noise(md, u(rng));
    return md;
}

oracle::ProductStateSample identical_product(int N, double j, std::mt19937_64& rng) {
    oracle::ProductStateSample p;
    const CVec f = oracle::random_pure_state(spin_dim(j), rng);
    p.factors.assign(N, f);
    return p;
}

}  // namespace

TEST_CASE("modified moments") {
    const auto css = css_moments(10, 0.5, Vec3::UnitZ());
    CHECK(modified_moments(css).jt2(2) == doctest::Approx(22.5).epsilon(1e-14));

    for (auto [N, j] : {std::pair{10, 0.5}, std::pair{6, 1.0}, std::pair{4, 1.5}}) {
        const auto mm = modified_moments(singlet_moments(N, j));
        for (int k = 0; k < 3; ++k) CHECK(mm.jt2(k) == doctest::Approx(-N * j * (j + 1) / 3).epsilon(1e-12));
    }

    // N=4 Dicke m=2 from the full 16-dim state
    CVec psi = CVec::Zero(16);
    for (int s = 0; s < 16; ++s)
        if (__builtin_popcount(s) == 2) psi(s) = 1.0;
    psi.normalize();
    const auto full = oracle::full_space_moments(psi, 4, 0.5);
    CHECK(modified_moments(full).jt2(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(modified_moments(dicke_moments(4, 2)).jt2(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("css saturates the set at the adapted frame and is never violated") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto md = css_moments(25, 1.0, testutil::random_unit(rng));
        const auto adapted = ssi_set_check(md, adapted_frame(md));
        for (double s : adapted.compact) CHECK(std::abs(s) < 1e-9 * 625);
        const auto other = ssi_set_check(md, testutil::random_rotation(rng));
        for (double s : other.compact) CHECK(s > -1e-9 * 625);
        for (bool v : other.violated) CHECK_FALSE(v);
    }
}

TEST_CASE("unpolarized dicke violates the dicke-type inequality") {
    const auto md = dicke_moments(100, 50);
    const auto rep = ssi_set_check(md, Mat3::Identity());
    CHECK(rep.violated[2]);
    CHECK(rep.slacks[2] < -1.0);
    // the violating axis is the quantization axis
    CHECK(rep.compact[4] == doctest::Approx(rep.slacks[2]));
    CHECK_FALSE(rep.violated[1]);
    for (int i = 0; i < 4; ++i) CHECK(rep.violated[i] == (rep.slacks[i] < 0));

    const auto s = ssi_set_check(singlet_moments(100, 0.5), Mat3::Identity());
    CHECK(s.violated[1]);
}

TEST_CASE("ssi_search finds violations hidden in a rotated frame") {
    std::mt19937_64 rng(5);
    const Mat3 O = testutil::random_rotation(rng);
    const auto md = rotated(dicke_moments(20, 10), O);
    const auto found = ssi_search(md);
    const auto direct = ssi_set_check(dicke_moments(20, 10), Mat3::Identity());
    CHECK(found.violated[2]);
    CHECK(found.slacks[2] <= direct.slacks[2] + 1e-6);
    CHECK(is_orthogonal(found.axes));
}

TEST_CASE("non-orthonormal frames are rejected") {
    Mat3 bad = Mat3::Identity();
    bad(0, 1) = 1e-3;
    const auto md = css_moments(4, 0.5, Vec3::UnitZ());
    CHECK_THROWS_AS(ssi_set_check(md, bad), std::invalid_argument);
    CHECK_THROWS_AS(rotation_invariance_check(md, 2 * Mat3::Identity()), std::invalid_argument);
    CHECK_THROWS_AS(named_parameters(md, bad), std::invalid_argument);
}

TEST_CASE("xi_G table values") {
    CHECK(std::abs(xi_G(singlet_moments(100, 0.5)).value) < 1e-12);
    CHECK(std::abs(xi_G(singlet_moments(8, 1.0)).value) < 1e-12);

    auto dicke_expect = [](double Nj) { return (Nj - 1) / (2 * Nj - 1); };
    CHECK(xi_G(dicke_moments(100, 50)).value == doctest::Approx(dicke_expect(50)).epsilon(1e-10));
    CHECK(xi_G(dicke_moments(8000, 4000)).value == doctest::Approx(dicke_expect(4000)).epsilon(1e-10));
    CHECK(xi_G(dicke_moments_spin_j(4000, 1.0)).value == doctest::Approx(3999.0 / 7999).epsilon(1e-10));

    for (double x2 : {0.25, 0.5}) {
        const auto r = xi_G(polarized_sss_moments(1000, x2));
        CHECK(std::abs(r.value - (1 + x2) / 2) < 2.0 / 1000);
        REQUIRE(!r.squeezed_directions.empty());
        CHECK(std::abs(r.squeezed_directions[0](0)) == doctest::Approx(1.0).epsilon(1e-9));
    }

    const auto css = xi_G(css_moments(50, 0.5, Vec3(1, 1, 0)));
    CHECK(css.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(css.squeezed_directions.empty());
    CHECK(css.eigenvalues(0) <= css.eigenvalues(1));
    CHECK(css.eigenvalues(1) <= css.eigenvalues(2));

    CHECK_THROWS_AS(xi_G(MomentData{}), std::invalid_argument);
}

TEST_CASE("xi_G is frame invariant") {
    std::mt19937_64 rng(9);
    const auto d = dicke_moments(30, 12, testutil::random_unit(rng));
    CHECK(xi_G(rotated(d, Mat3::Identity())).value == xi_G(d).value);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const Mat3 O = testutil::random_rotation(rng);
        worst = std::max(worst, std::abs(xi_G(rotated(d, O)).value - xi_G(d).value));
        CHECK(rotation_invariance_check(d, O));
    }
    CHECK(worst < 1e-8);
    Mat3 P;
    P << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    CHECK(rotation_invariance_check(d, P, 1e-12));
}

TEST_CASE("named parameters") {
    const auto css = css_moments(40, 0.5, Vec3::UnitZ());
    const auto p = named_parameters(css);
    REQUIRE(p.xi_orig.defined);
    CHECK(p.xi_orig.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.xi_ent_j.value == doctest::Approx(1.0).epsilon(1e-12));

    const auto s = named_parameters(singlet_moments(40, 1.0));
    CHECK(s.xi_singlet_j.defined);
    CHECK(std::abs(s.xi_singlet_j.value) < 1e-12);
    CHECK(std::abs(s.xi_T.value) < 1e-12);
    CHECK_FALSE(s.xi_orig.defined);
    CHECK_FALSE(s.xi_orig.reason.empty());

    Mat3 zx;
    zx << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    const auto d = named_parameters(dicke_moments(100, 50), zx);
    CHECK_FALSE(d.xi_ent_j.defined);
    CHECK(d.xi_dicke_j.defined);
    CHECK(d.xi_dicke_j.value < 1);

    // squeezed along x, polarized along z
    const auto sss = named_parameters(polarized_sss_moments(1000, 0.5));
    CHECK(sss.xi_orig.value < 1);
    CHECK(sss.xi_ent_j.value < 1);
}

TEST_CASE("half-spin mapping") {
    const Vec3 m(1, 2, 3), t(4, 5, 6);
    const auto id = map_half_to_j(m, t, 0.5);
    CHECK(id.mean == m);
    CHECK(id.jt2 == t);
    CHECK_THROWS_AS(map_half_to_j(m, t, 0), std::invalid_argument);

    const auto c = css_moments(12, 1.0, Vec3::UnitZ());
    const auto img = map_half_to_j(c.mean, modified_moments(c).jt2, 1.0);
    const auto half = half_spin_moments(img, 12);
    for (unsigned I = 0; I < 8; ++I) CHECK(std::abs(compact_slack(half, I)) < 1e-9);

    std::mt19937_64 rng(17);
    for (int t2 = 0; t2 < 1000; ++t2) {
        const int N = 2 + t2 % 4;
        oracle::SeparableSample s;
        for (int k = 0; k < 1 + t2 % 3; ++k) s.terms.push_back(oracle::random_product(N, 1.5, rng));
        s.weights.assign(s.terms.size(), 1.0 / s.terms.size());
        const auto md = oracle::separable_moments(s, 1.5);
        const auto im = map_half_to_j(md.mean, modified_moments(md).jt2, 1.5);
        const auto h = half_spin_moments(im, N);
        for (unsigned I = 0; I < 8; ++I) CHECK(compact_slack(h, I) > -1e-9 * N * N);
    }
}

TEST_CASE("fluctuating particle number") {
    const auto d = dicke_moments(20, 7, Vec3(0, 1, 1));
    FluctuatingEnsemble one{{{1.0, d}}};
    CHECK(xi_G_fluctuating(one) == doctest::Approx(xi_G(d).value).epsilon(1e-12));

    FluctuatingEnsemble singlets{{{0.5, singlet_moments(100, 0.5)}, {0.5, singlet_moments(102, 0.5)}}};
    CHECK(std::abs(xi_G_fluctuating(singlets)) < 1e-12);

    FluctuatingEnsemble cs;
    for (int N = 10; N <= 20; ++N) cs.components.push_back({1.0 / 11, css_moments(N, 0.5, Vec3(1, 0, 1))});
    CHECK(xi_G_fluctuating(cs) >= 1 - 1e-9);

    FluctuatingEnsemble bad{{{0.7, d}}};
    CHECK_THROWS_AS(xi_G_fluctuating(bad), std::invalid_argument);
    FluctuatingEnsemble small{{{1.0, css_moments(1, 0.5, Vec3::UnitZ())}}};
    CHECK_THROWS_AS(xi_G_fluctuating(small), std::invalid_argument);
    FluctuatingEnsemble mixed_j{{{0.5, css_moments(4, 0.5, Vec3::UnitZ())}, {0.5, css_moments(4, 1.0, Vec3::UnitZ())}}};
    CHECK_THROWS_AS(xi_G_fluctuating(mixed_j), std::invalid_argument);

    // separable ensembles stay above one
    std::mt19937_64 rng(23);
    for (int t = 0; t < 300; ++t) {
        FluctuatingEnsemble e;
        for (int N = 2; N <= 5; ++N) {
            oracle::SeparableSample s;
            s.terms = {oracle::random_product(N, 0.5, rng), oracle::random_product(N, 0.5, rng)};
            s.weights = {0.3, 0.7};
            e.components.push_back({0.25, oracle::separable_moments(s, 0.5)});
        }
        CHECK(xi_G_fluctuating(e) >= 1 - 1e-9);
    }
}

TEST_CASE("translation invariant set against the full 16-dim state") {
    // two singlet pairs (0,1) and (2,3)
    const int N = 4;
    CVec pair = CVec::Zero(4);
    pair(1) = 1 / std::sqrt(2.0);
    pair(2) = -1 / std::sqrt(2.0);
    CVec psi(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) psi(a * 4 + b) = pair(a) * pair(b);

    const auto ops = half_ops();
    TiChain ch;
    ch.n = N;
    ch.j = 0.5;
    for (int l = 0; l < 3; ++l) {
        ch.corr[l] = RMat::Zero(N, N);
        ch.means[l] = RVec::Zero(N);
        for (int a = 0; a < N; ++a) {
            ch.means[l](a) = ev(site_op(ops[l], a, N), psi);
            for (int b = 0; b < N; ++b)
                if (a != b) ch.corr[l](a, b) = ev(site_op(ops[l], a, N) * site_op(ops[l], b, N), psi);
        }
    }

    for (double q : {0.0, M_PI / 3, M_PI / 2, M_PI}) {
        // collective A_l = sum_n e^{iqn} j_l^(n)
        Vec3 jt2, dt2;
        for (int l = 0; l < 3; ++l) {
            CMat A = CMat::Zero(16, 16);
            double loc = 0;
            for (int n = 0; n < N; ++n) {
                const CMat s = site_op(ops[l], n, N);
                A += std::polar(1.0, q * n) * s;
                loc += ev(s * s, psi);
            }
            const cplx mean = (psi.adjoint() * A * psi)(0, 0);
            jt2(l) = ev(A.adjoint() * A, psi) - loc;
            dt2(l) = jt2(l) - std::norm(mean);
        }
        for (unsigned I = 0; I < 8; ++I) {
            double expect = N * (N - 1) * 0.25;
            for (int l = 0; l < 3; ++l) expect += (I & (1u << l)) ? (N - 1) * dt2(l) : -jt2(l);
            const double got = ti_ssi_check(ch, q, I);
            CHECK(got == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
            if (std::abs(expect) > 1e-9) CHECK((got < 0) == (expect < 0));
        }
    }
    CHECK(ti_ssi_check(ch, 0.0, 7) < 0);

    TiChain asym = ch;
    asym.corr[0](0, 1) += 0.1;
    CHECK_THROWS_AS(ti_moments(asym, 0.3), std::invalid_argument);
}

TEST_CASE("translation invariant set at q=0 matches the compact set") {
    std::mt19937_64 rng(31);
    const auto ops = half_ops();
    for (int t = 0; t < 20; ++t) {
        const int N = 3 + t % 3;
        const CVec psi = oracle::random_pure_state(1 << N, rng);
        TiChain ch;
        ch.n = N;
        ch.j = 0.5;
        for (int l = 0; l < 3; ++l) {
            ch.corr[l] = RMat::Zero(N, N);
            ch.means[l] = RVec::Zero(N);
            for (int a = 0; a < N; ++a) {
                ch.means[l](a) = ev(site_op(ops[l], a, N), psi);
                for (int b = 0; b < N; ++b)
                    if (a != b) ch.corr[l](a, b) = ev(site_op(ops[l], a, N) * site_op(ops[l], b, N), psi);
            }
        }
        const auto md = oracle::full_space_moments(psi, N, 0.5);
        for (unsigned I = 0; I < 8; ++I) CHECK(std::abs(ti_ssi_check(ch, 0.0, I) - compact_slack(md, I)) < 1e-9);
    }
}

TEST_CASE("translation invariant set holds for product chains") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> uq(-M_PI, M_PI);
    for (int t = 0; t < 1000; ++t) {
        const int N = 2 + t % 5;
        const double j = (t % 2) ? 1.0 : 0.5;
        const auto p = oracle::random_product(N, j, rng);
        const auto ops = spin_matrices(j);
        const std::array<const CMat*, 3> o{&ops.jx, &ops.jy, &ops.jz};
        TiChain ch;
        ch.n = N;
        ch.j = j;
        for (int l = 0; l < 3; ++l) {
            ch.means[l] = RVec(N);
            for (int a = 0; a < N; ++a) ch.means[l](a) = ev(*o[l], p.factors[a]);
            ch.corr[l] = ch.means[l] * ch.means[l].transpose();
        }
        const double q = uq(rng);
        for (unsigned I = 0; I < 8; ++I) CHECK(ti_ssi_check(ch, q, I) > -1e-9 * N * N);
    }
}

TEST_CASE("periodic chain from a correlation function") {
    std::array<RVec, 3> cd;
    for (auto& c : cd) c = RVec::Constant(3, 0.25);
    const auto ch = TiChain::from_distance(4, 0.5, cd, Vec3(0, 0, 0.5));
    // fully polarized product: q=0 compact set equals the z-CSS value
    const auto css = css_moments(4, 0.5, Vec3::UnitZ());
    std::array<RVec, 3> zonly{RVec::Zero(3), RVec::Zero(3), RVec::Constant(3, 0.25)};
    const auto zc = TiChain::from_distance(4, 0.5, zonly, Vec3(0, 0, 0.5));
    for (unsigned I = 0; I < 8; ++I) CHECK(ti_ssi_check(zc, 0.0, I) == doctest::Approx(compact_slack(css, I)).scale(1.0));
    CHECK(ch.corr[0](0, 3) == 0.25);
    CHECK_THROWS_AS(TiChain::from_distance(4, 0.5, {RVec(2), RVec(3), RVec(3)}, Vec3::Zero()), std::invalid_argument);
}

TEST_CASE("su(d) set") {
    // d=2 with Pauli generators is four times the qubit compact set
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
        const auto md = random_pi_moments(rng);
        SudMoments s;
        s.n = static_cast<int>(md.n);
        s.d = 2;
        s.mean = 2 * md.mean;
        s.second = RVec(3);
        s.local = RVec::Constant(3, md.n);
        for (int k = 0; k < 3; ++k) s.second(k) = 4 * md.C(k, k);
        for (unsigned I = 0; I < 8; ++I) {
            std::vector<bool> sub{bool(I & 1), bool(I & 2), bool(I & 4)};
            CHECK(sud_ssi_check(s, sub) == doctest::Approx(4 * compact_slack(md, I)).epsilon(1e-10).scale(1.0));
        }
    }

    const auto gb = gellmann_basis(3);
    const CMat id3 = CMat::Identity(3, 3);
    auto moments = [&](const CMat& rho) {
        SudMoments m;
        m.n = 2;
        m.d = 3;
        m.mean = RVec(8);
        m.second = RVec(8);
        m.local = RVec(8);
        for (int k = 0; k < 8; ++k) {
            const CMat a = kron(gb.generators[k], id3), b = kron(id3, gb.generators[k]);
            const CMat G = a + b;
            m.mean(k) = (rho * G).trace().real();
            m.second(k) = (rho * G * G).trace().real();
            m.local(k) = (rho * (a * a + b * b)).trace().real();
        }
        return m;
    };

    for (int t = 0; t < 1000; ++t) {
        const CVec a = oracle::random_pure_state(3, rng), b = oracle::random_pure_state(3, rng);
        CVec psi(9);
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) psi(3 * x + y) = a(x) * b(y);
        const auto m = moments(psi * psi.adjoint());
        for (unsigned I = 0; I < 256; I += 17) {
            std::vector<bool> sub(8);
            for (int k = 0; k < 8; ++k) sub[k] = I & (1u << k);
            CHECK(sud_ssi_check(m, sub) > -1e-9);
        }
    }

    // antisymmetric two-qutrit state
    CVec anti = CVec::Zero(9);
    anti(1) = 1 / std::sqrt(2.0);
    anti(3) = -1 / std::sqrt(2.0);
    const auto m = moments(anti * anti.adjoint());
    CHECK(sud_ssi_check(m, std::vector<bool>(8, true)) < -1.0);

    SudMoments broken = m;
    broken.local = RVec(3);
    CHECK_THROWS_AS(sud_ssi_check(broken, std::vector<bool>(8, true)), std::invalid_argument);
}

TEST_CASE("coarse-grained depth inequality") {
    const int N = 20;
    const auto d = dicke_moments(N, N / 2);
    for (int k = 1; k < N; ++k) CHECK(linear_depth_check(d, k) < 0);

    std::mt19937_64 rng(43);
    for (int t = 0; t < 20; ++t) {
        const auto c = css_moments(N, 0.5, testutil::random_unit(rng));
        CHECK(linear_depth_check(c, 1) > -1e-9 * N * N);
    }
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + t % 7;
        const double j = (t % 2) ? 1.0 : 0.5;
        oracle::SeparableSample s;
        s.terms = {identical_product(n, j, rng), identical_product(n, j, rng)};
        s.weights = {0.5, 0.5};
        const auto md = oracle::separable_moments(s, j);
        for (int k = 1; k < n; ++k) CHECK(linear_depth_check(md, k) > -1e-9 * n * n);
    }
    CHECK_THROWS_AS(linear_depth_check(d, 0), std::invalid_argument);
    CHECK_THROWS_AS(linear_depth_check(d, N), std::invalid_argument);
}

TEST_CASE("two-body form matches the compact set") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 1000; ++t) {
        const auto md = random_pi_moments(rng);
        const auto tb = two_body_form(md);
        const double N = md.n;
        for (unsigned I = 0; I < 8; ++I) {
            const double c = compact_slack(md, I);
            CHECK(tb.slack[I] * N * (N - 1) == doctest::Approx(c).epsilon(1e-9).scale(1.0));
            if (std::abs(c) > 1e-9) CHECK((tb.slack[I] < 0) == (c < 0));
        }
    }
    const auto s2 = two_body_form(singlet_moments(2, 0.5));
    CHECK(s2.sigma == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(s2.slack[7] < 0);

    const auto c = two_body_form(css_moments(10, 0.5, Vec3::UnitZ()));
    for (double s : c.slack) CHECK(std::abs(s) < 1e-12);
    MomentData one;
    one.n = 1;
    CHECK_THROWS_AS(two_body_form(one), std::invalid_argument);
}

TEST_CASE("symmetric PPT condition") {
    CVec trip = CVec::Zero(4);
    trip(1) = trip(2) = 1 / std::sqrt(2.0);
    const auto t = ppt_symmetric_check(CMat(trip * trip.adjoint()));
    CHECK(t.min_value < -1e-3);

    std::mt19937_64 rng(53);
    for (int k = 0; k < 200; ++k) {
        CMat rho = CMat::Zero(4, 4);
        for (int m = 0; m < 3; ++m) {
            const CVec a = oracle::random_pure_state(2, rng);
            CVec p(4);
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) p(2 * x + y) = a(x) * a(y);
            rho += p * p.adjoint() / 3.0;
        }
        CHECK(ppt_symmetric_check(rho).min_value > -1e-9);
    }

    // symmetric qutrit product
    const CVec a = oracle::random_pure_state(3, rng);
    CVec p(9);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) p(3 * x + y) = a(x) * a(y);
    CHECK(ppt_symmetric_check(CMat(p * p.adjoint())).min_value > -1e-9);

    // spin-component version: singlet correlations <s_k s_l> = -delta_kl
    const auto s = ppt_symmetric_check(RMat(-RMat::Identity(3, 3)), RVec(RVec::Zero(3)));
    CHECK(s.min_value == doctest::Approx(-1.0));

    CVec sing = CVec::Zero(4);
    sing(1) = 1 / std::sqrt(2.0);
    sing(2) = -1 / std::sqrt(2.0);
    CHECK(ppt_symmetric_check(CMat(sing * sing.adjoint())).min_value < -1e-3);
    CMat nonsym = CMat::Zero(4, 4);
    nonsym(1, 1) = 1;
    CHECK_THROWS_AS(ppt_symmetric_check(nonsym), std::invalid_argument);
    CHECK_THROWS_AS(ppt_symmetric_check(CMat(CMat::Identity(4, 4))), std::invalid_argument);
    CHECK_THROWS_AS(ppt_symmetric_check(RMat::Identity(3, 2), RVec::Zero(3)), std::invalid_argument);
}

TEST_CASE("XY concurrence") {
    CHECK(concurrence_symmetric(0, 0, 1, 1) == 0.0);
    CHECK(concurrence_symmetric(-1, -1, -1, 0) == doctest::Approx(1.0));
    CHECK(concurrence_symmetric(0, 0, 0, 0) == 0.0);
}

TEST_CASE("separable states never violate") {
    std::mt19937_64 rng(59);
    for (int N : {2, 3, 4})
        for (double j : {0.5, 1.0}) {
            const double tol = 1e-9 * N * N;
            for (int t = 0; t < 11000; ++t) {
                MomentData md;
                if (t < 10000) {
                    md = oracle::product_moments(oracle::random_product(N, j, rng), j);
                } else {
                    oracle::SeparableSample s;
                    const int terms = 2 + t % 4;
                    std::uniform_real_distribution<double> u(0.1, 1);
                    double w = 0;
                    for (int k = 0; k < terms; ++k) {
                        s.terms.push_back(oracle::random_product(N, j, rng));
                        s.weights.push_back(u(rng));
                        w += s.weights.back();
                    }
                    for (double& x : s.weights) x /= w;
                    md = oracle::separable_moments(s, j);
                }
                const Mat3 frame = testutil::random_rotation(rng);
                const auto rep = ssi_set_check(md, frame);
                for (double s : rep.compact) REQUIRE(s > -tol);
                REQUIRE(xi_G(md).value > 1 - 1e-9);
                const auto p = named_parameters(md, frame);
                // xi_orig is a qubit criterion; xi_P has no separable bound of one
                for (const NamedParam* q : {&p.xi_ent_j, &p.xi_dicke_j, &p.xi_planar_j, &p.xi_singlet_j, &p.xi_T})
                    if (q->defined) REQUIRE(q->value > 1 - 1e-9);
                if (j == 0.5 && p.xi_orig.defined) REQUIRE(p.xi_orig.value > 1 - 1e-9);
                for (const NamedParam* q : {&p.xi_ent_j, &p.xi_dicke_j, &p.xi_planar_j, &p.xi_singlet_j})
                    REQUIRE(q->slack > -tol);
            }
        }
}

TEST_CASE("xi_G detects every state the generalized original parameter detects") {
    int detected = 0;
    for (int N : {100, 200}) {
        for (int i = 1; i <= 30; ++i) {
            const double chi = 0.002 * i;
            const auto md = oat_state(N, chi).moments;
            const auto p = named_parameters(md, adapted_frame(md));
            if (p.xi_ent_j.defined && p.xi_ent_j.value < 1) {
                ++detected;
                CHECK(xi_G(md).value < 1);
            }
        }
        for (double x2 : {0.1, 0.3, 0.6, 0.9}) {
            const auto md = polarized_sss_moments(N, x2);
            const auto p = named_parameters(md, adapted_frame(md));
            if (p.xi_ent_j.defined && p.xi_ent_j.value < 1) {
                ++detected;
                CHECK(xi_G(md).value < 1);
            }
        }
    }
    CHECK(detected > 20);
}
