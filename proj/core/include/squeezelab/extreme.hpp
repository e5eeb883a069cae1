#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace sqz {

// Minimal normalized variance F_J(X) = min (Delta J_x)^2 / J at <J_z> = X J.
struct FCurve {
    double J = 0.0;
    std::vector<double> mu_grid;  // multipliers actually scanned (after refinement)
    std::vector<double> sample_x, sample_f;  // raw ground-state points
    std::vector<double> x, f;  // lower convex hull vertices, x ascending from 0 to 1
    // Largest distance between the hull and the tangent envelope built from
    // the ground energies; bounds how far interpolation can overshoot F.
    double envelope_gap = 0.0;
};

struct FCurveOptions {
    int points_per_decade_span = 400;  // log-spaced points in [mu_min, mu_max]
    double mu_min = 1e-3;
    double mu_max_factor = 8.0;  // mu_max = factor * J
    bool refine = true;  // bisect the grid until both limits below hold
    double max_dx = 1e-3;  // largest X step between samples
    double max_gap = 1e-7;  // largest interpolation overshoot per segment
    double x_one_tol = 1e-12;  // extend mu upwards until 1 - X drops below this
    std::size_t max_samples = 200000;
};

std::vector<double> default_mu_grid(double J, const FCurveOptions& opt = {});

// Ground states of (J_x - lambda)^2 + mu J_z; lambda is optimized for
// half-integer J and fixed at 0 for integer J. Negative mu entries are
// mirrored (X only depends on |mu|).
FCurve f_curve(double J, const std::vector<double>& mu_grid, const FCurveOptions& opt = {});
FCurve f_curve(double J, const FCurveOptions& opt = {});

double f_eval(const FCurve& c, double X);
double f_inverse(const FCurve& c, double F);

// F_J(X) from the Legendre dual sup_mu [e(mu)/J + mu X] without building a
// curve. Works for large J (tridiagonal Sturm solver, O(J) memory).
double f_dual(double J, double X);

// Lowest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiagonal_min_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off);

// Thread-safe provider of F_J. Curves are built on first use for integer
// J <= max_curve_J and half-integer J <= max_half_curve_J (their lambda search
// makes curves slow). Other J up to max_curve_J use f_dual point by point;
// beyond that f_dual at the next integer spin, a lower bound because F_J
// decreases with J.
class FCurveCache {
public:
    explicit FCurveCache(double max_curve_J = 200.0, double max_half_curve_J = 10.0, FCurveOptions opt = {});

    bool has_curve(double J) const;
    std::shared_ptr<const FCurve> curve(double J);
    double eval(double J, double X);
    double inverse(double J, double F);
    void insert(std::shared_ptr<const FCurve> c);
    double max_curve_J() const { return max_J_; }

private:
    double max_J_;
    double max_half_J_;
    FCurveOptions opt_;
    std::mutex mu_;
    std::map<long, std::shared_ptr<const FCurve>> curves_;  // keyed by 2J
};

FCurveCache& default_fcurve_cache();

struct DepthSlack {
    double slack = 0.0;
    bool applicable = true;
    std::string reason;

    bool violated(double tol = 0.0) const { return applicable && slack < -tol; }
};

// var_x - N j F_{kj}(|<J_z>| / (N j)).
DepthSlack sm_depth_check(double var_x, double mean_z, double N, double j, int k,
                          FCurveCache& cache = default_fcurve_cache());

// var_x - N j F_{kj}(sqrt(S - N j (k j + 1)) / (N j)), S = <J_y^2 + J_z^2>.
// j = 1/2 is the form stated for qubits; other j follow the same argument.
DepthSlack improved_depth_check(double var_x, double sum_perp_sq, double N, int k, double j = 0.5,
                                FCurveCache& cache = default_fcurve_cache());

// N (k+2) var_x - S + N (k+2) / 4 (spin-1/2).
double duan_check(double var_x, double sum_perp_sq, double N, int k);

// Linearization of the improved criterion at its threshold S0 = N j (k j + 1):
// var_x >= slope (S - S0). slope = 2 g'(0) / N for j = 1/2 with g(u) = F(sqrt u).
struct Tangent {
    double slope = 0.0;
    double threshold = 0.0;
};

Tangent improved_tangent(double N, int k, double j = 0.5);
double tangent_check(double var_x, double sum_perp_sq, const Tangent& t);
// Duan's criterion written as var_x >= slope (S - threshold).
Tangent duan_tangent(double N, int k);

enum class DepthCriterion { SorensenMolmer, Improved, Duan };

struct DepthInput {
    double var_x = 0.0;
    double mean_z = 0.0;  // Sorensen-Molmer
    double sum_perp_sq = 0.0;  // improved and Duan
    double N = 0.0;
    double j = 0.5;
};

// Smallest k in [1, N] whose k-producibility bound holds (or does not apply).
// Uses bisection over k; all three bounds are monotone in k.
int depth_infer(const DepthInput& in, DepthCriterion c, double tol = 1e-9,
                FCurveCache& cache = default_fcurve_cache());

DepthSlack sm_fluct(double mean_n, double var_x, double mean_z, int k, double j,
                    FCurveCache& cache = default_fcurve_cache());

struct FluctComponent {
    double n = 0.0;
    double weight = 0.0;
    double var_x = 0.0;
};

// <N>(k+2)/4 + <N(N-1)>/4 F^{-1}_{k/2}(a)^2 - <J_y^2 + J_z^2>,
// a = 2 sum_N Q_N (N-1) var_N / <N(N-1)>.
DepthSlack improved_fluct(const std::vector<FluctComponent>& comps, double sum_perp_sq, int k,
                          FCurveCache& cache = default_fcurve_cache());

}  // namespace sqz
