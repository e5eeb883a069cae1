#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "squeezelab/moments.hpp"
#include "squeezelab/spin_ops.hpp"

namespace sqz::oracle {

// Exact moments of a pure state over (2j+1)^N; site 0 is the most
// significant tensor index. Throws std::length_error beyond dimension 6561.
MomentData full_space_moments(const CVec& psi, int N, double j);

// Mixture sum_i w_i |psi_i><psi_i|.
MomentData full_space_moments(const std::vector<CVec>& states, const std::vector<double>& weights, int N, double j);

struct ProductStateSample {
    std::vector<CVec> factors;  // one normalized vector per particle
};

// Separable mixture: weights form a probability vector.
struct SeparableSample {
    std::vector<ProductStateSample> terms;
    std::vector<double> weights;

    void validate() const;
};

CVec random_pure_state(int dim, std::mt19937_64& rng);
ProductStateSample random_product(int N, double j, std::mt19937_64& rng);

// Moments of a product state from single-particle expectation values.
MomentData product_moments(const ProductStateSample& s, double j);
MomentData separable_moments(const SeparableSample& s, double j);

// Composes blocks of pure states (each block its own (2j+1)^size vector).
MomentData block_moments(const std::vector<CVec>& blocks, const std::vector<int>& sizes, double j);

using Evaluator = std::function<double(const MomentData&)>;

struct OracleOptions {
    std::size_t samples = 100000;
    int max_mixture_terms = 1;  // mixtures of up to this many pure terms
    bool refine = true;
    int refine_iterations = 200;  // coordinate golden-section updates
    std::uint64_t seed = 12345;
};

struct OracleMin {
    double value = 0.0;
    MomentData argmin;
    std::size_t evaluated = 0;
};

// Minimum of expr over random separable states (N <= 6, j in {1/2, 1}).
OracleMin separable_min(const Evaluator& expr, int N, double j, const OracleOptions& opt = {});

// Block-size patterns with parts <= k summing to N (descending parts).
std::vector<std::vector<int>> block_partitions(int N, int k);

// Minimum over k-producible pure states, all block patterns. Moments only
// depend on block sizes, so patterns are enumerated up to relabeling.
OracleMin kproducible_min(const Evaluator& expr, int N, double j, int k, const OracleOptions& opt = {});

struct McEstimate {
    double sign_corr = 0.0, sign_corr_se = 0.0;
    double p_pp = 0.0, p_pp_se = 0.0;  // P(y1 > 0, y2 > 0)
};

// Samples a zero-mean bivariate normal with covariance G.
McEstimate mc_sign_correlator(const Eigen::Matrix2d& G, std::size_t n_samples, std::uint64_t seed = 7);

}  // namespace sqz::oracle
