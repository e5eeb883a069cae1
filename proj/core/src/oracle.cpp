#include "squeezelab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "squeezelab/parallel.hpp"

namespace sqz::oracle {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kGolden = 0.6180339887498949;

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// op acting on one site of a (d^N)-dim tensor.
CVec apply_site(const CMat& op, const CVec& psi, int site, int N, int d) {
    const long stride = ipow(d, N - 1 - site);
    const long block = stride * d;
    CVec out = CVec::Zero(psi.size());
    for (long base = 0; base < psi.size(); base += block)
        for (long r = 0; r < stride; ++r)
            for (int a = 0; a < d; ++a) {
                cplx acc = 0;
                for (int b = 0; b < d; ++b) acc += op(a, b) * psi(base + b * stride + r);
                out(base + a * stride + r) = acc;
            }
    return out;
}

struct LocalExp {
    Vec3 a;
    Mat3 q;  // 1/2 <{j_k, j_l}>
};

LocalExp local_expectations(const CVec& v, const SpinOperatorSet& ops) {
    const CMat* J[3] = {&ops.jx, &ops.jy, &ops.jz};
    CVec jv[3];
    LocalExp e;
    for (int k = 0; k < 3; ++k) {
        jv[k] = *J[k] * v;
        e.a(k) = v.dot(jv[k]).real();
    }
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) e.q(k, l) = jv[k].dot(jv[l]).real();
    return e;
}

void check_spin(int N, double j) {
    if (N < 1) throw std::invalid_argument("oracle: N must be positive");
    if (!(j > 0) || !is_half_integer(j)) throw std::invalid_argument("oracle: j must be a positive half-integer");
}

// Real coordinates (re, im per amplitude) of all factors of a sample.
std::vector<double> pack(const SeparableSample& s) {
    std::vector<double> x;
    for (const auto& t : s.terms)
        for (const auto& f : t.factors)
            for (int i = 0; i < f.size(); ++i) {
                x.push_back(f(i).real());
                x.push_back(f(i).imag());
            }
    return x;
}

SeparableSample unpack(const SeparableSample& shape, const std::vector<double>& x) {
    SeparableSample s = shape;
    std::size_t p = 0;
    for (auto& t : s.terms)
        for (auto& f : t.factors) {
            for (int i = 0; i < f.size(); ++i, p += 2) f(i) = cplx(x[p], x[p + 1]);
            const double nrm = f.norm();
            if (nrm < 1e-300) f(0) = 1.0;
            else f /= nrm;
        }
    return s;
}

// Coordinate-wise golden-section descent with a shrinking window.
std::vector<double> refine_coords(const std::function<double(const std::vector<double>&)>& fn, std::vector<double> x,
                                  int iterations) {
    if (x.empty()) return x;
    double best = fn(x);
    double h = 0.5;
    for (int it = 0; it < iterations; ++it) {
        const std::size_t c = static_cast<std::size_t>(it) % x.size();
        if (c == 0 && it > 0) h *= 0.8;
        const double x0 = x[c];
        double lo = x0 - h, hi = x0 + h;
        auto at = [&](double v) {
            x[c] = v;
            return fn(x);
        };
        double a = hi - kGolden * (hi - lo), b = lo + kGolden * (hi - lo);
        double fa = at(a), fb = at(b);
        for (int s = 0; s < 24; ++s) {
            if (fa < fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - kGolden * (hi - lo);
                fa = at(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + kGolden * (hi - lo);
                fb = at(b);
            }
        }
        const double cand = fa < fb ? a : b;
        const double fc = std::min(fa, fb);
        if (fc < best) {
            best = fc;
            x[c] = cand;
        } else {
            x[c] = x0;
        }
    }
    return x;
}

SeparableSample random_separable(int N, double j, int max_terms, std::mt19937_64& rng) {
    SeparableSample s;
    const int terms = max_terms <= 1 ? 1 : std::uniform_int_distribution<int>(1, max_terms)(rng);
    std::exponential_distribution<double> ex(1.0);
    double tot = 0;
    for (int t = 0; t < terms; ++t) {
        s.terms.push_back(random_product(N, j, rng));
        s.weights.push_back(ex(rng));
        tot += s.weights.back();
    }
    for (double& w : s.weights) w /= tot;
    return s;
}

struct Best {
    double value = std::numeric_limits<double>::infinity();
    SeparableSample sample;
    MomentData md;
};

}  // namespace

MomentData full_space_moments(const std::vector<CVec>& states, const std::vector<double>& weights, int N, double j) {
    check_spin(N, j);
    if (states.size() != weights.size() || states.empty()) throw std::invalid_argument("oracle: states and weights differ in length");
    const int d = spin_dim(j);
    const long dim = ipow(d, N);
    if (dim > 6561) throw std::length_error("full_space_moments: dimension above 6561");
    const SpinOperatorSet ops = spin_matrices(j);
    const CMat* J[3] = {&ops.jx, &ops.jy, &ops.jz};
    MomentData md;
    md.n = N;
    md.j = j;
    double wsum = 0;
    for (std::size_t s = 0; s < states.size(); ++s) {
        const CVec& psi = states[s];
        const double w = weights[s];
        if (w < 0) throw std::invalid_argument("oracle: negative weight");
        wsum += w;
        if (psi.size() != dim) throw std::invalid_argument("oracle: state dimension mismatch");
        if (std::abs(psi.norm() - 1.0) > 1e-9) throw std::invalid_argument("oracle: state not normalized");
        CVec Jpsi[3];
        for (int k = 0; k < 3; ++k) Jpsi[k] = CVec::Zero(dim);
        for (int n = 0; n < N; ++n) {
            CVec phi[3];
            for (int k = 0; k < 3; ++k) {
                phi[k] = apply_site(*J[k], psi, n, N, d);
                Jpsi[k] += phi[k];
            }
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) md.Q(k, l) += w * phi[k].dot(phi[l]).real() / N;
        }
        for (int k = 0; k < 3; ++k) {
            md.mean(k) += w * psi.dot(Jpsi[k]).real();
            for (int l = 0; l < 3; ++l) md.C(k, l) += w * Jpsi[k].dot(Jpsi[l]).real();
        }
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("oracle: weights must sum to 1");
    sync_local(md);
    return md;
}

MomentData full_space_moments(const CVec& psi, int N, double j) { return full_space_moments({psi}, {1.0}, N, j); }

void SeparableSample::validate() const {
    if (terms.empty() || terms.size() != weights.size()) throw std::invalid_argument("separable sample: terms and weights differ");
    double tot = 0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("separable sample: negative weight");
        tot += w;
    }
    if (std::abs(tot - 1.0) > 1e-9) throw std::invalid_argument("separable sample: weights must sum to 1");
    for (const auto& t : terms)
        for (const auto& f : t.factors)
            if (std::abs(f.norm() - 1.0) > 1e-9) throw std::invalid_argument("separable sample: factor not normalized");
}

CVec random_pure_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

ProductStateSample random_product(int N, double j, std::mt19937_64& rng) {
    check_spin(N, j);
    ProductStateSample s;
    for (int n = 0; n < N; ++n) s.factors.push_back(random_pure_state(spin_dim(j), rng));
    return s;
}

MomentData block_moments(const std::vector<CVec>& blocks, const std::vector<int>& sizes, double j) {
    if (blocks.size() != sizes.size()) throw std::invalid_argument("block_moments: size list mismatch");
    MomentData md;
    md.j = j;
    Mat3 C = Mat3::Zero(), outer = Mat3::Zero(), Qsum = Mat3::Zero();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const MomentData bm = full_space_moments(blocks[b], sizes[b], j);
        md.n += sizes[b];
        md.mean += bm.mean;
        C += bm.C;
        outer += bm.mean * bm.mean.transpose();
        Qsum += sizes[b] * bm.Q;
    }
    md.C = C + md.mean * md.mean.transpose() - outer;
    md.Q = Qsum / md.n;
    sync_local(md);
    return md;
}

MomentData product_moments(const ProductStateSample& s, double j) {
    const SpinOperatorSet ops = spin_matrices(j);
    MomentData md;
    md.n = static_cast<double>(s.factors.size());
    md.j = j;
    Mat3 outer = Mat3::Zero(), q = Mat3::Zero();
    for (const CVec& f : s.factors) {
        if (f.size() != ops.dim) throw std::invalid_argument("product_moments: factor dimension mismatch");
        const LocalExp e = local_expectations(f, ops);
        md.mean += e.a;
        outer += e.a * e.a.transpose();
        q += e.q;
    }
    md.C = md.mean * md.mean.transpose() - outer + q;
    md.Q = q / md.n;
    sync_local(md);
    return md;
}

MomentData separable_moments(const SeparableSample& s, double j) {
    MomentData out;
    for (std::size_t t = 0; t < s.terms.size(); ++t) {
        const MomentData m = product_moments(s.terms[t], j);
        if (t == 0) {
            out = m;
            out.mean *= s.weights[0];
            out.C *= s.weights[0];
            out.Q *= s.weights[0];
        } else {
            out.mean += s.weights[t] * m.mean;
            out.C += s.weights[t] * m.C;
            out.Q += s.weights[t] * m.Q;
        }
    }
    sync_local(out);
    return out;
}

OracleMin separable_min(const Evaluator& expr, int N, double j, const OracleOptions& opt) {
    check_spin(N, j);
    if (N > 6) throw std::invalid_argument("separable_min: N must be at most 6");
    const std::size_t chunks = (opt.samples + kChunk - 1) / kChunk;
    std::vector<Best> best(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::mt19937_64 rng(opt.seed + 0x9E3779B97F4A7C15ull * (c + 1));
        const std::size_t end = std::min(opt.samples, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            SeparableSample s = random_separable(N, j, opt.max_mixture_terms, rng);
            const MomentData md = separable_moments(s, j);
            const double v = expr(md);
            if (v < best[c].value) best[c] = Best{v, std::move(s), md};
        }
    });
    Best b;
    for (auto& x : best)
        if (x.value < b.value) b = std::move(x);
    OracleMin r{b.value, b.md, opt.samples};
    if (opt.refine && std::isfinite(b.value)) {
        auto fn = [&](const std::vector<double>& x) { return expr(separable_moments(unpack(b.sample, x), j)); };
        const auto x = refine_coords(fn, pack(b.sample), opt.refine_iterations);
        const MomentData md = separable_moments(unpack(b.sample, x), j);
        const double v = expr(md);
        if (v < r.value) {
            r.value = v;
            r.argmin = md;
        }
    }
    return r;
}

std::vector<std::vector<int>> block_partitions(int N, int k) {
    if (N < 1 || k < 1) throw std::invalid_argument("block_partitions: N and k must be positive");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int cap) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = std::min(left, cap); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(N, k);
    return out;
}

OracleMin kproducible_min(const Evaluator& expr, int N, double j, int k, const OracleOptions& opt) {
    check_spin(N, j);
    if (N > 6 || k < 1 || k > N) throw std::invalid_argument("kproducible_min: need N <= 6 and 1 <= k <= N");
    const auto parts = block_partitions(N, k);
    const int d = spin_dim(j);
    OracleMin r;
    r.value = std::numeric_limits<double>::infinity();
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& sizes = parts[pi];
        const std::size_t chunks = (opt.samples + kChunk - 1) / kChunk;
        std::vector<double> bv(chunks, std::numeric_limits<double>::infinity());
        std::vector<std::vector<CVec>> bs(chunks);
        parallel_for(chunks, [&](std::size_t c) {
            std::mt19937_64 rng(opt.seed + 1000003ull * (pi + 1) + 0x9E3779B97F4A7C15ull * (c + 1));
            const std::size_t end = std::min(opt.samples, (c + 1) * kChunk);
            for (std::size_t i = c * kChunk; i < end; ++i) {
                std::vector<CVec> blocks;
                for (int s : sizes) blocks.push_back(random_pure_state(static_cast<int>(ipow(d, s)), rng));
                const double v = expr(block_moments(blocks, sizes, j));
                if (v < bv[c]) {
                    bv[c] = v;
                    bs[c] = std::move(blocks);
                }
            }
        });
        std::size_t arg = 0;
        for (std::size_t c = 1; c < chunks; ++c)
            if (bv[c] < bv[arg]) arg = c;
        if (bs[arg].empty()) continue;
        std::vector<CVec> blocks = bs[arg];
        double v = bv[arg];
        if (opt.refine) {
            SeparableSample shape;
            shape.terms.push_back({blocks});
            shape.weights = {1.0};
            auto fn = [&](const std::vector<double>& x) { return expr(block_moments(unpack(shape, x).terms[0].factors, sizes, j)); };
            const auto x = refine_coords(fn, pack(shape), opt.refine_iterations);
            const auto refined = unpack(shape, x).terms[0].factors;
            const double vr = expr(block_moments(refined, sizes, j));
            if (vr < v) {
                v = vr;
                blocks = refined;
            }
        }
        r.evaluated += opt.samples;
        if (v < r.value) {
            r.value = v;
            r.argmin = block_moments(blocks, sizes, j);
        }
    }
    return r;
}

McEstimate mc_sign_correlator(const Eigen::Matrix2d& G, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("mc_sign_correlator: need at least two samples");
    const double a = G(0, 0), b = G(0, 1), c = G(1, 1);
    if (!(a > 0) || !(c > 0) || a * c - b * b < -1e-12 * a * c) throw std::invalid_argument("mc_sign_correlator: covariance not PSD");
    const double l11 = std::sqrt(a), l21 = b / l11, l22 = std::sqrt(std::max(0.0, c - l21 * l21));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::size_t same = 0, pp = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double z1 = nd(rng), z2 = nd(rng);
        const double y1 = l11 * z1, y2 = l21 * z1 + l22 * z2;
        const bool s1 = y1 > 0, s2 = y2 > 0;
        same += s1 == s2;
        pp += s1 && s2;
    }
    const double n = static_cast<double>(n_samples);
    McEstimate e;
    const double q = same / n;
    e.sign_corr = 2 * q - 1;
    e.sign_corr_se = 2 * std::sqrt(q * (1 - q) / (n - 1));
    e.p_pp = pp / n;
    e.p_pp_se = std::sqrt(e.p_pp * (1 - e.p_pp) / (n - 1));
    return e;
}

}  // namespace sqz::oracle
