#include "squeezelab/extreme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "squeezelab/parallel.hpp"
#include "squeezelab/spin_ops.hpp"

namespace sqz {

namespace {

constexpr double kGolden = 0.6180339887498949;

bool is_integer_spin(double J) { return std::abs(J - std::round(J)) < 1e-9; }

// (J_z - lambda)^2 + mu J_x in the |J,m> basis, m descending. This is the
// F-curve problem rotated so that the squeezed axis is z and the
// polarization axis is x, which makes it tridiagonal for any lambda.
struct Tridiag {
    std::vector<double> d, e;
};

Tridiag rotated_problem(double J, double lambda, double mu) {
    const int n = spin_dim(J);
    Tridiag t;
    t.d.resize(n);
    t.e.resize(n > 0 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) {
        const double m = J - i;
        t.d[i] = (m - lambda) * (m - lambda);
        if (i + 1 < n) {
            const double mm = m - 1;
            t.e[i] = 0.5 * mu * std::sqrt(J * (J + 1) - mm * (mm + 1));
        }
    }
    return t;
}

int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    int count = 0;
    double q = d[0] - x;
    const double tiny = 1e-300;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (std::abs(q) < tiny) q = -tiny;
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

std::vector<double> lowest_eigenvector(const Tridiag& t, double energy) {
    const std::size_t n = t.d.size();
    std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
    if (n == 1) return {1.0};
    double scale = 0;
    for (double x : t.d) scale = std::max(scale, std::abs(x));
    for (double x : t.e) scale = std::max(scale, 2 * std::abs(x));
    const double sigma = energy - 1e-10 * std::max(1.0, scale);
    std::vector<double> c(n), w(n);
    for (int it = 0; it < 6; ++it) {
        // Thomas algorithm on (T - sigma I) w = v; positive definite since sigma < lambda_min
        double den = t.d[0] - sigma;
        c[0] = t.e[0] / den;
        w[0] = v[0] / den;
        for (std::size_t i = 1; i < n; ++i) {
            den = t.d[i] - sigma - t.e[i - 1] * c[i - 1];
            if (i + 1 < n) c[i] = t.e[i] / den;
            w[i] = (v[i] - t.e[i - 1] * w[i - 1]) / den;
        }
        for (std::size_t i = n - 1; i-- > 0;) w[i] -= c[i] * w[i + 1];
        double norm = 0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    return v;
}

double ground_energy(double J, double lambda, double mu) {
    const Tridiag t = rotated_problem(J, lambda, mu);
    return tridiagonal_min_eigenvalue(t.d, t.e);
}

template <class Fn>
double golden_min(Fn f, double a, double b, int iters, double* arg) {
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    if (fc < fd) {
        *arg = c;
        return fc;
    }
    *arg = d;
    return fd;
}

// min over lambda of the ground energy; lambda = 0 for integer J. For
// half-integer J the minimum lies on the branch that starts at the m = 1/2
// eigenstate (lambda = 1/2 at mu -> 0) and moves towards 0; the energy is
// unimodal in lambda on [0, 1/2]. A lambda error enters the sampled variance
// only at second order.
double optimal_lambda(double J, double mu, double* energy) {
    if (is_integer_spin(J)) {
        *energy = ground_energy(J, 0.0, mu);
        return 0.0;
    }
    auto E = [&](double l) { return ground_energy(J, l, mu); };
    double arg = 0.5;
    double best = golden_min(E, 0.0, 0.5, 32, &arg);
    for (double l : {0.0, 0.5}) {
        const double v = E(l);
        if (v < best) {
            best = v;
            arg = l;
        }
    }
    *energy = best;
    return arg;
}

struct Sample {
    double mu, x, f, energy;
};

Sample sample_at(double J, double mu) {
    mu = std::abs(mu);
    Sample s{mu, 0.0, 0.0, 0.0};
    double energy = 0;
    const double lambda = optimal_lambda(J, mu, &energy);
    s.energy = energy;
    const Tridiag t = rotated_problem(J, lambda, mu);
    const std::vector<double> v = lowest_eigenvector(t, energy);
    double jz = 0, jz2 = 0, jx = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = J - double(i);
        jz += v[i] * v[i] * m;
        jz2 += v[i] * v[i] * m * m;
        if (i + 1 < v.size()) {
            const double mm = m - 1;
            jx += v[i] * v[i + 1] * std::sqrt(J * (J + 1) - mm * (mm + 1));
        }
    }
    s.x = std::clamp(-jx / J, 0.0, 1.0);
    s.f = std::max(0.0, (jz2 - jz * jz) / J);
    return s;
}

std::vector<std::size_t> lower_hull(const std::vector<double>& x, const std::vector<double>& f) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && f[a] < f[b]);
    });
    std::vector<std::size_t> h;
    for (std::size_t i : idx) {
        if (!h.empty() && x[h.back()] == x[i]) continue;
        while (h.size() >= 2) {
            const std::size_t a = h[h.size() - 2], b = h.back();
            const double cross = (x[b] - x[a]) * (f[i] - f[a]) - (f[b] - f[a]) * (x[i] - x[a]);
            if (cross <= 0) {
                h.pop_back();
            } else {
                break;
            }
        }
        h.push_back(i);
    }
    return h;
}

// Each sample lies on its own tangent line F >= e/J + mu X. Over [a, b] the
// chord can exceed the true curve by at most its distance to the larger of
// the two lines, which peaks where the lines cross.
double segment_overshoot(double J, const Sample& a, const Sample& b) {
    if (b.x - a.x <= 0) return 0.0;
    auto line = [J](const Sample& p, double x) { return p.energy / J + p.mu * x; };
    double xs = 0.5 * (a.x + b.x);
    if (std::abs(a.mu - b.mu) > 0) xs = (b.energy - a.energy) / (J * (a.mu - b.mu));
    xs = std::clamp(xs, a.x, b.x);
    const double chord = a.f + (xs - a.x) / (b.x - a.x) * (b.f - a.f);
    return std::max(0.0, chord - std::max(line(a, xs), line(b, xs)));
}

}  // namespace

double tridiagonal_min_eigenvalue(const std::vector<double>& d, const std::vector<double>& e) {
    if (d.empty() || e.size() + 1 != d.size())
        throw std::invalid_argument("tridiagonal_min_eigenvalue: inconsistent sizes");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double r = 0;
        if (i > 0) r += std::abs(e[i - 1]);
        if (i < e.size()) r += std::abs(e[i]);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    hi = std::min(hi, *std::min_element(d.begin(), d.end()));
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> default_mu_grid(double J, const FCurveOptions& opt) {
    const int n = std::max(2, opt.points_per_decade_span);
    const double lo = std::log(opt.mu_min), hi = std::log(opt.mu_max_factor * std::max(J, 0.5));
    std::vector<double> g;
    g.reserve(n + 1);
    g.push_back(0.0);
    for (int i = 0; i < n; ++i) g.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
    return g;
}

FCurve f_curve(double J, const FCurveOptions& opt) { return f_curve(J, default_mu_grid(J, opt), opt); }

FCurve f_curve(double J, const std::vector<double>& mu_grid, const FCurveOptions& opt) {
    spin_dim(J);
    if (J <= 0) throw std::invalid_argument("f_curve: J must be positive");
    if (J > 200) throw std::invalid_argument("f_curve: J above 200, use f_dual");
    std::vector<double> mus;
    for (double m : mu_grid)
        if (std::abs(m) > 0) mus.push_back(std::abs(m));
    std::sort(mus.begin(), mus.end());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
    if (mus.size() < 2) throw std::invalid_argument("f_curve: mu grid needs at least two nonzero values");

    std::vector<Sample> s(mus.size());
    parallel_for(mus.size(), [&](std::size_t i) { s[i] = sample_at(J, mus[i]); });

    if (opt.refine) {
        for (int it = 0; it < 80 && s.front().x > opt.max_dx; ++it) s.insert(s.begin(), sample_at(J, s.front().mu / 2));
        for (int it = 0; it < 200 && 1 - s.back().x > opt.x_one_tol; ++it) s.push_back(sample_at(J, s.back().mu * 2));
        // bisect in log(mu) while a segment is too long or its overshoot bound too large
        for (int pass = 0; pass < 60 && s.size() < opt.max_samples; ++pass) {
            std::vector<double> mids;
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                const Sample& a = s[i];
                const Sample& b = s[i + 1];
                if (b.mu / a.mu < 1 + 1e-12) continue;
                if (std::abs(b.x - a.x) > opt.max_dx || segment_overshoot(J, a, b) > opt.max_gap)
                    mids.push_back(std::sqrt(a.mu * b.mu));
            }
            if (mids.empty()) break;
            std::vector<Sample> extra(mids.size());
            parallel_for(mids.size(), [&](std::size_t i) { extra[i] = sample_at(J, mids[i]); });
            s.insert(s.end(), extra.begin(), extra.end());
            std::sort(s.begin(), s.end(), [](const Sample& p, const Sample& q) { return p.mu < q.mu; });
        }
    }

    FCurve c;
    c.J = J;
    // candidate points: analytic endpoints (index -1) plus samples
    std::vector<double> hx{0.0, 1.0}, hf{0.0, 0.5};
    std::vector<long> src{-1, -1};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Sample& p = s[i];
        c.mu_grid.push_back(p.mu);
        c.sample_x.push_back(p.x);
        c.sample_f.push_back(p.f);
        hx.push_back(p.x);
        hf.push_back(p.f);
        src.push_back(static_cast<long>(i));
    }
    std::vector<long> vsrc;
    for (std::size_t i : lower_hull(hx, hf)) {
        c.x.push_back(hx[i]);
        c.f.push_back(hf[i]);
        vsrc.push_back(src[i]);
    }
    double gap = 0;
    for (std::size_t v = 0; v + 1 < c.x.size(); ++v) {
        if (vsrc[v] < 0 || vsrc[v + 1] < 0) continue;
        const Sample& a = s[vsrc[v]];
        const Sample& b = s[vsrc[v + 1]];
        gap = std::max(gap, segment_overshoot(J, a, b));
    }
    c.envelope_gap = gap;
    return c;
}

double f_eval(const FCurve& c, double X) {
    if (!(X >= -1e-12 && X <= 1 + 1e-12)) throw std::invalid_argument("f_eval: X outside [0,1]");
    X = std::clamp(X, 0.0, 1.0);
    const auto it = std::upper_bound(c.x.begin(), c.x.end(), X);
    if (it == c.x.end()) return c.f.back();
    const std::size_t i = static_cast<std::size_t>(it - c.x.begin());
    if (i == 0) return c.f.front();
    const double t = (X - c.x[i - 1]) / (c.x[i] - c.x[i - 1]);
    return c.f[i - 1] + t * (c.f[i] - c.f[i - 1]);
}

double f_inverse(const FCurve& c, double F) {
    if (!(F >= -1e-12 && F <= c.f.back() + 1e-12)) throw std::invalid_argument("f_inverse: F outside [0, F(1)]");
    F = std::clamp(F, 0.0, c.f.back());
    // hull is non-decreasing; take the largest X with F_J(X) <= F
    const auto it = std::upper_bound(c.f.begin(), c.f.end(), F);
    if (it == c.f.end()) return 1.0;
    const std::size_t i = static_cast<std::size_t>(it - c.f.begin());
    if (i == 0) return 0.0;
    const double t = (F - c.f[i - 1]) / (c.f[i] - c.f[i - 1]);
    return c.x[i - 1] + t * (c.x[i] - c.x[i - 1]);
}

double f_dual(double J, double X) {
    spin_dim(J);
    if (!(X >= -1e-12 && X <= 1 + 1e-12)) throw std::invalid_argument("f_dual: X outside [0,1]");
    X = std::clamp(X, 0.0, 1.0);
    if (X == 0.0) return 0.0;
    if (X == 1.0) return 0.5;
    auto phi = [&](double mu) {
        double e = 0;
        optimal_lambda(J, mu, &e);
        return e / J + mu * X;
    };
    double hi = 1.0;
    double fhi = phi(hi);
    for (int i = 0; i < 80; ++i) {
        const double f2 = phi(2 * hi);
        if (f2 <= fhi) break;
        hi *= 2;
        fhi = f2;
    }
    double arg = 0;
    const double best = -golden_min([&](double mu) { return -phi(mu); }, 0.0, 2 * hi, 60, &arg);
    return std::clamp(best, 0.0, 0.5);
}

FCurveCache::FCurveCache(double max_curve_J, double max_half_curve_J, FCurveOptions opt)
    : max_J_(max_curve_J), max_half_J_(max_half_curve_J), opt_(opt) {}

bool FCurveCache::has_curve(double J) const {
    return J <= (is_integer_spin(J) ? max_J_ : std::min(max_J_, max_half_J_));
}

std::shared_ptr<const FCurve> FCurveCache::curve(double J) {
    spin_dim(J);
    if (J > max_J_) throw std::invalid_argument("FCurveCache: J above the curve limit");
    const long key = std::lround(2 * J);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = curves_.find(key);
        if (it != curves_.end()) return it->second;
    }
    auto c = std::make_shared<const FCurve>(f_curve(J, opt_));
    std::lock_guard<std::mutex> lk(mu_);
    return curves_.emplace(key, c).first->second;
}

void FCurveCache::insert(std::shared_ptr<const FCurve> c) {
    std::lock_guard<std::mutex> lk(mu_);
    curves_[std::lround(2 * c->J)] = std::move(c);
}

double FCurveCache::eval(double J, double X) {
    if (has_curve(J)) return f_eval(*curve(J), X);
    if (J <= max_J_) return f_dual(J, X);
    return f_dual(std::ceil(J - 1e-9), X);
}

double FCurveCache::inverse(double J, double F) {
    if (has_curve(J)) return f_inverse(*curve(J), F);
    if (!(F >= 0 && F <= 0.5 + 1e-12)) throw std::invalid_argument("FCurveCache::inverse: F outside [0, 1/2]");
    double lo = 0, hi = 1;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (eval(J, mid) <= F) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

FCurveCache& default_fcurve_cache() {
    static FCurveCache cache;
    return cache;
}

DepthSlack sm_depth_check(double var_x, double mean_z, double N, double j, int k, FCurveCache& cache) {
    if (k < 1 || k > N) throw std::invalid_argument("sm_depth_check: k must lie in [1, N]");
    const double nj = N * j;
    if (std::abs(mean_z) > nj * (1 + 1e-12)) throw std::invalid_argument("sm_depth_check: |<J_z>| exceeds N j");
    DepthSlack r;
    r.slack = var_x - nj * cache.eval(k * j, std::min(1.0, std::abs(mean_z) / nj));
    return r;
}

DepthSlack improved_depth_check(double var_x, double sum_perp_sq, double N, int k, double j, FCurveCache& cache) {
    if (k < 1 || k > N) throw std::invalid_argument("improved_depth_check: k must lie in [1, N]");
    const double nj = N * j;
    const double rad = sum_perp_sq - nj * (k * j + 1);
    DepthSlack r;
    if (rad < 0) {
        r.applicable = false;
        r.reason = "<J_y^2 + J_z^2> below N j (k j + 1)";
        return r;
    }
    const double X = std::sqrt(rad) / nj;
    if (X > 1 + 1e-12) {
        r.applicable = false;
        r.reason = "argument of F exceeds 1";
        return r;
    }
    r.slack = var_x - nj * cache.eval(k * j, std::min(1.0, X));
    return r;
}

double duan_check(double var_x, double sum_perp_sq, double N, int k) {
    if (k < 1) throw std::invalid_argument("duan_check: k must be positive");
    return N * (k + 2) * var_x - sum_perp_sq + N * (k + 2) / 4.0;
}

Tangent improved_tangent(double N, int k, double j) {
    const double nj = N * j;
    const double x0 = 1e-3;
    Tangent t;
    t.threshold = nj * (k * j + 1);
    // g(u) = F(sqrt u) is convex with g(0) = 0, so g(u)/u at small u approaches g'(0) from above
    t.slope = f_dual(k * j, x0) / (x0 * x0) / nj;
    return t;
}

Tangent duan_tangent(double N, int k) {
    return Tangent{1.0 / (N * (k + 2)), N * (k + 2) / 4.0};
}

double tangent_check(double var_x, double sum_perp_sq, const Tangent& t) {
    return var_x - t.slope * (sum_perp_sq - t.threshold);
}

int depth_infer(const DepthInput& in, DepthCriterion c, double tol, FCurveCache& cache) {
    const int N = static_cast<int>(std::lround(in.N));
    if (N < 1) throw std::invalid_argument("depth_infer: N must be positive");
    const double scale = std::max(1.0, in.N * in.j);
    auto holds = [&](int k) {
        switch (c) {
            case DepthCriterion::SorensenMolmer: {
                const DepthSlack s = sm_depth_check(in.var_x, in.mean_z, in.N, in.j, k, cache);
                return s.slack >= -tol * scale;
            }
            case DepthCriterion::Improved: {
                const DepthSlack s = improved_depth_check(in.var_x, in.sum_perp_sq, in.N, k, in.j, cache);
                return !s.applicable || s.slack >= -tol * scale;
            }
            case DepthCriterion::Duan:
                return duan_check(in.var_x, in.sum_perp_sq, in.N, k) >= -tol * scale * in.N;
        }
        return true;
    };
    if (holds(1)) return 1;
    int lo = 1, hi = N;  // holds(lo) false, answer in (lo, hi]
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (holds(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

DepthSlack sm_fluct(double mean_n, double var_x, double mean_z, int k, double j, FCurveCache& cache) {
    if (!(mean_n > 0)) throw std::invalid_argument("sm_fluct: <N> must be positive");
    const double nj = mean_n * j;
    DepthSlack r;
    const double X = std::abs(mean_z) / nj;
    if (X > 1 + 1e-12) {
        r.applicable = false;
        r.reason = "|<J_z>| exceeds <N> j";
        return r;
    }
    r.slack = var_x - nj * cache.eval(k * j, std::min(1.0, X));
    return r;
}

DepthSlack improved_fluct(const std::vector<FluctComponent>& comps, double sum_perp_sq, int k, FCurveCache& cache) {
    if (comps.empty()) throw std::invalid_argument("improved_fluct: empty ensemble");
    if (k < 1) throw std::invalid_argument("improved_fluct: k must be positive");
    double n_mean = 0, nn = 0, num = 0, w = 0;
    for (const auto& c : comps) {
        if (c.weight < 0 || c.n < 1) throw std::invalid_argument("improved_fluct: invalid component");
        w += c.weight;
        n_mean += c.weight * c.n;
        nn += c.weight * c.n * (c.n - 1);
        num += c.weight * (c.n - 1) * c.var_x;
    }
    if (std::abs(w - 1) > 1e-12) throw std::invalid_argument("improved_fluct: weights do not sum to 1");
    DepthSlack r;
    if (nn <= 0) {
        r.applicable = false;
        r.reason = "<N(N-1)> vanishes";
        return r;
    }
    const double a = 2 * num / nn;
    if (a > 0.5) {
        r.applicable = false;
        r.reason = "argument of F^{-1} exceeds 1/2";
        return r;
    }
    const double xinv = cache.inverse(k / 2.0, std::max(0.0, a));
    r.slack = n_mean * (k + 2) / 4.0 + nn / 4.0 * xinv * xinv - sum_perp_sq;
    return r;
}

}  // namespace sqz
