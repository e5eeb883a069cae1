#include "squeezelab/lg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace sqz {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }

double relabel(double y, double c) {
    if (std::abs(y) <= c) return y / c;
    return y > 0 ? 1.0 : -1.0;
}

// E[f(Y)] for Y ~ N(m, s^2) and the truncation relabeling f.
double relabel_mean(double m, double s, double c) {
    if (s <= 1e-14 * std::max(1.0, std::abs(m))) return relabel(m, c);
    const double a = (-c - m) / s, b = (c - m) / s;
    const double inside = m * (norm_cdf(b) - norm_cdf(a)) - s * (norm_pdf(b) - norm_pdf(a));
    return inside / c + norm_cdf(-b) - norm_cdf(a);
}

const double kGLx[10] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
                         -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
                         0.8650633666889845,  0.9739065285171717};
const double kGLw[10] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
                         0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                         0.1494513491505806, 0.0666713443086881};

double gl10(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0;
    for (int i = 0; i < 10; ++i) s += kGLw[i] * f(mid + h * kGLx[i]);
    return s * h;
}

double adaptive_gl(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl10(f, a, m), right = gl10(f, m, b);
    if (depth >= 30 || std::abs(left + right - whole) <= tol) return left + right;
    return adaptive_gl(f, a, m, left, tol / 2, depth + 1) + adaptive_gl(f, m, b, right, tol / 2, depth + 1);
}

std::vector<int> index_of_labels(const SimResult& r, int a, int b) {
    std::vector<int> out;
    for (int want : {a, b}) {
        auto it = std::find(r.labels.begin(), r.labels.end(), want);
        if (it == r.labels.end()) throw std::invalid_argument("measurement slot not recorded in sequence");
        out.push_back(static_cast<int>(it - r.labels.begin()));
    }
    return out;
}

Eigen::Matrix2d pair_cov(const SimResult& r, int a, int b) {
    const auto idx = index_of_labels(r, a, b);
    Eigen::Matrix2d G;
    G << r.cov(idx[0], idx[0]), r.cov(idx[0], idx[1]), r.cov(idx[1], idx[0]), r.cov(idx[1], idx[1]);
    return G;
}

double pair_correlator(const Eigen::Matrix2d& G, double c) {
    return c > 0 ? correlator_truncated(G, c) : correlator_discrete(G(0, 0), G(0, 1), G(1, 1));
}

}  // namespace

void MeasurementSequence::validate() const {
    int next = 1;
    bool any_recorded = false;
    std::set<int> labels;
    for (const Step& s : steps) {
        if (s.kind != Step::Kind::Measure) continue;
        if (s.index != next) throw std::invalid_argument("sequence: measurement indices must be consecutive from 1");
        ++next;
        if (!labels.insert(s.label).second) throw std::invalid_argument("sequence: duplicate measurement slot label");
        any_recorded = any_recorded || s.recorded;
    }
    if (!any_recorded) throw std::invalid_argument("sequence: needs at least one recorded measurement");
}

int MeasurementSequence::n_measurements() const {
    return static_cast<int>(std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.kind == Step::Kind::Measure; }));
}

MeasurementSequence MeasurementSequence::slots(const std::vector<int>& slots, double theta, const std::string& name) {
    MeasurementSequence seq;
    seq.name = name;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i > 0) {
            if (slots[i] <= slots[i - 1]) throw std::invalid_argument("sequence: slots must be ascending");
            Step r;
            r.kind = Step::Kind::Rotate;
            r.theta = theta * (slots[i] - slots[i - 1]);
            seq.steps.push_back(r);
        }
        Step m;
        m.kind = Step::Kind::Measure;
        m.index = static_cast<int>(i) + 1;
        m.label = slots[i];
        seq.steps.push_back(m);
    }
    return seq;
}

SimResult simulate(const MeasurementSequence& seq, const LgParams& p) {
    seq.validate();
    GaussianState st = init_state(p.gauss, seq.n_measurements());
    const double chi = p.scattering ? survival(p.gauss) : 1.0;
    std::vector<int> rows;
    SimResult r;
    for (const Step& s : seq.steps) {
        if (s.kind == Step::Kind::Rotate) {
            st = rotate_atoms(st, s.theta);
            continue;
        }
        const int pulse = s.index - 1;
        if (p.order == ScatterOrder::BeforeInteraction) st = scatter(st, chi);
        st = qnd_interact(st, pulse);
        if (p.order == ScatterOrder::AfterInteraction) st = scatter(st, chi);
        if (s.recorded) {
            rows.push_back(GaussianState::sy(pulse));
            r.labels.push_back(s.label);
        }
    }
    const int m = static_cast<int>(rows.size());
    r.cov.resize(m, m);
    r.mean.resize(m);
    for (int a = 0; a < m; ++a) {
        r.mean(a) = st.mean(rows[a]);
        for (int b = 0; b < m; ++b) r.cov(a, b) = st.cov(rows[a], rows[b]);
    }
    return r;
}

double correlator_discrete(double A, double B, double C) {
    if (!(A > 0) || !(C > 0)) throw std::invalid_argument("correlator_discrete: variances must be positive");
    if (B == 0.0) return 0.0;
    const double det = std::max(0.0, A * C - B * B);
    const double alpha = std::atan(std::sqrt(det) / std::abs(B));
    return (1 - 2 * alpha / M_PI) * (B > 0 ? 1.0 : -1.0);
}

double orthant_prob(const Eigen::Matrix2d& G) {
    if (!(G(0, 0) > 0) || !(G(1, 1) > 0)) {
        throw std::invalid_argument("orthant_prob: variances must be positive");
    }
    const double rho = std::clamp(G(0, 1) / std::sqrt(G(0, 0) * G(1, 1)), -1.0, 1.0);
    return 0.25 + std::asin(rho) / (2 * M_PI);
}

double correlator_truncated(const Eigen::Matrix2d& G, double c) {
    if (c < 0) throw std::invalid_argument("correlator_truncated: c must be non-negative");
    const double A = G(0, 0), B = G(0, 1), C = G(1, 1);
    if (c == 0) return correlator_discrete(A, B, C);
    if (!(A > 0) || !(C > 0)) throw std::invalid_argument("correlator_truncated: variances must be positive");
    const double sa = std::sqrt(A);
    const double s = std::sqrt(std::max(0.0, C - B * B / A));
    // y1 = sqrt(A) t, t standard normal; y2 | y1 ~ N(B y1 / A, C - B^2 / A)
    auto integrand = [&](double t) {
        const double y1 = sa * t;
        return relabel(y1, c) * relabel_mean(B / A * y1, s, c) * norm_pdf(t);
    };
    const double tc = c / sa;
    std::vector<double> cuts{-12.0, 12.0, 0.0};
    if (tc < 12) {
        cuts.push_back(-tc);
        cuts.push_back(tc);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double whole = gl10(integrand, cuts[i], cuts[i + 1]);
        total += adaptive_gl(integrand, cuts[i], cuts[i + 1], whole, 1e-12, 0);
    }
    return std::clamp(total, -1.0, 1.0);
}

std::map<SlotPair, PairCorrelator> best_correlators(int n, double theta, const LgParams& p, double c) {
    if (n < 2 || n > 20) throw std::invalid_argument("best_correlators: n must lie in [2, 20]");
    std::map<SlotPair, PairCorrelator> best;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> S;
        for (int s = 0; s < n; ++s)
            if (mask & (1u << s)) S.push_back(s + 1);
        if (S.size() < 2) continue;
        const SimResult r = simulate(MeasurementSequence::slots(S, theta), p);
        for (std::size_t a = 0; a < S.size(); ++a)
            for (std::size_t b = a + 1; b < S.size(); ++b) {
                Eigen::Matrix2d G;
                G << r.cov(a, a), r.cov(a, b), r.cov(b, a), r.cov(b, b);
                const double v = pair_correlator(G, c);
                const SlotPair key{S[a], S[b]};
                auto it = best.find(key);
                if (it == best.end() || v < it->second.value) best[key] = PairCorrelator{v, S};
            }
    }
    return best;
}

double k_n(double theta, int n, const LgParams& p, double c) {
    if (n < 2) throw std::invalid_argument("k_n: needs n >= 2");
    double k = n / 2;
    for (const auto& [key, pc] : best_correlators(n, theta, p, c)) k += pc.value;
    return k;
}

double k_n_qubit(double theta, int n) {
    double k = n / 2;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) k += std::cos(theta * (j - i));
    return k;
}

TripleResult k3_triple(int n, double theta, const LgParams& p, double c) {
    if (n < 3) throw std::invalid_argument("k3_triple: needs n >= 3");
    const auto best = best_correlators(n, theta, p, c);
    TripleResult r;
    r.k3 = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int d = b + 1; d <= n; ++d) {
                const auto& ab = best.at({a, b});
                const auto& bd = best.at({b, d});
                const auto& ad = best.at({a, d});
                const double v = ab.value + bd.value + ad.value + 1;
                if (v < r.k3) {
                    r.k3 = v;
                    r.triple = {a, b, d};
                    r.sequences = {ab.sequence, bd.sequence, ad.sequence};
                }
            }
    return r;
}

Protocol protocol_k3_from7() {
    Protocol pr;
    pr.n_quantities = 3;
    pr.reference = {1, 2, 3, 5, 7};
    pr.sequences[{3, 5}] = {1, 2, 3, 5, 7};
    pr.sequences[{5, 7}] = {1, 2, 3, 4, 5, 7};
    pr.sequences[{3, 7}] = {1, 2, 3, 4, 5, 6, 7};
    return pr;
}

MeasurementSequence auxiliary_sequence(const std::vector<int>& reference, const std::vector<int>& seq, double theta) {
    MeasurementSequence aux = MeasurementSequence::slots(reference, theta, "auxiliary");
    std::vector<int> extras;
    for (int s : seq)
        if (std::find(reference.begin(), reference.end(), s) == reference.end()) extras.push_back(s);
    std::sort(extras.begin(), extras.end());
    // insert each extra right before the Measure step of the next reference slot
    for (int e : extras) {
        auto it = std::find_if(aux.steps.begin(), aux.steps.end(), [&](const Step& st) {
            return st.kind == Step::Kind::Measure && st.label > e &&
                   std::find(reference.begin(), reference.end(), st.label) != reference.end();
        });
        if (it == aux.steps.end()) continue;
        Step m;
        m.kind = Step::Kind::Measure;
        m.label = e;
        m.recorded = false;
        aux.steps.insert(it, m);
    }
    int idx = 1;
    for (Step& st : aux.steps)
        if (st.kind == Step::Kind::Measure) st.index = idx++;
    return aux;
}

double invasivity(const Protocol& pr, SlotPair pair, double theta, const LgParams& p) {
    const auto it = pr.sequences.find(pair);
    if (it == pr.sequences.end()) throw std::invalid_argument("invasivity: pair not in protocol");
    for (int s : {pair.first, pair.second})
        if (std::find(pr.reference.begin(), pr.reference.end(), s) == pr.reference.end())
            throw std::invalid_argument("invasivity: reference sequence misses a measurement of the pair");
    const Eigen::Matrix2d Gaux = pair_cov(simulate(auxiliary_sequence(pr.reference, it->second, theta), p), pair.first, pair.second);
    const Eigen::Matrix2d Gref = pair_cov(simulate(MeasurementSequence::slots(pr.reference, theta), p), pair.first, pair.second);
    const double pa = orthant_prob(Gaux), pr_ = orthant_prob(Gref);
    // zero-mean Gaussians: P(++) = P(--) and P(+-) = P(-+) = 1/2 - P(++)
    double sum = 0;
    for (int sgn_i : {1, -1})
        for (int sgn_j : {1, -1}) {
            const double qa = sgn_i == sgn_j ? pa : 0.5 - pa;
            const double qr = sgn_i == sgn_j ? pr_ : 0.5 - pr_;
            sum += std::abs(qa - qr);
        }
    return sum;
}

KiResult ki_n(const Protocol& pr, double theta, const LgParams& p) {
    KiResult r;
    r.k = pr.n_quantities / 2;
    double inv = 0;
    for (const auto& [pair, seq] : pr.sequences) {
        const SimResult s = simulate(MeasurementSequence::slots(seq, theta), p);
        const Eigen::Matrix2d G = pair_cov(s, pair.first, pair.second);
        const double cval = correlator_discrete(G(0, 0), G(0, 1), G(1, 1));
        r.correlators[pair] = cval;
        r.k += cval;
        const double I = invasivity(pr, pair, theta, p);
        r.invasivity[pair] = I;
        inv += I;
    }
    r.ki = r.k + inv;
    return r;
}

QndFom qnd_fom(const LgParams& p) {
    QndFom f;
    const double g = p.gauss.g;
    if (g == 0.0) {
        f.defined = false;
        f.reason = "zero coupling: no information transfer";
        return f;
    }
    MeasurementSequence seq;
    for (int i = 1; i <= 3; ++i) {
        Step m;
        m.kind = Step::Kind::Measure;
        m.index = i;
        m.label = i;
        seq.steps.push_back(m);
    }
    const SimResult r = simulate(seq, p);
    const double scale = g * p.gauss.n_photons / 2;  // phi in units of J_z
    const RMat cov = r.cov / (scale * scale);
    const double var_ro = (p.gauss.n_photons / 4) / (scale * scale);
    const double J0 = p.gauss.n_atoms / 4;
    const double chi = cov(0, 1) / cov(0, 0);
    const double cond = cov(0, 0) + chi * chi * cov(1, 1) - 2 * chi * cov(0, 1) - var_ro;
    if (!(cov(0, 1) > 0)) {
        f.defined = false;
        f.reason = "non-positive cov(phi_1, phi_2)";
        return f;
    }
    f.r_A = cov(0, 2) / cov(0, 1);
    if (!(f.r_A > 0)) {
        f.defined = false;
        f.reason = "non-positive r_A";
        return f;
    }
    f.dX2_M = cov(0, 0) / J0;
    f.dX2_S = ((cov(1, 1) - var_ro) - (cov(0, 0) - var_ro)) / (f.r_A * J0);
    f.dX2_SgivenM = cond / (f.r_A * J0);
    return f;
}

}  // namespace sqz
