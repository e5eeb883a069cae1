// squeezelab command-line front end.
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "run_config.hpp"
#include "squeezelab/extreme.hpp"
#include "squeezelab/gaussian.hpp"
#include "squeezelab/io.hpp"
#include "squeezelab/lg.hpp"
#include "squeezelab/parallel.hpp"
#include "squeezelab/ssi.hpp"
#include "squeezelab/states.hpp"

using json = nlohmann::json;
using namespace sqz;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

json mat_json(const Mat3& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r) a.push_back(vec_json(m.row(r).transpose()));
    return a;
}

json param_json(const NamedParam& p) {
    if (p.defined) return p.value;
    return json{{"undefined", p.reason}};
}

json report_json(const MomentData& md, const SsiReport& r) {
    static const char* names[4] = {"second_moment_sum", "total_variance", "dicke_type", "planar_type"};
    json s;
    for (int i = 0; i < 4; ++i) s[names[i]] = {{"slack", r.slacks[i]}, {"violated", r.violated[i]}};
    const NamedParameters np = named_parameters(md, r.axes);
    return json{{"axes", mat_json(r.axes)},
                {"slacks", s},
                {"compact", r.compact},
                {"parameters",
                 {{"xi_orig", param_json(np.xi_orig)},
                  {"xi_ent_j", param_json(np.xi_ent_j)},
                  {"xi_dicke_j", param_json(np.xi_dicke_j)},
                  {"xi_planar_j", param_json(np.xi_planar_j)},
                  {"xi_singlet_j", param_json(np.xi_singlet_j)},
                  {"xi_P", param_json(np.xi_P)},
                  {"xi_T", param_json(np.xi_T)}}}};
}

std::ostream& open_out(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
    if (path.empty() || path == "-") return std::cout;
    holder = std::make_unique<std::ofstream>(path);
    if (!*holder) throw InputError("cannot open output file " + path);
    return *holder;
}

// Depths from moments in the frame adapted to the state.
json depth_json(const MomentData& md) {
    const MomentData a = rotated(md, adapted_frame(md));
    DepthInput in;
    in.var_x = a.var(0);
    in.mean_z = std::abs(a.mean(2));
    in.sum_perp_sq = a.C(1, 1) + a.C(2, 2);
    in.N = md.n;
    in.j = md.j;
    json d;
    d["var_x"] = in.var_x;
    d["mean_z"] = in.mean_z;
    d["sum_perp_sq"] = in.sum_perp_sq;
    const int sm = depth_infer(in, DepthCriterion::SorensenMolmer);
    const int imp = depth_infer(in, DepthCriterion::Improved);
    d["sorensen_molmer"] = sm;
    d["improved"] = imp;
    int best = std::max(sm, imp);
    if (std::abs(md.j - 0.5) < 1e-12) {
        const int du = depth_infer(in, DepthCriterion::Duan);
        d["duan"] = du;
        best = std::max(best, du);
    }
    // linear inequality: Dicke axis (small variance) as z
    Mat3 fr = adapted_frame(md);
    Mat3 perm;
    perm.row(0) = fr.row(1);
    perm.row(1) = fr.row(2);
    perm.row(2) = fr.row(0);
    const MomentData p = rotated(md, perm);
    const int N = static_cast<int>(std::lround(md.n));
    int lin = N;
    if (N >= 2 && std::abs(md.n - N) < 1e-9) {
        for (int k = 1; k < N; ++k)
            if (linear_depth_check(p, k) >= -1e-9 * std::max(1.0, md.n * md.n)) {
                lin = k;
                break;
            }
        d["linear"] = lin;
        best = std::max(best, lin);
    }
    d["depth"] = best;
    return d;
}

int cmd_ssi_eval(const std::string& path, bool as_json, const std::string& out_path) {
    MomentData md;
    try {
        md = io::read_moments_file(path);
    } catch (const io::ParseError& e) {
        throw InputError(e.what());
    }
    const SsiReport fixed = ssi_set_check(md, Mat3::Identity());
    const SsiReport searched = ssi_search(md);
    const XiGResult xg = md.n >= 2 ? xi_G(md) : XiGResult{};
    json j;
    j["N"] = md.n;
    j["j"] = md.j;
    j["fixed_frame"] = report_json(md, fixed);
    j["searched_frame"] = report_json(md, searched);
    json dirs = json::array();
    for (const auto& v : xg.squeezed_directions) dirs.push_back(vec_json(v));
    j["xi_G"] = {{"value", xg.value}, {"eigenvalues", vec_json(xg.eigenvalues)}, {"squeezed_directions", dirs}};
    j["depth"] = depth_json(md);

    std::unique_ptr<std::ofstream> holder;
    std::ostream& os = open_out(out_path, holder);
    if (as_json) {
        os << j.dump(2) << "\n";
        return kOk;
    }
    os << "N = " << md.n << ", j = " << md.j << "\n";
    os << "xi_G^2 = " << xg.value << " (" << xg.squeezed_directions.size() << " squeezed directions)\n";
    for (const char* frame : {"fixed_frame", "searched_frame"}) {
        os << frame << ":\n";
        for (const auto& [name, v] : j[frame]["slacks"].items())
            os << "  " << name << ": slack " << v["slack"].get<double>() << (v["violated"].get<bool>() ? "  VIOLATED" : "") << "\n";
        for (const auto& [name, v] : j[frame]["parameters"].items()) {
            os << "  " << name << " = ";
            if (v.is_number()) os << v.get<double>() << "\n";
            else os << "n/a (" << v["undefined"].get<std::string>() << ")\n";
        }
    }
    os << "entanglement depth >= " << j["depth"]["depth"].get<int>() << "\n";
    return kOk;
}

int cmd_fcurve(double J, const std::string& out_path, double mu_min, double mu_max_factor, int points) {
    if (J > 200) throw InputError("fcurve: J above the curve cap 200 (use depth, which switches to the dual route)");
    if (!(J > 0) || !is_half_integer(J)) throw InputError("fcurve: J must be a positive half-integer");
    FCurveOptions opt;
    opt.mu_min = mu_min;
    opt.mu_max_factor = mu_max_factor;
    opt.points_per_decade_span = points;
    const FCurve c = f_curve(J, opt);
    std::unique_ptr<std::ofstream> holder;
    std::ostream& os = open_out(out_path, holder);
    io::write_fcurve(os, c);
    if (!out_path.empty() && out_path != "-") {
        std::cout << json{{"J", c.J}, {"vertices", c.x.size()}, {"samples", c.sample_x.size()}, {"envelope_gap", c.envelope_gap},
                          {"output", out_path}}.dump()
                  << "\n";
    }
    return kOk;
}

int cmd_depth(const DepthInput& in, const std::string& which) {
    if (!(in.N >= 1) || !(in.j > 0) || !is_half_integer(in.j)) throw InputError("depth: need N >= 1 and half-integer j");
    if (in.var_x < 0 || in.sum_perp_sq < 0) throw InputError("depth: variance and second moments must be non-negative");
    json j;
    bool any = false;
    auto run = [&](const char* name, DepthCriterion c) {
        const int k = depth_infer(in, c);
        j[name] = k;
        any = true;
    };
    if (which == "sm" || which == "all") run("sorensen_molmer", DepthCriterion::SorensenMolmer);
    if (which == "improved" || which == "all") {
        const DepthSlack s = improved_depth_check(in.var_x, in.sum_perp_sq, in.N, 1, in.j);
        // the applicability threshold grows with k, so failing at k = 1 means failing everywhere
        if (!s.applicable && which == "improved") throw DomainError("depth: improved criterion inapplicable: " + s.reason);
        run("improved", DepthCriterion::Improved);
        if (!s.applicable) j["improved_note"] = s.reason;
    }
    const bool half = std::abs(in.j - 0.5) < 1e-12;
    if (which == "duan" && !half) throw DomainError("depth: the duan bound needs j = 1/2");
    if (which == "duan" || (which == "all" && half)) run("duan", DepthCriterion::Duan);
    if (!any) throw InputError("depth: criterion must be sm, improved, duan or all");
    std::cout << j.dump(2) << "\n";
    return kOk;
}

int cmd_lg_kn(const cli::RunConfig& rc) {
    struct Row {
        std::vector<double> v;
    };
    std::vector<Row> rows(rc.theta.size());
    parallel_for(rc.theta.size(), [&](std::size_t i) {
        const double th = rc.theta[i];
        rows[i].v.push_back(th);
        for (int n : rc.n_list) rows[i].v.push_back(k_n(th, n, rc.lg, rc.truncation_c));
        if (rc.triples) rows[i].v.push_back(k3_triple(rc.triples, th, rc.lg, rc.truncation_c).k3);
    });
    std::vector<std::string> header{"theta"};
    for (int n : rc.n_list) header.push_back("K" + std::to_string(n));
    if (rc.triples) header.push_back("K3_triple_of_" + std::to_string(rc.triples));
    std::unique_ptr<std::ofstream> holder;
    io::CsvWriter w(open_out(rc.output, holder), header, rc.hash);
    for (const auto& r : rows) w.row(r.v);
    return kOk;
}

// One row per (n_atoms, n_photons, theta) for the K3-from-7 protocol.
int cmd_lg_protocol(const cli::RunConfig& rc, bool with_k) {
    const Protocol pr = protocol_k3_from7();
    struct Job {
        double na, nl, th;
    };
    std::vector<Job> jobs;
    for (double na : rc.n_atoms_grid)
        for (double nl : rc.n_photons_grid)
            for (double th : rc.theta) jobs.push_back({na, nl, th});
    std::vector<KiResult> res(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        LgParams p = rc.lg;
        p.gauss.n_atoms = jobs[i].na;
        p.gauss.n_photons = jobs[i].nl;
        res[i] = ki_n(pr, jobs[i].th, p);
    });
    std::vector<std::string> header{"n_atoms", "n_photons", "theta"};
    if (with_k) header.insert(header.end(), {"K3", "KI3"});
    for (const auto& [pair, seq] : pr.sequences) header.push_back("I_" + std::to_string(pair.first) + std::to_string(pair.second));
    std::unique_ptr<std::ofstream> holder;
    io::CsvWriter w(open_out(rc.output, holder), header, rc.hash);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::vector<double> v{jobs[i].na, jobs[i].nl, jobs[i].th};
        if (with_k) v.insert(v.end(), {res[i].k, res[i].ki});
        for (const auto& [pair, I] : res[i].invasivity) v.push_back(I);
        w.row(v);
    }
    return kOk;
}

int cmd_qnd_fom(const cli::RunConfig& rc) {
    const QndFom f = qnd_fom(rc.lg);
    json j{{"defined", f.defined}};
    if (f.defined) {
        j["dX2_M"] = f.dX2_M;
        j["dX2_S"] = f.dX2_S;
        j["dX2_S_given_M"] = f.dX2_SgivenM;
        j["product_M_S"] = f.dX2_M * f.dX2_S;
        j["r_A"] = f.r_A;
        j["conditional_squeezing"] = conditional_squeezing(rc.lg.gauss.n_atoms, rc.lg.gauss.n_photons, rc.lg.gauss.g, rc.lg.gauss.j_atom);
    } else {
        j["reason"] = f.reason;
    }
    std::unique_ptr<std::ofstream> holder;
    open_out(rc.output, holder) << j.dump(2) << "\n";
    return f.defined ? kOk : kDomain;
}

int cmd_gauss_dump(const cli::RunConfig& rc, const std::string& seq_path, bool project) {
    MeasurementSequence seq;
    if (seq_path.empty()) {
        seq = MeasurementSequence::slots({1, 2, 3}, rc.theta.front());
    } else {
        std::ifstream f(seq_path);
        if (!f) throw InputError("cannot open sequence file " + seq_path);
        try {
            seq = io::read_sequence(f, seq_path);
        } catch (const io::ParseError& e) {
            throw InputError(e.what());
        }
    }
    GaussianState st = init_state(rc.lg.gauss, seq.n_measurements());
    const double chi = rc.lg.scattering ? survival(rc.lg.gauss) : 1.0;
    for (const Step& s : seq.steps) {
        if (s.kind == Step::Kind::Rotate) {
            st = rotate_atoms(st, s.theta);
            continue;
        }
        const int pulse = s.index - 1;
        if (rc.lg.order == ScatterOrder::BeforeInteraction) st = scatter(st, chi);
        st = qnd_interact(st, pulse);
        if (rc.lg.order == ScatterOrder::AfterInteraction) st = scatter(st, chi);
        if (project) {
            try {
                st = project_meter(st, pulse, s.recorded).first;
            } catch (const std::domain_error& e) {
                throw DomainError(e.what());
            }
        }
    }
    std::unique_ptr<std::ofstream> holder;
    io::CsvWriter w(open_out(rc.output, holder), st.labels, rc.hash);
    for (int r = 0; r < st.cov.rows(); ++r) {
        std::vector<double> row(st.cov.cols());
        for (int c = 0; c < st.cov.cols(); ++c) row[c] = st.cov(r, c);
        w.row(row);
    }
    return kOk;
}

std::string dashed(std::string k) {
    for (char& c : k)
        if (c == '_') c = '-';
    return k;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"squeezelab: spin-squeezing criteria and QND Leggett-Garg simulations"};
    app.require_subcommand(1);

    // run-config flags shared by the simulation subcommands
    std::map<std::string, std::map<std::string, std::string>> overrides;
    std::map<std::string, std::string> config_path;
    auto add_run_flags = [&](CLI::App* sub) {
        const std::string name = sub->get_name();
        sub->add_option("--config", config_path[name], "key=value configuration file");
        for (const auto& key : cli::config_keys()) {
            sub->add_option_function<std::string>("--" + dashed(key), [&, name, key](const std::string& v) { overrides[name][key] = v; },
                                                   "config key " + key);
        }
    };

    std::string moments_path, out_path;
    bool as_json = false;
    auto* ssi = app.add_subcommand("ssi-eval", "Evaluate all criteria on a moment file");
    ssi->add_option("moments", moments_path, "moment file")->required();
    ssi->add_flag("--json", as_json, "emit JSON");
    ssi->add_option("--out", out_path, "output file");

    double fJ = 0.5, mu_min = 1e-3, mu_max_factor = 8.0;
    int points = 400;
    std::string fc_out;
    auto* fc = app.add_subcommand("fcurve", "Build the F_J(X) curve");
    fc->add_option("--J", fJ, "total spin")->required();
    fc->add_option("--out", fc_out, "output table");
    fc->add_option("--mu-min", mu_min, "smallest multiplier");
    fc->add_option("--mu-max-factor", mu_max_factor, "largest multiplier / J");
    fc->add_option("--points", points, "initial grid points");

    DepthInput din;
    std::string criterion = "all";
    auto* dp = app.add_subcommand("depth", "Infer entanglement depth from measured moments");
    dp->add_option("--var-x", din.var_x, "(Delta J_x)^2")->required();
    dp->add_option("--mean-z", din.mean_z, "<J_z>");
    dp->add_option("--sum-perp", din.sum_perp_sq, "<J_y^2 + J_z^2>");
    dp->add_option("--N", din.N, "particle number")->required();
    dp->add_option("--j", din.j, "particle spin");
    dp->add_option("--criterion", criterion, "sm, improved, duan or all");

    auto* kn = app.add_subcommand("lg-kn", "K_n versus theta");
    auto* ki = app.add_subcommand("lg-ki", "K3 and KI3 for the K3-from-7 protocol");
    auto* inv = app.add_subcommand("lg-invasivity", "Invasivity quantifiers of the K3-from-7 protocol");
    auto* fom = app.add_subcommand("qnd-fom", "QND figures of merit");
    auto* gd = app.add_subcommand("gauss-dump", "Run a sequence and dump the covariance matrix");
    std::string seq_path;
    bool project = false;
    gd->add_option("--sequence", seq_path, "sequence file");
    gd->add_flag("--project", project, "condition on each meter after its interaction");
    for (auto* s : {kn, ki, inv, fom, gd}) add_run_flags(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*ssi) return cmd_ssi_eval(moments_path, as_json, out_path);
        if (*fc) return cmd_fcurve(fJ, fc_out, mu_min, mu_max_factor, points);
        if (*dp) return cmd_depth(din, criterion);
        for (auto* s : {kn, ki, inv, fom, gd}) {
            if (!*s) continue;
            const std::string name = s->get_name();
            cli::RunConfig rc;
            try {
                // the figures of merit are normalized to an input variance N_A/4
                rc = cli::build_run_config(config_path[name], overrides[name], s == fom ? "quarter" : "coherent");
            } catch (const io::ParseError& e) {
                throw InputError(e.what());
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
            if (s == kn) return cmd_lg_kn(rc);
            if (s == ki) return cmd_lg_protocol(rc, true);
            if (s == inv) return cmd_lg_protocol(rc, false);
            if (s == fom) return cmd_qnd_fom(rc);
            return cmd_gauss_dump(rc, seq_path, project);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
    return kOk;
}
