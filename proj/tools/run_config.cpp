#include "run_config.hpp"

#include <cmath>
#include <stdexcept>

namespace sqz::cli {

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "n_atoms", "n_photons", "coupling_g", "scattering_eta", "atom_spin", "backaction", "scattering",
        "scatter_order", "init_variance", "theta", "n_list", "n_photons_grid", "n_atoms_grid", "truncation_c",
        "triples", "seed", "output"};
    return keys;
}

RunConfig build_run_config(const std::string& config_path, const std::map<std::string, std::string>& overrides,
                           const std::string& default_init_variance) {
    io::Config cfg = config_path.empty() ? io::Config{} : io::Config::parse_file(config_path);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    for (const auto& [k, v] : cfg.entries()) {
        bool ok = false;
        for (const auto& known : config_keys()) ok = ok || known == k;
        if (!ok) throw std::invalid_argument("config: unknown key '" + k + "'");
    }

    RunConfig rc;
    GaussParams& g = rc.lg.gauss;
    g.n_atoms = cfg.get_double("n_atoms", g.n_atoms);
    g.n_photons = cfg.get_double("n_photons", g.n_photons);
    g.g = cfg.get_double("coupling_g", g.g);
    g.eta = cfg.get_double("scattering_eta", g.eta);
    g.j_atom = cfg.get_double("atom_spin", g.j_atom);
    g.backaction = cfg.get_bool("backaction", true);
    rc.lg.scattering = cfg.get_bool("scattering", true);

    const std::string order = cfg.get("scatter_order", "after");
    if (order == "after") rc.lg.order = ScatterOrder::AfterInteraction;
    else if (order == "before") rc.lg.order = ScatterOrder::BeforeInteraction;
    else throw std::invalid_argument("config: scatter_order must be 'after' or 'before'");

    const std::string iv = cfg.get("init_variance", default_init_variance);
    if (iv == "coherent") g.init_variance = TransverseVariance::CoherentState;
    else if (iv == "quarter") g.init_variance = TransverseVariance::QuarterNA;
    else throw std::invalid_argument("config: init_variance must be 'coherent' or 'quarter'");

    if (!(g.n_atoms > 0) || !(g.n_photons > 0) || !(g.g > 0) || !(g.eta >= 0) || !(g.j_atom > 0))
        throw std::invalid_argument("config: physical parameters must be positive");
    g.validate();

    rc.theta = cfg.get_list("theta", {});
    if (rc.theta.empty()) {
        for (int i = 0; i < 360; ++i) rc.theta.push_back(2 * M_PI * i / 360);
    }
    for (double n : cfg.get_list("n_list", {3, 5, 7, 9})) {
        if (n != std::floor(n) || n < 2 || n > 16) throw std::invalid_argument("config: n_list entries must be integers in [2, 16]");
        rc.n_list.push_back(static_cast<int>(n));
    }
    rc.n_photons_grid = cfg.get_list("n_photons_grid", {g.n_photons});
    rc.n_atoms_grid = cfg.get_list("n_atoms_grid", {g.n_atoms});
    for (double v : rc.n_photons_grid)
        if (!(v > 0)) throw std::invalid_argument("config: n_photons_grid entries must be positive");
    for (double v : rc.n_atoms_grid)
        if (!(v > 0)) throw std::invalid_argument("config: n_atoms_grid entries must be positive");
    rc.truncation_c = cfg.get_double("truncation_c", 0.0);
    if (rc.truncation_c < 0) throw std::invalid_argument("config: truncation_c must be non-negative");
    rc.triples = static_cast<int>(cfg.get_int("triples", 0));
    if (rc.triples != 0 && (rc.triples < 3 || rc.triples > 16)) throw std::invalid_argument("config: triples must be 0 or in [3, 16]");
    const long seed = cfg.get_int("seed", 1);
    if (seed < 0) throw std::invalid_argument("config: seed must be non-negative");
    rc.seed = static_cast<std::uint64_t>(seed);
    rc.output = cfg.get("output", "");
    rc.hash = cfg.hash();
    return rc;
}

}  // namespace sqz::cli
