#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "squeezelab/io.hpp"
#include "squeezelab/lg.hpp"

namespace sqz::cli {

// Keys accepted in config files and mirrored as --dashed-flags.
const std::vector<std::string>& config_keys();

struct RunConfig {
    LgParams lg;
    std::vector<double> theta;
    std::vector<int> n_list;
    std::vector<double> n_photons_grid;
    std::vector<double> n_atoms_grid;
    double truncation_c = 0.0;
    int triples = 0;  // >= 3 adds a K3-from-triples column for that many slots
    std::uint64_t seed = 1;
    std::string output;
    std::string hash;
};

// Layers flag overrides on top of the config file (if any) and validates.
// default_init_variance applies when neither source sets init_variance.
RunConfig build_run_config(const std::string& config_path, const std::map<std::string, std::string>& overrides,
                           const std::string& default_init_variance = "coherent");

}  // namespace sqz::cli
