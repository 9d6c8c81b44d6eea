#pragma once

// Deterministic random-model generators for property-style tests.

#include <random>
#include <string>
#include <vector>

#include "crn/network.hpp"

namespace testgen {

using Rng = std::mt19937_64;

inline std::string random_species_name(Rng& rng, int index) {
    static const char* stems[] = {"X", "Y", "Z", "U", "V", "W", "S", "C", "M"};
    std::uniform_int_distribution<int> stem(0, 8);
    std::uniform_int_distribution<int> suffix(0, 2);
    std::string name = stems[stem(rng)] + std::to_string(index);
    switch (suffix(rng)) {
        case 0: return name;
        case 1: return name + "_p";
        default: return name + "_m";
    }
}

inline crn::Reaction random_reaction(Rng& rng, const std::vector<std::string>& pool) {
    std::uniform_int_distribution<int> count(0, 2);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> mult(1, 3);
    std::uniform_real_distribution<double> rate(0.1, 2.0);
    crn::Reaction r;
    int n_reactants = count(rng);
    int n_products = count(rng);
    if (n_reactants == 0 && n_products == 0) n_products = 1;
    for (int i = 0; i < n_reactants; ++i) r.reactants[pool[pick(rng)]] += mult(rng);
    for (int i = 0; i < n_products; ++i) r.products[pool[pick(rng)]] += mult(rng);
    r.rate = rate(rng);
    return r;
}

inline crn::Network random_network(Rng& rng, int max_species = 6, int max_reactions = 8) {
    std::uniform_int_distribution<int> n_species(1, max_species);
    std::uniform_int_distribution<int> n_reactions(0, max_reactions);
    std::uniform_real_distribution<double> init(0.0, 2.0);
    crn::Network net;
    std::vector<std::string> pool;
    int count = n_species(rng);
    for (int i = 0; i < count; ++i) {
        std::string name = random_species_name(rng, i);
        pool.push_back(name);
        net.add_species(name, init(rng));
    }
    int reactions = n_reactions(rng);
    for (int i = 0; i < reactions; ++i) net.add_reaction(random_reaction(rng, pool));
    return net;
}

}  // namespace testgen
