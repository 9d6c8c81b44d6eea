#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crn/errors.hpp"

namespace crn {

/// Species multiset: name -> multiplicity (every entry >= 1).
using Multiset = std::map<std::string, int>;

/// Multiplicities above this cannot be written in the text format and blow up
/// the mass-action polynomial degree, so they are rejected everywhere.
inline constexpr int kMaxMultiplicity = 9;

/// Names are a letter followed by letters, digits, or underscores, with an
/// optional single trailing '+' or '-' rail marker. "species" is reserved.
inline bool valid_species_name(std::string_view name) {
    if (name.empty() || name == "species") return false;
    if (!std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    std::size_t body_end = name.size();
    if (name.back() == '+' || name.back() == '-') {
        if (name.size() == 1) return false;
        --body_end;
    }
    for (std::size_t i = 1; i < body_end; ++i) {
        unsigned char c = static_cast<unsigned char>(name[i]);
        if (!std::isalnum(c) && c != '_') return false;
    }
    return true;
}

struct Species {
    std::string name;
    double initial = 0.0;

    friend bool operator==(const Species&, const Species&) = default;
};

/// A single irreversible reaction: reactants -> products at a fixed
/// mass-action rate constant. Both sides may be empty.
struct Reaction {
    Multiset reactants;
    Multiset products;
    double rate = 1.0;

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Net stoichiometric effect of `r` on `species`: product multiplicity minus
/// reactant multiplicity. Zero for species absent from both sides.
inline int net_effect(const Reaction& r, const std::string& species) {
    auto mult = [&](const Multiset& side) {
        auto it = side.find(species);
        return it == side.end() ? 0 : it->second;
    };
    return mult(r.products) - mult(r.reactants);
}

/// A catalyst takes part as a reactant but is not consumed on net.
inline bool is_catalyst(const Reaction& r, const std::string& species) {
    return r.reactants.contains(species) && net_effect(r, species) == 0;
}

/// A signed logical value carried as the difference of two nonnegative
/// species concentrations: value(t) = [plus](t) - [minus](t).
struct DualRail {
    std::string plus;
    std::string minus;

    friend bool operator==(const DualRail&, const DualRail&) = default;
};

/// Ordered collection of species (with initial concentrations) and reactions.
/// Immutable by convention once built; all mutators validate their inputs.
class Network {
public:
    Network() = default;

    const std::vector<Species>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }

    bool has_species(const std::string& name) const { return index_.contains(name); }

    std::size_t species_index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw NetworkError("unknown species '" + name + "'");
        return it->second;
    }

    double initial(const std::string& name) const {
        return species_[species_index(name)].initial;
    }

    void add_species(const std::string& name, double initial = 0.0) {
        if (!valid_species_name(name)) throw NetworkError("invalid species name '" + name + "'");
        if (index_.contains(name)) throw NetworkError("duplicate species '" + name + "'");
        check_initial(name, initial);
        index_.emplace(name, species_.size());
        species_.push_back({name, initial});
    }

    /// Registers `name` with zero initial concentration unless already known.
    void ensure_species(const std::string& name) {
        if (!index_.contains(name)) add_species(name);
    }

    void set_initial(const std::string& name, double initial) {
        check_initial(name, initial);
        species_[species_index(name)].initial = initial;
    }

    /// Appends a reaction; species it references are registered on demand.
    void add_reaction(Reaction r) {
        if (!(r.rate > 0.0) || !std::isfinite(r.rate))
            throw NetworkError("rate constant must be positive and finite");
        for (const Multiset* side : {&r.reactants, &r.products}) {
            for (const auto& [name, mult] : *side) {
                if (mult < 1) throw NetworkError("multiplicity of '" + name + "' must be >= 1");
                if (mult > kMaxMultiplicity)
                    throw NetworkError("multiplicity of '" + name + "' exceeds " +
                                       std::to_string(kMaxMultiplicity));
                ensure_species(name);
            }
        }
        reactions_.push_back(std::move(r));
    }

    std::vector<double> initial_state() const {
        std::vector<double> state(species_.size());
        for (std::size_t i = 0; i < species_.size(); ++i) state[i] = species_[i].initial;
        return state;
    }

    friend bool operator==(const Network& a, const Network& b) {
        return a.species_ == b.species_ && a.reactions_ == b.reactions_;
    }

private:
    void check_initial(const std::string& name, double initial) const {
        if (initial < 0.0 || !std::isfinite(initial))
            throw NetworkError("initial concentration of '" + name + "' must be >= 0");
    }

    std::vector<Species> species_;
    std::vector<Reaction> reactions_;
    std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline Reaction rename_reaction(const Reaction& r,
                                const std::unordered_map<std::string, std::string>& names) {
    auto rename_side = [&](const Multiset& side) {
        Multiset out;
        for (const auto& [name, mult] : side) {
            auto it = names.find(name);
            out.emplace(it == names.end() ? name : it->second, mult);
        }
        return out;
    };
    return {rename_side(r.reactants), rename_side(r.products), r.rate};
}

}  // namespace detail

/// Union of two networks with species unified per `shared` (a-name -> b-name).
/// Unified species keep the a-side name; their initial concentrations must
/// agree. Colliding non-shared b species are renamed "<b_label>_<name>" so a
/// name clash cannot silently splice unrelated signals together.
inline Network compose(const Network& a, const Network& b,
                       const std::map<std::string, std::string>& shared,
                       const std::string& b_label = "b") {
    std::unordered_map<std::string, std::string> rename;  // b name -> unified name
    for (const auto& [a_name, b_name] : shared) {
        if (!a.has_species(a_name))
            throw NetworkError("compose: species '" + a_name + "' not in first network");
        if (!b.has_species(b_name))
            throw NetworkError("compose: species '" + b_name + "' not in second network");
        if (a.initial(a_name) != b.initial(b_name))
            throw NetworkError("compose: conflicting initial concentrations for shared species '" +
                               a_name + "'");
        rename.emplace(b_name, a_name);
    }

    Network out;
    for (const auto& s : a.species()) out.add_species(s.name, s.initial);
    for (const auto& s : b.species()) {
        auto it = rename.find(s.name);
        if (it != rename.end()) continue;  // unified, already present
        std::string name = s.name;
        if (out.has_species(name)) {
            name = b_label + "_" + name;
            if (out.has_species(name))
                throw NetworkError("compose: cannot disambiguate colliding species '" + s.name +
                                   "'");
            rename.emplace(s.name, name);
        }
        out.add_species(name, s.initial);
    }
    for (const auto& r : a.reactions()) out.add_reaction(r);
    for (const auto& r : b.reactions()) out.add_reaction(detail::rename_reaction(r, rename));
    return out;
}

}  // namespace crn
