#pragma once

#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "crn/errors.hpp"
#include "crn/network.hpp"
#include "crn/numfmt.hpp"

namespace crn {

/// coeff * prod(species^exponent). Exponent map holds entries >= 1 only.
struct Monomial {
    double coeff = 0.0;
    std::map<std::string, int> powers;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical form: monomials sorted by their exponent maps (species name,
/// then exponent), like terms combined, zero coefficients dropped.
using Polynomial = std::vector<Monomial>;

inline Polynomial canonicalize(const Polynomial& p) {
    std::map<std::map<std::string, int>, double> acc;
    for (const auto& m : p) acc[m.powers] += m.coeff;
    Polynomial out;
    for (auto& [powers, coeff] : acc)
        if (coeff != 0.0) out.push_back({coeff, powers});
    return out;
}

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    Polynomial sum = a;
    sum.insert(sum.end(), b.begin(), b.end());
    return canonicalize(sum);
}

inline Polynomial poly_scale(const Polynomial& p, double factor) {
    Polynomial out = p;
    for (auto& m : out) m.coeff *= factor;
    return canonicalize(out);
}

inline Polynomial poly_sub(const Polynomial& a, const Polynomial& b) {
    return poly_add(a, poly_scale(b, -1.0));
}

/// The mass-action differential equations of a network: one polynomial
/// right-hand side per species, plus an index-compiled form for evaluation.
struct OdeSystem {
    std::vector<std::string> variables;  // network species order
    std::vector<Polynomial> rhs;

    struct Term {
        double coeff;
        std::vector<std::pair<int, int>> factors;  // (variable index, exponent)
    };
    std::vector<std::vector<Term>> compiled;

    std::size_t size() const { return variables.size(); }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            if (variables[i] == name) return i;
        throw NetworkError("unknown variable '" + name + "'");
    }

    /// Rebuilds the index-compiled term lists from `variables` and `rhs`.
    void finalize() {
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < variables.size(); ++i) index[variables[i]] = static_cast<int>(i);
        compiled.assign(variables.size(), {});
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            for (const auto& m : rhs[i]) {
                Term t{m.coeff, {}};
                for (const auto& [name, exp] : m.powers) t.factors.emplace_back(index.at(name), exp);
                compiled[i].push_back(std::move(t));
            }
        }
    }

    void evaluate_into(const double* state, double* out) const {
        for (std::size_t i = 0; i < compiled.size(); ++i) {
            double acc = 0.0;
            for (const auto& term : compiled[i]) {
                double v = term.coeff;
                for (const auto& [var, exp] : term.factors) {
                    double x = state[var];
                    for (int e = 0; e < exp; ++e) v *= x;
                }
                acc += v;
            }
            out[i] = acc;
        }
    }

    friend bool operator==(const OdeSystem& a, const OdeSystem& b) {
        return a.variables == b.variables && a.rhs == b.rhs;
    }
};

/// Exact symbolic mass-action system: d[X]/dt = sum over reactions of
/// net_effect(X) * rate * prod(reactant^multiplicity). Catalyst terms cancel
/// structurally, so inputs that are only catalyzed get no terms at all.
inline OdeSystem compile_odes(const Network& net) {
    OdeSystem sys;
    for (const auto& s : net.species()) sys.variables.push_back(s.name);
    sys.rhs.assign(sys.variables.size(), {});
    for (const auto& r : net.reactions()) {
        Monomial rate_term;
        rate_term.coeff = r.rate;
        for (const auto& [name, mult] : r.reactants) rate_term.powers[name] = mult;
        for (std::size_t i = 0; i < sys.variables.size(); ++i) {
            int delta = net_effect(r, sys.variables[i]);
            if (delta == 0) continue;
            Monomial m = rate_term;
            m.coeff *= delta;
            sys.rhs[i].push_back(std::move(m));
        }
    }
    for (auto& p : sys.rhs) p = canonicalize(p);
    sys.finalize();
    return sys;
}

inline std::vector<double> evaluate_rhs(const OdeSystem& sys, std::span<const double> state) {
    if (state.size() != sys.size())
        throw NetworkError("state dimension " + std::to_string(state.size()) +
                           " does not match system dimension " + std::to_string(sys.size()));
    std::vector<double> out(sys.size());
    sys.evaluate_into(state.data(), out.data());
    return out;
}

/// Replaces the given variables by constant values: their factors are folded
/// into coefficients and their equations removed. Used to compare a
/// catalyst-tuned network against its rate-constant twin.
inline OdeSystem substitute_constants(const OdeSystem& sys,
                                      const std::map<std::string, double>& constants) {
    OdeSystem out;
    for (std::size_t i = 0; i < sys.variables.size(); ++i) {
        if (constants.contains(sys.variables[i])) continue;
        out.variables.push_back(sys.variables[i]);
        Polynomial p;
        for (const auto& m : sys.rhs[i]) {
            Monomial folded;
            folded.coeff = m.coeff;
            for (const auto& [name, exp] : m.powers) {
                auto it = constants.find(name);
                if (it == constants.end()) {
                    folded.powers[name] = exp;
                } else {
                    for (int e = 0; e < exp; ++e) folded.coeff *= it->second;
                }
            }
            p.push_back(std::move(folded));
        }
        out.rhs.push_back(canonicalize(p));
    }
    out.finalize();
    return out;
}

inline std::string format_polynomial(const Polynomial& p) {
    if (p.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& m : p) {
        double coeff = m.coeff;
        if (first) {
            if (coeff < 0) {
                os << '-';
                coeff = -coeff;
            }
        } else {
            os << (coeff < 0 ? " - " : " + ");
            coeff = std::abs(coeff);
        }
        first = false;
        bool wrote_factor = false;
        if (coeff != 1.0 || m.powers.empty()) {
            os << format_double(coeff);
            wrote_factor = true;
        }
        for (const auto& [name, exp] : m.powers) {
            if (wrote_factor) os << '*';
            os << name;
            if (exp > 1) os << '^' << exp;
            wrote_factor = true;
        }
    }
    return os.str();
}

/// Human-readable listing, one "name' = polynomial" line per species.
inline std::string format_system(const OdeSystem& sys) {
    std::ostringstream os;
    for (std::size_t i = 0; i < sys.variables.size(); ++i)
        os << sys.variables[i] << "' = " << format_polynomial(sys.rhs[i]) << '\n';
    return os.str();
}

}  // namespace crn
