#pragma once

#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crn/errors.hpp"
#include "crn/network.hpp"
#include "crn/numfmt.hpp"

namespace crn {

// Line-oriented network text format:
//
//   # comment
//   species X = 0.5          declaration with initial concentration (default 0)
//   2X + Y ->{1.5} 3X        reaction; integer multiplicities, rate in braces
//   Yp + Ym ->{1} 0          `0` denotes the empty side
//
// Species referenced only by reactions are registered with initial 0.

namespace detail {

class LineScanner {
public:
    LineScanner(std::string_view text, int line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char peek2() const { return pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0'; }
    void advance() { ++pos_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
    }

    void expect(char c, const std::string& what) {
        skip_ws();
        if (peek() != c) fail("expected " + what);
        advance();
    }

    bool try_literal(std::string_view lit) {
        skip_ws();
        if (text_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }

    /// Identifier with optional attached '+'/'-' rail marker. The marker is
    /// absorbed only when it cannot start a separator ('+' before another
    /// term) or an arrow ('->').
    std::string identifier() {
        skip_ws();
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected species name");
        std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        if (peek() == '+' || peek() == '-') {
            char next = peek2();
            bool starts_arrow = peek() == '-' && next == '>';
            bool starts_term = std::isalnum(static_cast<unsigned char>(next)) || next == '_';
            if (!starts_arrow && !starts_term) advance();
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    double number(const std::string& what) {
        skip_ws();
        std::size_t start = pos_;
        if (peek() == '+' || peek() == '-') advance();
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
               peek() == '+' || peek() == '-')
            advance();
        double value = 0.0;
        if (pos_ == start || !parse_double(text_.substr(start, pos_ - start), value)) {
            pos_ = start;
            fail("expected " + what);
        }
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

inline Multiset parse_side(LineScanner& sc) {
    sc.skip_ws();
    if (sc.peek() == '0' && !std::isalnum(static_cast<unsigned char>(sc.peek2())) &&
        sc.peek2() != '_') {
        sc.advance();
        return {};
    }
    Multiset side;
    while (true) {
        sc.skip_ws();
        int mult = 1;
        if (std::isdigit(static_cast<unsigned char>(sc.peek()))) {
            mult = sc.peek() - '0';
            sc.advance();
            if (std::isdigit(static_cast<unsigned char>(sc.peek())))
                sc.fail("multiplicity must be between 1 and " + std::to_string(kMaxMultiplicity));
            if (mult == 0) sc.fail("multiplicity must be >= 1");
        }
        side[sc.identifier()] += mult;
        sc.skip_ws();
        if (sc.peek() == '+') {
            sc.advance();
            continue;
        }
        return side;
    }
}

}  // namespace detail

inline Network parse_network(std::string_view text) {
    Network net;
    std::set<std::string> declared;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        detail::LineScanner sc(line, line_no);
        if (sc.done()) {
            if (eol == text.size()) break;
            continue;
        }

        if (sc.try_literal("species") && (sc.peek() == ' ' || sc.peek() == '\t')) {
            std::string name = sc.identifier();
            if (!valid_species_name(name)) sc.fail("invalid species name '" + name + "'");
            double initial = 0.0;
            if (!sc.done()) {
                sc.expect('=', "'=' after species name");
                initial = sc.number("initial concentration");
                if (!sc.done()) sc.fail("unexpected trailing input");
            }
            if (initial < 0.0) sc.fail("negative initial concentration");
            if (!declared.insert(name).second) sc.fail("duplicate species declaration '" + name + "'");
            if (net.has_species(name))
                net.set_initial(name, initial);
            else
                net.add_species(name, initial);
            continue;
        }

        Reaction r;
        r.reactants = detail::parse_side(sc);
        sc.skip_ws();
        if (!sc.try_literal("->")) sc.fail("expected '->'");
        sc.expect('{', "'{' before rate constant");
        r.rate = sc.number("rate constant");
        sc.expect('}', "'}' after rate constant");
        if (!(r.rate > 0.0)) sc.fail("nonpositive rate constant");
        r.products = detail::parse_side(sc);
        if (!sc.done()) sc.fail("unexpected trailing input");
        for (const Multiset* side : {&r.reactants, &r.products})
            for (const auto& [name, mult] : *side) {
                if (!valid_species_name(name)) sc.fail("invalid species name '" + name + "'");
                if (mult > kMaxMultiplicity)
                    sc.fail("multiplicity must be between 1 and " + std::to_string(kMaxMultiplicity));
            }
        net.add_reaction(std::move(r));

        if (eol == text.size()) break;
    }
    return net;
}

namespace detail {

inline void write_side(std::ostream& os, const Multiset& side) {
    if (side.empty()) {
        os << '0';
        return;
    }
    bool first = true;
    for (const auto& [name, mult] : side) {
        if (!first) os << " + ";
        first = false;
        if (mult != 1) os << mult;
        os << name;
    }
}

}  // namespace detail

/// Canonical text form: one declaration per species in network order, then
/// reactions in order with sides in multiset (name) order. Parsing the output
/// reproduces the network exactly; a second cycle is byte-identical.
inline std::string serialize_network(const Network& net) {
    std::ostringstream os;
    for (const auto& s : net.species())
        os << "species " << s.name << " = " << format_double(s.initial) << '\n';
    if (!net.reactions().empty()) {
        if (!net.species().empty()) os << '\n';
        for (const auto& r : net.reactions()) {
            detail::write_side(os, r.reactants);
            os << " ->{" << format_double(r.rate) << "} ";
            detail::write_side(os, r.products);
            os << '\n';
        }
    }
    return os.str();
}

// JSON interchange: {species: [{name, init}], reactions: [{reactants:
// [{name, mult}], products: [...], rate}]}.

inline nlohmann::json network_to_json(const Network& net) {
    nlohmann::json j;
    j["species"] = nlohmann::json::array();
    for (const auto& s : net.species())
        j["species"].push_back({{"name", s.name}, {"init", s.initial}});
    j["reactions"] = nlohmann::json::array();
    auto side_json = [](const Multiset& side) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, mult] : side) arr.push_back({{"name", name}, {"mult", mult}});
        return arr;
    };
    for (const auto& r : net.reactions())
        j["reactions"].push_back({{"reactants", side_json(r.reactants)},
                                  {"products", side_json(r.products)},
                                  {"rate", r.rate}});
    return j;
}

inline Network network_from_json(const nlohmann::json& j) {
    try {
        Network net;
        for (const auto& s : j.value("species", nlohmann::json::array()))
            net.add_species(s.at("name").get<std::string>(), s.value("init", 0.0));
        auto side_from = [](const nlohmann::json& arr) {
            Multiset side;
            for (const auto& e : arr)
                side[e.at("name").get<std::string>()] += e.value("mult", 1);
            return side;
        };
        for (const auto& rj : j.value("reactions", nlohmann::json::array())) {
            Reaction r;
            r.reactants = side_from(rj.value("reactants", nlohmann::json::array()));
            r.products = side_from(rj.value("products", nlohmann::json::array()));
            r.rate = rj.at("rate").get<double>();
            net.add_reaction(std::move(r));
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError(std::string("malformed network JSON: ") + e.what());
    }
}

}  // namespace crn
