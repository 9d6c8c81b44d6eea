#include <catch2/catch_amalgamated.hpp>

#include "crn/dsl.hpp"
#include "support/generators.hpp"

using namespace crn;

TEST_CASE("parse a reaction with multiplicities") {
    Network net = parse_network("2X + Y ->{1.0} 3X\n");
    REQUIRE(net.reactions().size() == 1);
    const Reaction& r = net.reactions()[0];
    CHECK(r.reactants == Multiset{{"X", 2}, {"Y", 1}});
    CHECK(r.products == Multiset{{"X", 3}});
    CHECK(r.rate == 1.0);
    REQUIRE(net.species().size() == 2);
    CHECK(net.species()[0].name == "X");
    CHECK(net.species()[1].name == "Y");
}

TEST_CASE("parse an annihilation reaction with empty products") {
    Network net = parse_network("Yp + Ym ->{1.0} 0");
    REQUIRE(net.reactions().size() == 1);
    CHECK(net.reactions()[0].products.empty());
    CHECK(net.reactions()[0].reactants == Multiset{{"Yp", 1}, {"Ym", 1}});
}

TEST_CASE("parse species declarations, comments, and defaults") {
    Network net = parse_network(
        "# a comment line\n"
        "species X = 0.5\n"
        "species Y   # default initial\n"
        "\n"
        "X ->{2} X + Y  # trailing comment\n");
    CHECK(net.initial("X") == 0.5);
    CHECK(net.initial("Y") == 0.0);
    REQUIRE(net.reactions().size() == 1);
    CHECK(net.reactions()[0].rate == 2.0);
}

TEST_CASE("trailing rail markers are part of the name") {
    Network net = parse_network("Y+ + Y- ->{1} 0\nX ->{1} X + Y+\n");
    CHECK(net.has_species("Y+"));
    CHECK(net.has_species("Y-"));
    CHECK(net.has_species("X"));
    // round trip keeps the markers
    CHECK(parse_network(serialize_network(net)) == net);
}

TEST_CASE("parse errors carry line and column") {
    auto check_error = [](const std::string& text, int line) {
        try {
            parse_network(text);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line == line);
            CHECK(e.column >= 1);
        }
    };
    check_error("X ->{-1} Y", 1);                      // nonpositive rate
    check_error("X ->{0} Y", 1);                       // zero rate
    check_error("species X = 1\nspecies X = 2\n", 2);  // duplicate declaration
    check_error("species X = -1", 1);                  // negative initial
    check_error("X + ->{1} Y", 1);                     // missing term
    check_error("X Y ->{1} Z", 1);                     // missing separator
    check_error("X ->{1}", 1);                         // missing product side
    check_error("X -> Y", 1);                          // missing rate braces
    check_error("0X ->{1} Y", 1);                      // zero multiplicity
    check_error("12X ->{1} Y", 1);                     // multiplicity too wide
    check_error("X ->{1} Y extra", 1);                 // trailing garbage
}

TEST_CASE("unspaced reaction arrows still parse") {
    Network net = parse_network("X->{1.5}Y");
    REQUIRE(net.reactions().size() == 1);
    CHECK(net.reactions()[0].reactants == Multiset{{"X", 1}});
    CHECK(net.reactions()[0].products == Multiset{{"Y", 1}});
}

TEST_CASE("round trip is the identity on random networks") {
    testgen::Rng rng(7100);
    for (int i = 0; i < 100; ++i) {
        Network net = testgen::random_network(rng);
        Network back = parse_network(serialize_network(net));
        CHECK(back == net);
    }
}

TEST_CASE("serialization is a fixed point after one cycle") {
    const char* fixtures[] = {
        // first-order low-pass (pure pursuit), RC = 1
        "species Vin = 1\nVout ->{1} 0\nVin ->{1} Vin + Vout\n",
        // three-reaction cycle
        "X + Y ->{2} 2Z\nX + Z ->{3} 2X\nY + Z ->{5} 2Y\n",
        // oscillator fragment with annihilation
        "species F = 0.1\nspecies Cp = 1\nF + Cp ->{1} F + Cp + Sp\nSp + Sm ->{1} 0\n",
        "",  // empty network
    };
    testgen::Rng rng(7101);
    for (const char* fixture : fixtures) {
        std::string canon = serialize_network(parse_network(fixture));
        CHECK(serialize_network(parse_network(canon)) == canon);
    }
    for (int i = 0; i < 50; ++i) {
        std::string canon = serialize_network(testgen::random_network(rng));
        CHECK(serialize_network(parse_network(canon)) == canon);
    }
}

TEST_CASE("empty network serializes to species-only text") {
    Network net;
    CHECK(serialize_network(net).empty());
    net.add_species("X", 0.25);
    CHECK(serialize_network(net) == "species X = 0.25\n");
}

TEST_CASE("JSON interchange uses the documented field names") {
    Network net = parse_network("species X = 0.5\n2X + Y ->{1.5} 3X\n");
    nlohmann::json j = network_to_json(net);
    REQUIRE(j.contains("species"));
    REQUIRE(j.contains("reactions"));
    CHECK(j["species"][0]["name"] == "X");
    CHECK(j["species"][0]["init"] == 0.5);
    CHECK(j["reactions"][0]["rate"] == 1.5);
    CHECK(j["reactions"][0]["reactants"][0]["name"] == "X");
    CHECK(j["reactions"][0]["reactants"][0]["mult"] == 2);
    CHECK(j["reactions"][0]["products"][0]["mult"] == 3);

    CHECK(network_from_json(j) == net);
}

TEST_CASE("JSON round trip on random networks") {
    testgen::Rng rng(7102);
    for (int i = 0; i < 50; ++i) {
        Network net = testgen::random_network(rng);
        CHECK(network_from_json(network_to_json(net)) == net);
    }
}

TEST_CASE("malformed JSON is rejected with a clear error") {
    CHECK_THROWS_AS(network_from_json(nlohmann::json{{"reactions", 5}}), NetworkError);
    nlohmann::json missing_rate = {{"species", nlohmann::json::array()},
                                   {"reactions", {{{"reactants", nlohmann::json::array()}}}}};
    CHECK_THROWS_AS(network_from_json(missing_rate), NetworkError);
}
