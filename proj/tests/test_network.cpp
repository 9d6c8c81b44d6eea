#include <catch2/catch_amalgamated.hpp>

#include "crn/network.hpp"
#include "support/generators.hpp"

using namespace crn;

TEST_CASE("net_effect is product minus reactant multiplicity") {
    Reaction r{{{"X", 2}, {"Y", 1}}, {{"Z", 1}}, 1.0};
    CHECK(net_effect(r, "X") == -2);
    CHECK(net_effect(r, "Y") == -1);
    CHECK(net_effect(r, "Z") == 1);

    Reaction autocat{{{"X", 1}, {"Z", 1}}, {{"X", 2}}, 1.0};
    CHECK(net_effect(autocat, "X") == 1);

    Reaction cat{{{"A", 1}, {"B", 1}}, {{"A", 1}, {"C", 1}}, 1.0};
    CHECK(net_effect(cat, "A") == 0);
    CHECK(net_effect(cat, "Q") == 0);  // absent from both sides
}

TEST_CASE("is_catalyst requires participation with zero net effect") {
    Reaction osc{{{"F", 1}, {"Cp", 1}}, {{"F", 1}, {"Cp", 1}, {"Sp", 1}}, 1.0};
    CHECK(is_catalyst(osc, "F"));
    CHECK(is_catalyst(osc, "Cp"));
    CHECK_FALSE(is_catalyst(osc, "Sp"));

    Reaction produce{{{"X", 1}}, {{"X", 1}, {"Y", 1}}, 1.0};
    CHECK_FALSE(is_catalyst(produce, "Y"));  // Y is not a reactant

    Reaction grow{{{"X", 2}, {"Y", 1}}, {{"X", 3}}, 1.0};
    CHECK_FALSE(is_catalyst(grow, "X"));  // net effect +1
}

TEST_CASE("net_effect flips sign when reactants and products swap") {
    testgen::Rng rng(7001);
    std::vector<std::string> pool{"A", "B", "C", "D"};
    for (int i = 0; i < 200; ++i) {
        Reaction r = testgen::random_reaction(rng, pool);
        Reaction swapped{r.products, r.reactants, r.rate};
        for (const auto& s : pool) {
            CHECK(net_effect(r, s) == -net_effect(swapped, s));
            if (is_catalyst(r, s)) CHECK(net_effect(r, s) == 0);
        }
    }
}

TEST_CASE("species name validation") {
    for (const char* good : {"X", "Vout", "Y_p", "S_ch1_m", "X1", "Y+", "Y-", "Xp"})
        CHECK(valid_species_name(good));
    for (const char* bad : {"", "1X", "_X", "X Y", "+", "X++", "species", "X.b"})
        CHECK_FALSE(valid_species_name(bad));
}

TEST_CASE("network construction rejects invalid input") {
    Network net;
    net.add_species("X", 1.0);
    CHECK_THROWS_AS(net.add_species("X"), NetworkError);
    CHECK_THROWS_AS(net.add_species("2bad"), NetworkError);
    CHECK_THROWS_AS(net.add_species("Y", -0.5), NetworkError);
    CHECK_THROWS_AS(net.add_reaction(Reaction{{{"X", 1}}, {}, 0.0}), NetworkError);
    CHECK_THROWS_AS(net.add_reaction(Reaction{{{"X", 1}}, {}, -2.0}), NetworkError);
    CHECK_THROWS_AS(net.add_reaction(Reaction{{{"X", 10}}, {}, 1.0}), NetworkError);
    CHECK_THROWS_AS(net.initial("Missing"), NetworkError);

    net.add_reaction(Reaction{{{"X", 1}}, {{"Q", 1}}, 1.0});
    CHECK(net.has_species("Q"));  // referenced species registered on demand
    CHECK(net.initial("Q") == 0.0);
}

TEST_CASE("compose with an empty network is the identity") {
    testgen::Rng rng(7002);
    for (int i = 0; i < 20; ++i) {
        Network net = testgen::random_network(rng);
        CHECK(compose(net, Network{}, {}) == net);
    }
}

TEST_CASE("compose is associative on disjoint networks") {
    Network a, b, c;
    a.add_species("A1", 0.5);
    a.add_reaction({{{"A1", 1}}, {{"A1", 1}, {"A2", 1}}, 1.5});
    b.add_species("B1", 0.25);
    b.add_reaction({{{"B1", 1}}, {}, 2.0});
    c.add_species("C1");
    c.add_reaction({{{"C1", 2}}, {{"C2", 1}}, 0.5});
    CHECK(compose(compose(a, b, {}), c, {}) == compose(a, compose(b, c, {}), {}));
}

TEST_CASE("compose unifies mapped species under the first network's name") {
    Network bp;
    bp.add_species("Yp");
    bp.add_reaction({{{"Xp", 1}}, {{"Xp", 1}, {"Yp", 1}}, 1.0});

    Network lp;
    lp.add_species("Vin");
    lp.add_species("Vout");
    lp.add_reaction({{{"Vout", 1}}, {}, 1.0});
    lp.add_reaction({{{"Vin", 1}}, {{"Vin", 1}, {"Vout", 1}}, 1.0});

    Network chain = compose(bp, lp, {{"Yp", "Vin"}});
    CHECK(chain.has_species("Yp"));
    CHECK_FALSE(chain.has_species("Vin"));
    // the low-pass drive reaction now reads Yp
    bool found = false;
    for (const auto& r : chain.reactions())
        if (r.reactants.contains("Yp") && r.products.contains("Vout")) found = true;
    CHECK(found);
}

TEST_CASE("compose rejects conflicting initial concentrations") {
    Network a, b;
    a.add_species("S", 1.0);
    b.add_species("S", 2.0);
    CHECK_THROWS_AS(compose(a, b, {{"S", "S"}}), NetworkError);
}

TEST_CASE("compose auto-prefixes colliding non-shared species") {
    Network a, b;
    a.add_species("M", 1.0);
    a.add_species("X");
    b.add_species("M", 2.0);  // same name, different meaning, not shared
    b.add_reaction({{{"M", 1}}, {}, 1.0});

    Network merged = compose(a, b, {}, "right");
    CHECK(merged.has_species("M"));
    CHECK(merged.has_species("right_M"));
    CHECK(merged.initial("M") == 1.0);
    CHECK(merged.initial("right_M") == 2.0);
    REQUIRE(merged.reactions().size() == 1);
    CHECK(merged.reactions()[0].reactants.contains("right_M"));
}

TEST_CASE("compose validates the shared map") {
    Network a, b;
    a.add_species("X");
    b.add_species("Y");
    CHECK_THROWS_AS(compose(a, b, {{"Missing", "Y"}}), NetworkError);
    CHECK_THROWS_AS(compose(a, b, {{"X", "Missing"}}), NetworkError);
}
