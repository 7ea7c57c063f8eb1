#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "testutil.hpp"

using namespace pmuplace;

TEST_CASE("two-bus analytic solve") {
    PowerNetwork net = testutil::two_bus();
    Eigen::VectorXd theta = solve_dc_angles(net, {}, 1);
    CHECK(theta(0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(theta(1) == 0.0);
}

TEST_CASE("triangle analytic solve") {
    PowerNetwork net = testutil::triangle();
    Eigen::VectorXd theta = solve_dc_angles(net, {}, 2);
    CHECK(std::abs(theta(0) - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(theta(1) - 1.0 / 3.0) <= 1e-12);
    CHECK(theta(2) == 0.0);
}

TEST_CASE("residuals within 1e-8 for every event and reference") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    EventSet events = enumerate_single_line_outages(net);
    for (int r : {0, 5, 13}) {
        SignatureSet sigs = compute_signature_set(net, events, r);
        REQUIRE(sigs.n_events() == static_cast<int>(events.size()));
        for (int k = 0; k < sigs.n_events(); ++k) {
            const BMatrix b = build_b_matrix(net, events[static_cast<std::size_t>(k)].removed_branches);
            CHECK((b * sigs.angles[static_cast<std::size_t>(k)] - net.injections)
                      .lpNorm<Eigen::Infinity>() <= 1e-8);
            CHECK(sigs.angles[static_cast<std::size_t>(k)](r) == 0.0);
        }
    }
}

TEST_CASE("islanding outages are rejected") {
    PowerNetwork net = testutil::two_bus();
    const int removed[] = {0};
    CHECK_THROWS_AS(solve_dc_angles(net, removed, 0), IslandingUnsupported);

    // propagated with the offending event id
    EventSet bad{{0, {}}, {1, {0}}};
    CHECK_THROWS_WITH_AS(compute_signature_set(net, bad, 0), doctest::Contains("event 1"), Error);
}

TEST_CASE("single-event set is allowed") {
    PowerNetwork net = testutil::two_bus();
    EventSet only_base{{0, {}}};
    SignatureSet sigs = compute_signature_set(net, only_base, 1);
    CHECK(sigs.n_events() == 1);
    CHECK(sigs.angles[0](0) == doctest::Approx(0.1));
}

TEST_CASE("re-pinning equals a direct solve at the new reference") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    EventSet events = enumerate_single_line_outages(net);
    SignatureSet at0 = compute_signature_set(net, events, 0);
    SignatureSet shifted = repin(at0, 4);
    SignatureSet direct = compute_signature_set(net, events, 4);
    for (int k = 0; k < shifted.n_events(); ++k) {
        CHECK((shifted.angles[static_cast<std::size_t>(k)] -
               direct.angles[static_cast<std::size_t>(k)])
                  .lpNorm<Eigen::Infinity>() <= 1e-10);
        CHECK(shifted.angles[static_cast<std::size_t>(k)](4) == 0.0);
    }
}

TEST_CASE("reference invariance of pairwise differences") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    EventSet events = enumerate_single_line_outages(net);
    SignatureSet a = compute_signature_set(net, events, 2);
    SignatureSet b = compute_signature_set(net, events, 9);
    for (int i = 0; i < a.n_events(); ++i) {
        for (int j = i + 1; j < a.n_events(); j += 5) {
            Eigen::VectorXd da = a.angles[static_cast<std::size_t>(i)] -
                                 a.angles[static_cast<std::size_t>(j)];
            Eigen::VectorXd db = b.angles[static_cast<std::size_t>(i)] -
                                 b.angles[static_cast<std::size_t>(j)];
            // pin both difference vectors at bus 9
            da.array() -= da(9);
            CHECK((da - db).lpNorm<Eigen::Infinity>() <= 1e-10);
        }
    }
}

TEST_CASE("zero-flow line collides with the base signature") {
    // symmetric diamond: buses 3 and 4 sit at identical potentials, so the
    // (3,4) chord carries zero base flow and its outage signature equals the
    // base case.
    PowerNetwork net = parse_native_network(R"({
        "buses": [{"id": 1, "p_injection_pu": 1.0},
                  {"id": 2, "p_injection_pu": -1.0},
                  {"id": 3, "p_injection_pu": 0.0},
                  {"id": 4, "p_injection_pu": 0.0}],
        "branches": [{"from": 1, "to": 3, "x_pu": 1.0},
                     {"from": 1, "to": 4, "x_pu": 1.0},
                     {"from": 2, "to": 3, "x_pu": 1.0},
                     {"from": 2, "to": 4, "x_pu": 1.0},
                     {"from": 3, "to": 4, "x_pu": 1.0}],
        "slack": 1})");
    EventSet events = enumerate_single_line_outages(net);
    SignatureSet sigs = compute_signature_set(net, events, 0);

    // locate the event removing branch 3-4
    int zero_flow_event = -1;
    for (const OutageEvent& ev : events) {
        if (ev.removed_branches.size() == 1) {
            const Branch& br = net.branches[static_cast<std::size_t>(ev.removed_branches[0])];
            if ((net.id_of(br.from) == 3 && net.id_of(br.to) == 4) ||
                (net.id_of(br.from) == 4 && net.id_of(br.to) == 3))
                zero_flow_event = ev.id;
        }
    }
    REQUIRE(zero_flow_event > 0);
    const Eigen::VectorXd& base = sigs.angles[0];
    const Eigen::VectorXd& outage = sigs.angles[static_cast<std::size_t>(zero_flow_event)];

    // the line carries zero base flow...
    const Branch& br = net.branches[static_cast<std::size_t>(
        events[static_cast<std::size_t>(zero_flow_event)].removed_branches[0])];
    CHECK(std::abs(base(br.from) - base(br.to)) * br.susceptance() <= 1e-12);
    // ...so the signatures collide and the collision is reported, not fatal
    CHECK((outage - base).lpNorm<Eigen::Infinity>() <= 1e-9);
    const auto collisions = find_signature_collisions(sigs, 1e-9);
    REQUIRE(collisions.size() == 1);
    CHECK(collisions[0] == std::pair<int, int>{0, zero_flow_event});
}

TEST_CASE("determinism: identical inputs give bitwise-identical signatures") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    EventSet events = enumerate_single_line_outages(net);
    SignatureSet a = compute_signature_set(net, events, 3);
    SignatureSet b = compute_signature_set(net, events, 3);
    REQUIRE(a.n_events() == b.n_events());
    for (int k = 0; k < a.n_events(); ++k)
        CHECK(a.angles[static_cast<std::size_t>(k)] == b.angles[static_cast<std::size_t>(k)]);
}

TEST_CASE("signature CSV dump") {
    PowerNetwork net = testutil::triangle();
    EventSet events = enumerate_single_line_outages(net);
    SignatureSet sigs = compute_signature_set(net, events, 2);
    std::ostringstream out;
    write_signature_csv(out, sigs, net);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "event_id,bus_1,bus_2,bus_3");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == sigs.n_events());
}
