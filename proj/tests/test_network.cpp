#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "testutil.hpp"

using namespace pmuplace;

// Fixture constants for the bundled cases, cross-checked below against the
// independent bridge oracle.
namespace {
constexpr int kCase14Buses = 14;
constexpr int kCase14Branches = 20;
constexpr int kCase14Events = 19;  // one bridge (7-8)
constexpr int kCase24Branches = 38;
constexpr int kCase24Events = 37;
constexpr int kCase30Branches = 41;
constexpr int kCase30Events = 38;
}  // namespace

TEST_CASE("minimal two-bus case") {
    PowerNetwork net = testutil::two_bus();
    CHECK(net.n_buses == 2);
    CHECK(net.branches.size() == 1);
    CHECK(net.injections(0) == doctest::Approx(1.0));
    CHECK(net.injections(1) == doctest::Approx(-1.0));
    CHECK(net.branches[0].susceptance() == doctest::Approx(10.0));
    CHECK(net.slack_bus == 0);
    CHECK(std::abs(net.injections.sum()) <= 1e-9);
}

TEST_CASE("IEEE 14-bus fixture") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    CHECK(net.n_buses == kCase14Buses);
    CHECK(static_cast<int>(net.branches.size()) == kCase14Branches);
    CHECK(std::abs(net.injections.sum()) <= 1e-9);
    CHECK(net.id_of(net.slack_bus) == 1);

    EventSet events = enumerate_single_line_outages(net);
    CHECK(static_cast<int>(events.size()) - 1 == kCase14Events);
    CHECK(events.front().removed_branches.empty());

    // K = L - bridges, bridge set from the independent oracle
    const auto bridges = testutil::find_bridges(net);
    CHECK(static_cast<int>(events.size()) - 1 ==
          kCase14Branches - static_cast<int>(bridges.size()));
    CHECK(bridges.size() == 1);
    // the lone bridge hangs bus 8 off bus 7
    const Branch& br = net.branches[static_cast<std::size_t>(bridges[0])];
    CHECK(((net.id_of(br.from) == 7 && net.id_of(br.to) == 8) ||
           (net.id_of(br.from) == 8 && net.id_of(br.to) == 7)));

    // removing it splits the network
    const int removed[] = {bridges[0]};
    CHECK(connected_components(net, removed).count == 2);
}

TEST_CASE("24-bus and 30-bus fixtures") {
    PowerNetwork rts = load_network(testutil::data_path("case24_ieee_rts.m"), CaseFormat::kMatpower);
    CHECK(rts.n_buses == 24);
    CHECK(static_cast<int>(rts.branches.size()) == kCase24Branches);
    CHECK(static_cast<int>(enumerate_single_line_outages(rts).size()) - 1 == kCase24Events);
    CHECK(testutil::find_bridges(rts).size() == kCase24Branches - kCase24Events);

    PowerNetwork c30 = load_network(testutil::data_path("case30.m"), CaseFormat::kMatpower);
    CHECK(c30.n_buses == 30);
    CHECK(static_cast<int>(c30.branches.size()) == kCase30Branches);
    CHECK(static_cast<int>(enumerate_single_line_outages(c30).size()) - 1 == kCase30Events);
    CHECK(testutil::find_bridges(c30).size() == kCase30Branches - kCase30Events);
}

TEST_CASE("status-0 branches are dropped") {
    std::string text = testutil::kTwoBusCase;
    // add a second, out-of-service branch
    const std::string needle = "	1	2	0.01	0.1	0	250	250	250	0	0	1	-360	360;";
    const std::string extra = needle + "\n	1	2	0.02	0.2	0	250	250	250	0	0	0	-360	360;";
    text.replace(text.find(needle), needle.size(), extra);
    PowerNetwork net = parse_matpower_case(text);
    CHECK(net.branches.size() == 1);
    CHECK(net.branches[0].x == doctest::Approx(0.1));
}

TEST_CASE("matpower parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_matpower_case("mpc.baseMVA = 100;"), ParseError);

    std::string bad = testutil::kTwoBusCase;
    bad.replace(bad.find("0.1"), 3, "abc");
    CHECK_THROWS_WITH_AS(parse_matpower_case(bad), doctest::Contains("non-numeric"), ParseError);
    try {
        parse_matpower_case(bad);
    } catch (const ParseError& e) {
        CHECK(e.line() > 0);
    }

    std::string unknown_bus = testutil::kTwoBusCase;
    unknown_bus.replace(unknown_bus.find("	1	2	0.01"), 8, "	1	9	0.01");
    CHECK_THROWS_WITH_AS(parse_matpower_case(unknown_bus), doctest::Contains("unknown bus"),
                         ParseError);

    std::string no_slack = testutil::kTwoBusCase;
    no_slack.replace(no_slack.find("	1	3	0"), 4, "	1	2	0");
    CHECK_THROWS_WITH_AS(parse_matpower_case(no_slack), doctest::Contains("type-3"), ParseError);
}

TEST_CASE("native format round trip") {
    PowerNetwork net = testutil::triangle();
    CHECK(net.n_buses == 3);
    CHECK(net.branches.size() == 3);
    CHECK(net.injections(0) == doctest::Approx(1.0));
    CHECK(net.injections(2) == doctest::Approx(-1.0));

    SUBCASE("duplicate bus id") {
        std::string dup = testutil::kTriangleJson;
        dup.replace(dup.find("\"id\": 2"), 7, "\"id\": 1");
        CHECK_THROWS_AS(parse_native_network(dup), ParseError);
    }
    SUBCASE("empty branch list parses") {
        PowerNetwork empty = parse_native_network(R"({
            "buses": [{"id": 5, "p_injection_pu": 0.0}],
            "branches": [],
            "slack": 5})");
        CHECK(empty.n_buses == 1);
        CHECK(empty.branches.empty());
    }
    SUBCASE("schema violation") {
        CHECK_THROWS_AS(parse_native_network(R"({"buses": 3})"), ParseError);
        CHECK_THROWS_AS(parse_native_network("not json"), ParseError);
    }
}

TEST_CASE("sparse original ids are renumbered") {
    PowerNetwork net = parse_native_network(R"({
        "buses": [{"id": 101, "p_injection_pu": 0.5},
                  {"id": 7, "p_injection_pu": -0.5},
                  {"id": 900, "p_injection_pu": 0.0}],
        "branches": [{"from": 101, "to": 7, "x_pu": 0.2},
                     {"from": 7, "to": 900, "x_pu": 0.4},
                     {"from": 900, "to": 101, "x_pu": 0.4}],
        "slack": 7})");
    CHECK(net.n_buses == 3);
    CHECK(net.id_of(0) == 101);
    CHECK(net.index_of(900) == 2);
    CHECK(net.slack_bus == 1);
    CHECK_THROWS_AS(net.index_of(42), Error);
}

TEST_CASE("B matrix examples") {
    PowerNetwork two = testutil::two_bus();
    BMatrix b = build_b_matrix(two);
    CHECK(b(0, 0) == doctest::Approx(10.0));
    CHECK(b(0, 1) == doctest::Approx(-10.0));
    CHECK(b(1, 0) == doctest::Approx(-10.0));
    CHECK(b(1, 1) == doctest::Approx(10.0));

    PowerNetwork tri = testutil::triangle();
    const int removed[] = {0};  // branch (1,2)
    BMatrix bt = build_b_matrix(tri, removed);
    CHECK(bt(0, 0) == doctest::Approx(1.0));
    CHECK(bt(1, 1) == doctest::Approx(1.0));
    CHECK(bt(2, 2) == doctest::Approx(2.0));
    CHECK(bt(0, 1) == doctest::Approx(0.0));
    CHECK(bt(0, 2) == doctest::Approx(-1.0));
    CHECK(bt(1, 2) == doctest::Approx(-1.0));
}

TEST_CASE("B matrix row sums vanish and rank matches components") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    std::mt19937_64 rng(1234);

    auto check_config = [&](std::span<const int> removed) {
        BMatrix b = build_b_matrix(net, removed);
        CHECK((b - b.transpose()).norm() == 0.0);
        CHECK(b.rowwise().sum().lpNorm<Eigen::Infinity>() <= 1e-12);

        Eigen::SelfAdjointEigenSolver<BMatrix> es(b);
        const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        const int rank = (es.eigenvalues().array().abs() > 1e-9 * std::max(lmax, 1.0)).count();
        const Components comps = connected_components(net, removed);
        CHECK(rank == net.n_buses - comps.count);
    };

    check_config({});
    for (const OutageEvent& ev : enumerate_single_line_outages(net))
        check_config(ev.removed_branches);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> removed;
        for (int l = 0; l < static_cast<int>(net.branches.size()); ++l)
            if (rng() % 4 == 0) removed.push_back(l);
        check_config(removed);
    }
}

TEST_CASE("B matrix removal equals base minus branch contributions") {
    PowerNetwork net = load_network(testutil::data_path("case14.m"), CaseFormat::kMatpower);
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> removed;
        for (int l = 0; l < static_cast<int>(net.branches.size()); ++l)
            if (rng() % 3 == 0) removed.push_back(l);
        BMatrix expected = build_b_matrix(net);
        for (int l : removed) {
            const Branch& br = net.branches[static_cast<std::size_t>(l)];
            const double w = br.susceptance();
            expected(br.from, br.from) -= w;
            expected(br.to, br.to) -= w;
            expected(br.from, br.to) += w;
            expected(br.to, br.from) += w;
        }
        CHECK((build_b_matrix(net, removed) - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("connectivity basics") {
    PowerNetwork two = testutil::two_bus();
    CHECK(connected_components(two).count == 1);
    const int removed[] = {0};
    CHECK(connected_components(two, removed).count == 2);

    EventSet ev2 = enumerate_single_line_outages(two);
    CHECK(ev2.size() == 1);  // only the non-outage event; the branch is a bridge

    EventSet ev3 = enumerate_single_line_outages(testutil::triangle());
    CHECK(ev3.size() == 4);  // triangle has no bridges
}

TEST_CASE("enumerated events never disconnect") {
    for (const char* name : {"case14.m", "case24_ieee_rts.m", "case30.m"}) {
        PowerNetwork net = load_network(testutil::data_path(name), CaseFormat::kMatpower);
        for (const OutageEvent& ev : enumerate_single_line_outages(net))
            CHECK(connected_components(net, ev.removed_branches).count == 1);
    }
}
