#include <doctest.h>

#include "evq/errors.hpp"
#include "evq/model.hpp"
#include "support/cases.hpp"

using namespace evq;

TEST_CASE("three-station build: node layout and routing") {
  const NetworkModel m = test::three_station_model({3, 2, 2});
  REQUIRE(m.station_count == 3);
  REQUIRE(m.node_count() == 12);  // 3 SS + 3 FS + 6 IS

  CHECK(m.ss_node == std::vector<int>{0, 1, 2});
  CHECK(m.fs_node == std::vector<int>{3, 4, 5});
  CHECK(m.nodes[0].label == "SS:s1");
  CHECK(m.nodes[3].label == "FS:s1");
  CHECK(m.nodes[3].servers == 3);
  CHECK(m.nodes[4].servers == 2);

  // IS nodes in lexicographic (origin, dest) order.
  CHECK(m.nodes[6].label == "IS:s1->s2");
  CHECK(m.nodes[7].label == "IS:s1->s3");
  CHECK(m.nodes[8].label == "IS:s2->s1");
  CHECK(m.nodes[9].label == "IS:s2->s3");
  CHECK(m.nodes[10].label == "IS:s3->s1");
  CHECK(m.nodes[11].label == "IS:s3->s2");

  // SS rows carry destination mixes onto the travel legs.
  CHECK(m.routing_entry(0, 6) == doctest::Approx(0.5));
  CHECK(m.routing_entry(0, 7) == doctest::Approx(0.5));
  CHECK(m.routing_entry(1, 8) == doctest::Approx(0.6));
  CHECK(m.routing_entry(1, 9) == doctest::Approx(0.4));

  // Travel legs split on the destination's charge probability.
  CHECK(m.routing_entry(6, 1) == doctest::Approx(2.0 / 3.0));  // to SS:s2
  CHECK(m.routing_entry(6, 4) == doctest::Approx(1.0 / 3.0));  // to FS:s2
  // Chargers hand vehicles straight back to the departure point.
  CHECK(m.routing_entry(4, 1) == doctest::Approx(1.0));

  CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("sixty-station build: uniform destinations over the other 59") {
  const NetworkModel m = test::sixty_station_model();
  CHECK(m.station_count == 60);
  CHECK(m.node_count() == 60 + 60 + 60 * 59);
  // First travel node sits right after the FS block and is s01 -> s02.
  CHECK(m.nodes[120].label == "IS:s01->s02");
  CHECK(m.routing_entry(m.ss_node[0], 120) == doctest::Approx(1.0 / 59.0));
}

TEST_CASE("service rates by node kind") {
  const NetworkModel m = test::three_station_model({3, 2, 2});
  const Node& ss = m.nodes[0];
  const Node& fs = m.nodes[4];  // 2 chargers, mean 0.5 h
  const Node& is = m.nodes[6];  // 1/3 h legs

  CHECK(service_rate(ss, 0) == 0.0);
  CHECK(service_rate(ss, 1) == doctest::Approx(10.0));
  CHECK(service_rate(ss, 7) == doctest::Approx(10.0));

  CHECK(service_rate(fs, 1) == doctest::Approx(2.0));
  CHECK(service_rate(fs, 2) == doctest::Approx(4.0));
  CHECK(service_rate(fs, 9) == doctest::Approx(4.0));

  CHECK(service_rate(is, 1) == doctest::Approx(3.0));
  CHECK(service_rate(is, 5) == doctest::Approx(15.0));
}

TEST_CASE("travel times: specific edges override the uniform default") {
  TravelSpec travel;
  travel.uniform_hours = 0.5;
  travel.mean_time[{"a", "b"}] = 0.25;
  CHECK(travel.edge_hours("a", "b") == doctest::Approx(0.25));
  CHECK(travel.edge_hours("b", "a") == doctest::Approx(0.5));

  TravelSpec bare;
  CHECK_THROWS_AS(bare.edge_hours("a", "b"), MissingTravelTime);
}

TEST_CASE("station spec validation") {
  auto stations = [] {
    std::vector<StationSpec> st(2);
    st[0].id = "a";
    st[1].id = "b";
    for (auto& s : st) {
      s.arrival_rate = 1.0;
      s.charge_prob = 0.5;
      s.mean_charge_time = 0.4;
      s.num_chargers = 1;
    }
    return st;
  };
  TravelSpec travel;
  travel.uniform_hours = 0.3;

  CHECK_NOTHROW(build_network(stations(), travel));

  {
    auto st = stations();
    st.pop_back();
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[1].id = "a";
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].arrival_rate = 0.0;
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].charge_prob = 1.5;
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].mean_charge_time = -1.0;
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].num_chargers = 0;
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].dest_probs = {{"missing", 1.0}};
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].dest_probs = {{"a", 0.5}, {"b", 0.5}};  // self loop
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].dest_probs = {{"b", 0.7}};  // does not sum to 1
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
  {
    auto st = stations();
    st[0].dest_probs = {{"b", -0.2}};
    CHECK_THROWS_AS(build_network(st, travel), InvalidStationSpec);
  }
}

TEST_CASE("model validation catches malformed hand-built structures") {
  NetworkModel m = test::toy_model();

  {
    NetworkModel bad = m;
    bad.routing[0][0].second = 0.3;  // row no longer sums to 1
    CHECK_THROWS_AS(validate_model(bad), InvalidModel);
  }
  {
    NetworkModel bad = test::three_station_model({1, 1, 1});
    std::swap(bad.routing[0][0], bad.routing[0][1]);  // unsorted row
    CHECK_THROWS_AS(validate_model(bad), InvalidModel);
  }
  {
    NetworkModel bad = m;
    bad.nodes[1].base_rate = 0.0;
    CHECK_THROWS_AS(validate_model(bad), InvalidModel);
  }
  {
    NetworkModel bad = m;
    bad.routing[0].front().first = 99;
    CHECK_THROWS_AS(validate_model(bad), InvalidModel);
  }
}

TEST_CASE("zero-probability legs get no travel node") {
  std::vector<StationSpec> st(3);
  st[0].id = "a";
  st[1].id = "b";
  st[2].id = "c";
  for (auto& x : st) {
    x.arrival_rate = 1.0;
    x.charge_prob = 0.5;
    x.mean_charge_time = 0.4;
    x.num_chargers = 1;
  }
  // A ring: a -> b -> c -> a.
  st[0].dest_probs = {{"b", 1.0}};
  st[1].dest_probs = {{"c", 1.0}};
  st[2].dest_probs = {{"a", 1.0}};
  TravelSpec travel;
  travel.uniform_hours = 0.3;
  const NetworkModel m = build_network(st, travel);
  CHECK(m.node_count() == 3 + 3 + 3);
}
