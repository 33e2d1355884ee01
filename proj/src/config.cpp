#include "evq/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "evq/errors.hpp"

namespace evq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw InvalidConfig(where + ": " + msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) fail(where, "unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& where) {
  if (!obj.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return obj.at(key);
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

// Station ids end up in CSV cells and edge keys, so keep them to a plain
// token alphabet.
void check_id(const std::string& id, const std::string& where) {
  if (id.empty()) fail(where, "station id is empty");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) {
      fail(where, "station id '" + id +
                      "' may only use letters, digits, '_', '-', '.'");
    }
  }
}

double default_cs2(DistFamily family) {
  return family == DistFamily::kDeterministic ? 0.0 : 1.0;
}

// Reads a family tag plus optional cs2 and validates the combination.
std::pair<DistFamily, double> read_family(const json& obj,
                                          const char* family_key,
                                          const char* cs2_key,
                                          const std::string& where) {
  DistFamily family = DistFamily::kExponential;
  if (obj.contains(family_key)) {
    try {
      family = parse_dist_family(as_string(obj.at(family_key),
                                           where + "." + family_key));
    } catch (const InvalidConfig& e) {
      fail(where + "." + family_key, e.what());
    }
  }
  double cs2 = default_cs2(family);
  if (obj.contains(cs2_key)) {
    cs2 = as_number(obj.at(cs2_key), where + "." + cs2_key);
  }
  try {
    Distribution::make(family, 1.0, cs2);
  } catch (const InvalidConfig& e) {
    fail(where, e.what());
  }
  return {family, cs2};
}

int station_index(const std::vector<std::string>& ids, const std::string& id,
                  const std::string& where) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return static_cast<int>(i);
  }
  fail(where, "unknown station id '" + id + "'");
}

// A per-station economics value: a bare number broadcasts, an object maps
// every station id to its value (all stations must appear).
std::vector<double> station_numbers(const json& v, const std::string& where,
                                    const std::vector<std::string>& ids) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_object()) fail(where, "expected a number or a station-id map");
  std::vector<double> out(ids.size(), 0.0);
  std::vector<bool> seen(ids.size(), false);
  for (const auto& item : v.items()) {
    const int idx = station_index(ids, item.key(), where);
    out[idx] = as_number(item.value(), where + "." + item.key());
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen[i]) fail(where, "missing station '" + ids[i] + "'");
  }
  return out;
}

std::vector<int> station_ints(const json& v, const std::string& where,
                              const std::vector<std::string>& ids) {
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_object()) fail(where, "expected an integer or a station-id map");
  std::vector<int> out(ids.size(), 0);
  std::vector<bool> seen(ids.size(), false);
  for (const auto& item : v.items()) {
    const int idx = station_index(ids, item.key(), where);
    out[idx] = as_int(item.value(), where + "." + item.key());
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen[i]) fail(where, "missing station '" + ids[i] + "'");
  }
  return out;
}

StationSpec read_station(const json& obj, const std::string& where,
                         bool with_id) {
  if (!obj.is_object()) fail(where, "expected an object");
  if (with_id) {
    check_keys(obj, where,
               {"id", "arrival_rate", "charge_prob", "mean_charge_time_hours",
                "num_chargers", "dest_probs"});
  } else {
    check_keys(obj, where,
               {"arrival_rate", "charge_prob", "mean_charge_time_hours",
                "num_chargers"});
  }
  StationSpec st;
  if (with_id) {
    st.id = as_string(require(obj, "id", where), where + ".id");
    check_id(st.id, where + ".id");
  }
  st.arrival_rate =
      as_number(require(obj, "arrival_rate", where), where + ".arrival_rate");
  st.charge_prob =
      as_number(require(obj, "charge_prob", where), where + ".charge_prob");
  st.mean_charge_time = as_number(require(obj, "mean_charge_time_hours", where),
                                  where + ".mean_charge_time_hours");
  st.num_chargers = as_int(require(obj, "num_chargers", where),
                           where + ".num_chargers");
  if (with_id && obj.contains("dest_probs")) {
    const json& dp = obj.at("dest_probs");
    if (!dp.is_object()) fail(where + ".dest_probs", "expected an object");
    for (const auto& item : dp.items()) {
      st.dest_probs[item.key()] =
          as_number(item.value(), where + ".dest_probs." + item.key());
    }
  }
  return st;
}

std::vector<StationSpec> read_stations(const json& v) {
  const std::string where = "stations";
  std::vector<StationSpec> out;
  if (v.is_array()) {
    if (v.empty()) fail(where, "needs at least one station");
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(
          read_station(v[i], where + "[" + std::to_string(i) + "]", true));
    }
    return out;
  }
  if (!v.is_object()) {
    fail(where, "expected an array of stations or a {count, prototype} object");
  }
  check_keys(v, where, {"count", "prototype", "id_prefix"});
  const int count = as_int(require(v, "count", where), where + ".count");
  if (count < 2) fail(where + ".count", "a network needs >= 2 stations");
  std::string prefix = "s";
  if (v.contains("id_prefix")) {
    prefix = as_string(v.at("id_prefix"), where + ".id_prefix");
    check_id(prefix, where + ".id_prefix");
  }
  const StationSpec proto =
      read_station(require(v, "prototype", where), where + ".prototype", false);
  int width = 1;
  for (int c = count; c >= 10; c /= 10) ++width;
  for (int i = 1; i <= count; ++i) {
    StationSpec st = proto;
    std::string num = std::to_string(i);
    st.id = prefix + std::string(width - num.size(), '0') + num;
    out.push_back(std::move(st));
  }
  return out;
}

TravelSpec read_travel(const json& v,
                       const std::vector<std::string>& station_ids) {
  const std::string where = "travel";
  if (!v.is_object()) fail(where, "expected an object");
  check_keys(v, where, {"uniform_hours", "edges", "family", "cs2"});
  TravelSpec travel;
  if (v.contains("uniform_hours")) {
    travel.uniform_hours =
        as_number(v.at("uniform_hours"), where + ".uniform_hours");
    if (!(travel.uniform_hours > 0.0)) {
      fail(where + ".uniform_hours", "must be positive");
    }
  }
  if (v.contains("edges")) {
    const json& edges = v.at("edges");
    if (!edges.is_array()) fail(where + ".edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string ew = where + ".edges[" + std::to_string(i) + "]";
      const json& e = edges[i];
      if (!e.is_object()) fail(ew, "expected an object");
      check_keys(e, ew, {"from", "to", "hours"});
      const std::string from = as_string(require(e, "from", ew), ew + ".from");
      const std::string to = as_string(require(e, "to", ew), ew + ".to");
      station_index(station_ids, from, ew + ".from");
      station_index(station_ids, to, ew + ".to");
      const double hours = as_number(require(e, "hours", ew), ew + ".hours");
      if (!(hours > 0.0)) fail(ew + ".hours", "must be positive");
      travel.mean_time[{from, to}] = hours;
    }
  }
  if (travel.uniform_hours < 0.0 && travel.mean_time.empty()) {
    fail(where, "needs uniform_hours or a nonempty edges list");
  }
  const auto [family, cs2] = read_family(v, "family", "cs2", where);
  travel.family = dist_family_name(family);
  travel.cs2 = cs2;
  return travel;
}

EconomicsSpec read_economics(const json& v, const NetworkModel& model) {
  const std::string where = "economics";
  if (!v.is_object()) fail(where, "expected an object");
  check_keys(v, where,
             {"revenue_per_trip", "fleet_cost", "availability_epsilon",
              "charger_cost_per_hour", "loss_penalty", "charger_bounds"});
  EconomicsSpec econ;
  if (v.contains("revenue_per_trip")) {
    const json& rv = v.at("revenue_per_trip");
    const std::string rw = where + ".revenue_per_trip";
    if (rv.is_number()) {
      econ.revenue = {rv.get<double>()};
    } else if (rv.is_array()) {
      // Per-edge revenue: one entry per travel leg, matched to IS nodes.
      std::map<std::pair<std::string, std::string>, double> by_edge;
      for (std::size_t i = 0; i < rv.size(); ++i) {
        const std::string ew = rw + "[" + std::to_string(i) + "]";
        const json& e = rv[i];
        if (!e.is_object()) fail(ew, "expected an object");
        check_keys(e, ew, {"from", "to", "value"});
        const std::string from =
            as_string(require(e, "from", ew), ew + ".from");
        const std::string to = as_string(require(e, "to", ew), ew + ".to");
        by_edge[{from, to}] =
            as_number(require(e, "value", ew), ew + ".value");
      }
      for (const Node& nd : model.nodes) {
        if (nd.kind != NodeKind::InfiniteServer) continue;
        const auto key = std::make_pair(model.station_ids[nd.origin],
                                        model.station_ids[nd.dest]);
        const auto it = by_edge.find(key);
        if (it == by_edge.end()) {
          fail(rw, "no revenue for travel leg " + key.first + " -> " +
                       key.second);
        }
        econ.revenue.push_back(it->second);
      }
    } else {
      fail(rw, "expected a number or an array of {from, to, value}");
    }
  }
  if (v.contains("fleet_cost")) {
    const json& fc = v.at("fleet_cost");
    const std::string fw = where + ".fleet_cost";
    if (!fc.is_object()) fail(fw, "expected an object");
    check_keys(fc, fw, {"per_vehicle_hour", "table"});
    if (fc.contains("per_vehicle_hour") == fc.contains("table")) {
      fail(fw, "needs exactly one of per_vehicle_hour or table");
    }
    if (fc.contains("per_vehicle_hour")) {
      econ.fleet_cost = FleetCost::linear(
          as_number(fc.at("per_vehicle_hour"), fw + ".per_vehicle_hour"));
    } else {
      const json& tab = fc.at("table");
      if (!tab.is_array() || tab.size() < 2) {
        fail(fw + ".table", "expected an array of at least two values");
      }
      std::vector<double> values;
      for (std::size_t i = 0; i < tab.size(); ++i) {
        values.push_back(
            as_number(tab[i], fw + ".table[" + std::to_string(i) + "]"));
      }
      econ.fleet_cost = FleetCost::table(std::move(values));
    }
  }
  if (v.contains("availability_epsilon")) {
    econ.availability_targets =
        station_numbers(v.at("availability_epsilon"),
                        where + ".availability_epsilon", model.station_ids);
  }
  if (v.contains("charger_cost_per_hour")) {
    econ.charger_cost =
        station_numbers(v.at("charger_cost_per_hour"),
                        where + ".charger_cost_per_hour", model.station_ids);
  }
  if (v.contains("loss_penalty")) {
    econ.loss_penalty = station_numbers(
        v.at("loss_penalty"), where + ".loss_penalty", model.station_ids);
  }
  if (v.contains("charger_bounds")) {
    econ.charger_bounds = station_ints(
        v.at("charger_bounds"), where + ".charger_bounds", model.station_ids);
  }
  econ.validate(model);
  return econ;
}

SolverSettings read_solver(const json& v, const NetworkModel& model) {
  const std::string where = "solver";
  if (!v.is_object()) fail(where, "expected an object");
  check_keys(v, where, {"method", "fleet_size", "max_fleet", "arrival_cs2"});
  SolverSettings out;
  if (v.contains("method")) {
    out.method =
        parse_method_choice(as_string(v.at("method"), where + ".method"));
  }
  if (v.contains("fleet_size")) {
    out.fleet_size = as_int(v.at("fleet_size"), where + ".fleet_size");
    if (out.fleet_size < 0) fail(where + ".fleet_size", "must be >= 0");
  }
  if (v.contains("max_fleet")) {
    out.max_fleet = as_int(v.at("max_fleet"), where + ".max_fleet");
    if (out.max_fleet < 1) fail(where + ".max_fleet", "must be >= 1");
  }
  if (v.contains("arrival_cs2")) {
    out.arrival_cs2 = station_numbers(v.at("arrival_cs2"),
                                      where + ".arrival_cs2",
                                      model.station_ids);
    if (out.arrival_cs2.size() == 1) {
      out.arrival_cs2.assign(model.station_ids.size(), out.arrival_cs2[0]);
    }
    for (double c : out.arrival_cs2) {
      if (c < 0.0) fail(where + ".arrival_cs2", "cs2 must be >= 0");
    }
  }
  return out;
}

SimSettings read_sim(const json& v) {
  const std::string where = "sim";
  if (!v.is_object()) fail(where, "expected an object");
  check_keys(v, where,
             {"horizon_hours", "warmup_hours", "replications", "batches",
              "charge_family", "charge_cs2", "arrival_family", "arrival_cs2"});
  SimSettings out;
  if (v.contains("horizon_hours")) {
    out.horizon_hours = as_number(v.at("horizon_hours"),
                                  where + ".horizon_hours");
    if (!(out.horizon_hours > 0.0)) {
      fail(where + ".horizon_hours", "must be positive");
    }
  }
  if (v.contains("warmup_hours")) {
    out.warmup_hours = as_number(v.at("warmup_hours"), where + ".warmup_hours");
    if (out.warmup_hours < 0.0) fail(where + ".warmup_hours", "must be >= 0");
  }
  if (v.contains("replications")) {
    out.replications = as_int(v.at("replications"), where + ".replications");
    if (out.replications < 1) fail(where + ".replications", "must be >= 1");
  }
  if (v.contains("batches")) {
    out.batches = as_int(v.at("batches"), where + ".batches");
    if (out.batches < 1) fail(where + ".batches", "must be >= 1");
  }
  const auto [cf, ccs2] =
      read_family(v, "charge_family", "charge_cs2", where);
  out.charge_family = cf;
  out.charge_cs2 = ccs2;
  const auto [af, acs2] =
      read_family(v, "arrival_family", "arrival_cs2", where);
  out.arrival_family = af;
  out.arrival_cs2 = acs2;
  return out;
}

}  // namespace

MethodChoice parse_method_choice(const std::string& name) {
  if (name == "mva") return MethodChoice::kMva;
  if (name == "convolution") return MethodChoice::kConvolution;
  if (name == "both") return MethodChoice::kBoth;
  throw InvalidConfig("unknown method '" + name +
                      "' (expected mva, convolution, or both)");
}

std::string method_choice_name(MethodChoice m) {
  switch (m) {
    case MethodChoice::kMva:
      return "mva";
    case MethodChoice::kConvolution:
      return "convolution";
    case MethodChoice::kBoth:
      return "both";
  }
  return "unknown";
}

LoadedConfig parse_config(const std::string& text,
                          const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw InvalidConfig(source_name + ":" + std::to_string(line) + ": " +
                        e.what());
  }
  if (!doc.is_object()) throw InvalidConfig("config root must be an object");
  check_keys(doc, "config",
             {"schema_version", "stations", "travel", "economics", "solver",
              "sim"});
  const json& ver = require(doc, "schema_version", "config");
  if (!ver.is_number_integer() || ver.get<int>() != 1) {
    fail("config.schema_version", "this build reads schema_version 1");
  }

  LoadedConfig out;
  out.stations = read_stations(require(doc, "stations", "config"));
  std::vector<std::string> ids;
  for (const StationSpec& st : out.stations) ids.push_back(st.id);
  out.travel = read_travel(require(doc, "travel", "config"), ids);
  out.model = build_network(out.stations, out.travel);
  if (doc.contains("economics")) {
    out.economics = read_economics(doc.at("economics"), out.model);
    out.has_economics = true;
  }
  if (doc.contains("solver")) {
    out.solver = read_solver(doc.at("solver"), out.model);
  }
  if (doc.contains("sim")) {
    out.sim = read_sim(doc.at("sim"));
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::vector<Distribution> build_node_distributions(const NetworkModel& model,
                                                   const TravelSpec& travel,
                                                   const SimSettings& sim) {
  const DistFamily travel_family = parse_dist_family(travel.family);
  std::vector<Distribution> out;
  out.reserve(model.nodes.size());
  for (const Node& nd : model.nodes) {
    const double mean = 1.0 / nd.base_rate;
    switch (nd.kind) {
      case NodeKind::SingleServer:
        out.push_back(
            Distribution::make(sim.arrival_family, mean, sim.arrival_cs2));
        break;
      case NodeKind::InfiniteServer:
        out.push_back(Distribution::make(travel_family, mean, travel.cs2));
        break;
      case NodeKind::FiniteServer:
        out.push_back(
            Distribution::make(sim.charge_family, mean, sim.charge_cs2));
        break;
    }
  }
  return out;
}

}  // namespace evq
