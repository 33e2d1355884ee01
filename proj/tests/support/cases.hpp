#pragma once

#include <vector>

#include "evq/economics.hpp"
#include "evq/model.hpp"

// The worked examples shared by unit tests and the acceptance gate.
namespace evq::test {

// 60 interchangeable stations: passenger arrivals 10/h, charge probability
// 1/3, mean charge 0.5 h, uniform destinations, travel 1/3 h everywhere.
std::vector<StationSpec> sixty_stations(int num_chargers = 2);
TravelSpec sixty_travel();
NetworkModel sixty_station_model(int num_chargers = 2);
// Revenue 30 per trip-hour weight, fleet cost 4 per vehicle-hour,
// availability target 80% everywhere.
EconomicsSpec sixty_station_economics();

// Three-station allocation example: same station parameters but an
// asymmetric destination mix, charger prices (4,2,2), revenue 30.
NetworkModel three_station_model(const std::vector<int>& chargers = {1, 1,
                                                                     1});
EconomicsSpec three_station_economics(const std::vector<double>& beta);

// Minimal two-station network for fast checks.
NetworkModel toy_model();

}  // namespace evq::test
