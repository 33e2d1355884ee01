#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evq {

// Base class for everything the toolkit throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A station description violates its own invariants (bad probability row,
// nonpositive rate, zero chargers, ...).
struct InvalidStationSpec : Error {
  using Error::Error;
};

// A travel edge with positive routing probability has no mean travel time.
struct MissingTravelTime : Error {
  using Error::Error;
};

// A hand-assembled NetworkModel fails validation (non-stochastic routing row,
// inconsistent node bookkeeping, ...).
struct InvalidModel : Error {
  using Error::Error;
};

// The routing chain is not irreducible, so the balance equations have no
// unique normalized solution.
struct ReducibleNetwork : Error {
  using Error::Error;
};

// Economics inputs violate their invariants (non-convex tabulated cost,
// negative prices, bounded fleet cost, dimension mismatches).
struct InvalidEconomics : Error {
  using Error::Error;
};

// A solver produced values outside their mathematically required range by
// more than tolerance (e.g. an MVA marginal probability escaping [0,1]).
struct NumericalBreakdown : Error {
  using Error::Error;
};

// Scaled-exponent bookkeeping failed to keep a quantity representable.
struct NumericalUnderflow : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of a closed-form formula.
struct DomainError : Error {
  using Error::Error;
};

// An open queue's utilization is >= 1, so no stationary delay exists.
struct UnstableQueue : Error {
  using Error::Error;
};

// Fleet sizing hit the search cap with availability targets still unmet and
// availability plateaued, i.e. the targets are unreachable at any fleet size.
struct InfeasibleAtCap : Error {
  InfeasibleAtCap(const std::string& what, int fleet_cap,
                  std::vector<double> best_availability)
      : Error(what),
        fleet_cap(fleet_cap),
        best_availability(std::move(best_availability)) {}

  int fleet_cap;
  // Best availability reached per station over the whole scan.
  std::vector<double> best_availability;
};

// A charger vector escapes its [1, bound] box.
struct BoundViolation : Error {
  using Error::Error;
};

// Config document rejected (syntax, schema, unknown key, bad value).
struct InvalidConfig : Error {
  using Error::Error;
};

}  // namespace evq
