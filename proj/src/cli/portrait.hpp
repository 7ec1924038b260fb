#pragma once

#include <string>
#include <vector>

#include "bz/integrator.hpp"
#include "bz/model.hpp"

namespace bz::cli {

struct OrbitSpec {
  Direction direction = Direction::Forward;
  State start;
};

/// Parses "f:X,Y;b:X,Y;..." (f forward, b backward). Throws InvalidArgument.
std::vector<OrbitSpec> parse_orbit_spec(const std::string& spec);

/// Forward orbit from (0.4, 0.35/f) and backward orbit from E* + (1e-3, 0).
std::vector<OrbitSpec> default_orbits(const Params& p);

struct PortraitOptions {
  IntegratorOptions integrator;
  /// Horizon per orbit; 0 picks 50/eps.
  double horizon = 0.0;
  /// Orbits are thinned to at most this many vertices.
  std::size_t max_points = 6000;
};

/// Static SVG 1.1 document with the critical curve, folds, equilibrium and
/// the requested orbits.
std::string render_portrait(const Params& p, const std::vector<OrbitSpec>& orbits,
                            const PortraitOptions& opts);

}  // namespace bz::cli
