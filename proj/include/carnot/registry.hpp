#pragma once

// Named maps and domain descriptors shared by the CLI, the harness and the
// acceptance suites.
//
// Plugin maps (custom:<path or name>) are shared objects exporting
//   int         carnot_map_abi_version(void);   // must return 1
//   const char* carnot_map_target(void);         // builtin algebra name, or NULL for the source algebra
//   int         carnot_map_eval(const double* in, int in_dim, double* out, int out_dim);  // 0 on success
// and optionally
//   double      carnot_map_lipschitz(void);
// Bare names are looked up as lib<name>.so in $CARNOT_PLUGIN_PATH.

#include <functional>
#include <string>
#include <vector>

#include "carnot/maps.hpp"

namespace carnot {

using NormFactory = std::function<HomogeneousNorm(AlgebraPtr)>;

/// Builds a registry map on the given source norm; the target norm comes
/// from `target_norm` unless the target is the source algebra. Unknown ids
/// throw ConfigError naming the id.
MapUnderTest make_map(const std::string& id, const HomogeneousNorm& source, const NormFactory& target_norm);

/// Ids without parameters, for help text.
std::vector<std::string> builtin_map_ids();

/// full | halfspace:n1,..,nd:c | dyadic-holes:<anchor>:<lo>-<hi>:<power>:<coeff>
/// | mask:<i>:<lo>:<hi>[;<i>:<lo>:<hi>...] | dyadic-mask:<i>:<levels>
/// | probe-holes | porous-grid | density-holes
DomainSet parse_domain(const std::string& descriptor, const HomogeneousNorm& norm);

/// Comma-separated coordinates.
std::vector<double> parse_numbers(const std::string& text);
Point parse_point(const std::string& text, const GradedAlgebra& alg);

/// Preset hole families.
HoleFamilySpec probe_hole_family(const HomogeneousNorm& norm, int levels = 12);
HoleFamilySpec porous_grid_family(const HomogeneousNorm& norm, int levels = 12);
HoleFamilySpec density_hole_family(const HomogeneousNorm& norm, int levels = 40);

}  // namespace carnot
