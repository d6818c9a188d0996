#pragma once

#include <string>

#include "json.hpp"
#include "carnot/algebra.hpp"

namespace carnot {

/// Structure-constant file:
///   {"dim", "step", "layer_dims", "basis",
///    "brackets": [{"i", "j", "coeffs": [{"k", "num", "den"}]}],
///    "stratified" (optional; inferred from the rank condition if absent)}
/// Indices are 0-based and i < j. num/den may be integers or strings.
/// `verify` runs verify_algebra and throws InvalidAlgebra on failure.
AlgebraPtr algebra_from_json(const nlohmann::json& doc, bool verify = true);
AlgebraPtr load_algebra_file(const std::string& path, bool verify = true);
nlohmann::json algebra_to_json(const GradedAlgebra& alg);

/// h<n>, engel, r<n>, free:<rank>:<step>.
AlgebraPtr builtin_algebra(const std::string& name);
bool is_builtin_algebra(const std::string& name);

/// Builtin name, else a path to a structure-constant file.
AlgebraPtr resolve_algebra(const std::string& source, bool verify = true);

}  // namespace carnot
