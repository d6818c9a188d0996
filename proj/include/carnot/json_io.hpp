#pragma once

// JSON forms of the library's result types. Field names follow the
// structs; points are coordinate arrays, exact elements arrays of strings.

#include "json.hpp"
#include "carnot/lemmas.hpp"
#include "carnot/porosity.hpp"
#include "carnot/verify.hpp"

namespace carnot {

using nlohmann::json;

json to_json(const Point& x);
json to_json(const ExactElement& x);
json to_json(const HomogeneousNorm& norm);
json to_json(const VerifyReport& r);
json to_json(const CalibrationResult& r);
json to_json(const Witness& w);
/// Lemma report: {lemma, params, empirical_constant, witness, samples, seed, ...}.
json to_json(const ConstantReport& r);
json to_json(const PipelineConstant& p);
json to_json(const DerivativeEstimate& e);
json to_json(const HHom& L);
json to_json(const PansuFit& fit);
json to_json(const ResidualSample& r);
json to_json(const CompositionReport& r);
json to_json(const Certificate& c);
json to_json(const HoleWitness& w);
json to_json(const ProbeReport& r);
json to_json(const BadSetConstants& c);
json to_json(const BadSetDiagnostic& d);
json to_json(const MeasureRow& r);
json to_json(const DensitySample& s);
json to_json(const DirectionalDensity& d);

}  // namespace carnot
