#pragma once

#include <json.hpp>

#include "chg/decomp.hpp"
#include "chg/heisenberg.hpp"
#include "chg/picard.hpp"

namespace chg {

// JSON conventions: a complex scalar is [re, im]; a matrix is a row-major
// array of 9 complex scalars; a form is {"model": "ball" | "siegel"}.

using json = nlohmann::json;

json to_json(cplx z);
cplx cplx_from_json(const json& j);

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);

json to_json(const Mat3& m);
Mat3 mat3_from_json(const json& j);

json to_json(const HermitianForm& f);
HermitianForm form_from_json(const json& j);

json to_json(const HoloIsometry& a);
HoloIsometry isometry_from_json(const json& j, const ToleranceConfig& tol = default_tol());

json to_json(const AntiIsometry& a);
AntiIsometry anti_from_json(const json& j, const ToleranceConfig& tol = default_tol());

json to_json(const Classification& c);
json to_json(const ConjugacyInvariant& ci);

json to_json(const HeisPoint& p);
HeisPoint heis_from_json(const json& j);
json to_json(const Fan& f);

json to_json(const DecompositionResult& r);
json to_json(const Certificate& c);

// Tuple files: {"form": ..., "points": [vector, ...]}.
struct PointTuple {
    HermitianForm form;
    std::vector<Vec3> points;
};
json to_json(const PointTuple& t);
PointTuple tuple_from_json(const json& j);

} // namespace chg
