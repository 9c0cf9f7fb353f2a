#include "chg/json_io.hpp"

namespace chg {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex scalar must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const Vec3& v) { return json::array({to_json(v[0]), to_json(v[1]), to_json(v[2])}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("vector must hold 3 complex scalars");
    return {cplx_from_json(j[0]), cplx_from_json(j[1]), cplx_from_json(j[2])};
}

json to_json(const Mat3& m) {
    json a = json::array();
    for (const auto& e : m.a) a.push_back(to_json(e));
    return a;
}

Mat3 mat3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 9)
        throw std::invalid_argument("matrix must be a row-major array of 9 complex scalars");
    Mat3 m;
    for (size_t i = 0; i < 9; ++i) m.a[i] = cplx_from_json(j[i]);
    return m;
}

json to_json(const HermitianForm& f) {
    return json{{"model", f.model == Model::BALL ? "ball" : "siegel"}};
}

HermitianForm form_from_json(const json& j) {
    const std::string m = j.at("model").get<std::string>();
    if (m == "ball") return ball_form();
    if (m == "siegel") return siegel_form();
    throw std::invalid_argument("form model must be \"ball\" or \"siegel\"");
}

json to_json(const HoloIsometry& a) {
    return json{{"form", to_json(a.form)}, {"lift", to_json(a.lift)}};
}

HoloIsometry isometry_from_json(const json& j, const ToleranceConfig& tol) {
    return make_isometry(mat3_from_json(j.at("lift")), form_from_json(j.at("form")), tol);
}

json to_json(const AntiIsometry& a) {
    return json{{"form", to_json(a.form)}, {"souriau", to_json(a.souriau)}};
}

AntiIsometry anti_from_json(const json& j, const ToleranceConfig& tol) {
    return make_anti_isometry(mat3_from_json(j.at("souriau")), form_from_json(j.at("form")), tol);
}

json to_json(const Classification& c) {
    json out{{"tag", c.ambiguous ? "ambiguous" : to_string(c.tag)},
             {"trace", to_json(c.tr)},
             {"f", c.f}};
    if (c.ambiguous) {
        out["candidates"] = json::array({to_string(c.candidates[0]), to_string(c.candidates[1])});
        out["reason"] = c.ambiguity_reason;
        return out;
    }
    switch (c.tag) {
        case IsoTag::REGULAR_ELLIPTIC:
            out["angles"] = json::array({c.angles[0], c.angles[1]});
            break;
        case IsoTag::COMPLEX_REFLECTION:
        case IsoTag::COMPLEX_REFLECTION_IN_POINT:
        case IsoTag::SCREW_PARABOLIC:
            out["angle"] = c.angles[0];
            break;
        case IsoTag::LOXODROMIC:
            out["dilation"] = c.dilation;
            break;
        case IsoTag::UNIPOTENT_2STEP:
        case IsoTag::UNIPOTENT_3STEP:
            out["step"] = c.unipotent_step;
            break;
        default:
            break;
    }
    return out;
}

json to_json(const ConjugacyInvariant& ci) {
    json out;
    out["eigenvalues"] =
        json::array({to_json(ci.eigenvalues[0]), to_json(ci.eigenvalues[1]),
                     to_json(ci.eigenvalues[2])});
    if (ci.negative_type_index >= 0) out["negative_type_index"] = ci.negative_type_index;
    if (ci.parabolic_step > 0) {
        out["parabolic_step"] = ci.parabolic_step;
        out["elliptic_part_angle"] = ci.elliptic_part_angle;
    }
    return out;
}

json to_json(const HeisPoint& p) { return json{{"z", to_json(p.z)}, {"t", p.t}}; }

HeisPoint heis_from_json(const json& j) {
    // Canonical form {"z": [re,im], "t": t}; the array shorthand
    // [[re,im], t] is accepted as well.
    if (j.is_array() && j.size() == 2) return {cplx_from_json(j[0]), j[1].get<double>()};
    return {cplx_from_json(j.at("z")), j.at("t").get<double>()};
}

json to_json(const Fan& f) {
    json out{{"w", to_json(f.w)}, {"k", f.k}, {"at_infinity", f.at_infinity}};
    if (!f.at_infinity) out["conjugator"] = to_json(f.conjugator);
    return out;
}

json to_json(const DecompositionResult& r) {
    json out{{"verdict", to_string(r.verdict)}, {"rationale", to_string(r.rationale)}};
    if (!r.detail.empty()) out["detail"] = r.detail;
    if (r.verdict == Verdict::AMBIGUOUS && std::abs(r.offending_eigenvalue) > 0)
        out["offending_eigenvalue"] = to_json(r.offending_eigenvalue);
    if (r.witness) {
        out["witness"] = json{{"sigma1", to_json(r.witness->s1)},
                              {"sigma2", to_json(r.witness->s2)},
                              {"sigma3", to_json(r.witness->s3)}};
    }
    return out;
}

json to_json(const Certificate& c) {
    json checks = json::array();
    for (const auto& ch : c.checks) {
        json e{{"name", ch.name}, {"status", ch.passed ? "pass" : "fail"}};
        if (!ch.witness.empty()) e["witness"] = ch.witness;
        checks.push_back(e);
    }
    return json{{"d", c.d},
                {"checks", checks},
                {"all_passed", c.all_passed()},
                {"paper_index_claim", c.paper_index_claim}};
}

json to_json(const PointTuple& t) {
    json pts = json::array();
    for (const auto& p : t.points) pts.push_back(to_json(p));
    return json{{"form", to_json(t.form)}, {"points", pts}};
}

PointTuple tuple_from_json(const json& j) {
    PointTuple t{form_from_json(j.at("form")), {}};
    for (const auto& p : j.at("points")) t.points.push_back(vec3_from_json(p));
    return t;
}

} // namespace chg
