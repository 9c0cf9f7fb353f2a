// Command line front end: classification, decomposability, invariants,
// Heisenberg boundary geometry, exact Picard certification, and the
// trace-discriminant locus sampler.
//
// Exit codes: 0 success (decomposable, for `decompose`), 1 not decomposable
// or failed certificate, 2 ambiguous verdict, 64 malformed input, 65 data
// that violates the geometric preconditions (for instance a lift that does
// not preserve the form).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "chg/json_io.hpp"

using namespace chg;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::RuntimeError("cannot open " + path, kExitUsage);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CLI::RuntimeError("malformed JSON in " + path + ": " + e.what(), kExitUsage);
    }
    return j;
}

HoloIsometry load_isometry(const std::string& path, const ToleranceConfig& tol) {
    const json j = load_json(path);
    try {
        return isometry_from_json(j, tol);
    } catch (const json::exception& e) {
        throw CLI::RuntimeError(std::string("malformed isometry file: ") + e.what(), kExitUsage);
    } catch (const std::invalid_argument& e) {
        throw CLI::RuntimeError(std::string("malformed isometry file: ") + e.what(), kExitUsage);
    } catch (const std::domain_error& e) {
        throw CLI::RuntimeError(std::string("invalid isometry: ") + e.what(), kExitData);
    }
}

int cmd_classify(const std::string& path, const ToleranceConfig& tol) {
    const HoloIsometry a = load_isometry(path, tol);
    json out = to_json(classify(a, tol));
    out["conjugacy_invariant"] = to_json(conjugacy_invariant(a, tol));
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_decompose(const std::string& pa, const std::string& pb, const ToleranceConfig& tol) {
    const HoloIsometry a = load_isometry(pa, tol);
    const HoloIsometry b = load_isometry(pb, tol);
    if (a.form.model != b.form.model)
        throw CLI::RuntimeError("decompose: the two isometries use different forms", kExitData);
    const DecompositionResult r = decomposability(a, b, tol);
    std::cout << to_json(r).dump(2) << "\n";
    switch (r.verdict) {
        case Verdict::DECOMPOSABLE: return 0;
        case Verdict::NOT_DECOMPOSABLE: return 1;
        case Verdict::AMBIGUOUS: return 2;
    }
    return 2;
}

int cmd_invariants(const std::string& path, const ToleranceConfig& tol) {
    const json j = load_json(path);
    PointTuple t;
    try {
        t = tuple_from_json(j);
    } catch (const json::exception& e) {
        throw CLI::RuntimeError(std::string("malformed tuple file: ") + e.what(), kExitUsage);
    }
    json out;
    const auto& f = t.form;
    try {
        if (t.points.size() == 3) {
            const Vec3 &p1 = t.points[0], &p2 = t.points[1], &p3 = t.points[2];
            out["triple_ratio"] = to_json(triple_ratio(p1, p2, p3, f));
            bool all_boundary = true, all_interior = true;
            for (const auto& p : t.points) {
                const Location l = locate(f, p, tol);
                all_boundary = all_boundary && l == Location::BOUNDARY;
                all_interior = all_interior && l == Location::INTERIOR;
            }
            if (all_boundary) out["cartan"] = cartan(p1, p2, p3, f, tol);
            if (all_interior) out["brehm_shape"] = brehm_shape(p1, p2, p3, f, tol);
        } else if (t.points.size() == 4) {
            const Vec3 &p1 = t.points[0], &p2 = t.points[1], &p3 = t.points[2],
                       &p4 = t.points[3];
            out["cross_ratio"] = to_json(cross_ratio(p1, p2, p3, p4, f));
            const CrossRatioReality rr = cross_ratio_reality(p1, p2, p3, p4, f, tol);
            const char* kind = rr.kind == CrossRatioReality::Kind::NON_REAL ? "non_real"
                               : rr.kind == CrossRatioReality::Kind::POSITIVE_REAL
                                   ? "positive_real"
                                   : "negative_real";
            out["reality"] = kind;
            switch (rr.tag) {
                case CrossRatioReality::Tag::EQUIDISTANT_FROM_GEODESIC:
                    out["reality_case"] = "equidistant_from_geodesic";
                    break;
                case CrossRatioReality::Tag::COCYCLIC_NON_SEPARATING:
                    out["reality_case"] = "cocyclic_non_separating";
                    break;
                case CrossRatioReality::Tag::COCYCLIC_SEPARATING:
                    out["reality_case"] = "cocyclic_separating";
                    break;
                default:
                    break;
            }
            bool all_boundary = true;
            for (const auto& p : t.points)
                all_boundary = all_boundary && locate(f, p, tol) == Location::BOUNDARY;
            try {
                out["swapping_reflection_exists"] =
                    swapping_reflection_exists(p1, p2, p3, p4, f, tol);
            } catch (const std::domain_error&) {
            }
            if (all_boundary)
                out["toledo_once_punctured_torus"] =
                    toledo_once_punctured_torus(p1, p2, p3, p4, f, tol);
        } else {
            throw CLI::RuntimeError("invariants: expected 3 or 4 points", kExitUsage);
        }
    } catch (const std::domain_error& e) {
        throw CLI::RuntimeError(std::string("degenerate configuration: ") + e.what(), kExitData);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_heisenberg(const std::string& op, const std::vector<std::string>& args,
                   const ToleranceConfig& tol) {
    auto parse = [&](const std::string& s) {
        try {
            return heis_from_json(json::parse(s));
        } catch (const json::exception& e) {
            throw CLI::RuntimeError(std::string("malformed Heisenberg point: ") + e.what(),
                                    kExitUsage);
        }
    };
    json out;
    try {
        if (op == "mul" && args.size() == 2) {
            out = to_json(heis_mul(parse(args[0]), parse(args[1])));
        } else if (op == "lift" && args.size() == 3) {
            const HorosphericalPoint h{cplx(std::stod(args[0]), std::stod(args[1])),
                                       std::stod(args[2]), 0.0};
            out = to_json(standard_lift(h));
        } else if (op == "fan" && args.size() == 1) {
            out = to_json(invariant_fan(load_isometry(args[0], tol), tol));
        } else if (op == "leaf" && args.size() == 3) {
            const Fan f{std::polar(1.0, std::stod(args[0])), std::stod(args[1])};
            const InfiniteRCircle l = fan_leaf(f, std::stod(args[2]));
            out = json{{"base", to_json(l.base)},
                       {"direction", to_json(l.direction)},
                       {"slope", l.slope}};
        } else if (op == "commute" && args.size() == 2) {
            out = json{{"commute", parabolics_commute_at_infinity(load_isometry(args[0], tol),
                                                                  load_isometry(args[1], tol),
                                                                  tol)}};
        } else {
            throw CLI::RuntimeError(
                "heisenberg: usage is mul <p> <q> | lift <x> <y> <t> | fan <iso.json> | "
                "leaf <arg-w> <k> <t0> | commute <iso.json> <iso.json>",
                kExitUsage);
        }
    } catch (const std::domain_error& e) {
        throw CLI::RuntimeError(e.what(), kExitData);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_picard_verify(long d) {
    Certificate cert;
    try {
        cert = certify_reflective(d);
    } catch (const std::invalid_argument& e) {
        throw CLI::RuntimeError(e.what(), kExitUsage);
    } catch (const std::domain_error& e) {
        throw CLI::RuntimeError(e.what(), kExitData);
    }
    std::cout << to_json(cert).dump(2) << "\n";
    return cert.all_passed() ? 0 : 1;
}

// Sample the null locus of the trace discriminant along rays from the
// origin; every point of the deltoid lies inside the circle of radius 3.
int cmd_deltoid_sample(int n) {
    if (n < 8) throw CLI::RuntimeError("deltoid-sample: need n >= 8", kExitUsage);
    std::cout << "phi,re,im,f_residual\n";
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * kPi * i / n;
        double lo = 0.0, hi = 3.0;
        // f(0) = -27 < 0 and f(3 e^{i phi}) >= 0.
        for (int it = 0; it < 200; ++it) {
            const double mid = (lo + hi) / 2.0;
            if (goldman_f(std::polar(mid, phi)) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const cplx z = std::polar(hi, phi);
        std::cout << phi << "," << z.real() << "," << z.imag() << "," << goldman_f(z) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex hyperbolic plane toolkit: PU(2,1) isometries, real reflections, "
                 "cross-ratios and Picard modular certificates"};
    app.require_subcommand(1);

    ToleranceConfig tol;
    app.add_option("--tol-eq", tol.eq_tol, "scalar equality tolerance");
    app.add_option("--tol-boundary", tol.boundary_tol, "boundary location tolerance");
    app.add_option("--tol-angle", tol.angle_tol, "angle comparison tolerance");

    std::string path_a, path_b;
    auto* classify_cmd = app.add_subcommand("classify", "classify an isometry from JSON");
    classify_cmd->add_option("file", path_a)->required();

    auto* decompose_cmd =
        app.add_subcommand("decompose", "decide R-decomposability of a pair of isometries");
    decompose_cmd->add_option("a", path_a)->required();
    decompose_cmd->add_option("b", path_b)->required();

    auto* invariants_cmd =
        app.add_subcommand("invariants", "projective invariants of a 3- or 4-point tuple");
    invariants_cmd->add_option("file", path_a)->required();

    std::string heis_op;
    std::vector<std::string> heis_args;
    auto* heis_cmd = app.add_subcommand("heisenberg", "boundary geometry operations");
    heis_cmd->add_option("op", heis_op)->required();
    heis_cmd->add_option("args", heis_args);

    long dval = 0;
    auto* picard_cmd =
        app.add_subcommand("picard-verify", "exact reflective-generation certificate");
    picard_cmd->add_option("--d", dval, "squarefree d in {1,2,3,7,11}")->required();

    int nsamples = 64;
    auto* deltoid_cmd =
        app.add_subcommand("deltoid-sample", "CSV sample of the trace discriminant null locus");
    deltoid_cmd->add_option("--n", nsamples, "number of rays (>= 8)");

    CLI11_PARSE(app, argc, argv);

    try {
        tol.validate();
        if (classify_cmd->parsed()) return cmd_classify(path_a, tol);
        if (decompose_cmd->parsed()) return cmd_decompose(path_a, path_b, tol);
        if (invariants_cmd->parsed()) return cmd_invariants(path_a, tol);
        if (heis_cmd->parsed()) return cmd_heisenberg(heis_op, heis_args, tol);
        if (picard_cmd->parsed()) return cmd_picard_verify(dval);
        if (deltoid_cmd->parsed()) return cmd_deltoid_sample(nsamples);
    } catch (const CLI::RuntimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.get_exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
