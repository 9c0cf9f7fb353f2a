// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cstdio>
#include <sstream>

#include "chg/decomp.hpp"
#include "chg/json_io.hpp"
#include "chg/picard.hpp"
#include "util.hpp"

using namespace chg;
using namespace chg::testutil;

namespace {

int failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %2d [%s] %s%s%s\n", index, pass ? "PASS" : "FAIL", name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criteria 1 and 2 ----------------------------------------------------

void criterion_roundtrip_and_trace() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20260810);
    int decomposable = 0, ambiguous = 0, not_decomposable = 0;
    double worst_product = 0.0, worst_im_trace = 0.0;
    for (int it = 0; it < 500; ++it) {
        const HermitianForm& form = (it % 2 == 0) ? ball_form() : siegel_form();
        const AntiIsometry s1 = rand_reflection(rng, form);
        const AntiIsometry s2 = rand_reflection(rng, form);
        const AntiIsometry s3 = rand_reflection(rng, form);
        const HoloIsometry A = anti_compose(s1, s2);
        const HoloIsometry B = anti_compose(s1, s3);
        const DecompositionResult r = decomposability(A, B);
        if (r.verdict == Verdict::AMBIGUOUS) {
            ++ambiguous;
            continue;
        }
        if (r.verdict == Verdict::NOT_DECOMPOSABLE) {
            ++not_decomposable;
            continue;
        }
        ++decomposable;
        worst_product = std::max(worst_product,
                                 pu_distance(anti_compose(r.witness->s1, r.witness->s2), A));
        worst_product = std::max(worst_product,
                                 pu_distance(anti_compose(r.witness->s1, r.witness->s3), B));
        const cplx tr = trace(commutator(A, B).lift);
        worst_im_trace = std::max(worst_im_trace, std::abs(tr.imag()));
    }
    const double dt = seconds_since(t0);
    {
        std::ostringstream os;
        os << decomposable << "/500 decomposable, " << ambiguous << " ambiguous, "
           << not_decomposable << " not-decomposable; worst witness product distance "
           << worst_product << "; " << dt << " s";
        report(1, "round-trip decomposition of reflection-built pairs",
               decomposable >= 499 && not_decomposable == 0 && worst_product <= 1e-8 && dt < 30.0,
               os.str());
    }
    {
        std::ostringstream os;
        os << "max |Im Tr[A,B]| over decomposable verdicts = " << worst_im_trace;
        report(2, "necessity of real commutator trace", worst_im_trace <= 1e-8, os.str());
    }
}

// ---- criterion 3 ----------------------------------------------------------

void criterion_eigenvalue_cross_ratio() {
    Rng rng(333);
    int pairs = 0, checked = 0;
    double worst_rel_im = 0.0;
    bool all_positive = true;
    while (pairs < 500) {
        const HermitianForm& form = (pairs % 2 == 0) ? ball_form() : siegel_form();
        const HoloIsometry A = rand_bounded_isometry(rng, form);
        const HoloIsometry B = rand_bounded_isometry(rng, form);
        ++pairs;
        const HoloIsometry C = commutator(A, B);
        if (is_identity(C)) continue;
        for (const auto& fp : fixed_points_closure(C)) {
            FourCycle cyc;
            try {
                cyc = four_cycle(A, B, fp.point.rep, fp.eigenvalue);
            } catch (const std::domain_error&) {
                continue;
            }
            if (cyc.degenerate_pairs) continue;
            cplx x;
            try {
                x = cross_ratio(cyc.p2.rep, cyc.p4.rep, cyc.p1.rep, cyc.p3.rep, form);
            } catch (const std::domain_error&) {
                continue;
            }
            const cplx prod = fp.eigenvalue * x;
            worst_rel_im = std::max(worst_rel_im,
                                    std::abs(prod.imag()) / std::max(std::abs(prod), 1e-300));
            all_positive = all_positive && prod.real() > 0.0;
            ++checked;
        }
    }
    std::ostringstream os;
    os << checked << " located fixed points over 500 pairs; worst relative imaginary part "
       << worst_rel_im;
    report(3, "eigenvalue-cross-ratio identity on 4-cycles",
           checked >= 500 && all_positive && worst_rel_im <= 1e-9, os.str());
}

// ---- criterion 4 ----------------------------------------------------------

bool goldman_consistent(const Classification& c) {
    const double band = 1e-6 * (1.0 + std::pow(std::abs(c.tr), 4.0));
    double dc3 = 1e300;
    for (cplx w : {cplx(1, 0), cplx(-0.5, 0.8660254037844387), cplx(-0.5, -0.8660254037844387)})
        dc3 = std::min(dc3, std::abs(c.tr - 3.0 * w));
    switch (c.tag) {
        case IsoTag::REGULAR_ELLIPTIC: return c.f < band;
        case IsoTag::LOXODROMIC: return c.f > -band;
        case IsoTag::COMPLEX_REFLECTION:
        case IsoTag::COMPLEX_REFLECTION_IN_POINT:
        case IsoTag::SPECIAL_ELLIPTIC_OTHER:
        case IsoTag::SCREW_PARABOLIC:
            return std::abs(c.f) <= band && dc3 > 1e-8;
        case IsoTag::IDENTITY:
        case IsoTag::UNIPOTENT_2STEP:
        case IsoTag::UNIPOTENT_3STEP:
            return dc3 <= 1e-6 * (1.0 + std::abs(c.tr));
    }
    return false;
}

void criterion_trace_classification() {
    int total = 0, mismatched = 0, ambiguous = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            const auto c =
                classify(elliptic_standard(2.0 * kPi * i / 64.0, 2.0 * kPi * j / 64.0));
            ++total;
            if (c.ambiguous) { ++ambiguous; continue; }
            if (!goldman_consistent(c)) ++mismatched;
        }
    for (int i = 0; i < 50; ++i) {
        const double r = 1.01 + (10.0 - 1.01) * i / 49.0;
        const auto c = classify(dilation(r));
        ++total;
        if (c.ambiguous) { ++ambiguous; continue; }
        if (c.tag != IsoTag::LOXODROMIC || !goldman_consistent(c)) ++mismatched;
    }
    Rng rng(44);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        cplx z{u(rng), u(rng)};
        double t = u(rng), theta = u(rng);
        if (i % 4 == 0) z = 0.0;           // vertical or screw
        if (i % 4 == 1) theta = 0.0;       // unipotent
        const auto c = classify(parabolic_standard(z, t, theta));
        ++total;
        if (c.ambiguous) { ++ambiguous; continue; }
        if (!goldman_consistent(c)) ++mismatched;
    }
    const bool exact_zeros = goldman_f(3.0) == 0.0 && goldman_f(-1.0) == 0.0;
    std::ostringstream os;
    os << total << " representatives, " << ambiguous << " ambiguous, " << mismatched
       << " sign mismatches; f(3) = " << goldman_f(3.0) << ", f(-1) = " << goldman_f(-1.0);
    report(4, "trace classification matches the Goldman discriminant",
           mismatched == 0 && exact_zeros, os.str());
}

// ---- criterion 5 ----------------------------------------------------------

void criterion_complex_reflection_pairs() {
    Rng rng(555);
    int decomposable = 0, ambiguous = 0, bad = 0;
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double ang = 0.25 + 0.012 * it;
        const HoloIsometry rep =
            (it % 2 == 0) ? elliptic_standard(ang, 0.0) : elliptic_standard(ang, ang);
        const HoloIsometry R = conjugate(rep, rand_su21(rng, ball_form()));
        const HoloIsometry A = rand_isometry(rng, ball_form());
        const DecompositionResult r = decomposability(R, A);
        if (r.verdict == Verdict::AMBIGUOUS) { ++ambiguous; continue; }
        if (r.verdict == Verdict::NOT_DECOMPOSABLE) { ++bad; continue; }
        ++decomposable;
        worst = std::max(worst, pu_distance(anti_compose(r.witness->s1, r.witness->s2), R));
        worst = std::max(worst, pu_distance(anti_compose(r.witness->s1, r.witness->s3), A));
    }
    std::ostringstream os;
    os << decomposable << "/200 decomposable, " << ambiguous << " ambiguous, " << bad
       << " refused; worst witness distance " << worst;
    report(5, "pairs with a complex reflection are always decomposable",
           bad == 0 && decomposable >= 195 && worst <= 1e-8, os.str());
}

// ---- criterion 6 ----------------------------------------------------------

void criterion_dual_test_agreement() {
    const auto& fs = siegel_form();
    Rng rng(666);
    const HoloIsometry reps[] = {
        HoloIsometry{Mat3::identity(), fs},          // identity
        cayley_iso(elliptic_standard(0.9, -0.4)),    // regular elliptic
        cayley_iso(elliptic_standard(0.8, 0.0)),     // complex reflection
        cayley_iso(elliptic_standard(0.8, 0.8)),     // complex reflection in a point
        heis_translation(1.0, 0.0),                  // 3-step unipotent
        parabolic_standard(0, 1, 0),                 // 2-step unipotent
        parabolic_standard(0, 1, 1.3),               // screw parabolic
        dilation(1.9),                               // loxodromic
        compose(dilation(1.9), heis_rotation(0.6)),  // loxodromic with twist
    };
    Mat3 i0;
    i0(0, 2) = 1.0;
    i0(1, 1) = -1.0;
    i0(2, 0) = 1.0;

    int agree = 0, disagree = 0, skipped = 0, trues = 0;
    for (int it = 0; it < 500; ++it) {
        const HoloIsometry& rep = reps[it % 9];
        const Mat3 g = rand_su21(rng, fs);
        const HoloIsometry A = conjugate(rep, g);
        AntiIsometry s = rand_reflection(rng, fs);
        if (it % 3 == 0) {
            const Mat3 base = (it % 6 == 0) ? Mat3::identity() : i0;
            s = AntiIsometry{g * base * conj(inverse(g)), fs};
        }
        if (classify(A).ambiguous) { ++skipped; continue; }
        bool alg, geo;
        try {
            alg = reflection_decomposes(s, A);
            geo = geometric_decomposes(s, A).decomposes;
        } catch (const std::domain_error&) {
            ++skipped;
            continue;
        }
        trues += alg;
        (alg == geo ? agree : disagree)++;
    }
    std::ostringstream os;
    os << agree << " agreements, " << disagree << " disagreements, " << skipped
       << " skipped (ambiguous), " << trues
       << " decomposing pairs; the ninth tag (special elliptic beyond the two reflection "
          "types) is empty in dimension 2";
    report(6, "algebraic and geometric single-reflection tests agree",
           disagree == 0 && agree >= 480 && trues >= 100, os.str());
}

// ---- criterion 7 ----------------------------------------------------------

void criterion_invariant_fans() {
    bool ok = true;
    std::ostringstream os;

    const Fan f10 = invariant_fan(heis_translation(1.0, 0.0));
    ok = ok && std::abs(f10.w - cplx(1.0)) < 1e-12 && std::abs(f10.k) < 1e-12;

    // Leaf stability under the parabolic, sampled over leaves and points.
    Rng rng(777);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst_leaf = 0.0;
    for (int it = 0; it < 50; ++it) {
        const cplx z{u(rng), u(rng)};
        if (std::abs(z) < 0.2) continue;
        const double t = u(rng);
        const HoloIsometry p = heis_translation(z, t);
        const Fan fan = invariant_fan(p);
        const double t0 = u(rng);
        const InfiniteRCircle leaf = fan_leaf(fan, t0);
        for (double s : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
            const HeisPoint on{leaf.base.z + s * leaf.direction, leaf.base.t + s * leaf.slope};
            const HeisPoint img = boundary_action(p, on);
            const double s2 = std::real(img.z * std::conj(fan.w));
            worst_leaf = std::max(worst_leaf, std::abs(img.t - (t0 + 2.0 * s2 * fan.k)));
            worst_leaf = std::max(worst_leaf,
                                  std::abs(std::imag(img.z * std::conj(fan.w)) - fan.k));
        }
    }
    ok = ok && worst_leaf <= 1e-10;

    // Commutation criterion versus matrix commutators, exact agreement
    // (parabolics_commute_at_infinity throws if the two ever disagree).
    int commuting = 0, tested = 0;
    bool agreement = true;
    for (int it = 0; it < 100; ++it) {
        cplx z1{u(rng), u(rng)}, z2{u(rng), u(rng)};
        if (std::abs(z1) < 0.2 || std::abs(z2) < 0.2) continue;
        if (it % 3 == 0) z2 = z1 * u(rng);
        try {
            const bool c = parabolics_commute_at_infinity(heis_translation(z1, u(rng)),
                                                          heis_translation(z2, u(rng)));
            commuting += c;
            ++tested;
        } catch (const std::domain_error&) {
            agreement = false;
        }
    }
    ok = ok && agreement && tested >= 90 && commuting > 0;
    os << "fan(T_[1,0]) = (w=1, k=0); worst leaf deviation " << worst_leaf << "; " << tested
       << " commutation tests, " << commuting << " commuting";
    report(7, "invariant fan laws", ok, os.str());
}

// ---- criterion 8 ----------------------------------------------------------

void criterion_picard() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream os;
    for (long d : {1L, 2L, 3L, 7L, 11L}) {
        const Certificate c1 = certify_reflective(d);
        const Certificate c2 = certify_reflective(d);
        const std::string j1 = to_json(c1).dump();
        ok = ok && c1.all_passed() && j1 == to_json(c2).dump();
        for (const auto& ch : c1.checks)
            if (ch.name.find("measured k equals") != std::string::npos)
                os << "d=" << d << " " << ch.witness << "; ";
    }
    const double dt = seconds_since(t0);
    os << dt << " s";
    report(8, "exact Picard reflective-generation certificates", ok && dt < 10.0, os.str());
}

// ---- criterion 9 ----------------------------------------------------------

void criterion_maximal() {
    const double uu = 1.2;
    Mat3 a = Mat3::identity();
    a(0, 0) = std::cosh(uu);
    a(0, 2) = std::sinh(uu);
    a(2, 0) = std::sinh(uu);
    a(2, 2) = std::cosh(uu);
    const HoloIsometry A{a, ball_form()};
    const HoloIsometry B = conjugate(A, Mat3::diagonal(cplx(0, 1), cplx(0, -1), 1.0));
    const auto rep = maximal_rep_analysis(A, B);
    bool ok = rep.has_value();
    std::ostringstream os;
    if (ok) {
        ok = rep->fixed_point.location == Location::BOUNDARY && rep->a_loxodromic &&
             rep->b_loxodromic &&
             projective_distance(rep->stable_line_polar, Vec3(0, 1, 0)) < 1e-8 &&
             std::abs(std::abs(rep->toledo) - 2.0 * kPi) < 1e-6;
        os << "|toledo| = " << std::abs(rep->toledo) << " (target 2 pi), boundary fixed point, "
           << "stable line polar (0,1,0)";
    } else {
        os << "no negative-eigenvalue fixed point located";
    }
    // The decomposability verdict must refuse with the lambda < 0 rationale.
    const DecompositionResult r = decomposability(A, B);
    ok = ok && r.verdict == Verdict::NOT_DECOMPOSABLE && r.rationale == Rationale::LAMBDA_NEGATIVE;
    report(9, "maximal C-Fuchsian pair analysis", ok, os.str());
}

// ---- criterion 10 ---------------------------------------------------------

void criterion_reality_taxonomy() {
    const auto& f = ball_form();
    auto disk = [](cplx z) { return Vec3(z, 0, 1); };

    // Real-plane tuple (Siegel model, all-real lifts).
    const auto plane = cross_ratio_reality(Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(-0.5, 1, 1),
                                           Vec3(-2.0, 2, 1), siegel_form());
    // Non-separating cocyclic tuple.
    const auto noncyc =
        cross_ratio_reality(disk(1.0), disk(cplx(0, 1)), disk(-1.0), disk(cplx(0, -1)), f);
    // Separating cocyclic tuple.
    const auto sep =
        cross_ratio_reality(disk(1.0), disk(-1.0), disk(cplx(0, 1)), disk(cplx(0, -1)), f);

    const bool ok = plane.kind == CrossRatioReality::Kind::POSITIVE_REAL &&
                    noncyc.kind == CrossRatioReality::Kind::POSITIVE_REAL &&
                    noncyc.tag == CrossRatioReality::Tag::COCYCLIC_NON_SEPARATING &&
                    sep.kind == CrossRatioReality::Kind::NEGATIVE_REAL &&
                    std::abs(sep.x - cplx(-1.0)) <= 1e-12;
    std::ostringstream os;
    os << "X(separating) = " << sep.x.real() << (sep.x.imag() < 0 ? "-" : "+")
       << std::abs(sep.x.imag()) << "i";
    report(10, "cross-ratio reality taxonomy", ok, os.str());
}

} // namespace

int main() {
    criterion_roundtrip_and_trace();
    criterion_eigenvalue_cross_ratio();
    criterion_trace_classification();
    criterion_complex_reflection_pairs();
    criterion_dual_test_agreement();
    criterion_invariant_fans();
    criterion_picard();
    criterion_maximal();
    criterion_reality_taxonomy();
    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all acceptance criteria passed\n");
    return failures == 0 ? 0 : 1;
}
