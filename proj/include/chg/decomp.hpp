#pragma once

#include <optional>
#include <string>

#include "chg/heisenberg.hpp"
#include "chg/invariants.hpp"
#include "chg/isometry.hpp"

namespace chg {

// Decision engine for writing pairs (A,B) as A = s1 s2, B = s1 s3 with the
// s_i real reflections. The generic route goes through the commutator: the
// pair is decomposable iff [A,B] fixes a closure point with real positive
// eigenvalue; a fixed point produces the 4-cycle p1 -> p2 -> p3 -> p4 whose
// swapping symmetry p1<->p3, p2<->p4 is the common reflection s1.

struct FourCycle {
    ProjectivePoint p1, p2, p3, p4;
    cplx lambda1;   // eigenvalue of [A,B] at p1
    bool degenerate_pairs; // p1 = p3 and p2 = p4 projectively
};

enum class Verdict { DECOMPOSABLE, NOT_DECOMPOSABLE, AMBIGUOUS };

enum class Rationale {
    MAIN_THEOREM,
    COMMON_INTERIOR_FIXED,
    COMMON_BOUNDARY_FIXED,
    COMPLEX_REFLECTION_RULE,
    TRACE_OBSTRUCTION,
    LAMBDA_NEGATIVE,
};

const char* to_string(Verdict v);
const char* to_string(Rationale r);

struct Witness {
    AntiIsometry s1, s2, s3; // A = s1 s2, B = s1 s3 in PU(2,1)
};

struct DecompositionResult {
    Verdict verdict;
    Rationale rationale;
    std::optional<Witness> witness;
    std::string detail;
    cplx offending_eigenvalue{0.0}; // set on AMBIGUOUS near the tolerance edge
};

// A B A^-1 B^-1 on the chosen lifts; independent of the lift choice.
HoloIsometry commutator(const HoloIsometry& A, const HoloIsometry& B);

// Cycle P2 = B^-1 P1, P3 = A^-1 P2, P4 = B P3; checks A P4 = lambda1 P1.
FourCycle four_cycle(const HoloIsometry& A, const HoloIsometry& B, const Vec3& fixed,
                     cplx lambda1, const ToleranceConfig& tol = default_tol());

// A real reflection swapping p1 <-> p3 and p2 <-> p4 (landing on the given
// points projectively), or nullopt when none exists. Coincident arguments
// are allowed; a rank-collapsed correspondence system throws.
std::optional<AntiIsometry> construct_swapping_reflection(const Vec3& p1, const Vec3& p2,
                                                          const Vec3& p3, const Vec3& p4,
                                                          const HermitianForm& form,
                                                          const ToleranceConfig& tol = default_tol());

// Algebraic test: sigma^-1 A is again a real reflection.
bool reflection_decomposes(const AntiIsometry& sigma, const HoloIsometry& A,
                           const ToleranceConfig& tol = default_tol());

struct GeometricCase {
    bool decomposes;
    const char* clause; // which case of the class-by-class criterion fired
};

// Geometric route: class-specific fixed-point / mirror / fan conditions.
GeometricCase geometric_decomposes(const AntiIsometry& sigma, const HoloIsometry& A,
                                   const ToleranceConfig& tol = default_tol());

DecompositionResult decomposability(const HoloIsometry& A, const HoloIsometry& B,
                                    const ToleranceConfig& tol = default_tol());

// The rigid lambda_1 < 0 case: <A,B> stabilizes a complex line and is a
// maximal (C-Fuchsian) punctured torus group with |toledo| = 2 pi.
struct MaximalReport {
    ProjectivePoint fixed_point;  // boundary fixed point of [A,B]
    Vec3 stable_line_polar;
    bool a_loxodromic = false;
    bool b_loxodromic = false;
    double toledo = 0.0;
};

std::optional<MaximalReport> maximal_rep_analysis(const HoloIsometry& A, const HoloIsometry& B,
                                                  const ToleranceConfig& tol = default_tol());

} // namespace chg
