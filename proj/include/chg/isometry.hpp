#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chg/hermlin.hpp"

namespace chg {

// Elements of PU(2,1) are held through a fixed SU(2,1) lift; antiholomorphic
// isometries through a Souriau lift M in U(2,1) encoding z -> M conj(z).
// Two SU lifts give the same isometry iff they differ by a cube root of
// unity; pu_distance and pu_equal quotient by that ambiguity.

struct HoloIsometry {
    Mat3 lift;          // in SU(2,1) for `form`
    HermitianForm form;
};

struct AntiIsometry {
    Mat3 souriau;       // in U(2,1) for `form`
    HermitianForm form;
};

// Validates form preservation, normalizes the determinant to 1.
HoloIsometry make_isometry(const Mat3& M, const HermitianForm& form,
                           const ToleranceConfig& tol = default_tol());
AntiIsometry make_anti_isometry(const Mat3& M, const HermitianForm& form,
                                const ToleranceConfig& tol = default_tol());

double pu_distance(const HoloIsometry& a, const HoloIsometry& b);
bool pu_equal(const HoloIsometry& a, const HoloIsometry& b, double tol = 1e-8);
bool is_identity(const HoloIsometry& a, double tol = 1e-8);

enum class IsoTag {
    IDENTITY,
    REGULAR_ELLIPTIC,
    COMPLEX_REFLECTION,
    COMPLEX_REFLECTION_IN_POINT,
    SPECIAL_ELLIPTIC_OTHER,
    UNIPOTENT_2STEP,
    UNIPOTENT_3STEP,
    SCREW_PARABOLIC,
    LOXODROMIC,
};

const char* to_string(IsoTag t);

struct Classification {
    IsoTag tag = IsoTag::IDENTITY;
    bool ambiguous = false;
    IsoTag candidates[2] = {IsoTag::IDENTITY, IsoTag::IDENTITY}; // set when ambiguous
    std::string ambiguity_reason;

    cplx tr;        // trace of the SU lift
    double f;       // Goldman discriminant at tr

    // Class payloads (valid where meaningful).
    std::array<double, 2> angles{0.0, 0.0}; // elliptic rotation / screw angle in [0]
    double dilation = 1.0;                  // loxodromic |eigenvalue| > 1
    int unipotent_step = 0;                 // 2 or 3 for unipotents
};

// |z|^4 - 8 Re(z^3) + 18 |z|^2 - 27
double goldman_f(cplx z);

Classification classify(const HoloIsometry& A, const ToleranceConfig& tol = default_tol());

// 2 or 3; input must classify as unipotent.
int unipotent_step(const HoloIsometry& A, const ToleranceConfig& tol = default_tol());

// One entry per eigen-cluster whose eigenspace meets the closure of H^2_C.
// For a cluster whose eigenspace is 2-dimensional the subspace basis is kept
// (a complex reflection fixes a whole complex line of points); `point` then
// holds one canonical representative inside the closure.
struct ClosureFixedPoint {
    ProjectivePoint point;
    cplx eigenvalue;
    std::vector<Vec3> eigenspace; // size 1 or 2
};

std::vector<ClosureFixedPoint> fixed_points_closure(const HoloIsometry& A,
                                                    const ToleranceConfig& tol = default_tol());

// The unique eigenvalue whose eigenvector has negative Hermitian square.
std::pair<cplx, int> negative_type_eigenvalue(const HoloIsometry& A,
                                              const ToleranceConfig& tol = default_tol());

// Inverse-iteration polish of an approximate eigenvector; keeps only
// residual-decreasing iterates, so it never makes a guess worse.
Vec3 refine_invariant_vector(const Mat3& M, cplx lambda, Vec3 v, int steps = 2);

// Standard representatives (ball model for elliptic, Siegel for the rest).
HoloIsometry elliptic_standard(double alpha, double beta);
HoloIsometry heis_translation(cplx z, double t);
HoloIsometry heis_rotation(double theta);
HoloIsometry dilation(double r);
// T_{[z,t]} R_theta; with u21_lift the U(2,1) variant with diagonal
// (1, e^{i theta}, 1) is SU-normalized before returning.
HoloIsometry parabolic_standard(cplx z, double t, double theta, bool u21_lift = false);

Mat3 heis_translation_matrix(cplx z, double t);
Mat3 heis_rotation_matrix(double theta);

// Composition calculus for Souriau lifts.
HoloIsometry anti_compose(const AntiIsometry& phi, const AntiIsometry& psi); // phi o psi
AntiIsometry holo_after_anti(const HoloIsometry& A, const AntiIsometry& phi); // A o phi
AntiIsometry anti_after_holo(const AntiIsometry& phi, const HoloIsometry& A); // phi o A
ProjectivePoint anti_apply(const AntiIsometry& phi, const ProjectivePoint& p,
                           const ToleranceConfig& tol = default_tol());
Vec3 anti_apply(const AntiIsometry& phi, const Vec3& p);

AntiIsometry inverse(const AntiIsometry& phi);
HoloIsometry inverse(const HoloIsometry& A);
HoloIsometry compose(const HoloIsometry& A, const HoloIsometry& B);
HoloIsometry conjugate(const HoloIsometry& A, const Mat3& g); // g A g^-1
AntiIsometry conjugate(const AntiIsometry& phi, const Mat3& g);

// True iff M conj(M) = w Id for a cube root of unity w, i.e. phi^2 = id in
// PU(2,1). In dimension 2 every antiholomorphic involution is a real
// reflection (paper-level fact; this test is the definition used throughout).
bool is_real_reflection(const AntiIsometry& phi, const ToleranceConfig& tol = default_tol());

// An antiholomorphic phi with phi^2 = A, when one exists. Requires every
// closure fixed point of A to carry a positive real eigenvalue; returns
// nullopt for 2-step unipotents (the one excluded conjugacy class).
std::optional<AntiIsometry> anti_square_root(const HoloIsometry& A,
                                             const ToleranceConfig& tol = default_tol());

struct ConjugacyInvariant {
    std::array<cplx, 3> eigenvalues{};
    int negative_type_index = -1;     // -1 when not elliptic
    int parabolic_step = 0;           // 0 when not parabolic
    double elliptic_part_angle = 0.0; // screw parabolic rotation angle
};

ConjugacyInvariant conjugacy_invariant(const HoloIsometry& A,
                                       const ToleranceConfig& tol = default_tol());

} // namespace chg
