#pragma once

#include <optional>
#include <variant>

#include "chg/isometry.hpp"

namespace chg {

// Projective invariants of point tuples. All take lifts together with the
// Hermitian form; every quantity is independent of the choice of lifts.

// T(p1,p2,p3) = <P1,P2><P2,P3><P3,P1> / (<P1,P3><P3,P2><P2,P1>).
cplx triple_ratio(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form);

// Cartan angular invariant arg(-<P1,P2><P2,P3><P3,P1>) of boundary triples,
// in [-pi/2, pi/2]; satisfies T = e^{2iA}.
double cartan(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form,
              const ToleranceConfig& tol = default_tol());

// Brehm shape invariant sigma = -Re(T~) of an interior triple, with T~ the
// triple product of lifts normalized to <P,P> = -1.
double brehm_shape(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form,
                   const ToleranceConfig& tol = default_tol());

// X(p1,p2,p3,p4) = <P3,P1><P4,P2> / (<P4,P1><P3,P2>).
cplx cross_ratio(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                 const HermitianForm& form);

// Extended complex plane for the classical cross-ratio.
struct ExtCplx {
    cplx z;
    bool infinite = false;

    ExtCplx(cplx v) : z(v) {}
    ExtCplx(double v) : z(v) {}
    static ExtCplx inf() {
        ExtCplx e{cplx(0.0)};
        e.infinite = true;
        return e;
    }
};

// [z1,z2; z3,z4] = (z4-z1)(z3-z2) / ((z4-z2)(z3-z1)), Moebius invariant,
// with the limit conventions at infinity.
ExtCplx classical_cross_ratio(const ExtCplx& z1, const ExtCplx& z2, const ExtCplx& z3,
                              const ExtCplx& z4);

// Orthogonal projection of x onto the complex line spanned by p1, p2:
// x - <x,c>c with c the unit polar vector.
ProjectivePoint project_to_complex_line(const Vec3& p1, const Vec3& p2, const Vec3& x,
                                        const HermitianForm& form,
                                        const ToleranceConfig& tol = default_tol());

struct CrossRatioReality {
    enum class Kind { POSITIVE_REAL, NEGATIVE_REAL, NON_REAL } kind;
    enum class Tag {
        NONE,
        EQUIDISTANT_FROM_GEODESIC, // positive, generic configuration
        COCYCLIC_NON_SEPARATING,   // positive, all four on one boundary circle
        COCYCLIC_SEPARATING,       // negative case
    } tag;
    cplx x;
};

CrossRatioReality cross_ratio_reality(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                      const Vec3& p4, const HermitianForm& form,
                                      const ToleranceConfig& tol = default_tol());

// Existence of a real reflection swapping p1 <-> p2 and p3 <-> p4.
// Boundary tuples: X real positive. Interior tuples: X real positive and the
// cross distances match (cosh^2 comparison). Mixed tuples are rejected.
bool swapping_reflection_exists(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                const HermitianForm& form,
                                const ToleranceConfig& tol = default_tol());

// cosh^2(d(p,q)/2) = |<P,Q>|^2 / (<P,P><Q,Q>) for interior points.
double cosh2_half_distance(const Vec3& p, const Vec3& q, const HermitianForm& form);

// tau = 2(A(p1,p2,p3) + A(p1,p3,p4)) for boundary quadruples; satisfies the
// Milnor-Wood bound |tau| <= 2 pi on the once-punctured torus.
double toledo_once_punctured_torus(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                   const HermitianForm& form,
                                   const ToleranceConfig& tol = default_tol());

// Frame alignment for congruent interior triples: the isometry g with
// g(x_i) = y_i when side lengths and triple ratios match (holomorphic for
// equal T, antiholomorphic for conjugate T). Returns nothing if the triples
// are not congruent.
std::optional<std::variant<HoloIsometry, AntiIsometry>> align_triples(
    const std::array<Vec3, 3>& xs, const std::array<Vec3, 3>& ys, const HermitianForm& form,
    const ToleranceConfig& tol = default_tol());

} // namespace chg
