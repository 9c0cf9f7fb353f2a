#pragma once

#include "chg/isometry.hpp"

namespace chg {

// Boundary geometry of the Siegel model. The boundary minus the point at
// infinity is the Heisenberg group in [z,t] coordinates with group law
// [z1,t1].[z2,t2] = [z1+z2, t1+t2+2 Im(z1 conj(z2))] and the left-invariant
// contact form alpha = dt + 2x dy - 2y dx.

struct HeisPoint {
    cplx z;
    double t = 0.0;
};

struct HorosphericalPoint {
    cplx z;
    double t = 0.0;
    double u = 0.0; // u = 0 on the boundary
};

// Affine line {base . s*(direction, slope)}: points [base.z + s*direction,
// t(s)] with dt/ds = slope. An infinite R-circle iff it sits in the contact
// plane at one of its points.
struct InfiniteRCircle {
    HeisPoint base;
    cplx direction; // nonzero
    double slope = 0.0;
};

// Fan over the affine line L_{w,k} = { w(s + ik) : s real }, |w| = 1.
// Fans away from q_infinity carry the conjugator g with g(q_inf) = apex;
// the (w,k) data then describes g^-1 F.
struct Fan {
    cplx w;
    double k = 0.0;
    bool at_infinity = true;
    Mat3 conjugator = Mat3::identity();
};

HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b);
HeisPoint heis_inverse(const HeisPoint& a);

Vec3 standard_lift(const HorosphericalPoint& p);
// Inverse of standard_lift; requires a lift with nonzero last coordinate.
HorosphericalPoint horospherical(const Vec3& lift, const ToleranceConfig& tol = default_tol());

// Action of g in Isom(N) (upper triangular, no dilation part) on [z,t].
HeisPoint boundary_action(const HoloIsometry& g, const HeisPoint& p,
                          const ToleranceConfig& tol = default_tol());

double contact_form_eval(const HeisPoint& at, const std::array<double, 3>& tangent);

bool is_infinite_rcircle(const InfiniteRCircle& line, const ToleranceConfig& tol = default_tol());

// The invariant fan of a 3-step unipotent: w = z/|z|, k = t/(4|z|) when P
// translates by [z,t] at q_infinity; otherwise the fixed point is moved to
// q_infinity first and the conjugator is recorded.
Fan invariant_fan(const HoloIsometry& P, const ToleranceConfig& tol = default_tol());

// Leaf L_{t0} = {[w(s+ik), t0+2sk]} of the boundary foliation of the fan.
InfiniteRCircle fan_leaf(const Fan& f, double t0);

bool fans_parallel(const Fan& f1, const Fan& f2, const ToleranceConfig& tol = default_tol());

// Both inputs must fix q_infinity and be parabolic; the verdict follows the
// fan/stable-line criterion and is cross-checked against the matrix
// commutator.
bool parabolics_commute_at_infinity(const HoloIsometry& p1, const HoloIsometry& p2,
                                    const ToleranceConfig& tol = default_tol());

// True iff the unique leaf of F meeting L crosses it orthogonally (Euclidean
// metric on the z factor of the contact plane). Throws when L is parallel to
// or contained in the boundary plane of F.
bool rcircle_fan_orthogonal(const InfiniteRCircle& line, const Fan& f,
                            const ToleranceConfig& tol = default_tol());

cplx vertical_projection(const HeisPoint& p);

} // namespace chg
