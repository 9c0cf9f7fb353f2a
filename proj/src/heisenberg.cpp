#include "chg/heisenberg.hpp"

#include <cmath>

namespace chg {

HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b) {
    return {a.z + b.z, a.t + b.t + 2.0 * std::imag(a.z * std::conj(b.z))};
}

HeisPoint heis_inverse(const HeisPoint& a) { return {-a.z, -a.t}; }

Vec3 standard_lift(const HorosphericalPoint& p) {
    return {cplx(-std::norm(p.z) - p.u, p.t) / 2.0, p.z, 1.0};
}

HorosphericalPoint horospherical(const Vec3& lift, const ToleranceConfig& tol) {
    if (std::abs(lift[2]) <= tol.eq_tol * maxabs(lift))
        throw std::domain_error("horospherical: point at infinity has no [z,t,u] coordinates");
    const Vec3 n = lift / lift[2];
    HorosphericalPoint p;
    p.z = n[1];
    p.t = 2.0 * std::imag(n[0]);
    p.u = -2.0 * std::real(n[0]) - std::norm(p.z);
    if (p.u < 0.0 && p.u > -tol.boundary_tol) p.u = 0.0;
    return p;
}

namespace {

bool fixes_infinity_no_dilation(const Mat3& m, const ToleranceConfig& tol) {
    const double s = std::max(maxabs(m), 1.0);
    const bool upper = std::abs(m(1, 0)) <= 10 * tol.eq_tol * s &&
                       std::abs(m(2, 0)) <= 10 * tol.eq_tol * s &&
                       std::abs(m(2, 1)) <= 10 * tol.eq_tol * s;
    if (!upper) return false;
    // No dilation part: |m11| = |m33|.
    return std::abs(std::abs(m(0, 0)) - std::abs(m(2, 2))) <= 1e-7 * s;
}

} // namespace

HeisPoint boundary_action(const HoloIsometry& g, const HeisPoint& p, const ToleranceConfig& tol) {
    if (g.form.model != Model::SIEGEL)
        throw std::domain_error("boundary_action: Siegel model required");
    if (!fixes_infinity_no_dilation(g.lift, tol))
        throw std::domain_error("boundary_action: isometry is not in Isom(N)");
    const Vec3 image = g.lift * standard_lift({p.z, p.t, 0.0});
    const HorosphericalPoint h = horospherical(image, tol);
    return {h.z, h.t};
}

double contact_form_eval(const HeisPoint& at, const std::array<double, 3>& tangent) {
    // alpha = dt + 2x dy - 2y dx, the left-invariant form for the group law
    // [z1,t1].[z2,t2] = [z1+z2, t1+t2+2Im(z1 conj z2)]: the contact plane at
    // [z0,t0] is { dt = 2 Im(z0 conj dz) }.
    const double x = at.z.real(), y = at.z.imag();
    return tangent[2] + 2.0 * x * tangent[1] - 2.0 * y * tangent[0];
}

bool is_infinite_rcircle(const InfiniteRCircle& line, const ToleranceConfig& tol) {
    if (std::abs(line.direction) == 0.0)
        throw std::invalid_argument("is_infinite_rcircle: zero direction");
    const std::array<double, 3> tangent{line.direction.real(), line.direction.imag(), line.slope};
    const double scale = 1.0 + std::abs(line.base.z) + std::abs(line.direction) +
                         std::abs(line.slope);
    return std::abs(contact_form_eval(line.base, tangent)) <= 1e3 * tol.angle_tol * scale;
}

namespace {

Vec3 pick_distinct_null_siegel(const Vec3& P) {
    const Vec3 candidates[3] = {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(cplx(-0.5), 1, 1)};
    double best = -1.0;
    Vec3 out = candidates[0];
    for (const Vec3& q : candidates) {
        const double s = std::abs(inner(siegel_form(), P, q)) / (norm2(P) * norm2(q));
        if (s > best) {
            best = s;
            out = q;
        }
    }
    return out;
}

} // namespace

Fan invariant_fan(const HoloIsometry& P, const ToleranceConfig& tol) {
    if (P.form.model != Model::SIEGEL)
        throw std::domain_error("invariant_fan: Siegel model required");
    const Classification cls = classify(P, tol);
    if (cls.ambiguous || cls.tag != IsoTag::UNIPOTENT_3STEP)
        throw std::domain_error("invariant_fan: input is not 3-step unipotent");

    Fan fan;
    Mat3 m = P.lift;
    const Vec3 e1(1, 0, 0);
    const Vec3 image = m * e1;
    if (projective_distance(image, e1) > 1e-7) {
        auto fps = fixed_points_closure(P, tol);
        if (fps.size() != 1)
            throw std::domain_error("invariant_fan: could not locate the parabolic fixed point");
        const Mat3 g = frame_null_pair(fps[0].point.rep, pick_distinct_null_siegel(fps[0].point.rep),
                                       siegel_form());
        fan.at_infinity = false;
        fan.conjugator = g;
        m = inverse(g) * m * g;
    }
    m = m / m(2, 2); // unipotent normalization of the triangular lift
    const cplx z = m(1, 2);
    const double t = 2.0 * std::imag(m(0, 2));
    if (std::abs(z) <= tol.eq_tol)
        throw std::domain_error("invariant_fan: vertical translation has no fan");
    fan.w = z / std::abs(z);
    fan.k = t / (4.0 * std::abs(z));
    return fan;
}

InfiniteRCircle fan_leaf(const Fan& f, double t0) {
    if (!f.at_infinity)
        throw std::domain_error("fan_leaf: fan not based at q_infinity; apply its conjugator");
    InfiniteRCircle line;
    line.base = {f.w * cplx(0.0, f.k), t0};
    line.direction = f.w;
    line.slope = 2.0 * f.k;
    return line;
}

bool fans_parallel(const Fan& f1, const Fan& f2, const ToleranceConfig& tol) {
    return std::abs(std::imag(f2.w * std::conj(f1.w))) <= 1e3 * tol.angle_tol;
}

namespace {

// Isom(N) data (theta, z, t) of an upper triangular lift with unit-modulus
// diagonal, read off the U(2,1)-normalized triangular form.
struct IsomN {
    double theta;
    cplx z;
    double t;
};

IsomN isomN_data(const HoloIsometry& p) {
    Mat3 m = p.lift / p.lift(2, 2);
    IsomN d;
    d.theta = std::arg(m(1, 1));
    d.z = m(1, 2);
    d.t = 2.0 * std::imag(m(0, 2));
    return d;
}

} // namespace

bool parabolics_commute_at_infinity(const HoloIsometry& p1, const HoloIsometry& p2,
                                    const ToleranceConfig& tol) {
    const Classification c1 = classify(p1, tol);
    const Classification c2 = classify(p2, tol);
    auto parabolic = [](const Classification& c) {
        return !c.ambiguous &&
               (c.tag == IsoTag::UNIPOTENT_2STEP || c.tag == IsoTag::UNIPOTENT_3STEP ||
                c.tag == IsoTag::SCREW_PARABOLIC);
    };
    if (!parabolic(c1) || !parabolic(c2))
        throw std::domain_error("parabolics_commute_at_infinity: parabolic inputs required");
    for (const auto* p : {&p1, &p2})
        if (projective_distance(p->lift * Vec3(1, 0, 0), Vec3(1, 0, 0)) > 1e-7)
            throw std::domain_error("parabolics_commute_at_infinity: q_infinity not fixed");

    const IsomN d1 = isomN_data(p1);
    const IsomN d2 = isomN_data(p2);
    auto central = [&](const IsomN& d) {
        // Vertical translations commute with all of Isom(N).
        return std::abs(d.z) <= 1e-9 && std::abs(std::sin(d.theta / 2.0)) <= 1e-9;
    };

    bool verdict;
    const bool s1 = c1.tag == IsoTag::UNIPOTENT_3STEP;
    const bool s2 = c2.tag == IsoTag::UNIPOTENT_3STEP;
    if (central(d1) || central(d2)) {
        verdict = true;
    } else if (s1 && s2) {
        verdict = fans_parallel(invariant_fan(p1, tol), invariant_fan(p2, tol), tol);
    } else if (!s1 && !s2) {
        // Two screw parabolics: same stable complex line means the same
        // fixed fiber of the rotation part e^{i theta} w + z.
        const cplx f1 = d1.z / (1.0 - std::polar(1.0, d1.theta));
        const cplx f2 = d2.z / (1.0 - std::polar(1.0, d2.theta));
        verdict = std::abs(f1 - f2) <= 1e-7 * (1.0 + std::abs(f1) + std::abs(f2));
    } else {
        verdict = false;
    }

    // Cross-check by the matrix commutator.
    const Mat3 comm = p1.lift * p2.lift * inverse(p1.lift) * inverse(p2.lift);
    const bool direct = pu_equal(HoloIsometry{comm, p1.form},
                                 HoloIsometry{Mat3::identity(), p1.form}, 1e-7);
    if (verdict != direct)
        throw std::domain_error(
            "parabolics_commute_at_infinity: fan criterion and matrix commutator disagree");
    return verdict;
}

bool rcircle_fan_orthogonal(const InfiniteRCircle& line, const Fan& f,
                            const ToleranceConfig& tol) {
    if (!f.at_infinity)
        throw std::domain_error("rcircle_fan_orthogonal: fan not based at q_infinity");
    if (std::abs(line.direction) == 0.0)
        throw std::invalid_argument("rcircle_fan_orthogonal: zero direction");

    const cplx d = line.direction / std::abs(line.direction);
    // Parallel (or contained) when the direction is real along w.
    if (std::abs(std::imag(d * std::conj(f.w))) <= 1e3 * tol.angle_tol) {
        const cplx rel = (line.base.z - f.w * cplx(0.0, f.k)) * std::conj(f.w);
        const bool on_plane = std::abs(std::imag(rel)) <= 1e3 * tol.angle_tol *
                                                              (1.0 + std::abs(line.base.z));
        throw std::domain_error(on_plane
                                    ? "rcircle_fan_orthogonal: circle contained in the fan boundary"
                                    : "rcircle_fan_orthogonal: circle parallel to the fan boundary");
    }

    // Intersection with the vertical plane over L_{w,k}: solve
    // base.z + s*d = w(s' + ik) for real s, s' in the w-frame.
    const cplx b = std::conj(f.w) * line.base.z;
    const cplx dd = std::conj(f.w) * d;
    const double s = (f.k - b.imag()) / dd.imag();
    if (!std::isfinite(s))
        throw std::domain_error("rcircle_fan_orthogonal: no transverse intersection");
    // Euclidean orthogonality of the direction pair in the z-plane.
    return std::abs(std::real(d * std::conj(f.w))) <= 1e4 * tol.angle_tol;
}

cplx vertical_projection(const HeisPoint& p) { return p.z; }

} // namespace chg
