#include "chg/invariants.hpp"

#include <cmath>

namespace chg {

namespace {

void require_nonzero(cplx v, double scale, const char* what) {
    if (std::abs(v) <= 1e-14 * scale)
        throw std::domain_error(std::string("degenerate configuration: vanishing ") + what);
}

double pair_scale(const Vec3& a, const Vec3& b) { return std::max(norm2(a) * norm2(b), 1e-300); }

} // namespace

cplx triple_ratio(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form) {
    const cplx h12 = inner(form, p1, p2), h23 = inner(form, p2, p3), h31 = inner(form, p3, p1);
    require_nonzero(h12, pair_scale(p1, p2), "inner product <P1,P2>");
    require_nonzero(h23, pair_scale(p2, p3), "inner product <P2,P3>");
    require_nonzero(h31, pair_scale(p3, p1), "inner product <P3,P1>");
    return (h12 * h23 * h31) / (std::conj(h12) * std::conj(h23) * std::conj(h31));
}

double cartan(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form,
              const ToleranceConfig& tol) {
    for (const Vec3* p : {&p1, &p2, &p3})
        if (locate(form, *p, tol) != Location::BOUNDARY)
            throw std::domain_error("cartan: boundary points required");
    const cplx h12 = inner(form, p1, p2), h23 = inner(form, p2, p3), h31 = inner(form, p3, p1);
    require_nonzero(h12, pair_scale(p1, p2), "inner product (coincident points?)");
    require_nonzero(h23, pair_scale(p2, p3), "inner product (coincident points?)");
    require_nonzero(h31, pair_scale(p3, p1), "inner product (coincident points?)");
    return std::arg(-h12 * h23 * h31);
}

double brehm_shape(const Vec3& p1, const Vec3& p2, const Vec3& p3, const HermitianForm& form,
                   const ToleranceConfig& tol) {
    Vec3 q[3] = {p1, p2, p3};
    for (Vec3& p : q) {
        if (locate(form, p, tol) != Location::INTERIOR)
            throw std::domain_error("brehm_shape: interior points required");
        p = (1.0 / std::sqrt(-std::real(inner(form, p, p)))) * p;
    }
    const cplx t = inner(form, q[0], q[1]) * inner(form, q[1], q[2]) * inner(form, q[2], q[0]);
    // sigma = -Re(T~) with T~ = t / (<P1,P1><P2,P2><P3,P3>) = t / (-1)^3.
    return std::real(t);
}

cplx cross_ratio(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                 const HermitianForm& form) {
    const cplx h31 = inner(form, p3, p1), h42 = inner(form, p4, p2);
    const cplx h41 = inner(form, p4, p1), h32 = inner(form, p3, p2);
    require_nonzero(h41, pair_scale(p4, p1), "denominator <P4,P1>");
    require_nonzero(h32, pair_scale(p3, p2), "denominator <P3,P2>");
    return (h31 * h42) / (h41 * h32);
}

ExtCplx classical_cross_ratio(const ExtCplx& z1, const ExtCplx& z2, const ExtCplx& z3,
                              const ExtCplx& z4) {
    const int ninf = z1.infinite + z2.infinite + z3.infinite + z4.infinite;
    if (ninf > 1) throw std::domain_error("classical_cross_ratio: repeated point at infinity");

    cplx num, den;
    if (z1.infinite) {
        num = z3.z - z2.z;
        den = z4.z - z2.z;
    } else if (z2.infinite) {
        num = z4.z - z1.z;
        den = z3.z - z1.z;
    } else if (z3.infinite) {
        num = z4.z - z1.z;
        den = z4.z - z2.z;
    } else if (z4.infinite) {
        num = z3.z - z2.z;
        den = z3.z - z1.z;
    } else {
        num = (z4.z - z1.z) * (z3.z - z2.z);
        den = (z4.z - z2.z) * (z3.z - z1.z);
    }
    if (std::abs(den) == 0.0) {
        if (std::abs(num) == 0.0)
            throw std::domain_error("classical_cross_ratio: indeterminate 0/0");
        return ExtCplx::inf();
    }
    return ExtCplx{num / den};
}

ProjectivePoint project_to_complex_line(const Vec3& p1, const Vec3& p2, const Vec3& x,
                                        const HermitianForm& form, const ToleranceConfig& tol) {
    const Vec3 c = polar_vector(p1, p2, form, tol); // throws when p1 ~ p2
    const Vec3 proj = x - inner(form, x, c) * c;
    if (norm2(proj) <= 1e-12 * norm2(x))
        throw std::domain_error("project_to_complex_line: point is polar to the line");
    return make_point(form, proj, tol);
}

namespace {

bool on_line_boundary(const Vec3& p1, const Vec3& p2, const Vec3& x, const HermitianForm& form,
                      const ToleranceConfig& tol) {
    if (locate(form, x, tol) != Location::BOUNDARY) return false;
    const Vec3 c = polar_vector(p1, p2, form, tol);
    return std::abs(inner(form, (1.0 / norm2(x)) * x, c)) <= 100.0 * tol.boundary_tol;
}

} // namespace

CrossRatioReality cross_ratio_reality(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                      const Vec3& p4, const HermitianForm& form,
                                      const ToleranceConfig& tol) {
    CrossRatioReality out{CrossRatioReality::Kind::NON_REAL, CrossRatioReality::Tag::NONE,
                          cross_ratio(p1, p2, p3, p4, form)};
    // X can be large near degenerate denominators; the reality threshold
    // scales with |X|.
    if (std::abs(out.x.imag()) > 1e-8 * (1.0 + std::abs(out.x))) return out;

    if (out.x.real() < 0.0) {
        out.kind = CrossRatioReality::Kind::NEGATIVE_REAL;
        out.tag = CrossRatioReality::Tag::COCYCLIC_SEPARATING;
        return out;
    }
    out.kind = CrossRatioReality::Kind::POSITIVE_REAL;
    // Cocyclic means all four points on the boundary circle of the complex
    // line through p1, p2; positivity of X already rules out separation.
    const bool cocyclic = locate(form, p1, tol) == Location::BOUNDARY &&
                          locate(form, p2, tol) == Location::BOUNDARY &&
                          on_line_boundary(p1, p2, p3, form, tol) &&
                          on_line_boundary(p1, p2, p4, form, tol);
    out.tag = cocyclic ? CrossRatioReality::Tag::COCYCLIC_NON_SEPARATING
                       : CrossRatioReality::Tag::EQUIDISTANT_FROM_GEODESIC;
    return out;
}

double cosh2_half_distance(const Vec3& p, const Vec3& q, const HermitianForm& form) {
    const cplx pq = inner(form, p, q);
    const double pp = std::real(inner(form, p, p));
    const double qq = std::real(inner(form, q, q));
    return std::norm(pq) / (pp * qq);
}

bool swapping_reflection_exists(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                const HermitianForm& form, const ToleranceConfig& tol) {
    int boundary = 0, interior = 0;
    for (const Vec3* p : {&p1, &p2, &p3, &p4}) {
        const Location l = locate(form, *p, tol);
        boundary += l == Location::BOUNDARY;
        interior += l == Location::INTERIOR;
    }
    if (boundary != 4 && interior != 4)
        throw std::domain_error("swapping_reflection_exists: mixed point locations");

    const cplx x = cross_ratio(p1, p2, p3, p4, form);
    const bool positive_real =
        std::abs(x.imag()) <= 1e-8 * (1.0 + std::abs(x)) && x.real() > 0.0;
    if (!positive_real) return false;
    if (boundary == 4) return true;

    // Interior case: cosh^2 comparison avoids arccosh near 1.
    const double c13 = cosh2_half_distance(p1, p3, form);
    const double c24 = cosh2_half_distance(p2, p4, form);
    const double c14 = cosh2_half_distance(p1, p4, form);
    const double c23 = cosh2_half_distance(p2, p3, form);
    const double s = 1.0 + std::abs(c13) + std::abs(c24) + std::abs(c14) + std::abs(c23);
    return std::abs(c13 - c24) <= 1e-8 * s && std::abs(c14 - c23) <= 1e-8 * s;
}

double toledo_once_punctured_torus(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                   const HermitianForm& form, const ToleranceConfig& tol) {
    return 2.0 * (cartan(p1, p2, p3, form, tol) + cartan(p1, p3, p4, form, tol));
}

namespace {

// Lifts of an interior triple normalized so the Gram matrix is an invariant
// of the congruence class: <P,P> = -1, <P2,P1> and <P3,P1> real positive.
std::array<Vec3, 3> normalized_triple(const std::array<Vec3, 3>& ps, const HermitianForm& form) {
    std::array<Vec3, 3> q = ps;
    for (Vec3& p : q) {
        const double s = -std::real(inner(form, p, p));
        if (s <= 0.0) throw std::domain_error("align_triples: interior points required");
        p = (1.0 / std::sqrt(s)) * p;
    }
    for (int i : {1, 2}) {
        const cplx h = inner(form, q[static_cast<size_t>(i)], q[0]);
        if (std::abs(h) == 0.0)
            throw std::domain_error("align_triples: orthogonal pair, phases not fixable");
        // <c P, P1> = c <P,P1>: divide by the phase of h.
        q[static_cast<size_t>(i)] = (std::abs(h) / h) * q[static_cast<size_t>(i)];
    }
    return q;
}

Mat3 gram_of(const std::array<Vec3, 3>& q, const HermitianForm& form) {
    Mat3 g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            g(i, j) = inner(form, q[static_cast<size_t>(j)], q[static_cast<size_t>(i)]);
    return g;
}

} // namespace

std::optional<std::variant<HoloIsometry, AntiIsometry>> align_triples(
    const std::array<Vec3, 3>& xs, const std::array<Vec3, 3>& ys, const HermitianForm& form,
    const ToleranceConfig& tol) {
    const auto qx = normalized_triple(xs, form);
    const auto qy = normalized_triple(ys, form);
    const Mat3 gx = gram_of(qx, form);
    const Mat3 gy = gram_of(qy, form);

    const Mat3 x = Mat3::from_columns(qx[0], qx[1], qx[2]);
    const Mat3 y = Mat3::from_columns(qy[0], qy[1], qy[2]);
    if (std::abs(det(x)) < 1e-10 || std::abs(det(y)) < 1e-10)
        return std::nullopt; // degenerate triple, frames do not span

    const double scale = std::max(maxabs(gx), 1.0);
    if (maxabs(gx - gy) <= 1e-7 * scale) {
        const Mat3 m = y * inverse(x);
        if (!preserves_form(m, form, tol)) return std::nullopt;
        HoloIsometry g = make_isometry(m, form, tol);
        for (int i = 0; i < 3; ++i)
            if (projective_distance(g.lift * xs[static_cast<size_t>(i)],
                                    ys[static_cast<size_t>(i)]) > 1e-7)
                return std::nullopt;
        return std::variant<HoloIsometry, AntiIsometry>{g};
    }
    if (maxabs(conj(gx) - gy) <= 1e-7 * scale) {
        const Mat3 m = y * inverse(conj(x));
        if (!preserves_form(m, form, tol)) return std::nullopt;
        AntiIsometry g{m, form};
        for (int i = 0; i < 3; ++i)
            if (projective_distance(anti_apply(g, xs[static_cast<size_t>(i)]),
                                    ys[static_cast<size_t>(i)]) > 1e-7)
                return std::nullopt;
        return std::variant<HoloIsometry, AntiIsometry>{g};
    }
    return std::nullopt;
}

} // namespace chg
