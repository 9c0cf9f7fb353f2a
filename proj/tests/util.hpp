#pragma once

#include <random>

#include "chg/hermlin.hpp"
#include "chg/isometry.hpp"

namespace chg::testutil {

using Rng = std::mt19937_64;

inline cplx rand_cplx(Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng)};
}

inline Vec3 rand_vec(Rng& rng, double scale = 1.0) {
    return {rand_cplx(rng, scale), rand_cplx(rng, scale), rand_cplx(rng, scale)};
}

// Random element of SU(2,1) for the given form, built by form-orthonormalizing
// a random basis in the ball model and moving it through the Cayley transform
// when a Siegel element is requested.
inline Mat3 rand_su21(Rng& rng, const HermitianForm& form) {
    const HermitianForm& ball = ball_form();
    for (;;) {
        Vec3 cols[3];
        // Two positive columns, one negative, Gram = diag(1,1,-1).
        Vec3 v1 = rand_vec(rng);
        double s1 = std::real(inner(ball, v1, v1));
        if (s1 < 1e-3) continue;
        v1 = (1.0 / std::sqrt(s1)) * v1;
        Vec3 v2 = rand_vec(rng);
        v2 = v2 - inner(ball, v2, v1) * v1;
        double s2 = std::real(inner(ball, v2, v2));
        if (s2 < 1e-3) continue;
        v2 = (1.0 / std::sqrt(s2)) * v2;
        Vec3 v3 = rand_vec(rng);
        v3 = v3 - inner(ball, v3, v1) * v1 - inner(ball, v3, v2) * v2;
        double s3 = std::real(inner(ball, v3, v3));
        if (s3 > -1e-3) continue;
        v3 = (1.0 / std::sqrt(-s3)) * v3;
        Mat3 g = Mat3::from_columns(v1, v2, v3);
        if (maxabs(g) > 12.0) continue; // keep products well conditioned
        g = su_normalize(g, ball);
        if (form.model == Model::SIEGEL) g = cayley(g, Model::BALL, Model::SIEGEL);
        return g;
    }
}

inline HoloIsometry rand_isometry(Rng& rng, const HermitianForm& form) {
    return make_isometry(rand_su21(rng, form), form);
}

// Move an isometry to the other model.
inline HoloIsometry cayley_iso(const HoloIsometry& A) {
    const Model to = A.form.model == Model::BALL ? Model::SIEGEL : Model::BALL;
    return HoloIsometry{cayley(A.lift, A.form.model, to), form_for(to)};
}

// Random real reflection: conjugate of sigma_0 by a random SU(2,1) element,
// Souriau lift G conj(G)^-1. Rejection keeps the fixed real plane within a
// bounded region so that downstream products stay well conditioned.
inline AntiIsometry rand_reflection(Rng& rng, const HermitianForm& form) {
    for (;;) {
        const Mat3 g = rand_su21(rng, form);
        const Mat3 m = g * inverse(conj(g));
        if (maxabs(m) > 5.0) continue;
        return AntiIsometry{m, form};
    }
}

// Rejection-sampled isometry with a bounded lift, for tests whose tolerances
// are absolute.
inline HoloIsometry rand_bounded_isometry(Rng& rng, const HermitianForm& form,
                                          double bound = 6.0) {
    for (;;) {
        const Mat3 g = rand_su21(rng, form);
        if (maxabs(g) <= bound) return make_isometry(g, form);
    }
}

inline Vec3 rand_interior(Rng& rng, const HermitianForm& form) {
    const HermitianForm& ball = ball_form();
    for (;;) {
        cplx z1 = rand_cplx(rng, 0.7), z2 = rand_cplx(rng, 0.7);
        if (std::norm(z1) + std::norm(z2) > 0.9) continue;
        Vec3 p{z1, z2, 1.0};
        if (form.model == Model::SIEGEL) p = cayley(p, Model::BALL, Model::SIEGEL);
        (void)ball;
        return p;
    }
}

inline Vec3 rand_boundary(Rng& rng, const HermitianForm& form) {
    std::uniform_real_distribution<double> a(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double t = u(rng);
    const double p1 = a(rng), p2 = a(rng);
    Vec3 p{std::sqrt(t) * std::polar(1.0, p1), std::sqrt(1.0 - t) * std::polar(1.0, p2), 1.0};
    if (form.model == Model::SIEGEL) p = cayley(p, Model::BALL, Model::SIEGEL);
    return p;
}

} // namespace chg::testutil
