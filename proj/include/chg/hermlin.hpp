#pragma once

#include <vector>

#include "chg/linalg.hpp"
#include "chg/tolerance.hpp"

namespace chg {

// Hermitian linear algebra over C^{2,1}.
//
// Inner product convention: <X,Y> = Y^* H X, linear in X and conjugate
// linear in Y, so that <X,Y> = conj(<Y,X>). Only two forms are supported:
//   BALL   H = diag(1,1,-1)
//   SIEGEL H = antidiag(1,1,1)
// The fixed Cayley matrix C below satisfies C^* H_SIEGEL C = H_BALL, i.e. it
// carries ball-model lifts to Siegel-model lifts:
//   C = (1/sqrt 2) [[1,0,1],[0,sqrt 2,0],[1,0,-1]].

enum class Model { BALL, SIEGEL };

struct HermitianForm {
    Mat3 matrix;
    Model model;
};

const HermitianForm& ball_form();
const HermitianForm& siegel_form();
const HermitianForm& form_for(Model m);

enum class Location { INTERIOR, BOUNDARY, EXTERIOR };

struct ProjectivePoint {
    Vec3 rep;          // nonzero representative
    Location location; // cached, relative to the form used at creation
};

cplx inner(const HermitianForm& form, const Vec3& X, const Vec3& Y);

Location locate(const HermitianForm& form, const Vec3& Z,
                const ToleranceConfig& tol = default_tol());

ProjectivePoint make_point(const HermitianForm& form, const Vec3& Z,
                           const ToleranceConfig& tol = default_tol());

// Roots of the monic cubic X^3 + a2 X^2 + a1 X + a0, with multiplicity.
// Real-coefficient cubics with three real roots go through the trigonometric
// form, everything else through Cardano with principal branches; every root
// gets one guarded Newton polish on the original polynomial.
std::array<cplx, 3> cubic_roots(cplx a2, cplx a1, cplx a0);

struct EigenCluster {
    cplx value;                // cluster representative (mean of the roots)
    int multiplicity = 0;      // algebraic
    std::vector<Vec3> kernel;  // geometric eigenvectors, unit Euclidean norm
};

struct Eigensystem {
    std::array<cplx, 3> values{};      // raw roots, cluster-sorted
    std::vector<EigenCluster> clusters;

    int deficiency() const {
        int d = 0;
        for (const auto& c : clusters) d += c.multiplicity - static_cast<int>(c.kernel.size());
        return d;
    }
    // Flattened (value, vector) view; entries of a defective cluster beyond
    // its kernel dimension have has_vector = false.
    struct Pair {
        cplx value;
        Vec3 vector;
        bool has_vector;
    };
    std::array<Pair, 3> pairs() const;
};

// cluster_rel is the relative tolerance used to merge nearby roots before
// kernel extraction; 1e-7 suits exact inputs, callers handling conjugated
// semisimple matrices with repeated spectra should pass 1e-6 (root error for
// a double root scales like sqrt of the coefficient noise).
Eigensystem eigensystem(const Mat3& M, double cluster_rel = 1e-7);

bool preserves_form(const Mat3& M, const HermitianForm& form,
                    const ToleranceConfig& tol = default_tol());

// M / c with c the principal cube root of det(M); requires M in U(2,1).
Mat3 su_normalize(const Mat3& M, const HermitianForm& form,
                  const ToleranceConfig& tol = default_tol());

// Vector v with <P,v> = <Q,v> = 0, normalized to <v,v> = 1 when positive.
Vec3 polar_vector(const ProjectivePoint& p, const ProjectivePoint& q,
                  const HermitianForm& form, const ToleranceConfig& tol = default_tol());
Vec3 polar_vector(const Vec3& P, const Vec3& Q, const HermitianForm& form,
                  const ToleranceConfig& tol = default_tol());

const Mat3& cayley_matrix(); // ball lifts -> Siegel lifts

Vec3 cayley(const Vec3& Z, Model from, Model to);
Mat3 cayley(const Mat3& M, Model from, Model to);

// Form-orthonormal frame completions, det-normalized into SU(2,1).
// frame_interior (ball only): G e3 ~ P for interior P.
// frame_null_pair (Siegel only): G e1 ~ P, G e3 ~ Q for boundary P != Q.
Mat3 frame_interior(const Vec3& P, const HermitianForm& form);
Mat3 frame_null_pair(const Vec3& P, const Vec3& Q, const HermitianForm& form);

} // namespace chg
