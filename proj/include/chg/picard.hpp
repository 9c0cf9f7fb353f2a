#pragma once

#include <gmpxx.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chg/linalg.hpp"

namespace chg {

// Exact layer over the imaginary quadratic fields Q(i sqrt d). Everything in
// this module is computed with rational arithmetic; re-running a
// certification produces bit-identical results.

// a + b * i * sqrt(d), with a, b rational and d squarefree positive.
struct QuadFieldScalar {
    mpq_class a, b;
    long d = 1;

    QuadFieldScalar() = default;
    QuadFieldScalar(mpq_class re, mpq_class im, long dd) : a(std::move(re)), b(std::move(im)), d(dd) {}
    static QuadFieldScalar integer(long v, long d) { return {mpq_class(v), mpq_class(0), d}; }

    bool is_zero() const { return a == 0 && b == 0; }
    cplx to_complex() const { return {a.get_d(), b.get_d() * std::sqrt(double(d))}; }
    std::string str() const;
};

bool operator==(const QuadFieldScalar& x, const QuadFieldScalar& y);
QuadFieldScalar operator+(const QuadFieldScalar& x, const QuadFieldScalar& y);
QuadFieldScalar operator-(const QuadFieldScalar& x, const QuadFieldScalar& y);
QuadFieldScalar operator-(const QuadFieldScalar& x);
QuadFieldScalar operator*(const QuadFieldScalar& x, const QuadFieldScalar& y);
QuadFieldScalar conj(const QuadFieldScalar& x);
QuadFieldScalar inv(const QuadFieldScalar& x); // throws on zero

// Ring of integers O_d: Z[i sqrt d] for d = 1,2 mod 4, Z[(1+i sqrt d)/2]
// for d = 3 mod 4.
bool od_member(const QuadFieldScalar& x);

struct ExactMatrix {
    std::array<QuadFieldScalar, 9> e;
    long d = 1;

    QuadFieldScalar& operator()(int r, int c) { return e[static_cast<size_t>(3 * r + c)]; }
    const QuadFieldScalar& operator()(int r, int c) const {
        return e[static_cast<size_t>(3 * r + c)];
    }
    static ExactMatrix identity(long d);
    Mat3 to_complex() const;
};

bool operator==(const ExactMatrix& x, const ExactMatrix& y);
ExactMatrix operator*(const ExactMatrix& x, const ExactMatrix& y);
ExactMatrix conj(const ExactMatrix& x);
ExactMatrix adjoint(const ExactMatrix& x);
ExactMatrix inverse(const ExactMatrix& x);
QuadFieldScalar det(const ExactMatrix& x);

// M^* H M = H for the Siegel form and det(M) = 1, exactly.
bool exact_su21_check(const ExactMatrix& m);
bool exact_entries_in_Od(const ExactMatrix& m);

// Exact Heisenberg translation T_{[z, tau*sqrt(d)]}.
ExactMatrix exact_heis_translation(const QuadFieldScalar& z, const mpq_class& tau);

struct PicardContext {
    long d = 1;
    ExactMatrix I0, R1, T0, T1, T2;
    mpq_class tau1, tau2;              // vertical parameters: t_i = tau_i * sqrt(d)
    QuadFieldScalar z1, z2;            // translation parts of T1, T2
    std::optional<ExactMatrix> R1_ext; // order 4 / 6 complex reflection, d = 1, 3
    std::vector<ExactMatrix> sigma;    // Souriau lifts sigma_0..sigma_4 (+ extra)
    std::vector<std::string> sigma_names;
};

// Generators for d in {1,2,3,7,11}: I0, R1, T0 = T_{[0, sqrt d]}, and the
// lifts T1, T2 of the orthogonal-direction translation pair, vertical parts
// chosen with minimal |tau| in (1/2)Z so the entries land in O_d.
PicardContext build_context(long d);

// Pi_*(P) = (w -> phase * w + translation) for an exact upper triangular
// Isom(N) element; throws when the diagonal phase is not unit modulus.
struct ExactAffineMap {
    QuadFieldScalar phase;
    QuadFieldScalar translation;
};
ExactAffineMap pi_star(const ExactMatrix& p);

struct CheckResult {
    std::string name;
    bool passed;
    std::string witness; // offending identity or measured data
};

struct CertReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// sigma_i conj(sigma_i) = Id exactly; every pairwise Souriau product lies in
// SU(2,1,O_d) exactly; floating-point geometric cross-checks of the
// decomposition claims behind the sigma family.
CertReport verify_sigma_family(const PicardContext& ctx);

// [T2,T1] measured as an exact power of T0, compared with the Heisenberg
// oracle 4 Im(z2 conj z1) = k sqrt(d), plus centrality of T0.
CertReport verify_commutator_relations(const PicardContext& ctx);

struct Certificate {
    long d;
    std::vector<CheckResult> checks;
    int paper_index_claim; // Cor. 5.7 metadata, not independently verified
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

Certificate certify_reflective(long d);

} // namespace chg
