#include "chg/isometry.hpp"

#include <algorithm>
#include <cmath>

namespace chg {

namespace {

const cplx kOmega{-0.5, 0.8660254037844386467637231707529362};

std::array<cplx, 3> cube_roots_of_unity() { return {cplx(1.0), kOmega, std::conj(kOmega)}; }

double rel_scale(const Mat3& m) { return std::max(maxabs(m), 1.0); }

} // namespace

HoloIsometry make_isometry(const Mat3& M, const HermitianForm& form, const ToleranceConfig& tol) {
    return HoloIsometry{su_normalize(M, form, tol), form};
}

AntiIsometry make_anti_isometry(const Mat3& M, const HermitianForm& form,
                                const ToleranceConfig& tol) {
    if (!preserves_form(M, form, tol))
        throw std::domain_error("make_anti_isometry: Souriau lift not in U(2,1)");
    return AntiIsometry{M, form};
}

double pu_distance(const HoloIsometry& a, const HoloIsometry& b) {
    double best = 1e300;
    for (cplx w : cube_roots_of_unity())
        best = std::min(best, maxabs(a.lift - w * b.lift) / rel_scale(a.lift));
    return best;
}

bool pu_equal(const HoloIsometry& a, const HoloIsometry& b, double tol) {
    return pu_distance(a, b) <= tol;
}

bool is_identity(const HoloIsometry& a, double tol) {
    return pu_equal(a, HoloIsometry{Mat3::identity(), a.form}, tol);
}

const char* to_string(IsoTag t) {
    switch (t) {
        case IsoTag::IDENTITY: return "identity";
        case IsoTag::REGULAR_ELLIPTIC: return "regular_elliptic";
        case IsoTag::COMPLEX_REFLECTION: return "complex_reflection";
        case IsoTag::COMPLEX_REFLECTION_IN_POINT: return "complex_reflection_in_point";
        case IsoTag::SPECIAL_ELLIPTIC_OTHER: return "special_elliptic_other";
        case IsoTag::UNIPOTENT_2STEP: return "unipotent_2step";
        case IsoTag::UNIPOTENT_3STEP: return "unipotent_3step";
        case IsoTag::SCREW_PARABOLIC: return "screw_parabolic";
        case IsoTag::LOXODROMIC: return "loxodromic";
    }
    return "?";
}

double goldman_f(cplx z) {
    const double m2 = std::norm(z);
    return m2 * m2 - 8.0 * std::real(z * z * z) + 18.0 * m2 - 27.0;
}

namespace {

// Distance from tau to the nearest point of 3*C3, and that point's root.
std::pair<double, cplx> nearest_3c3(cplx tau) {
    double best = 1e300;
    cplx root = 1.0;
    for (cplx w : cube_roots_of_unity()) {
        const double d = std::abs(tau - 3.0 * w);
        if (d < best) {
            best = d;
            root = w;
        }
    }
    return {best, root};
}

// 2x2 Hermitian eigen-data of the Gram matrix of a kernel-pair basis.
struct Gram2 {
    double lo, hi;          // eigenvalues, lo <= hi
    cplx vlo[2], vhi[2];    // eigenvectors in basis coordinates
};

Gram2 gram_eigen(const HermitianForm& form, const Vec3& u1, const Vec3& u2) {
    const double g11 = std::real(inner(form, u1, u1));
    const double g22 = std::real(inner(form, u2, u2));
    const cplx g21 = inner(form, u1, u2); // <u1,u2> = coefficient pairing c1 conj(c2)
    Gram2 g{};
    const double mid = (g11 + g22) / 2.0;
    const double rad = std::sqrt((g11 - g22) * (g11 - g22) / 4.0 + std::norm(g21));
    g.lo = mid - rad;
    g.hi = mid + rad;
    // (G - mu I) (a,b)^T = 0 with G = [[g11, conj(g21)],[g21, g22]].
    auto vec = [&](double mu, cplx* out) {
        const cplx r1[2] = {g11 - mu, std::conj(g21)};
        const cplx r2[2] = {g21, g22 - mu};
        if (std::abs(r1[0]) + std::abs(r1[1]) >= std::abs(r2[0]) + std::abs(r2[1])) {
            out[0] = -r1[1];
            out[1] = r1[0];
        } else {
            out[0] = -r2[1];
            out[1] = r2[0];
        }
        const double n = std::sqrt(std::norm(out[0]) + std::norm(out[1]));
        if (n > 0.0) {
            out[0] /= n;
            out[1] /= n;
        } else {
            out[0] = 1.0;
            out[1] = 0.0;
        }
    };
    vec(g.lo, g.vlo);
    vec(g.hi, g.vhi);
    return g;
}

Vec3 combine(const Vec3& u1, const Vec3& u2, const cplx* c) {
    Vec3 v = c[0] * u1 + c[1] * u2;
    const double n = norm2(v);
    return n > 0.0 ? (1.0 / n) * v : u1;
}

// Full-pivot elimination kernel with an adjustable pivot cutoff.
std::vector<Vec3> kernel_basis_probe(Mat3 m, double pivot_tol) {
    int col_perm[3] = {0, 1, 2};
    int rank = 0;
    for (int step = 0; step < 3; ++step) {
        int pr = -1, pc = -1;
        double best = pivot_tol;
        for (int r = step; r < 3; ++r)
            for (int c = step; c < 3; ++c)
                if (std::abs(m(r, c)) > best) {
                    best = std::abs(m(r, c));
                    pr = r;
                    pc = c;
                }
        if (pr < 0) break;
        if (pr != step)
            for (int c = 0; c < 3; ++c) std::swap(m(step, c), m(pr, c));
        if (pc != step) {
            for (int r = 0; r < 3; ++r) std::swap(m(r, step), m(r, pc));
            std::swap(col_perm[step], col_perm[pc]);
        }
        for (int r = step + 1; r < 3; ++r) {
            const cplx f = m(r, step) / m(step, step);
            for (int c = step; c < 3; ++c) m(r, c) -= f * m(step, c);
        }
        ++rank;
    }
    std::vector<Vec3> basis;
    for (int free_col = rank; free_col < 3; ++free_col) {
        cplx x[3] = {0.0, 0.0, 0.0};
        x[free_col] = 1.0;
        for (int r = rank - 1; r >= 0; --r) {
            cplx s = 0.0;
            for (int c = r + 1; c < 3; ++c) s += m(r, c) * x[c];
            x[r] = -s / m(r, r);
        }
        Vec3 v;
        for (int c = 0; c < 3; ++c) v[col_perm[c]] = x[c];
        const double n = norm2(v);
        if (n > 0.0) basis.push_back((1.0 / n) * v);
    }
    return basis;
}

} // namespace

// Inverse-iteration polish: for a genuine eigenvalue the shifted matrix is
// rank deficient in exact arithmetic, so a solve against the current guess
// amplifies the kernel component by the reciprocal of the noise floor. Two
// steps push a sqrt(eps)-accurate defective-cluster vector to full accuracy.
Vec3 refine_invariant_vector(const Mat3& M, cplx lambda, Vec3 v, int steps) {
    const double scale = std::max(maxabs(M), 1.0);
    for (int s = 0; s < steps; ++s) {
        Mat3 shifted = M - lambda * Mat3::identity();
        const double delta = 1e-15 * scale;
        shifted(0, 0) += delta;
        shifted(1, 1) += delta;
        shifted(2, 2) += delta;
        Vec3 next;
        try {
            next = inverse(shifted) * v;
        } catch (const std::domain_error&) {
            return v;
        }
        const double n = norm2(next);
        if (!(n > 0.0) || !finite(next)) return v;
        next = (1.0 / n) * next;
        // Keep the residual-decreasing iterate only.
        if (norm2(M * next - lambda * next) <= norm2(M * v - lambda * v)) v = next;
    }
    return v;
}

namespace {

// Kernel of (M - lambda I) with a stability probe: the dimension must be
// insensitive to moving the pivot cutoff by a factor of 10 either way,
// otherwise the caller reports the classification as ambiguous.
struct KernelProbe {
    std::vector<Vec3> kernel;
    bool stable;
};

KernelProbe probe_kernel(const Mat3& M, cplx lambda) {
    KernelProbe out;
    const Mat3 shifted = M - lambda * Mat3::identity();
    const double base = std::max(1e-6 * maxabs(shifted), 1e-10 * rel_scale(M));
    out.kernel = kernel_basis_probe(shifted, base);
    const auto k_lo = kernel_basis_probe(shifted, base / 10.0);
    const auto k_hi = kernel_basis_probe(shifted, base * 10.0);
    out.stable = k_lo.size() == out.kernel.size() && out.kernel.size() == k_hi.size();
    return out;
}

} // namespace

Classification classify(const HoloIsometry& A, const ToleranceConfig& tol) {
    Classification out;
    const cplx tau = trace(A.lift);
    out.tr = tau;
    out.f = goldman_f(tau);

    const double t4 = std::pow(std::abs(tau), 4.0);
    const double band = 1e-7 * (1.0 + t4);

    auto make_ambiguous = [&](IsoTag a, IsoTag b, const std::string& why) {
        out.ambiguous = true;
        out.candidates[0] = a;
        out.candidates[1] = b;
        out.ambiguity_reason = why;
        return out;
    };

    if (out.f < -4.0 * band || out.f > 4.0 * band) {
        if (out.f < 0) {
            out.tag = IsoTag::REGULAR_ELLIPTIC;
            // Rotation angles relative to the negative-type eigenvalue.
            auto es = eigensystem(A.lift, 1e-6);
            int neg = -1;
            std::array<cplx, 3> vals{};
            std::array<Vec3, 3> vecs{};
            int n = 0;
            for (const auto& c : es.clusters)
                for (const auto& v : c.kernel) {
                    vals[n] = c.value;
                    vecs[n] = v;
                    ++n;
                }
            for (int i = 0; i < n; ++i)
                if (std::real(inner(A.form, vecs[i], vecs[i])) < 0) neg = i;
            if (n == 3 && neg >= 0) {
                int k = 0;
                for (int i = 0; i < 3; ++i)
                    if (i != neg) out.angles[k++] = std::arg(vals[i] / vals[neg]);
            }
        } else {
            out.tag = IsoTag::LOXODROMIC;
            double r = 0.0;
            for (cplx v : eigensystem(A.lift).values) r = std::max(r, std::abs(v));
            out.dilation = r;
        }
        return out;
    }

    if (std::abs(out.f) > band)
        return make_ambiguous(out.f < 0 ? IsoTag::REGULAR_ELLIPTIC : IsoTag::LOXODROMIC,
                              IsoTag::SCREW_PARABOLIC, "f(tr) in the tolerance gray zone");

    // Zero band of f. Split on tr in 3*C3 (unipotent or identity) versus
    // not; the trace is computed directly from the matrix and is far more
    // stable than the roots near a defective spectrum.
    const auto [dc3, root] = nearest_3c3(tau);
    const double c3tol = 1e-7 * (1.0 + std::abs(tau));

    if (dc3 <= c3tol) {
        const Mat3 N = A.lift / root;
        const Mat3 D = N - Mat3::identity();
        const double nd = maxabs(D) / rel_scale(N);
        if (nd <= 1e-8) {
            out.tag = IsoTag::IDENTITY;
            return out;
        }
        if (nd <= 1e-6)
            return make_ambiguous(IsoTag::IDENTITY, IsoTag::UNIPOTENT_2STEP,
                                  "unipotent lift within the identity gray zone");
        const double r2 = maxabs(D * D) / (maxabs(D) * maxabs(D));
        if (r2 <= 1e-7)
            out.tag = IsoTag::UNIPOTENT_2STEP;
        else if (r2 <= 1e-5)
            return make_ambiguous(IsoTag::UNIPOTENT_2STEP, IsoTag::UNIPOTENT_3STEP,
                                  "minimal polynomial degree test in gray zone");
        else
            out.tag = IsoTag::UNIPOTENT_3STEP;
        out.unipotent_step = out.tag == IsoTag::UNIPOTENT_2STEP ? 2 : 3;
        return out;
    }
    if (dc3 <= 10.0 * c3tol)
        return make_ambiguous(IsoTag::UNIPOTENT_3STEP, IsoTag::SCREW_PARABOLIC,
                              "trace near 3*C3 within gray zone");

    // Near the deltoid f degenerates (its gradient vanishes on the unipotent
    // locus), so a loxodromic close to a parabolic sits inside the f-band
    // with f ~ (r-1)^3; away from 3*C3 the spectrum is at worst doubly
    // degenerate and cluster means resolve the moduli.
    auto es = eigensystem(A.lift, 1e-6);
    {
        double rmax = 0.0;
        for (const auto& c : es.clusters) rmax = std::max(rmax, std::abs(c.value));
        // Root noise for a double eigenvalue scales like the square root of
        // the characteristic-coefficient error (det error ~ eps * m^3).
        const double m = maxabs(A.lift);
        const double noise = std::sqrt(1e-15 * (1.0 + m * m * m));
        const double gate = std::max(1e-6, 10.0 * noise);
        if (rmax > 1.0 + gate) {
            out.tag = IsoTag::LOXODROMIC;
            out.dilation = rmax;
            return out;
        }
        if (rmax > 1.0 + std::max(1e-7, 3.0 * noise))
            return make_ambiguous(IsoTag::LOXODROMIC, IsoTag::SCREW_PARABOLIC,
                                  "eigenvalue modulus in the unit-circle gray zone");
    }

    // Repeated eigenvalue pair plus a simple one.
    EigenCluster rep, simple;
    bool have_rep = false, have_simple = false;
    for (const auto& c : es.clusters) {
        if (c.multiplicity == 2) { rep = c; have_rep = true; }
        if (c.multiplicity == 1 && !have_simple) { simple = c; have_simple = true; }
    }
    if (!have_rep) {
        // Roots failed to cluster; merge the closest pair by hand.
        const std::array<cplx, 3> v = es.values;
        int bi = 0, bj = 1;
        double bd = 1e300;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(v[i] - v[j]) < bd) {
                    bd = std::abs(v[i] - v[j]);
                    bi = i;
                    bj = j;
                }
        rep.value = (v[bi] + v[bj]) / 2.0;
        rep.multiplicity = 2;
        simple.value = v[3 - bi - bj];
        simple.multiplicity = 1;
        simple.kernel = probe_kernel(A.lift, simple.value).kernel;
    }

    auto pk = probe_kernel(A.lift, rep.value);
    if (!pk.stable)
        return make_ambiguous(IsoTag::SCREW_PARABOLIC, IsoTag::COMPLEX_REFLECTION,
                              "semisimplicity test unstable at this tolerance");
    const size_t kdim = pk.kernel.size();

    if (kdim <= 1) {
        out.tag = IsoTag::SCREW_PARABOLIC;
        out.angles[0] = std::arg(simple.value / rep.value);
        out.unipotent_step = 2;
        return out;
    }

    // Semisimple: special elliptic. Subtype by the position of the
    // negative-type eigenvector relative to the repeated cluster.
    const Gram2 g = gram_eigen(A.form, pk.kernel[0], pk.kernel[1]);
    const bool rep_has_negative = g.lo < -tol.boundary_tol;
    double simple_sq = 0.0;
    if (!simple.kernel.empty())
        simple_sq = std::real(inner(A.form, simple.kernel[0], simple.kernel[0]));
    const bool simple_negative = simple_sq < -tol.boundary_tol;

    if (rep_has_negative == simple_negative)
        return make_ambiguous(IsoTag::COMPLEX_REFLECTION, IsoTag::COMPLEX_REFLECTION_IN_POINT,
                              "negative-type position unresolved");
    out.tag = rep_has_negative ? IsoTag::COMPLEX_REFLECTION : IsoTag::COMPLEX_REFLECTION_IN_POINT;
    out.angles[0] = std::arg(simple.value / rep.value);
    return out;
}

int unipotent_step(const HoloIsometry& A, const ToleranceConfig& tol) {
    const Classification c = classify(A, tol);
    if (c.ambiguous || (c.tag != IsoTag::UNIPOTENT_2STEP && c.tag != IsoTag::UNIPOTENT_3STEP))
        throw std::domain_error("unipotent_step: input is not unipotent");
    return c.unipotent_step;
}

std::vector<ClosureFixedPoint> fixed_points_closure(const HoloIsometry& A,
                                                    const ToleranceConfig& tol) {
    if (is_identity(A))
        throw std::domain_error("fixed_points_closure: identity fixes everything");

    // Unipotents have a triple eigenvalue whose roots scatter like the cube
    // root of the coefficient noise; the trace pins them down exactly.
    {
        const cplx tau = trace(A.lift);
        const auto [dc3, root] = nearest_3c3(tau);
        if (dc3 <= 1e-7 * (1.0 + std::abs(tau))) {
            const Mat3 shifted = A.lift / root - Mat3::identity();
            const double pivot_tol =
                std::max(1e-6 * maxabs(shifted), 1e-10 * rel_scale(A.lift));
            auto kern = kernel_basis_probe(shifted, pivot_tol);
            for (auto& v : kern) v = refine_invariant_vector(A.lift, root, v);
            std::vector<ClosureFixedPoint> out;
            if (kern.size() == 1) {
                const Location loc = locate(A.form, kern[0], tol);
                if (loc != Location::EXTERIOR)
                    out.push_back({ProjectivePoint{kern[0], loc}, root, kern});
            } else if (kern.size() == 2) {
                const Gram2 g = gram_eigen(A.form, kern[0], kern[1]);
                if (g.lo <= tol.boundary_tol) {
                    const Vec3 v =
                        refine_invariant_vector(A.lift, root, combine(kern[0], kern[1], g.vlo));
                    const Location loc = locate(A.form, v, tol);
                    if (loc != Location::EXTERIOR)
                        out.push_back({ProjectivePoint{v, loc}, root, kern});
                }
            }
            return out;
        }
    }

    auto es = eigensystem(A.lift, 1e-6);
    std::vector<ClosureFixedPoint> out;
    for (auto& cl : es.clusters)
        for (auto& v : cl.kernel) v = refine_invariant_vector(A.lift, cl.value, v);
    for (const auto& cl : es.clusters) {
        if (cl.kernel.empty()) continue;
        if (cl.kernel.size() == 1) {
            const Vec3& v = cl.kernel[0];
            const Location loc = locate(A.form, v, tol);
            if (loc == Location::EXTERIOR) continue;
            out.push_back({ProjectivePoint{v, loc}, cl.value, {v}});
        } else if (cl.kernel.size() == 2) {
            // A fixed projective line; find where it meets the closure.
            const Gram2 g = gram_eigen(A.form, cl.kernel[0], cl.kernel[1]);
            if (g.lo > tol.boundary_tol) continue; // entirely exterior
            const Vec3 v = refine_invariant_vector(A.lift, cl.value,
                                                   combine(cl.kernel[0], cl.kernel[1], g.vlo));
            const Location loc = locate(A.form, v, tol);
            if (loc == Location::EXTERIOR) continue;
            out.push_back({ProjectivePoint{v, loc}, cl.value, cl.kernel});
        } else {
            // kernel of dimension 3 only for scalar matrices (identity).
            continue;
        }
    }
    return out;
}

std::pair<cplx, int> negative_type_eigenvalue(const HoloIsometry& A, const ToleranceConfig& tol) {
    auto es = eigensystem(A.lift, 1e-6);
    // Elliptic check: semisimple with unit eigenvalues.
    int total_kernel = 0;
    for (const auto& c : es.clusters) total_kernel += static_cast<int>(c.kernel.size());
    for (cplx v : es.values)
        if (std::abs(std::abs(v) - 1.0) > 1e-6)
            throw std::domain_error("negative_type_eigenvalue: input is not elliptic");
    if (total_kernel < 3)
        throw std::domain_error("negative_type_eigenvalue: input is not semisimple");

    int index = 0;
    for (const auto& c : es.clusters) {
        if (c.kernel.size() == 2) {
            const Gram2 g = gram_eigen(A.form, c.kernel[0], c.kernel[1]);
            if (g.lo < -tol.boundary_tol) return {c.value, index};
            index += 2;
        } else {
            for (const auto& v : c.kernel) {
                if (std::real(inner(A.form, v, v)) < -tol.boundary_tol) return {c.value, index};
                ++index;
            }
        }
    }
    throw std::domain_error("negative_type_eigenvalue: no negative vector found");
}

HoloIsometry elliptic_standard(double alpha, double beta) {
    const Mat3 m = Mat3::diagonal(std::polar(1.0, (2.0 * alpha - beta) / 3.0),
                                  std::polar(1.0, (2.0 * beta - alpha) / 3.0),
                                  std::polar(1.0, -(alpha + beta) / 3.0));
    return HoloIsometry{m, ball_form()};
}

Mat3 heis_translation_matrix(cplx z, double t) {
    Mat3 m = Mat3::identity();
    m(0, 1) = -std::conj(z);
    m(0, 2) = -(std::norm(z) - cplx(0, t)) / 2.0;
    m(1, 2) = z;
    return m;
}

Mat3 heis_rotation_matrix(double theta) {
    return Mat3::diagonal(std::polar(1.0, -theta / 3.0), std::polar(1.0, 2.0 * theta / 3.0),
                          std::polar(1.0, -theta / 3.0));
}

HoloIsometry heis_translation(cplx z, double t) {
    return HoloIsometry{heis_translation_matrix(z, t), siegel_form()};
}

HoloIsometry heis_rotation(double theta) {
    return HoloIsometry{heis_rotation_matrix(theta), siegel_form()};
}

HoloIsometry dilation(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("dilation: r must be positive");
    return HoloIsometry{Mat3::diagonal(r, 1.0, 1.0 / r), siegel_form()};
}

HoloIsometry parabolic_standard(cplx z, double t, double theta, bool u21_lift) {
    if (!u21_lift)
        return HoloIsometry{heis_translation_matrix(z, t) * heis_rotation_matrix(theta),
                            siegel_form()};
    Mat3 m = Mat3::identity();
    m(0, 1) = -std::conj(z) * std::polar(1.0, theta);
    m(0, 2) = -(std::norm(z) - cplx(0, t)) / 2.0;
    m(1, 1) = std::polar(1.0, theta);
    m(1, 2) = z;
    return make_isometry(m, siegel_form());
}

HoloIsometry anti_compose(const AntiIsometry& phi, const AntiIsometry& psi) {
    if (phi.form.model != psi.form.model)
        throw std::domain_error("anti_compose: mixed forms");
    return make_isometry(phi.souriau * conj(psi.souriau), phi.form);
}

AntiIsometry holo_after_anti(const HoloIsometry& A, const AntiIsometry& phi) {
    if (A.form.model != phi.form.model) throw std::domain_error("compose: mixed forms");
    return AntiIsometry{A.lift * phi.souriau, A.form};
}

AntiIsometry anti_after_holo(const AntiIsometry& phi, const HoloIsometry& A) {
    if (A.form.model != phi.form.model) throw std::domain_error("compose: mixed forms");
    return AntiIsometry{phi.souriau * conj(A.lift), A.form};
}

Vec3 anti_apply(const AntiIsometry& phi, const Vec3& p) { return phi.souriau * conj(p); }

ProjectivePoint anti_apply(const AntiIsometry& phi, const ProjectivePoint& p,
                           const ToleranceConfig& tol) {
    return make_point(phi.form, anti_apply(phi, p.rep), tol);
}

AntiIsometry inverse(const AntiIsometry& phi) {
    // (M conj)^-1 : z -> conj(M^-1) conj(z).
    return AntiIsometry{conj(inverse(phi.souriau)), phi.form};
}

HoloIsometry inverse(const HoloIsometry& A) { return HoloIsometry{inverse(A.lift), A.form}; }

HoloIsometry compose(const HoloIsometry& A, const HoloIsometry& B) {
    if (A.form.model != B.form.model) throw std::domain_error("compose: mixed forms");
    return HoloIsometry{A.lift * B.lift, A.form};
}

HoloIsometry conjugate(const HoloIsometry& A, const Mat3& g) {
    return HoloIsometry{g * A.lift * inverse(g), A.form};
}

AntiIsometry conjugate(const AntiIsometry& phi, const Mat3& g) {
    return AntiIsometry{g * phi.souriau * conj(inverse(g)), phi.form};
}

bool is_real_reflection(const AntiIsometry& phi, const ToleranceConfig& tol) {
    const Mat3 q = phi.souriau * conj(phi.souriau);
    cplx w;
    if (!is_scalar_matrix(q, 10.0 * tol.eq_tol, &w)) return false;
    return std::abs(w * w * w - 1.0) <= 100.0 * tol.eq_tol;
}

namespace {

Vec3 pick_distinct_null(const HermitianForm& form, const Vec3& P) {
    Vec3 candidates[3] = {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(0.5, 1, 1)};
    if (form.model == Model::BALL) {
        candidates[0] = Vec3(1, 0, 1);
        candidates[1] = Vec3(-1, 0, 1);
        candidates[2] = Vec3(0, 1, 1);
    }
    double best = -1.0;
    Vec3 out = candidates[0];
    for (const Vec3& q : candidates) {
        const double s = std::abs(inner(form, P, q)) / (norm2(P) * norm2(q));
        if (s > best) {
            best = s;
            out = q;
        }
    }
    return out;
}

std::optional<Mat3> square_root_lift(const HoloIsometry& A, const Classification& cls,
                                     const std::vector<ClosureFixedPoint>& fps, cplx omega) {
    const HermitianForm& form = A.form;
    const Mat3 lift = omega * A.lift;

    switch (cls.tag) {
        case IsoTag::IDENTITY:
            return Mat3::identity();

        case IsoTag::REGULAR_ELLIPTIC:
        case IsoTag::COMPLEX_REFLECTION_IN_POINT: {
            // Work in the ball model: A ~ diag(e^{i t}, e^{-i t}, 1), square of
            // the antidiagonal Souriau matrix with phases e^{+-i t/2}.
            const bool to_ball = form.model == Model::SIEGEL;
            const Mat3 bl = to_ball ? cayley(lift, Model::SIEGEL, Model::BALL) : lift;
            auto es = eigensystem(bl, 1e-6);
            Vec3 vneg, vpos[2];
            cplx lneg = 0, lpos[2];
            int np = 0;
            bool have_neg = false;
            for (const auto& c : es.clusters) {
                if (c.kernel.size() == 2) {
                    const Gram2 g = gram_eigen(ball_form(), c.kernel[0], c.kernel[1]);
                    Vec3 a = combine(c.kernel[0], c.kernel[1], g.vlo);
                    Vec3 b = combine(c.kernel[0], c.kernel[1], g.vhi);
                    if (g.lo < 0) {
                        vneg = a;
                        lneg = c.value;
                        have_neg = true;
                        if (np < 2) { vpos[np] = b; lpos[np] = c.value; ++np; }
                    } else {
                        for (const Vec3& u : {a, b})
                            if (np < 2) { vpos[np] = u; lpos[np] = c.value; ++np; }
                    }
                } else {
                    for (const auto& v : c.kernel) {
                        if (std::real(inner(ball_form(), v, v)) < 0) {
                            vneg = v;
                            lneg = c.value;
                            have_neg = true;
                        } else if (np < 2) {
                            vpos[np] = v;
                            lpos[np] = c.value;
                            ++np;
                        }
                    }
                }
            }
            if (!have_neg || np != 2) return std::nullopt;
            if (std::abs(lneg - 1.0) > 1e-6) return std::nullopt;
            // Form-orthonormalize the positive pair (repeated clusters need it).
            Vec3 p1 = vpos[0];
            p1 = (1.0 / std::sqrt(std::real(inner(ball_form(), p1, p1)))) * p1;
            Vec3 p2 = vpos[1] - inner(ball_form(), vpos[1], p1) * p1;
            const double s2 = std::real(inner(ball_form(), p2, p2));
            if (s2 <= 0) return std::nullopt;
            p2 = (1.0 / std::sqrt(s2)) * p2;
            Vec3 n = (1.0 / std::sqrt(-std::real(inner(ball_form(), vneg, vneg)))) * vneg;
            const Mat3 g = Mat3::from_columns(p1, p2, n);
            const double theta = std::arg(lpos[0]);
            Mat3 mstd;
            mstd(0, 1) = std::polar(1.0, theta / 2.0);
            mstd(1, 0) = std::polar(1.0, -theta / 2.0);
            mstd(2, 2) = 1.0;
            Mat3 m = g * mstd * conj(inverse(g));
            if (to_ball) m = cayley(m, Model::BALL, Model::SIEGEL);
            return m;
        }

        case IsoTag::LOXODROMIC: {
            const bool to_siegel = form.model == Model::BALL;
            const Mat3 sl = to_siegel ? cayley(lift, Model::BALL, Model::SIEGEL) : lift;
            auto es = eigensystem(sl);
            cplx lbig = 0;
            Vec3 vbig, vsmall;
            double big = -1e300, small = 1e300;
            for (const auto& c : es.clusters)
                for (const auto& v : c.kernel) {
                    const double a = std::abs(c.value);
                    if (a > big) { big = a; vbig = v; lbig = c.value; }
                    if (a < small) { small = a; vsmall = v; }
                }
            if (!(std::abs(lbig.imag()) <= 1e-7 * big && lbig.real() > 0)) return std::nullopt;
            const double r = lbig.real();
            const Mat3 g = frame_null_pair(vbig, vsmall, siegel_form());
            const Mat3 mstd = Mat3::diagonal(std::sqrt(r), 1.0, 1.0 / std::sqrt(r));
            Mat3 m = g * mstd * conj(inverse(g));
            if (to_siegel) m = cayley(m, Model::SIEGEL, Model::BALL);
            return m;
        }

        case IsoTag::UNIPOTENT_3STEP: {
            const bool to_siegel = form.model == Model::BALL;
            const HermitianForm& sf = siegel_form();
            Mat3 sl = to_siegel ? cayley(lift, Model::BALL, Model::SIEGEL) : lift;
            if (fps.size() != 1) return std::nullopt;
            Vec3 fix = fps[0].point.rep;
            if (to_siegel) fix = cayley(fix, Model::BALL, Model::SIEGEL);
            const Mat3 g = frame_null_pair(fix, pick_distinct_null(sf, fix), sf);
            Mat3 a = inverse(g) * sl * g; // unipotent upper triangular fixing e1
            a = a / a(2, 2);
            const cplx z = a(1, 2);
            const double t = 2.0 * std::imag(a(0, 2));
            if (std::abs(z) < 1e-12) return std::nullopt;
            const double psi = std::arg(z);
            const double theta = 2.0 * psi;
            const cplx zeta = std::polar(1.0, psi) * cplx(std::abs(z) / 2.0, t / (2.0 * std::abs(z)));
            Mat3 mstd = Mat3::identity();
            mstd(0, 1) = -std::conj(zeta) * std::polar(1.0, theta);
            mstd(0, 2) = -std::norm(zeta) / 2.0;
            mstd(1, 1) = std::polar(1.0, theta);
            mstd(1, 2) = zeta;
            Mat3 m = g * mstd * conj(inverse(g));
            if (to_siegel) m = cayley(m, Model::SIEGEL, Model::BALL);
            return m;
        }

        default:
            return std::nullopt;
    }
}

} // namespace

std::optional<AntiIsometry> anti_square_root(const HoloIsometry& A, const ToleranceConfig& tol) {
    Classification cls;
    std::vector<ClosureFixedPoint> fps;
    if (is_identity(A)) {
        cls.tag = IsoTag::IDENTITY;
    } else {
        cls = classify(A, tol);
        if (cls.ambiguous)
            throw std::domain_error("anti_square_root: ambiguous classification");
        fps = fixed_points_closure(A, tol);
    }

    if (cls.tag == IsoTag::UNIPOTENT_2STEP) return std::nullopt;

    // Precondition: some SU lift makes every closure fixed-point eigenvalue
    // positive real; scan the three cube-root rescalings.
    cplx omega = 1.0;
    bool found = cls.tag == IsoTag::IDENTITY;
    if (!found) {
        for (cplx w : cube_roots_of_unity()) {
            bool ok = true;
            for (const auto& fp : fps) {
                const cplx lam = w * fp.eigenvalue;
                if (!(std::abs(lam.imag()) <= 1e-7 * std::abs(lam) && lam.real() > 1e-7)) ok = false;
            }
            if (ok) {
                omega = w;
                found = true;
                break;
            }
        }
    }
    if (!found)
        throw std::domain_error(
            "anti_square_root: some closure fixed point has a non-positive eigenvalue");

    auto m = square_root_lift(A, cls, fps, omega);
    if (!m) {
        if (cls.tag == IsoTag::SCREW_PARABOLIC)
            throw std::domain_error(
                "anti_square_root: screw parabolics fail the eigenvalue precondition");
        throw std::domain_error("anti_square_root: construction failed");
    }
    AntiIsometry phi{*m, A.form};
    // Postcondition check: phi^2 = A in PU(2,1).
    const HoloIsometry sq = anti_compose(phi, phi);
    if (pu_distance(sq, A) > 1e-8)
        throw std::domain_error("anti_square_root: postcondition verification failed");
    return phi;
}

ConjugacyInvariant conjugacy_invariant(const HoloIsometry& A, const ToleranceConfig& tol) {
    ConjugacyInvariant ci;
    ci.eigenvalues = eigensystem(A.lift, 1e-6).values;
    const Classification c = classify(A, tol);
    if (!c.ambiguous) {
        switch (c.tag) {
            case IsoTag::REGULAR_ELLIPTIC:
            case IsoTag::COMPLEX_REFLECTION:
            case IsoTag::COMPLEX_REFLECTION_IN_POINT:
            case IsoTag::SPECIAL_ELLIPTIC_OTHER:
            case IsoTag::IDENTITY: {
                try {
                    ci.negative_type_index = negative_type_eigenvalue(A, tol).second;
                } catch (const std::domain_error&) {
                    ci.negative_type_index = -1;
                }
                break;
            }
            case IsoTag::UNIPOTENT_2STEP:
            case IsoTag::UNIPOTENT_3STEP:
                ci.parabolic_step = c.unipotent_step;
                break;
            case IsoTag::SCREW_PARABOLIC:
                ci.parabolic_step = 2;
                ci.elliptic_part_angle = c.angles[0];
                break;
            case IsoTag::LOXODROMIC:
                break;
        }
    }
    return ci;
}

} // namespace chg
