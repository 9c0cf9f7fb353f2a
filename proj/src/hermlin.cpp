#include "chg/hermlin.hpp"

#include <algorithm>
#include <cmath>

namespace chg {

namespace {

Mat3 ball_matrix() { return Mat3::diagonal(1.0, 1.0, -1.0); }

Mat3 siegel_matrix() {
    Mat3 h;
    h(0, 2) = 1.0;
    h(1, 1) = 1.0;
    h(2, 0) = 1.0;
    return h;
}

} // namespace

const HermitianForm& ball_form() {
    static const HermitianForm f{ball_matrix(), Model::BALL};
    return f;
}

const HermitianForm& siegel_form() {
    static const HermitianForm f{siegel_matrix(), Model::SIEGEL};
    return f;
}

const HermitianForm& form_for(Model m) {
    return m == Model::BALL ? ball_form() : siegel_form();
}

cplx inner(const HermitianForm& form, const Vec3& X, const Vec3& Y) {
    const Vec3 hx = form.matrix * X;
    return std::conj(Y[0]) * hx[0] + std::conj(Y[1]) * hx[1] + std::conj(Y[2]) * hx[2];
}

Location locate(const HermitianForm& form, const Vec3& Z, const ToleranceConfig& tol) {
    tol.validate();
    const double n = norm2(Z);
    if (!(n > 0.0) || !finite(Z))
        throw std::invalid_argument("locate: zero or non-finite vector has no projective point");
    const Vec3 U = (1.0 / n) * Z;
    const double s = std::real(inner(form, U, U));
    if (s < -tol.boundary_tol) return Location::INTERIOR;
    if (s > tol.boundary_tol) return Location::EXTERIOR;
    return Location::BOUNDARY;
}

ProjectivePoint make_point(const HermitianForm& form, const Vec3& Z, const ToleranceConfig& tol) {
    return ProjectivePoint{Z, locate(form, Z, tol)};
}

namespace {

cplx principal_cbrt(cplx z) {
    if (z == cplx(0.0)) return 0.0;
    return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

// One Newton step on the monic cubic, skipped near critical points where it
// would amplify the error of a multiple root.
cplx polish(cplx r, cplx a2, cplx a1, cplx a0, double scale) {
    const cplx p = ((r + a2) * r + a1) * r + a0;
    const cplx dp = (3.0 * r + 2.0 * a2) * r + a1;
    if (std::abs(dp) < 1e-8 * scale) return r;
    const cplx step = p / dp;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return r;
    return r - step;
}

} // namespace

std::array<cplx, 3> cubic_roots(cplx a2, cplx a1, cplx a0) {
    for (cplx c : {a2, a1, a0})
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("cubic_roots: non-finite coefficient");

    // Depress: X = y - a2/3, y^3 + p y + q = 0.
    const cplx p = a1 - a2 * a2 / 3.0;
    const cplx q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double mag = 1.0 + std::abs(p) + std::abs(q);

    std::array<cplx, 3> y{};
    const bool real_coeffs = std::abs(p.imag()) <= 1e-14 * mag && std::abs(q.imag()) <= 1e-14 * mag;

    if (std::abs(p) <= 1e-30 * mag && std::abs(q) <= 1e-30 * mag) {
        y = {0.0, 0.0, 0.0};
    } else if (real_coeffs) {
        const double pr = p.real(), qr = q.real();
        const double disc = -4.0 * pr * pr * pr - 27.0 * qr * qr;
        if (pr < 0.0 && disc > 0.0) {
            // Three real roots: trigonometric form.
            const double m = 2.0 * std::sqrt(-pr / 3.0);
            double c = 3.0 * qr / (pr * m);
            c = std::clamp(c, -1.0, 1.0);
            const double theta = std::acos(c) / 3.0;
            for (int k = 0; k < 3; ++k)
                y[static_cast<size_t>(k)] = m * std::cos(theta - 2.0 * kPi * k / 3.0);
        } else {
            // One real root via Cardano, remaining pair from the quadratic.
            const double rad = std::sqrt(std::max(qr * qr / 4.0 + pr * pr * pr / 27.0, 0.0));
            const double u = std::cbrt(-qr / 2.0 + (qr >= 0.0 ? -rad : rad));
            const double v = (u != 0.0) ? -pr / (3.0 * u) : 0.0;
            const double y0 = u + v;
            y[0] = y0;
            // y^3 + p y + q = (y - y0)(y^2 + y0 y + (p + y0^2))
            const cplx disc2 = cplx(y0 * y0 - 4.0 * (pr + y0 * y0), 0.0);
            const cplx s = std::sqrt(disc2);
            y[1] = (-y0 + s) / 2.0;
            y[2] = (-y0 - s) / 2.0;
        }
    } else {
        // Complex Cardano with the anti-cancellation branch choice.
        const cplx rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        cplx u3 = -q / 2.0 + rad;
        if (std::abs(u3) < std::abs(-q / 2.0 - rad)) u3 = -q / 2.0 - rad;
        if (std::abs(u3) <= 1e-30 * mag) {
            const cplx r0 = principal_cbrt(-q);
            const cplx w(-0.5, std::sqrt(3.0) / 2.0);
            y = {r0, w * r0, std::conj(w) * r0};
        } else {
            const cplx u = principal_cbrt(u3);
            const cplx w(-0.5, std::sqrt(3.0) / 2.0);
            cplx uk = u;
            for (int k = 0; k < 3; ++k) {
                y[static_cast<size_t>(k)] = uk - p / (3.0 * uk);
                uk *= w;
            }
        }
    }

    const double scale = 1.0 + std::abs(a2) + std::abs(a1) + std::abs(a0);
    std::array<cplx, 3> roots{};
    for (int k = 0; k < 3; ++k) {
        cplx r = y[static_cast<size_t>(k)] - a2 / 3.0;
        r = polish(r, a2, a1, a0, scale);
        roots[static_cast<size_t>(k)] = r;
    }
    return roots;
}

namespace {

// Kernel of M via full-pivot Gaussian elimination. Pivots below
// pivot_tol (absolute) are treated as zero.
std::vector<Vec3> kernel_basis(Mat3 m, double pivot_tol) {
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
        // Back-substitute with the free variable set to 1.
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

std::array<Eigensystem::Pair, 3> Eigensystem::pairs() const {
    std::array<Pair, 3> out{};
    int i = 0;
    for (const auto& c : clusters) {
        int have = static_cast<int>(c.kernel.size());
        for (int k = 0; k < c.multiplicity && i < 3; ++k, ++i) {
            out[static_cast<size_t>(i)].value = c.value;
            out[static_cast<size_t>(i)].has_vector = k < have;
            if (k < have) out[static_cast<size_t>(i)].vector = c.kernel[static_cast<size_t>(k)];
        }
    }
    return out;
}

Eigensystem eigensystem(const Mat3& M, double cluster_rel) {
    if (!finite(M)) throw std::invalid_argument("eigensystem: non-finite matrix");
    auto roots = cubic_roots(-trace(M), minor_sum(M), -det(M));

    double rscale = 1.0;
    for (auto r : roots) rscale = std::max(rscale, std::abs(r));
    const double ctol = cluster_rel * rscale;

    // Greedy clustering of the three roots.
    bool used[3] = {false, false, false};
    Eigensystem out;
    int vi = 0;
    for (int i = 0; i < 3; ++i) {
        if (used[i]) continue;
        EigenCluster cl;
        cplx sum = roots[static_cast<size_t>(i)];
        cl.multiplicity = 1;
        used[i] = true;
        for (int j = i + 1; j < 3; ++j) {
            if (used[j]) continue;
            if (std::abs(roots[static_cast<size_t>(j)] - roots[static_cast<size_t>(i)]) <= ctol) {
                sum += roots[static_cast<size_t>(j)];
                ++cl.multiplicity;
                used[j] = true;
            }
        }
        cl.value = sum / static_cast<double>(cl.multiplicity);
        for (int k = 0; k < cl.multiplicity; ++k) out.values[static_cast<size_t>(vi++)] = cl.value;
        out.clusters.push_back(cl);
    }

    const double mscale = std::max(maxabs(M), 1.0);
    for (auto& cl : out.clusters) {
        Mat3 shifted = M - cl.value * Mat3::identity();
        // The pivot cutoff must sit above the eigenvalue error floor (root
        // noise times matrix scale) and below genuine pivots.
        const double pivot_tol = std::max(1e-6 * maxabs(shifted), 1e-10 * mscale);
        cl.kernel = kernel_basis(shifted, pivot_tol);
        if (static_cast<int>(cl.kernel.size()) > cl.multiplicity)
            cl.kernel.resize(static_cast<size_t>(cl.multiplicity));
    }
    return out;
}

bool preserves_form(const Mat3& M, const HermitianForm& form, const ToleranceConfig& tol) {
    const Mat3 g = adjoint(M) * form.matrix * M;
    const double scale = std::max(1.0, maxabs(g));
    return maxabs(g - form.matrix) <= tol.eq_tol * scale * 10.0;
}

Mat3 su_normalize(const Mat3& M, const HermitianForm& form, const ToleranceConfig& tol) {
    if (!preserves_form(M, form, tol))
        throw std::domain_error("su_normalize: matrix does not preserve the form");
    const cplx d = det(M);
    if (std::abs(d) == 0.0) throw std::domain_error("su_normalize: singular matrix");
    // Principal cube root: argument in (-pi/3, pi/3].
    const cplx c = std::polar(std::cbrt(std::abs(d)), std::arg(d) / 3.0);
    return M / c;
}

Vec3 polar_vector(const Vec3& P, const Vec3& Q, const HermitianForm& form,
                  const ToleranceConfig& tol) {
    // <P,v> = <Q,v> = 0 reads conj(v).(HP) = conj(v).(HQ) = 0, so conj(v) is
    // the bilinear cross product of HP and HQ.
    const Vec3 hp = form.matrix * P;
    const Vec3 hq = form.matrix * Q;
    Vec3 v = conj(cross(hp, hq));
    const double scale = norm2(P) * norm2(Q);
    if (norm2(v) <= tol.eq_tol * std::max(scale, 1e-300))
        throw std::domain_error("polar_vector: points are projectively equal");
    const cplx vv = inner(form, v, v);
    if (std::real(vv) > tol.eq_tol)
        v = (1.0 / std::sqrt(std::real(vv))) * v;
    else
        v = (1.0 / norm2(v)) * v;
    return v;
}

Vec3 polar_vector(const ProjectivePoint& p, const ProjectivePoint& q, const HermitianForm& form,
                  const ToleranceConfig& tol) {
    return polar_vector(p.rep, q.rep, form, tol);
}

const Mat3& cayley_matrix() {
    static const Mat3 C = [] {
        const double s = 1.0 / std::sqrt(2.0);
        Mat3 c;
        c(0, 0) = s;
        c(0, 2) = s;
        c(1, 1) = 1.0;
        c(2, 0) = s;
        c(2, 2) = -s;
        return c;
    }();
    return C;
}

Vec3 cayley(const Vec3& Z, Model from, Model to) {
    if (from == to) return Z;
    if (from == Model::BALL) return cayley_matrix() * Z;
    return inverse(cayley_matrix()) * Z;
}

Mat3 cayley(const Mat3& M, Model from, Model to) {
    if (from == to) return M;
    const Mat3& C = cayley_matrix();
    if (from == Model::BALL) return C * M * inverse(C);
    return inverse(C) * M * C;
}

namespace {

Vec3 form_orthogonalize(const HermitianForm& form, Vec3 v, const std::vector<Vec3>& prev,
                        const std::vector<cplx>& squares) {
    for (size_t i = 0; i < prev.size(); ++i)
        v = v - (inner(form, v, prev[i]) / squares[i]) * prev[i];
    return v;
}

Mat3 det_normalize(Mat3 g) {
    const cplx d = det(g);
    const cplx c = std::polar(std::cbrt(std::abs(d)), std::arg(d) / 3.0);
    return g / c;
}

} // namespace

Mat3 frame_interior(const Vec3& P, const HermitianForm& form) {
    if (form.model != Model::BALL)
        throw std::invalid_argument("frame_interior: ball-model frames only");
    const cplx pp = inner(form, P, P);
    if (std::real(pp) >= 0.0)
        throw std::domain_error("frame_interior: point is not interior");
    const Vec3 f2 = (1.0 / std::sqrt(-std::real(pp))) * P;

    std::vector<Vec3> prev{f2};
    std::vector<cplx> squares{-1.0};
    Vec3 cols[2];
    int have = 0;
    for (int k = 0; k < 3 && have < 2; ++k) {
        Vec3 e;
        e[k] = 1.0;
        Vec3 u = form_orthogonalize(form, e, prev, squares);
        const double uu = std::real(inner(form, u, u));
        if (uu > 1e-12) {
            u = (1.0 / std::sqrt(uu)) * u;
            cols[have++] = u;
            prev.push_back(u);
            squares.push_back(1.0);
        }
    }
    if (have != 2) throw std::domain_error("frame_interior: degenerate completion");
    return det_normalize(Mat3::from_columns(cols[0], cols[1], f2));
}

Mat3 frame_null_pair(const Vec3& P, const Vec3& Q, const HermitianForm& form) {
    if (form.model != Model::SIEGEL)
        throw std::invalid_argument("frame_null_pair: Siegel-model frames only");
    // Siegel Gram targets: <g1,g3> = <g3,g1> = 1, <g2,g2> = 1, rest zero.
    const cplx pq = inner(form, P, Q);
    if (std::abs(pq) == 0.0)
        throw std::domain_error("frame_null_pair: points are not distinct null directions");
    // <P, aQ> = conj(a) <P,Q>, so a = conj(1/<P,Q>) gives <g1,g3> = 1.
    const Vec3 g3 = std::conj(1.0 / pq) * Q;
    const Vec3 v = polar_vector(P, Q, form);
    return det_normalize(Mat3::from_columns(P, v, g3));
}

} // namespace chg
