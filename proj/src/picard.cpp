#include "chg/picard.hpp"

#include <stdexcept>

#include "chg/decomp.hpp"

namespace chg {

std::string QuadFieldScalar::str() const {
    std::string s = a.get_str();
    if (b != 0) {
        s += (b > 0 ? "+" : "") + b.get_str() + "*i*sqrt(" + std::to_string(d) + ")";
    }
    return s;
}

namespace {

void require_same_field(long d1, long d2) {
    if (d1 != d2) throw std::invalid_argument("QuadFieldScalar: mixed fields");
}

} // namespace

bool operator==(const QuadFieldScalar& x, const QuadFieldScalar& y) {
    require_same_field(x.d, y.d);
    return x.a == y.a && x.b == y.b;
}

QuadFieldScalar operator+(const QuadFieldScalar& x, const QuadFieldScalar& y) {
    require_same_field(x.d, y.d);
    return {x.a + y.a, x.b + y.b, x.d};
}

QuadFieldScalar operator-(const QuadFieldScalar& x, const QuadFieldScalar& y) {
    require_same_field(x.d, y.d);
    return {x.a - y.a, x.b - y.b, x.d};
}

QuadFieldScalar operator-(const QuadFieldScalar& x) { return {-x.a, -x.b, x.d}; }

QuadFieldScalar operator*(const QuadFieldScalar& x, const QuadFieldScalar& y) {
    require_same_field(x.d, y.d);
    // (a1 + b1 s)(a2 + b2 s) with s^2 = -d.
    return {x.a * y.a - mpq_class(x.d) * x.b * y.b, x.a * y.b + x.b * y.a, x.d};
}

QuadFieldScalar conj(const QuadFieldScalar& x) { return {x.a, -x.b, x.d}; }

QuadFieldScalar inv(const QuadFieldScalar& x) {
    const mpq_class n = x.a * x.a + mpq_class(x.d) * x.b * x.b;
    if (n == 0) throw std::domain_error("QuadFieldScalar: division by zero");
    return {x.a / n, -x.b / n, x.d};
}

bool od_member(const QuadFieldScalar& x) {
    const long r = x.d % 4;
    if (r == 3) {
        // Z[(1+i sqrt d)/2]: 2a, 2b integers of equal parity.
        const mpq_class ta = 2 * x.a, tb = 2 * x.b;
        if (ta.get_den() != 1 || tb.get_den() != 1) return false;
        return ((ta.get_num() - tb.get_num()) % 2) == 0;
    }
    return x.a.get_den() == 1 && x.b.get_den() == 1;
}

ExactMatrix ExactMatrix::identity(long d) {
    ExactMatrix m;
    m.d = d;
    for (int i = 0; i < 9; ++i) m.e[static_cast<size_t>(i)] = QuadFieldScalar::integer(0, d);
    for (int i = 0; i < 3; ++i) m(i, i) = QuadFieldScalar::integer(1, d);
    return m;
}

Mat3 ExactMatrix::to_complex() const {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.a[static_cast<size_t>(i)] = e[static_cast<size_t>(i)].to_complex();
    return m;
}

bool operator==(const ExactMatrix& x, const ExactMatrix& y) {
    for (int i = 0; i < 9; ++i)
        if (!(x.e[static_cast<size_t>(i)] == y.e[static_cast<size_t>(i)])) return false;
    return true;
}

ExactMatrix operator*(const ExactMatrix& x, const ExactMatrix& y) {
    ExactMatrix m = ExactMatrix::identity(x.d);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            QuadFieldScalar s = QuadFieldScalar::integer(0, x.d);
            for (int k = 0; k < 3; ++k) s = s + x(r, k) * y(k, c);
            m(r, c) = s;
        }
    return m;
}

ExactMatrix conj(const ExactMatrix& x) {
    ExactMatrix m = x;
    for (auto& v : m.e) v = conj(v);
    return m;
}

ExactMatrix adjoint(const ExactMatrix& x) {
    ExactMatrix m = x;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = conj(x(c, r));
    return m;
}

QuadFieldScalar det(const ExactMatrix& x) {
    return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
           x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
           x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

ExactMatrix inverse(const ExactMatrix& x) {
    const QuadFieldScalar dt = det(x);
    const QuadFieldScalar di = inv(dt);
    ExactMatrix m = ExactMatrix::identity(x.d);
    m(0, 0) = (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) * di;
    m(0, 1) = (x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2)) * di;
    m(0, 2) = (x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1)) * di;
    m(1, 0) = (x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2)) * di;
    m(1, 1) = (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) * di;
    m(1, 2) = (x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2)) * di;
    m(2, 0) = (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) * di;
    m(2, 1) = (x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1)) * di;
    m(2, 2) = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)) * di;
    return m;
}

namespace {

ExactMatrix siegel_form_exact(long d) {
    ExactMatrix h = ExactMatrix::identity(d);
    const QuadFieldScalar zero = QuadFieldScalar::integer(0, d);
    const QuadFieldScalar one = QuadFieldScalar::integer(1, d);
    for (auto& v : h.e) v = zero;
    h(0, 2) = one;
    h(1, 1) = one;
    h(2, 0) = one;
    return h;
}

} // namespace

bool exact_su21_check(const ExactMatrix& m) {
    const ExactMatrix h = siegel_form_exact(m.d);
    if (!(adjoint(m) * h * m == h)) return false;
    return det(m) == QuadFieldScalar::integer(1, m.d);
}

bool exact_entries_in_Od(const ExactMatrix& m) {
    for (const auto& v : m.e)
        if (!od_member(v)) return false;
    return true;
}

ExactMatrix exact_heis_translation(const QuadFieldScalar& z, const mpq_class& tau) {
    // T_{[z, tau sqrt d]}: entry (0,2) is -(|z|^2 - i t)/2 = -|z|^2/2 + (tau/2) i sqrt d.
    const long d = z.d;
    ExactMatrix m = ExactMatrix::identity(d);
    const mpq_class zz = z.a * z.a + mpq_class(d) * z.b * z.b;
    m(0, 1) = -conj(z);
    m(0, 2) = QuadFieldScalar{-zz / 2, tau / 2, d};
    m(1, 2) = z;
    return m;
}

namespace {

// Smallest |tau| in (1/2)Z making the translation lift integral, preferring
// the positive one; the paper never prints these values.
mpq_class minimal_tau(const QuadFieldScalar& z, long bound_halves = 64) {
    for (long n = 0; n <= bound_halves; ++n) {
        for (int sign : {1, -1}) {
            if (n == 0 && sign < 0) continue;
            const mpq_class tau = mpq_class(sign * n, 2);
            if (exact_entries_in_Od(exact_heis_translation(z, tau))) return tau;
        }
    }
    throw std::domain_error("build_context: no integral vertical lift found in search bound");
}

} // namespace

PicardContext build_context(long d) {
    if (d != 1 && d != 2 && d != 3 && d != 7 && d != 11)
        throw std::invalid_argument(
            "build_context: supported d are 1, 2, 3, 7, 11 (values with <Gamma_inf, I0> known "
            "to generate the Picard modular group)");

    PicardContext ctx;
    ctx.d = d;
    const QuadFieldScalar zero = QuadFieldScalar::integer(0, d);
    const QuadFieldScalar one = QuadFieldScalar::integer(1, d);

    ctx.I0 = ExactMatrix::identity(d);
    for (auto& v : ctx.I0.e) v = zero;
    ctx.I0(0, 2) = one;
    ctx.I0(1, 1) = -one;
    ctx.I0(2, 0) = one;

    ctx.R1 = ExactMatrix::identity(d);
    ctx.R1(0, 0) = -one;
    ctx.R1(2, 2) = -one;

    ctx.T0 = exact_heis_translation(zero, 1);

    // Translation parts: case split on d mod 4, directions orthogonal.
    const long r = d % 4;
    if (r == 3) {
        ctx.z1 = one;                              // T1_hat
        ctx.z2 = QuadFieldScalar{0, 1, d};         // T2_hat^2 T1_hat^-1 ~ i sqrt d
    } else if (r == 2) {
        ctx.z1 = QuadFieldScalar::integer(2, d);   // T1_hat^2
        ctx.z2 = QuadFieldScalar{0, 1, d};         // T2_hat
    } else {
        ctx.z1 = QuadFieldScalar::integer(2, d);   // T1_hat^2
        ctx.z2 = QuadFieldScalar{0, 2, d};         // T2_hat^2
    }
    ctx.tau1 = minimal_tau(ctx.z1);
    ctx.tau2 = minimal_tau(ctx.z2);
    ctx.T1 = exact_heis_translation(ctx.z1, ctx.tau1);
    ctx.T2 = exact_heis_translation(ctx.z2, ctx.tau2);

    for (const ExactMatrix* g : {&ctx.I0, &ctx.R1, &ctx.T0, &ctx.T1, &ctx.T2})
        if (!exact_su21_check(*g))
            throw std::domain_error("build_context: generator failed the exact SU(2,1) check");
    for (const ExactMatrix* g : {&ctx.I0, &ctx.R1, &ctx.T1, &ctx.T2})
        if (!exact_entries_in_Od(*g))
            throw std::domain_error("build_context: generator entries left O_d");

    // Extra units for d = 1 (i) and d = 3 (sixth roots): the complex
    // reflection of order 4 / 6 recovering the rotational part.
    if (d == 1) {
        ExactMatrix m = ExactMatrix::identity(d);
        m(0, 0) = QuadFieldScalar{0, 1, d};
        m(1, 1) = -one;
        m(2, 2) = QuadFieldScalar{0, 1, d};
        ctx.R1_ext = m;
    } else if (d == 3) {
        const QuadFieldScalar u{mpq_class(1, 2), mpq_class(1, 2), d}; // e^{i pi/3}
        ExactMatrix m = ExactMatrix::identity(d);
        m(0, 0) = u;
        m(1, 1) = -u;
        m(2, 2) = u;
        ctx.R1_ext = m;
    }
    if (ctx.R1_ext && (!exact_su21_check(*ctx.R1_ext) || !exact_entries_in_Od(*ctx.R1_ext)))
        throw std::domain_error("build_context: extended reflection failed exact checks");

    ctx.sigma = {ExactMatrix::identity(d), ctx.R1, ctx.T2, ctx.T1 * ctx.R1, ctx.I0};
    ctx.sigma_names = {"sigma0", "sigma1", "sigma2", "sigma3", "sigma4"};
    if (ctx.R1_ext) {
        ctx.sigma.push_back(*ctx.R1_ext);
        ctx.sigma_names.push_back("sigma5");
    }
    return ctx;
}

ExactAffineMap pi_star(const ExactMatrix& p) {
    const QuadFieldScalar zero = QuadFieldScalar::integer(0, p.d);
    if (!(p(1, 0) == zero) || !(p(2, 0) == zero) || !(p(2, 1) == zero))
        throw std::domain_error("pi_star: matrix is not upper triangular");
    const QuadFieldScalar den = p(2, 2);
    if (den.is_zero()) throw std::domain_error("pi_star: singular normalization");
    const QuadFieldScalar phase = p(1, 1) * inv(den);
    if (!(phase * conj(phase) == QuadFieldScalar::integer(1, p.d)))
        throw std::domain_error("pi_star: rotation phase is not exactly unit modulus");
    return {phase, p(1, 2) * inv(den)};
}

namespace {

HoloIsometry to_float_isometry(const ExactMatrix& m) {
    return make_isometry(m.to_complex(), siegel_form());
}

AntiIsometry to_float_anti(const ExactMatrix& m) {
    return AntiIsometry{m.to_complex(), siegel_form()};
}

CheckResult check(const std::string& name, bool ok, const std::string& witness = "") {
    return {name, ok, witness};
}

} // namespace

CertReport verify_sigma_family(const PicardContext& ctx) {
    CertReport rep;
    const ExactMatrix id = ExactMatrix::identity(ctx.d);

    for (size_t i = 0; i < ctx.sigma.size(); ++i) {
        const bool invol = ctx.sigma[i] * conj(ctx.sigma[i]) == id;
        rep.checks.push_back(check(ctx.sigma_names[i] + " conj-involution (M conj M = Id)", invol,
                                   invol ? "" : "product differs from the identity"));
    }

    for (size_t i = 0; i < ctx.sigma.size(); ++i)
        for (size_t j = 0; j < ctx.sigma.size(); ++j) {
            if (i == j) continue;
            const ExactMatrix prod = ctx.sigma[i] * conj(ctx.sigma[j]);
            const bool su = exact_su21_check(prod);
            const bool od = exact_entries_in_Od(prod);
            rep.checks.push_back(check(ctx.sigma_names[i] + " " + ctx.sigma_names[j] +
                                           " in SU(2,1,O_d)",
                                       su && od,
                                       su ? (od ? "" : "entries left O_d") : "form or det failed"));
        }

    // Conjugation symmetry used by the reflective-generation argument.
    rep.checks.push_back(check("conj(R1) = R1", conj(ctx.R1) == ctx.R1));
    rep.checks.push_back(check("conj(I0) = I0", conj(ctx.I0) == ctx.I0));
    rep.checks.push_back(check("conj(T0) = T0^-1", conj(ctx.T0) == inverse(ctx.T0)));
    rep.checks.push_back(check("conj(T2) = T2^-1", conj(ctx.T2) == inverse(ctx.T2)));
    {
        // conj(T1) = T1 T0^(-2 tau1), an exact word in the generators.
        ExactMatrix rhs = ctx.T1;
        const mpq_class k = -2 * ctx.tau1;
        // T0^k with rational k*? k is an integer multiple of 1 when tau1 is
        // a half integer times 2; build directly as a vertical translation.
        rhs = rhs * exact_heis_translation(QuadFieldScalar::integer(0, ctx.d), k);
        rep.checks.push_back(check("conj(T1) = T1 * T_[0, -2 tau1 sqrt d]", conj(ctx.T1) == rhs));
    }

    // Floating-point geometric cross-checks of the decomposition claims.
    const AntiIsometry s0 = to_float_anti(ctx.sigma[0]);
    const AntiIsometry s1 = to_float_anti(ctx.sigma[1]);
    auto cross = [&](const std::string& name, const AntiIsometry& s, const ExactMatrix& a) {
        bool ok = false;
        std::string note;
        try {
            const HoloIsometry iso = to_float_isometry(a);
            ok = geometric_decomposes(s, iso).decomposes && reflection_decomposes(s, iso);
        } catch (const std::exception& e) {
            note = e.what();
        }
        rep.checks.push_back(check(name, ok, note));
    };
    cross("geometric: sigma0 decomposes R1", s0, ctx.R1);
    cross("geometric: sigma0 decomposes I0", s0, ctx.I0);
    cross("geometric: sigma0 decomposes T2", s0, ctx.T2);
    cross("geometric: sigma1 decomposes T1", s1, ctx.T1);

    // sigma1 acts on the boundary as (z,t,u) -> (-conj z, -t, u).
    {
        bool ok = true;
        const AntiIsometry s = s1;
        for (double zr : {0.3, -1.2})
            for (double zi : {0.7, -0.4}) {
                const HorosphericalPoint h{cplx(zr, zi), 0.9, 0.5};
                const Vec3 image = anti_apply(s, standard_lift(h));
                const HorosphericalPoint back = horospherical(image);
                ok = ok && std::abs(back.z + std::conj(h.z)) < 1e-12 &&
                     std::abs(back.t + h.t) < 1e-12 && std::abs(back.u - h.u) < 1e-12;
            }
        rep.checks.push_back(check("sigma1 boundary action (z,t,u) -> (-conj z, -t, u)", ok));
    }
    return rep;
}

CertReport verify_commutator_relations(const PicardContext& ctx) {
    CertReport rep;
    const ExactMatrix comm =
        ctx.T2 * ctx.T1 * inverse(ctx.T2) * inverse(ctx.T1);

    // The commutator must be a vertical translation T_[0, k sqrt d]; its
    // (0,2) entry is (k/2) i sqrt d.
    const QuadFieldScalar zero = QuadFieldScalar::integer(0, ctx.d);
    bool vertical = comm(0, 1) == zero && comm(1, 2) == zero && comm(0, 2).a == 0;
    mpq_class k = 0;
    if (vertical) {
        k = 2 * comm(0, 2).b;
        vertical = comm == exact_heis_translation(zero, k);
    }
    rep.checks.push_back(check("[T2,T1] is a power of T0", vertical && k.get_den() == 1,
                               vertical ? ("measured k = " + k.get_str()) : "not vertical"));

    // Heisenberg oracle: 4 Im(z2 conj z1) = k sqrt d.
    const mpq_class oracle = 4 * (ctx.z2.b * ctx.z1.a - ctx.z2.a * ctx.z1.b);
    rep.checks.push_back(check("measured k equals the Heisenberg oracle 4 Im(z2 conj z1)/sqrt d",
                               vertical && k == oracle,
                               "measured " + k.get_str() + ", oracle " + oracle.get_str()));

    // The paper's stated relation uses the unsubstituted generators; record
    // the discrepancy rather than asserting it.
    const long paper_k = (ctx.d % 4 == 3) ? 1 : 4;
    rep.checks.push_back(check("paper-stated power recorded (informational)", true,
                               "paper states k = " + std::to_string(paper_k) + ", measured k = " +
                                   k.get_str()));

    rep.checks.push_back(
        check("[T0,T1] = Id", ctx.T0 * ctx.T1 * inverse(ctx.T0) * inverse(ctx.T1) ==
                                  ExactMatrix::identity(ctx.d)));
    rep.checks.push_back(
        check("[T0,T2] = Id", ctx.T0 * ctx.T2 * inverse(ctx.T0) * inverse(ctx.T2) ==
                                  ExactMatrix::identity(ctx.d)));
    return rep;
}

Certificate certify_reflective(long d) {
    const PicardContext ctx = build_context(d);
    Certificate cert;
    cert.d = d;
    // Cor. 5.7 index metadata, reported from the paper, not enumerated here.
    cert.paper_index_claim = (d == 3 || d == 7 || d == 11) ? 2 : (d == 2 ? 4 : 8);

    auto add = [&](const CertReport& r) {
        cert.checks.insert(cert.checks.end(), r.checks.begin(), r.checks.end());
    };

    CertReport gens;
    gens.checks.push_back(check("generators satisfy M* H M = H and det = 1 exactly", [&] {
        for (const ExactMatrix* g : {&ctx.I0, &ctx.R1, &ctx.T0, &ctx.T1, &ctx.T2})
            if (!exact_su21_check(*g)) return false;
        return true;
    }()));
    gens.checks.push_back(check("T1, T2, R1, I0 entries in O_d", [&] {
        for (const ExactMatrix* g : {&ctx.I0, &ctx.R1, &ctx.T1, &ctx.T2})
            if (!exact_entries_in_Od(*g)) return false;
        return true;
    }()));
    gens.checks.push_back(check(
        "T0 vertical: pi_star(T0) is the identity map",
        pi_star(ctx.T0).phase == QuadFieldScalar::integer(1, d) &&
            pi_star(ctx.T0).translation == QuadFieldScalar::integer(0, d)));
    gens.checks.push_back(check("T1, T2 translation directions orthogonal",
                                ctx.z1.a * ctx.z2.a + mpq_class(d) * ctx.z1.b * ctx.z2.b == 0));
    add(gens);
    add(verify_sigma_family(ctx));
    add(verify_commutator_relations(ctx));
    return cert;
}

} // namespace chg
