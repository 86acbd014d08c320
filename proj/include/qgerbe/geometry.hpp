// Discrete paths and surfaces in configuration space x time, integrals of
// L dt and dL^dt, the Stokes check, gauge and WKB phases, vacuum values, and
// the gerbe connection (A, B, H) with its three structure equations.
//
// Spacetime mesh vertices are flat points whose last coordinate is time.
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/mesh.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace qgerbe {

struct DiscretePath {
    std::vector<SpacetimePoint> vertices;
    bool closed = false;

    void validate() const
    {
        if (vertices.size() < 2)
            throw DomainError("a path needs at least two vertices");
        const std::size_t d = vertices.front().q.size();
        for (const auto& v : vertices)
            if (v.q.size() != d)
                throw DomainError("path vertices have mixed dimensions");
        if (!closed)
            return;
        auto same = [](const SpacetimePoint& a, const SpacetimePoint& b) { return a.t == b.t && a.q == b.q; };
        if (!same(vertices.front(), vertices.back()))
            throw DomainError("closed path must end at its first vertex");
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
            for (std::size_t j = i + 1; j + 1 < vertices.size(); ++j)
                if (same(vertices[i], vertices[j]))
                    throw DomainError("closed path repeats a vertex");
    }

    /// Closed polygon through `pts` (the first point is appended at the end).
    static DiscretePath loop(std::vector<SpacetimePoint> pts)
    {
        pts.push_back(pts.front());
        DiscretePath p{std::move(pts), true};
        p.validate();
        return p;
    }
};

/// L(q, t) with an optional analytic q-gradient.
struct LagrangianField {
    std::function<double(const std::vector<double>&, double)> value;
    std::function<std::vector<double>(const std::vector<double>&, double)> gradient;
    double fd_step = 1e-4;

    double operator()(const std::vector<double>& q, double t) const { return value(q, t); }

    /// At a flat spacetime point (q..., t).
    double at(const Point& x) const
    {
        const std::vector<double> q(x.begin(), x.end() - 1);
        return value(q, x.back());
    }

    /// dL/dq; central differences with step fd_step * scale when no gradient is given.
    std::vector<double> grad_q(const std::vector<double>& q, double t, double scale = 1.0) const
    {
        if (gradient)
            return gradient(q, t);
        const double h = fd_step * scale;
        std::vector<double> g(q.size());
        std::vector<double> x = q;
        for (std::size_t j = 0; j < q.size(); ++j) {
            x[j] = q[j] + h;
            const double fp = value(x, t);
            x[j] = q[j] - h;
            const double fm = value(x, t);
            x[j] = q[j];
            g[j] = (fp - fm) / (2.0 * h);
        }
        return g;
    }

    LagrangianField scaled(double lambda) const
    {
        LagrangianField r = *this;
        r.value = [v = value, lambda](const std::vector<double>& q, double t) { return lambda * v(q, t); };
        if (gradient)
            r.gradient = [g = gradient, lambda](const std::vector<double>& q, double t) {
                auto out = g(q, t);
                for (double& x : out)
                    x *= lambda;
                return out;
            };
        return r;
    }

    static LagrangianField constant(double c)
    {
        return {[c](const std::vector<double>&, double) { return c; },
                [](const std::vector<double>& q, double) { return std::vector<double>(q.size(), 0.0); }};
    }
};

namespace detail {

inline Point flat(const SpacetimePoint& p)
{
    Point x = p.q;
    x.push_back(p.t);
    return x;
}

inline double edge_term(const LagrangianField& L, const Point& a, const Point& b)
{
    return 0.5 * (L.at(a) + L.at(b)) * (b.back() - a.back());
}

inline double max_edge(const Point& a, const Point& b, const Point& c)
{
    auto len = [](const Point& u, const Point& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            s += (u[i] - v[i]) * (u[i] - v[i]);
        return std::sqrt(s);
    };
    return std::max({len(a, b), len(b, c), len(a, c)});
}

} // namespace detail

/// Trapezoidal sum of L dt along the path edges.
inline double action_line_integral(const LagrangianField& L, const DiscretePath& path)
{
    path.validate();
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k)
        s += detail::edge_term(L, detail::flat(path.vertices[k]), detail::flat(path.vertices[k + 1]));
    return s;
}

/// Trapezoidal L dt over the oriented boundary edges of a surface.
inline double boundary_line_integral(const LagrangianField& L, const DiscreteSurface& surf)
{
    double s = 0.0;
    for (const auto& [a, b] : surf.boundary_edges())
        s += detail::edge_term(L, surf.vertices[a], surf.vertices[b]);
    return s;
}

/// dL^dt over the surface; the gradient is taken at each triangle centroid.
inline double surface_integral_dL_dt(const LagrangianField& L, const DiscreteSurface& surf)
{
    surf.validate();
    double s = 0.0;
    for (const auto& tri : surf.triangles) {
        const Point &a = surf.vertices[tri[0]], &b = surf.vertices[tri[1]], &c = surf.vertices[tri[2]];
        const std::size_t n = a.size();
        if (n < 2)
            throw DomainError("surface vertices need at least one q coordinate and time");
        std::vector<double> q(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j)
            q[j] = (a[j] + b[j] + c[j]) / 3.0;
        const double t = (a.back() + b.back() + c.back()) / 3.0;
        const auto g = L.grad_q(q, t, detail::max_edge(a, b, c));
        const double e1t = b.back() - a.back(), e2t = c.back() - a.back();
        for (std::size_t j = 0; j + 1 < n; ++j)
            s += 0.5 * g[j] * ((b[j] - a[j]) * e2t - (c[j] - a[j]) * e1t);
    }
    return s;
}

struct StokesReport {
    double line = 0.0;
    double surface = 0.0;
    double residual = 0.0;
    bool closed = false;
    bool pass = false;
};

/// |boundary integral of L dt - surface integral of dL^dt|. A closed surface
/// compares 0 with the surface side.
inline StokesReport stokes_check(const LagrangianField& L, const DiscreteSurface& surf, double tol = 1e-9)
{
    StokesReport r;
    r.surface = surface_integral_dL_dt(L, surf);
    r.closed = surf.boundary_chain().empty();
    r.line = r.closed ? 0.0 : boundary_line_integral(L, surf);
    r.residual = std::abs(r.line - r.surface);
    r.pass = r.residual < tol;
    return r;
}

/// Least-squares slope of log(err) against log(h).
inline double convergence_slope(const std::vector<double>& h, const std::vector<double>& err)
{
    if (h.size() != err.size() || h.size() < 2)
        throw DomainError("convergence slope needs at least two matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(err[i] > 0.0))
            throw DomainError("convergence slope needs positive steps and errors");
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

using VevCandidate = std::variant<DiscretePath, DiscreteSurface>;

struct VevReport {
    std::vector<double> hbar;
    std::size_t physical_index = 0;
    double hbar_phys = 0.0;
};

/// One action value per candidate; the designated one is reported as hbar_phys.
inline VevReport vev_report(const LagrangianField& L, const std::vector<VevCandidate>& candidates,
                            std::size_t physical_index)
{
    if (physical_index >= candidates.size())
        throw LookupError("physical index " + std::to_string(physical_index) + " out of range");
    VevReport r;
    for (const auto& c : candidates)
        r.hbar.push_back(std::visit(
            [&](const auto& x) {
                if constexpr (std::is_same_v<std::decay_t<decltype(x)>, DiscretePath>)
                    return action_line_integral(L, x);
                else
                    return surface_integral_dL_dt(L, x);
            },
            c));
    r.physical_index = physical_index;
    r.hbar_phys = r.hbar[physical_index];
    return r;
}

/// Edge values of a discrete 1-form along a path.
struct PathForm {
    DiscretePath path;
    std::vector<double> edges;

    double integral() const
    {
        double s = 0.0;
        for (double e : edges)
            s += e;
        return s;
    }
};

inline PathForm discretize(const LagrangianField& L, const DiscretePath& path)
{
    path.validate();
    PathForm f{path, {}};
    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k)
        f.edges.push_back(detail::edge_term(L, detail::flat(path.vertices[k]), detail::flat(path.vertices[k + 1])));
    return f;
}

/// L dt -> L dt + df for a function f on configuration space.
inline PathForm gauge_transform(const PathForm& form, const std::function<double(const std::vector<double>&)>& f)
{
    if (form.edges.size() + 1 != form.path.vertices.size())
        throw DomainError("path form has the wrong number of edges");
    PathForm r = form;
    std::vector<double> fv;
    for (const auto& v : form.path.vertices)
        fv.push_back(f(v.q));
    for (std::size_t k = 0; k < r.edges.size(); ++k)
        r.edges[k] += fv[k + 1] - fv[k];
    return r;
}

/// psi = R exp(iS/hbar) exp(i f/hbar) at each sample point.
inline std::vector<cplx> wkb_phase(const std::function<double(const std::vector<double>&)>& R,
                                   const std::function<double(const std::vector<double>&)>& S,
                                   const std::function<double(const std::vector<double>&)>& f, double hbar,
                                   const std::vector<std::vector<double>>& samples)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    std::vector<cplx> psi;
    psi.reserve(samples.size());
    for (const auto& q : samples) {
        const double gauge = f ? f(q) : 0.0;
        psi.push_back(R(q) * std::polar(1.0, (S(q) + gauge) / hbar));
    }
    return psi;
}

/// A = (1/hbar) L dt on every edge of a spacetime complex (sorted orientation).
inline Cochain connection_from_lagrangian(const LagrangianField& L, const SimplicialComplex& mesh, double hbar)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    Cochain A;
    const auto& v = mesh.vertices();
    for (const auto& e : mesh.simplices(1))
        A.emplace(e, detail::edge_term(L, v[e[0]], v[e[1]]) / hbar);
    return A;
}

/// Same along a path; exp(i * sum) is the U(1) holonomy.
inline PathForm connection_from_lagrangian(const LagrangianField& L, const DiscretePath& path, double hbar)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    PathForm f = discretize(L, path);
    for (double& e : f.edges)
        e /= hbar;
    return f;
}

// ------------------------------------------------------------- connection

/// Cochains of a gerbe connection on a 3-d mesh under a box cover. A is
/// keyed by sorted chart pairs, B by chart, g by sorted triples (sampled at
/// mesh vertices inside the triple overlap).
struct GerbeConnectionData {
    Cover cover;
    SimplicialComplex mesh;
    std::map<Labels, Cochain> A;
    std::map<int, Cochain> B;
    Cochain H;
    U1Cochain g;
};

struct ConnectionReport {
    /// Per equation: (i) H = dB_a, (ii) B_b - B_a = dA_ab, (iii) A sum = g^-1 dg.
    std::array<double, 3> max_residual{};
    /// Same residuals divided by the element measure.
    std::array<double, 3> max_density{};
    std::array<std::size_t, 3> checked{};
    bool pass = false;
};

namespace detail {

inline const Cochain& find_form(const std::map<Labels, Cochain>& m, const Labels& key)
{
    auto it = m.find(key);
    if (it == m.end())
        throw IncompleteDataError("connection data lacks A" + labels_to_string(key));
    return it->second;
}

inline double value_on(const Cochain& w, const Simplex& s)
{
    auto it = w.find(s);
    if (it == w.end())
        throw IncompleteDataError("form has no value on a mesh simplex");
    return it->second;
}

} // namespace detail

inline ConnectionReport verify_connection(const GerbeConnectionData& data, double tol = 1e-6)
{
    const auto& mesh = data.mesh;
    if (mesh.dimension() != 3)
        throw DomainError("connection check needs a 3-d mesh");
    ConnectionReport r;
    auto note = [&](int eq, double res, double measure) {
        r.max_residual[eq] = std::max(r.max_residual[eq], res);
        r.max_density[eq] = std::max(r.max_density[eq], measure > 0.0 ? res / measure : res);
        ++r.checked[eq];
    };
    const Labels charts = data.cover.labels();

    for (int a : charts) {
        auto bit = data.B.find(a);
        if (bit == data.B.end())
            throw IncompleteDataError("connection data lacks B for chart " + std::to_string(a));
        const auto region = data.cover.region({a});
        const auto tets = mesh.inside(3, region);
        if (tets.empty())
            continue;
        const Cochain dB = mesh.d(2, bit->second);
        for (const auto& t : tets)
            note(0, std::abs(detail::value_on(data.H, t) - detail::value_on(dB, t)), mesh.measure(t));
    }

    for (const auto& pair : label_subsets(charts, 2)) {
        const auto region = data.cover.region(pair);
        if (region.empty)
            continue;
        const auto faces = mesh.inside(2, region);
        if (faces.empty())
            continue;
        const Cochain dA = mesh.d(1, detail::find_form(data.A, pair));
        const Cochain &Ba = data.B.at(pair[0]), &Bb = data.B.at(pair[1]);
        for (const auto& f : faces)
            note(1, std::abs(detail::value_on(Bb, f) - detail::value_on(Ba, f) - detail::value_on(dA, f)),
                 mesh.measure(f));
    }

    const auto& v = mesh.vertices();
    for (const auto& tri : label_subsets(charts, 3)) {
        const auto region = data.cover.region(tri);
        if (region.empty)
            continue;
        const auto edges = mesh.inside(1, region);
        if (edges.empty())
            continue;
        const Cochain& A12 = detail::find_form(data.A, {tri[0], tri[1]});
        const Cochain& A23 = detail::find_form(data.A, {tri[1], tri[2]});
        const Cochain& A13 = detail::find_form(data.A, {tri[0], tri[2]});
        for (const auto& e : edges) {
            const cplx ga = data.g.at(tri, v[e[0]]).value(), gb = data.g.at(tri, v[e[1]]).value();
            const double dlog = std::arg(gb * std::conj(ga));
            const double sum = detail::value_on(A12, e) + detail::value_on(A23, e) - detail::value_on(A13, e);
            note(2, std::abs(sum - dlog), mesh.measure(e));
        }
    }
    r.pass = r.max_residual[0] < tol && r.max_residual[1] < tol && r.max_residual[2] < tol;
    return r;
}

/// Smooth fields on R^3 from which an exact connection is assembled:
///   A_ab = d theta_ab + a_b - a_a,  B_a = b + d a_a,  H = d b,
///   g = exp(i(theta_12 + theta_23 - theta_13)).
/// 1-forms and 2-forms are given as vector proxies (2-form b <-> b . n dA).
struct ConnectionFields {
    using Scalar = std::function<double(const Point&)>;
    using Vector = std::function<Point(const Point&)>;
    std::array<Scalar, 3> theta; // 12, 23, 13
    std::array<Vector, 3> a;
    std::array<Vector, 3> curl_a;
    Vector b;
    Scalar div_b;

    static ConnectionFields smooth()
    {
        ConnectionFields f;
        f.theta = {[](const Point& x) { return std::sin(x[0] + 2.0 * x[1]) + 0.3 * x[2]; },
                   [](const Point& x) { return x[0] * std::cos(x[1]) + 0.2 * x[2] * x[2]; },
                   [](const Point& x) { return 0.5 * x[0] * x[2] + std::sin(x[2]); }};
        f.a = {[](const Point& x) { return Point{x[1], x[2] * x[2], std::sin(x[0])}; },
               [](const Point& x) { return Point{std::cos(x[2]), x[0] * x[1], 0.5}; },
               [](const Point& x) { return Point{0.0, std::sin(x[0] * x[1]), x[2] * x[0]}; }};
        f.curl_a = {[](const Point& x) { return Point{-2.0 * x[2], -std::cos(x[0]), -1.0}; },
                    [](const Point& x) { return Point{0.0, -std::sin(x[2]), x[1]}; },
                    [](const Point& x) { return Point{0.0, -x[2], x[1] * std::cos(x[0] * x[1])}; }};
        f.b = [](const Point& x) { return Point{x[0] * x[0], std::sin(x[2]) * x[1], x[0] * x[1] * x[2]}; };
        f.div_b = [](const Point& x) { return 2.0 * x[0] + std::sin(x[2]) + x[0] * x[1]; };
        return f;
    }

    /// Constant B on every chart, trivial g, A = 0, H = 0.
    static ConnectionFields flat()
    {
        ConnectionFields f;
        auto zero = [](const Point&) { return 0.0; };
        auto zv = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
        f.theta = {zero, zero, zero};
        f.a = {zv, zv, zv};
        f.curl_a = {zv, zv, zv};
        f.b = [](const Point&) { return Point{1.0, 2.0, 3.0}; };
        f.div_b = zero;
        return f;
    }
};

namespace detail {

inline Point lerp3(const Point& a, const Point& b, const Point& c, double u, double v)
{
    return {a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]), a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
            a[2] + u * (b[2] - a[2]) + v * (c[2] - a[2])};
}

inline double dot3(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Two-point Gauss rule for the line integral of a vector proxy.
inline double edge_integral(const ConnectionFields::Vector& w, const Point& a, const Point& b)
{
    const double g = 0.5 / std::sqrt(3.0);
    const Point d = sub(b, a);
    double s = 0.0;
    for (double u : {0.5 - g, 0.5 + g}) {
        const Point x{a[0] + u * d[0], a[1] + u * d[1], a[2] + u * d[2]};
        s += 0.5 * dot3(w(x), d);
    }
    return s;
}

/// Three-point (degree 2) rule for the flux through an oriented triangle.
inline double face_integral(const ConnectionFields::Vector& w, const Point& a, const Point& b, const Point& c)
{
    const Point e1 = sub(b, a), e2 = sub(c, a);
    const Point n{0.5 * (e1[1] * e2[2] - e1[2] * e2[1]), 0.5 * (e1[2] * e2[0] - e1[0] * e2[2]),
                  0.5 * (e1[0] * e2[1] - e1[1] * e2[0])};
    double s = 0.0;
    for (auto [u, v] : {std::pair{1.0 / 6, 1.0 / 6}, std::pair{2.0 / 3, 1.0 / 6}, std::pair{1.0 / 6, 2.0 / 3}})
        s += dot3(w(lerp3(a, b, c, u, v)), n) / 3.0;
    return s;
}

/// Four-point (degree 2) rule over a tetrahedron, with signed volume.
inline double tet_integral(const ConnectionFields::Scalar& f, const Point& a, const Point& b, const Point& c,
                           const Point& d)
{
    const double vol = signed_volume(a, b, c, d);
    const double al = 0.5854101966249685, be = 0.1381966011250105;
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        Point x(3);
        for (int i = 0; i < 3; ++i) {
            const double w0 = k == 0 ? al : be, w1 = k == 1 ? al : be, w2 = k == 2 ? al : be, w3 = k == 3 ? al : be;
            x[i] = w0 * a[i] + w1 * b[i] + w2 * c[i] + w3 * d[i];
        }
        s += 0.25 * f(x);
    }
    return s * vol;
}

} // namespace detail

/// Three charts covering [0, 1]^3 with a nonempty triple overlap.
inline Cover unit_box_cover()
{
    return Cover(3, {Chart{1, {-0.1, -0.1, -0.1}, {0.7, 1.1, 1.1}},
                     Chart{2, {0.3, -0.1, -0.1}, {1.1, 1.1, 1.1}},
                     Chart{3, {-0.1, 0.35, -0.1}, {1.1, 1.1, 1.1}}});
}

/// Samples the fields on every simplex of `vol` with Gauss rules. The cover
/// must have exactly the three charts 1, 2, 3.
inline GerbeConnectionData sample_connection(const ConnectionFields& f, const DiscreteVolume& vol,
                                             const Cover& cover = unit_box_cover())
{
    if (cover.labels() != Labels{1, 2, 3})
        throw DomainError("constructed connection uses charts 1, 2, 3");
    SimplicialComplex mesh(vol);
    const auto& v = mesh.vertices();
    GerbeConnectionData data{cover, mesh, {}, {}, {}, U1Cochain(cover, 2)};
    const std::array<Labels, 3> pairs{Labels{1, 2}, Labels{2, 3}, Labels{1, 3}};
    for (std::size_t p = 0; p < 3; ++p) {
        const int ia = pairs[p][0] - 1, ib = pairs[p][1] - 1;
        Cochain A;
        for (const auto& e : mesh.simplices(1)) {
            const Point &x = v[e[0]], &y = v[e[1]];
            A.emplace(e, f.theta[p](y) - f.theta[p](x) + detail::edge_integral(f.a[ib], x, y) -
                             detail::edge_integral(f.a[ia], x, y));
        }
        data.A.emplace(pairs[p], std::move(A));
    }
    for (int c = 0; c < 3; ++c) {
        Cochain B;
        for (const auto& s : mesh.simplices(2))
            B.emplace(s, detail::face_integral(f.b, v[s[0]], v[s[1]], v[s[2]]) +
                             detail::face_integral(f.curl_a[c], v[s[0]], v[s[1]], v[s[2]]));
        data.B.emplace(c + 1, std::move(B));
    }
    for (const auto& t : mesh.simplices(3))
        data.H.emplace(t, detail::tet_integral(f.div_b, v[t[0]], v[t[1]], v[t[2]], v[t[3]]));
    const auto triple = cover.region({1, 2, 3});
    for (const auto& x : v)
        if (triple.contains(x))
            data.g.set({1, 2, 3}, x, U1Value::from_phase(f.theta[0](x) + f.theta[1](x) - f.theta[2](x)));
    return data;
}

/// Adds `delta` to A_12 on the first mesh edge inside the triple overlap.
inline Simplex perturb_connection(GerbeConnectionData& data, double delta)
{
    const auto edges = data.mesh.inside(1, data.cover.region({1, 2, 3}));
    if (edges.empty())
        throw DomainError("no mesh edge inside the triple overlap");
    data.A.at({1, 2}).at(edges.front()) += delta;
    return edges.front();
}

} // namespace qgerbe
