// Oriented simplicial meshes, integer chains with boundary, cochains keyed by
// sorted vertex tuples, and the signed-incidence coboundary d.
#pragma once

#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qgerbe {

using Simplex = std::vector<std::size_t>;

/// Sorts in place, returns the permutation parity (+1 / -1). Repeated
/// vertices make the simplex degenerate: DomainError.
inline int orient(Simplex& s)
{
    int parity = 1;
    for (std::size_t i = 1; i < s.size(); ++i)
        for (std::size_t j = i; j > 0 && s[j - 1] > s[j]; --j) {
            std::swap(s[j - 1], s[j]);
            parity = -parity;
        }
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == s[i - 1])
            throw DomainError("degenerate simplex (repeated vertex)");
    return parity;
}

/// Real cochain: value on each sorted simplex, for the sorted orientation.
using Cochain = std::map<Simplex, double>;

/// Integer combination of sorted simplices of one dimension.
struct Chain {
    int dim = 0;
    std::map<Simplex, int> terms;

    void add(Simplex s, int coeff)
    {
        if (static_cast<int>(s.size()) != dim + 1)
            throw DomainError("simplex dimension does not match the chain");
        coeff *= orient(s);
        auto it = terms.find(s);
        if (it == terms.end()) {
            if (coeff != 0)
                terms.emplace(std::move(s), coeff);
        } else if ((it->second += coeff) == 0) {
            terms.erase(it);
        }
    }

    bool empty() const { return terms.empty(); }

    Chain operator-() const
    {
        Chain c = *this;
        for (auto& [_, k] : c.terms)
            k = -k;
        return c;
    }

    friend Chain operator+(Chain a, const Chain& b)
    {
        if (a.dim != b.dim)
            throw DomainError("cannot add chains of different dimension");
        for (const auto& [s, k] : b.terms)
            a.add(s, k);
        return a;
    }

    friend bool operator==(const Chain& a, const Chain& b) { return a.dim == b.dim && a.terms == b.terms; }
};

inline Chain boundary(const Chain& c)
{
    if (c.dim == 0)
        throw DomainError("a 0-chain has no boundary");
    Chain out;
    out.dim = c.dim - 1;
    for (const auto& [s, k] : c.terms)
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex f;
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i)
                    f.push_back(s[j]);
            out.add(std::move(f), i % 2 == 0 ? k : -k);
        }
    return out;
}

/// Pairing of a cochain with a chain. Missing simplices: IncompleteDataError.
inline double integrate(const Cochain& w, const Chain& c)
{
    double s = 0.0;
    for (const auto& [simplex, k] : c.terms) {
        auto it = w.find(simplex);
        if (it == w.end())
            throw IncompleteDataError("cochain has no value on a simplex of the chain");
        s += k * it->second;
    }
    return s;
}

namespace detail {

inline void check_indices(const std::vector<Point>& v, const std::size_t* idx, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        if (idx[i] >= v.size())
            throw DomainError("element references vertex " + std::to_string(idx[i]) + " out of range");
}

inline void check_manifold(const Chain& bdry, const char* what)
{
    for (const auto& [_, k] : bdry.terms)
        if (k != 1 && k != -1)
            throw DomainError(std::string(what) + " is not consistently oriented");
}

inline double det3(const Point& a, const Point& b, const Point& c)
{
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

inline Point sub(const Point& a, const Point& b)
{
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

} // namespace detail

/// Oriented triangles over vertices in R^n (for spacetime meshes the last
/// coordinate is time).
struct DiscreteSurface {
    std::vector<Point> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;

    Chain chain() const
    {
        Chain c;
        c.dim = 2;
        for (const auto& t : triangles) {
            detail::check_indices(vertices, t.data(), 3);
            c.add({t[0], t[1], t[2]}, 1);
        }
        return c;
    }

    Chain boundary_chain() const { return boundary(chain()); }

    void validate() const
    {
        if (triangles.empty())
            throw DomainError("surface has no triangles");
        const Chain c = chain();
        if (c.terms.size() != triangles.size())
            throw DomainError("surface repeats a triangle");
        for (const auto& [_, k] : c.terms)
            if (k != 1 && k != -1)
                throw DomainError("surface repeats a triangle");
        detail::check_manifold(boundary(c), "surface");
    }

    /// Oriented boundary edges (a, b).
    std::vector<std::pair<std::size_t, std::size_t>> boundary_edges() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (const auto& [s, k] : boundary_chain().terms)
            e.push_back(k > 0 ? std::pair{s[0], s[1]} : std::pair{s[1], s[0]});
        return e;
    }

    /// Boundary edges chained into closed vertex cycles (first == last).
    std::vector<std::vector<std::size_t>> boundary_cycles() const
    {
        std::multimap<std::size_t, std::size_t> next;
        for (const auto& [a, b] : boundary_edges())
            next.emplace(a, b);
        std::vector<std::vector<std::size_t>> cycles;
        while (!next.empty()) {
            auto it = next.begin();
            std::vector<std::size_t> cyc{it->first};
            std::size_t cur = it->second;
            next.erase(it);
            cyc.push_back(cur);
            while (cur != cyc.front()) {
                auto jt = next.find(cur);
                if (jt == next.end())
                    throw DomainError("boundary does not close");
                cur = jt->second;
                next.erase(jt);
                cyc.push_back(cur);
            }
            cycles.push_back(std::move(cyc));
        }
        return cycles;
    }
};

/// Oriented tetrahedra over vertices in R^n.
struct DiscreteVolume {
    std::vector<Point> vertices;
    std::vector<std::array<std::size_t, 4>> tets;

    Chain chain() const
    {
        Chain c;
        c.dim = 3;
        for (const auto& t : tets) {
            detail::check_indices(vertices, t.data(), 4);
            c.add({t[0], t[1], t[2], t[3]}, 1);
        }
        return c;
    }

    void validate() const
    {
        if (tets.empty())
            throw DomainError("volume has no tetrahedra");
        const Chain c = chain();
        if (c.terms.size() != tets.size())
            throw DomainError("volume repeats a tetrahedron");
        for (const auto& [_, k] : c.terms)
            if (k != 1 && k != -1)
                throw DomainError("volume repeats a tetrahedron");
        detail::check_manifold(boundary(c), "volume");
    }

    /// Boundary as an oriented surface on the same vertex list (may be empty).
    DiscreteSurface boundary_surface() const
    {
        DiscreteSurface s;
        s.vertices = vertices;
        for (const auto& [f, k] : boundary(chain()).terms)
            s.triangles.push_back(k > 0 ? std::array{f[0], f[1], f[2]} : std::array{f[1], f[0], f[2]});
        return s;
    }

    bool closed() const { return boundary(chain()).empty(); }

    DiscreteVolume reversed() const
    {
        DiscreteVolume r = *this;
        for (auto& t : r.tets)
            std::swap(t[0], t[1]);
        return r;
    }

    /// Tetrahedra [first, last) on the same vertex list.
    DiscreteVolume slice(std::size_t first, std::size_t last) const
    {
        if (first > last || last > tets.size())
            throw DomainError("tetrahedron range out of bounds");
        DiscreteVolume r;
        r.vertices = vertices;
        r.tets.assign(tets.begin() + static_cast<std::ptrdiff_t>(first), tets.begin() + static_cast<std::ptrdiff_t>(last));
        return r;
    }
};

/// Signed volume of a tetrahedron in R^3.
inline double signed_volume(const Point& a, const Point& b, const Point& c, const Point& d)
{
    return detail::det3(detail::sub(b, a), detail::sub(c, a), detail::sub(d, a)) / 6.0;
}

/// All faces of a set of top simplices, by dimension.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    SimplicialComplex(std::vector<Point> vertices, const Chain& top) : vertices_(std::move(vertices))
    {
        simplices_.resize(static_cast<std::size_t>(top.dim) + 1);
        std::vector<std::set<Simplex>> sets(simplices_.size());
        for (const auto& [s, _] : top.terms) {
            const std::size_t n = s.size();
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                Simplex f;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (1u << i))
                        f.push_back(s[i]);
                sets[f.size() - 1].insert(std::move(f));
            }
        }
        for (std::size_t k = 0; k < sets.size(); ++k)
            simplices_[k].assign(sets[k].begin(), sets[k].end());
    }

    explicit SimplicialComplex(const DiscreteVolume& v) : SimplicialComplex(v.vertices, v.chain()) {}
    explicit SimplicialComplex(const DiscreteSurface& s) : SimplicialComplex(s.vertices, s.chain()) {}

    int dimension() const { return static_cast<int>(simplices_.size()) - 1; }
    const std::vector<Point>& vertices() const { return vertices_; }

    const std::vector<Simplex>& simplices(int k) const
    {
        if (k < 0 || k > dimension())
            throw DomainError("no simplices of dimension " + std::to_string(k));
        return simplices_[static_cast<std::size_t>(k)];
    }

    /// Coboundary of a k-cochain: (dw)[s] = sum_i (-1)^i w[s without vertex i].
    Cochain d(int k, const Cochain& w) const
    {
        Cochain out;
        for (const auto& s : simplices(k + 1)) {
            double v = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                Simplex f;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != i)
                        f.push_back(s[j]);
                auto it = w.find(f);
                if (it == w.end())
                    throw IncompleteDataError("cochain missing on a face of a " + std::to_string(k + 1) + "-simplex");
                v += (i % 2 == 0 ? 1.0 : -1.0) * it->second;
            }
            out.emplace(s, v);
        }
        return out;
    }

    /// Simplices of dimension k whose vertices all lie in `region`.
    std::vector<Simplex> inside(int k, const OverlapRegion& region) const
    {
        std::vector<Simplex> out;
        for (const auto& s : simplices(k))
            if (std::all_of(s.begin(), s.end(), [&](std::size_t v) { return region.contains(vertices_[v]); }))
                out.push_back(s);
        return out;
    }

    /// Euclidean measure (length, area, volume) of a sorted simplex.
    double measure(const Simplex& s) const
    {
        const Point& o = vertices_[s[0]];
        std::vector<Point> e;
        for (std::size_t i = 1; i < s.size(); ++i)
            e.push_back(detail::sub(vertices_[s[i]], o));
        // sqrt(det Gram) / k!
        const std::size_t k = e.size();
        std::vector<double> g(k * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                g[i * k + j] = std::inner_product(e[i].begin(), e[i].end(), e[j].begin(), 0.0);
        double det = 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < k; ++r)
                if (std::abs(g[r * k + c]) > std::abs(g[piv * k + c]))
                    piv = r;
            if (g[piv * k + c] == 0.0)
                return 0.0;
            if (piv != c) {
                for (std::size_t j = 0; j < k; ++j)
                    std::swap(g[c * k + j], g[piv * k + j]);
                det = -det;
            }
            det *= g[c * k + c];
            for (std::size_t r = c + 1; r < k; ++r) {
                const double f = g[r * k + c] / g[c * k + c];
                for (std::size_t j = c; j < k; ++j)
                    g[r * k + j] -= f * g[c * k + j];
            }
        }
        double fact = 1.0;
        for (std::size_t i = 2; i <= k; ++i)
            fact *= static_cast<double>(i);
        return std::sqrt(std::abs(det)) / fact;
    }

private:
    std::vector<Point> vertices_;
    std::vector<std::vector<Simplex>> simplices_;
};

// ---------------------------------------------------------------- builders

namespace detail {

/// The six Kuhn tetrahedra of a unit cube, as corner bit masks (bit i = axis i).
inline const std::array<std::array<unsigned, 4>, 6>& kuhn_tets()
{
    static const std::array<std::array<unsigned, 4>, 6> t = [] {
        std::array<std::array<unsigned, 4>, 6> out{};
        std::array<unsigned, 3> perm{0, 1, 2};
        std::size_t n = 0;
        do {
            unsigned c = 0;
            out[n][0] = c;
            for (std::size_t i = 0; i < 3; ++i) {
                c |= 1u << perm[i];
                out[n][i + 1] = c;
            }
            // odd permutations come out negatively oriented
            const int inv = (perm[0] > perm[1]) + (perm[0] > perm[2]) + (perm[1] > perm[2]);
            if (inv % 2 == 1)
                std::swap(out[n][2], out[n][3]);
            ++n;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }();
    return t;
}

} // namespace detail

/// Box [lo, hi] in R^3 split into n^3 cubes of six positively oriented tetrahedra.
inline DiscreteVolume box_volume(std::size_t n, const Point& lo = {0, 0, 0}, const Point& hi = {1, 1, 1})
{
    if (n == 0 || lo.size() != 3 || hi.size() != 3)
        throw DomainError("box_volume needs n >= 1 and 3-d corners");
    DiscreteVolume v;
    const std::size_t m = n + 1;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i)
                v.vertices.push_back({lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / static_cast<double>(n),
                                      lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / static_cast<double>(n),
                                      lo[2] + (hi[2] - lo[2]) * static_cast<double>(k) / static_cast<double>(n)});
    auto id = [m](std::size_t i, std::size_t j, std::size_t k) { return (k * m + j) * m + i; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (const auto& t : detail::kuhn_tets()) {
                    std::array<std::size_t, 4> tet{};
                    for (std::size_t c = 0; c < 4; ++c)
                        tet[c] = id(i + (t[c] & 1u), j + ((t[c] >> 1) & 1u), k + ((t[c] >> 2) & 1u));
                    v.tets.push_back(tet);
                }
    return v;
}

/// Closed 3-torus: n^3 periodic cubes (n >= 3), 6n^3 tetrahedra ordered with
/// the x cell index slowest. Vertex positions are the unwrapped lattice sites
/// in [0, 1)^3 and carry no metric meaning across the seam.
inline DiscreteVolume torus_volume(std::size_t n)
{
    if (n < 3)
        throw DomainError("periodic torus needs at least 3 cells per side");
    DiscreteVolume v;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                v.vertices.push_back({static_cast<double>(i) / static_cast<double>(n),
                                      static_cast<double>(j) / static_cast<double>(n),
                                      static_cast<double>(k) / static_cast<double>(n)});
    auto id = [n](std::size_t i, std::size_t j, std::size_t k) { return ((k % n) * n + (j % n)) * n + (i % n); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (const auto& t : detail::kuhn_tets()) {
                    std::array<std::size_t, 4> tet{};
                    for (std::size_t c = 0; c < 4; ++c)
                        tet[c] = id(i + (t[c] & 1u), j + ((t[c] >> 1) & 1u), k + ((t[c] >> 2) & 1u));
                    v.tets.push_back(tet);
                }
    return v;
}

/// Square [0, side]^2 in the (q, t) plane, n x n cells, two counterclockwise
/// triangles per cell, rotated by `angle` about `center`. Vertices are
/// (q, t) pairs.
inline DiscreteSurface square_surface(std::size_t n, double side = 1.0, double angle = 0.0,
                                      const Point& center = {0.0, 0.0})
{
    if (n == 0 || !(side > 0.0))
        throw DomainError("square_surface needs n >= 1 and a positive side");
    DiscreteSurface s;
    const double c = std::cos(angle), sn = std::sin(angle);
    const std::size_t m = n + 1;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            const double x = side * static_cast<double>(i) / static_cast<double>(n) - 0.5 * side;
            const double y = side * static_cast<double>(j) / static_cast<double>(n) - 0.5 * side;
            s.vertices.push_back({center[0] + 0.5 * side + c * x - sn * y, center[1] + 0.5 * side + sn * x + c * y});
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = j * m + i, b = a + 1, d = a + m, e = d + 1;
            s.triangles.push_back({a, b, e});
            s.triangles.push_back({a, e, d});
        }
    return s;
}

} // namespace qgerbe
