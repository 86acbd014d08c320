// Integer checks on the characteristic class: closed-volume integrals of H,
// the Gauss-law comparison with the boundary flux of dL^dt, gluing of two
// volumes along a common boundary, and g = exp(i pi n).
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/geometry.hpp>
#include <qgerbe/mesh.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

namespace qgerbe {

struct QuantizationReport {
    double value = 0.0;      ///< raw integral or phase
    double normalized = 0.0; ///< value / normalization
    long n = 0;
    double deviation = 0.0;
    bool pass = false;
    bool even = true;
};

inline QuantizationReport quantize(double value, double normalization, double tol)
{
    if (!(normalization > 0.0))
        throw DomainError("normalization must be positive");
    QuantizationReport r;
    r.value = value;
    r.normalized = value / normalization;
    if (!std::isfinite(r.normalized))
        throw DomainError("quantized value is not finite");
    r.n = std::lround(r.normalized);
    r.deviation = std::abs(r.normalized - static_cast<double>(r.n));
    r.pass = r.deviation < tol;
    r.even = r.n % 2 == 0;
    return r;
}

/// (1/2pi) times the integral of H over a closed volume.
inline QuantizationReport integrate_H_closed_volume(const Cochain& H, const DiscreteVolume& vol, double tol = 1e-6)
{
    vol.validate();
    if (!vol.closed())
        throw WrongOperationError("volume has a boundary; use gauss_law_check");
    return quantize(integrate(H, vol.chain()), 2.0 * std::numbers::pi, tol);
}

/// H whose integral over `vol` is `total`, spread evenly over its tetrahedra.
inline Cochain planted_H(const DiscreteVolume& vol, double total)
{
    Cochain H;
    const double each = total / static_cast<double>(vol.tets.size());
    for (const auto& t : vol.tets) {
        Simplex s{t[0], t[1], t[2], t[3]};
        const int parity = orient(s);
        H[s] += parity * each;
    }
    return H;
}

/// Flux 2-form through a surface: dL^dt from a Lagrangian, or face data.
using FluxSource = std::variant<LagrangianField, Cochain>;

inline double surface_flux(const FluxSource& src, const DiscreteSurface& surf)
{
    if (const auto* L = std::get_if<LagrangianField>(&src))
        return surface_integral_dL_dt(*L, surf);
    return integrate(std::get<Cochain>(src), surf.chain());
}

/// Face cochain whose integral over `surf` is `total`, spread evenly.
inline Cochain planted_flux(const DiscreteSurface& surf, double total)
{
    Cochain F;
    const double each = total / static_cast<double>(surf.triangles.size());
    for (const auto& t : surf.triangles) {
        Simplex s{t[0], t[1], t[2]};
        const int parity = orient(s);
        F[s] += parity * each;
    }
    return F;
}

struct GaussReport {
    double volume_side = 0.0;  ///< integral of H over V
    double surface_side = 0.0; ///< (1/hbar) flux through the boundary of V
    double residual = 0.0;
    bool pass = false;
};

inline GaussReport gauss_law_check(const FluxSource& flux, const Cochain& H, const DiscreteVolume& vol, double hbar,
                                   double tol = 1e-6)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    vol.validate();
    if (vol.closed())
        throw WrongOperationError("volume is closed; use integrate_H_closed_volume");
    GaussReport r;
    r.volume_side = integrate(H, vol.chain());
    r.surface_side = surface_flux(flux, vol.boundary_surface()) / hbar;
    r.residual = std::abs(r.volume_side - r.surface_side);
    r.pass = r.residual < tol;
    return r;
}

struct GluingReport {
    QuantizationReport surface; ///< (1/(pi hbar)) flux through S
    QuantizationReport volume;  ///< (1/2pi) integral of H over V1 + V2
    bool equivalent = false;    ///< both integral, same n
};

/// V1 and V2 share S = boundary(V1) = -boundary(V2); V1 + V2 is closed.
inline GluingReport gluing_check(const FluxSource& flux, const Cochain& H, const DiscreteVolume& v1,
                                 const DiscreteVolume& v2, double hbar, double tol = 1e-6)
{
    if (!(hbar > 0.0))
        throw DomainError("hbar must be positive");
    v1.validate();
    v2.validate();
    const Chain s1 = boundary(v1.chain()), s2 = boundary(v2.chain());
    if (s1.empty())
        throw BoundaryMismatchError("first volume has no boundary to glue along");
    if (!(s2 == -s1))
        throw BoundaryMismatchError("boundary of the second volume is not the reversed boundary of the first");
    GluingReport r;
    r.surface = quantize(surface_flux(flux, v1.boundary_surface()) / hbar, std::numbers::pi, tol);
    r.volume = quantize(integrate(H, v1.chain() + v2.chain()), 2.0 * std::numbers::pi, tol);
    r.equivalent = r.surface.pass && r.volume.pass && r.surface.n == r.volume.n;
    return r;
}

/// n = (arg g + 2 pi winding) / pi, with parity.
inline QuantizationReport cocycle_integer_form(const U1Value& g, long winding = 0, double tol = 1e-6)
{
    const double phase = g.phase() + 2.0 * std::numbers::pi * static_cast<double>(winding);
    return quantize(phase, std::numbers::pi, tol);
}

/// Winding that places a raw phase in the branch (-pi, pi] + 2 pi winding.
inline long winding_of(double phase)
{
    return std::lround(phase / (2.0 * std::numbers::pi));
}

} // namespace qgerbe
