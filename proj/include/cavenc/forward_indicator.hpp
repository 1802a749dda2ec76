#pragma once

// Forward solve and indicator evaluation.
//
// Given a scene (outer Robin-free boundary with prescribed heat flux, strictly
// convex cavities with Robin coefficients rho) and a spectral parameter
// lambda, this module
//   * transforms the time-dependent flux into the stationary datum g(lambda),
//   * solves the coupled boundary system for the layer densities (phi on the
//     outer boundary, psi on the cavities),
//   * evaluates the indicator functional I0(lambda; p) for exterior probe
//     points p by two independent routes: a direct cavity-side quadrature of
//     the Robin trace against the probe kernel, and a reflection-series route
//     that expands the cavity resolvent around its single-bounce part.
//
// Everything is templated on the scalar so that purely real lambda sweeps run
// in real arithmetic (half the memory, >2x the speed) while sector/complex
// grids use the same code path with Complex.

#include <complex>

#include "cavenc/bie_core.hpp"
#include "cavenc/geometry.hpp"

namespace cavenc::fwd {

using bie::MatX;
using bie::VecX;

/// Laplace-transformed boundary datum of the prescribed flux at parameter
/// lambda (the transform of the time profile over the finite window [0, T]).
template <class S>
S flux_transform(const geom::FluxSpec& flux, S lam);

template <class S>
struct Densities {
  VecX<S> phi;  ///< outer-boundary density, one value per outer node
  VecX<S> psi;  ///< cavity density, stacked across cavities
  S g;          ///< transformed flux value (constant over the outer boundary)
};

/// Assemble and solve the coupled boundary system
///   phi - Y11 phi - Y12 psi = g   on the outer boundary,
///   psi - Y21 phi - Y22 psi = 0   on the cavities.
template <class S>
Densities<S> solve_densities(const geom::Scene& scene, S lam);

/// Residual of the density system, recomputed from freshly assembled blocks.
/// Intended for small validation runs (it reassembles everything).
template <class S>
double density_system_residual(const geom::Scene& scene, S lam, const Densities<S>& d);

/// Trace of the reflected potential w0 = V_Omega phi + V_D psi on the cavity
/// nodes (stacked) resp. on the outer-boundary nodes.
template <class S>
VecX<S> w0_on_cavities(const geom::Scene& scene, S lam, const Densities<S>& d);
template <class S>
VecX<S> w0_on_outer(const geom::Scene& scene, S lam, const Densities<S>& d);

/// Cavity-side indicator: I0 = int_dD (dE/dnu + rho E)(xi, p) w0(xi) dS(xi).
/// This form stays well-conditioned for large Re(lambda): every term carries
/// the same exponential scale exp(-lambda(|xi-p| + dist-like factors)), so no
/// catastrophic cancellation occurs.
template <class S>
S indicator_direct(const geom::Scene& scene, S lam, const Vec3& p, const Densities<S>& d,
                   const VecX<S>& w0_cav);

template <class S>
struct KernelRouteResult {
  S I0;        ///< lam * I00 + I01
  S I00, I01;  ///< the two homogeneity parts of the kernel expansion
};

/// Reflection-series route: the indicator written as a double boundary
/// integral of exp(-lambda l_p(xi, y)) against explicit geometric kernels and
/// the resolvent corrections F0/F1.  All resolvent algebra is performed on
/// probe-rescaled matrices whose entries are bounded by 1, so absolute errors
/// never get amplified by exp(+mu diam).
template <class S>
KernelRouteResult<S> indicator_kernel_route(const geom::Scene& scene, S lam, const Vec3& p,
                                            const Densities<S>& d);

/// Outer-boundary data form int_dOmega (dE/dnu(y,p) w0(y) - E(y,p) g) dS(y).
/// Analytically equal to I0, but the integrand is exponentially larger than
/// the result for large Re(lambda) (the probe kernel does not see the cavity
/// directly), so this is a small-mu diagnostic only.
template <class S>
S indicator_boundary_data_form(const geom::Scene& scene, S lam, const Vec3& p,
                               const Densities<S>& d);

/// Equivalent outer form with only the cavity potential: the outer-density
/// part cancels exactly by the interior Green identity (the probe sits outside
/// the closure of the domain).  Independent small-mu cross-check of the jump
/// relations and sign conventions.
template <class S>
S indicator_psi_outer_form(const geom::Scene& scene, S lam, const Vec3& p,
                           const Densities<S>& d);

/// One indicator evaluation with both routes, dispatching to the real-scalar
/// path whenever lambda is purely real.
struct IndicatorSample {
  Complex lambda;
  Complex I0_direct;
  Complex I0_kernel;
  double route_rel_diff;  ///< |direct - kernel| / max(|direct|, |kernel|)
};
IndicatorSample run_indicator(const geom::Scene& scene, Complex lam, const Vec3& p);

}  // namespace cavenc::fwd
