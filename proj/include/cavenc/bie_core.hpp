#pragma once
// Dense Nystrom discretization of the single-layer boundary operators for
// (Laplacian - lambda^2) u = 0 with fundamental solution
//   E_lambda(x, y) = exp(-lambda |x-y|) / (2 pi |x-y|).
// Weakly singular / exponentially peaked self-interactions are integrated by
// a partition-of-unity polar patch on exact quadric charts; everything else
// is plain product quadrature.  Assemblies are templated on the scalar so
// real-axis sweeps avoid complex arithmetic.

#include <vector>

#include "cavenc/geometry.hpp"

namespace cavenc::bie {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Flattened view of all cavity surfaces (block order = scene order).
struct StackedCavities {
  MatXd points, normals;
  VecXd weights;
  VecXd rho;                 ///< impedance coefficient at each node
  std::vector<int> offsets;  ///< start of each cavity's node range
  std::vector<int> sizes;
  int total = 0;
};

StackedCavities stack_cavities(const geom::Scene& scene);

// --- kernel values ----------------------------------------------------------

/// e^{-lambda r} / (2 pi r)
template <class S>
S fundamental_solution(S lam, double r);

/// nu_x . (z - x) / |x - z|^2  (bounded on smooth surfaces as z -> x)
double h0_kernel(const Vec3& x, const Vec3& nu_x, const Vec3& z);

/// (h0 + rho_x) / r : the weakly singular part of the Robin kernel
double h1_kernel(const Vec3& x, const Vec3& nu_x, const Vec3& z, double rho_x);

// --- block assemblies -------------------------------------------------------
// All matrices act on vectors of node VALUES and include quadrature weights.

/// Outer self-coupling: (Y11 f)(y) = -int_dOmega dE/dnu_y f dS.
template <class S>
MatX<S> assemble_y11(const geom::Scene& scene, S lam);

/// Cavity -> outer: (Y12 f)(y) = -int_dD dE/dnu_y f dS.
template <class S>
MatX<S> assemble_y12(const geom::Scene& scene, S lam);

/// Outer -> cavity: (Y21 f)(xi) = +int_dOmega (dE/dnu_xi + rho E) f dS.
template <class S>
MatX<S> assemble_y21(const geom::Scene& scene, S lam);

/// Cavity self-coupling: (Y22 f)(xi) = +int_dD (dE/dnu_xi + rho E) f dS.
template <class S>
MatX<S> assemble_y22(const geom::Scene& scene, S lam);

/// Transpose of Y22 w.r.t. the surface pairing: the kernel carries the normal
/// and impedance at the SOURCE point,
///   (tY22 h)(zeta) = (1/2pi) int e^{-lambda|xi-zeta|} H(xi,zeta;lambda) h(xi) dS_xi,
///   H = lambda h0(xi,zeta) + h1(xi,zeta).
template <class S>
MatX<S> assemble_ty22(const geom::Scene& scene, S lam);

/// Leading part of tY22: kernel (lambda/2pi) e^{-lambda r} h0(source, target).
template <class S>
MatX<S> assemble_m0(const geom::Scene& scene, S lam);

/// Single layer V_D on the stacked cavity nodes (self blocks patched).
template <class S>
MatX<S> assemble_single_layer_cavities(const geom::Scene& scene, S lam);

/// Single layer V_Omega on the outer surface itself.
template <class S>
MatX<S> assemble_single_layer_outer_self(const geom::Scene& scene, S lam);

/// Smooth evaluation of the single layer of `src` at off-surface targets.
template <class S>
MatX<S> eval_single_layer(const MatXd& targets, const geom::DiscretizedSurface& src, S lam);

/// Normal derivative at the targets of the single layer of `src`
/// (targets strictly away from src, so the kernel is smooth).
template <class S>
MatX<S> eval_single_layer_dnu(const MatXd& targets, const MatXd& target_normals,
                              const geom::DiscretizedSurface& src, S lam);

// --- probe-rescaled machinery for the kernel-route indicator ----------------
// With D_p = diag(e^{-lambda |x_i - p|}), the similarity D_p^{-1} A D_p has
// entries carrying exp(lambda(|x_i-p| - |x_j-p| - r_ij)) <= 1 by the triangle
// inequality, so the reflection series can be evaluated at any decay depth
// without overflow or error amplification.

template <class S>
MatX<S> assemble_ty22_pscaled(const geom::Scene& scene, S lam, const Vec3& p);

template <class S>
MatX<S> assemble_m0_pscaled(const geom::Scene& scene, S lam, const Vec3& p);

// --- dense linear algebra (LAPACK) -------------------------------------------

/// B := A^{-1} B (A is destroyed).  Throws NumericalError when singular.
template <class S>
void lu_solve_inplace(MatX<S>& A, MatX<S>& B);

/// A (I - A)^{-1}
template <class S>
MatX<S> resolvent(const MatX<S>& A);

/// Row-sum norm, the discrete sup-norm of a Nystrom operator.
template <class S>
double norm_inf(const MatX<S>& A);

// --- block split of the cavity-cavity coupling -------------------------------
// With A = tY22 and Y_D its block diagonal, define
//   W    = (A - Y_D)(I - Y_D)^{-1}          (zero diagonal blocks),
//   Winf = W (I - W)^{-1},
//   M_D  = blockdiag( A_jj (I - A_jj)^{-1} ).
// Then M = A (I - A)^{-1} satisfies exactly M = M_D + Winf + M_D Winf.

template <class S>
struct BlockSplit {
  MatX<S> W;
  MatX<S> Winf;
  std::vector<MatX<S>> M_diag;
  /// ||M_D + Winf + M_D Winf - M||_inf / ||M||_inf, when M was supplied.
  double identity_residual = -1;
};

template <class S>
BlockSplit<S> block_split(const geom::Scene& scene, const MatX<S>& ty22,
                          const MatX<S>* m_full = nullptr);

/// Largest |entry| of the (i,j) cavity block of a stacked matrix.
template <class S>
double block_envelope(const geom::Scene& scene, const MatX<S>& A, int i, int j);

}  // namespace cavenc::bie
