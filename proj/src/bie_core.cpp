#include "cavenc/bie_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

namespace cavenc::bie {

using geom::DiscretizedSurface;
using geom::Scene;

StackedCavities stack_cavities(const Scene& scene) {
  StackedCavities st;
  st.total = scene.total_cavity_nodes;
  st.points.resize(st.total, 3);
  st.normals.resize(st.total, 3);
  st.weights.resize(st.total);
  st.rho.resize(st.total);
  st.offsets = scene.cavity_offsets;
  for (int k = 0; k < scene.n_cavities(); ++k) {
    const auto& d = scene.cavities[k];
    int off = scene.cavity_offsets[k];
    st.sizes.push_back(d.size());
    st.points.middleRows(off, d.size()) = d.points;
    st.normals.middleRows(off, d.size()) = d.normals;
    st.weights.segment(off, d.size()) = d.weights;
    st.rho.segment(off, d.size()).setConstant(scene.rho[k]);
  }
  return st;
}

template <class S>
S fundamental_solution(S lam, double r) {
  return std::exp(-lam * r) / (2.0 * pi * r);
}
template double fundamental_solution<double>(double, double);
template Complex fundamental_solution<Complex>(Complex, double);

double h0_kernel(const Vec3& x, const Vec3& nu_x, const Vec3& z) {
  Vec3 d = z - x;
  return nu_x.dot(d) / d.squaredNorm();
}

double h1_kernel(const Vec3& x, const Vec3& nu_x, const Vec3& z, double rho_x) {
  return (h0_kernel(x, nu_x, z) + rho_x) / (z - x).norm();
}

namespace {

inline double real_of(double v) { return v; }
inline double real_of(const Complex& v) { return v.real(); }

// C-infinity radial cutoff: 1 on [0, 1/2], 0 on [1, inf).
double smooth_eta(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  auto f = [](double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; };
  double t = 2.0 * (s - 0.5);
  double a = f(1.0 - t), b = f(t);
  return a / (a + b);
}

inline std::array<double, 6> quad_monomials(const Vec2& s) {
  return {1.0, s[0], s[1], s[0] * s[0], s[0] * s[1], s[1] * s[1]};
}

const VecXd& gl8_nodes() {
  static VecXd n = [] {
    VecXd x, w;
    geom::gauss_legendre(8, x, w);
    return x;
  }();
  return n;
}
const VecXd& gl8_weights() {
  static VecXd v = [] {
    VecXd x, w;
    geom::gauss_legendre(8, x, w);
    return w;
  }();
  return v;
}

// Partition-of-unity correction of one row of a self-interaction block.
//
// The caller has already written plain Nystrom entries K(x_row, x_j) w_j for
// all j != row (diagonal left at zero).  This routine subtracts the
// eta-weighted plain contributions near the row point and adds the patch
// integral  int eta(sigma) K(x_row, X(sigma)) f(X(sigma)) dS  evaluated in
// polar chart coordinates with geometric radial panels that resolve both the
// 1/r singularity and the exp(-mu r) peak, with the density f represented by
// a least-squares quadratic interpolant over nearby nodes.
//
// kernel(xq, nuq): full kernel value at a surface point with its normal.
template <class S, class KFn>
void patch_row(MatX<S>& A, int grow, int col0, int lrow, const DiscretizedSurface& surf,
               double mu, KFn&& kernel) {
  const Vec3 xr = surf.points.row(lrow);
  geom::LocalChart chart = geom::local_chart(surf.spec, xr);
  const double h = surf.local_spacing(lrow);
  const double Rp = std::min(chart.radius, std::max(4.5 * h, 10.0 / std::max(mu, 1.0)));

  // Subtract the eta-weighted plain contributions.
  for (int j = 0; j < surf.size(); ++j) {
    if (j == lrow) continue;
    Vec3 d = Vec3(surf.points.row(j)) - xr;
    double dist = d.norm();
    if (dist >= 1.05 * Rp) continue;
    Vec2 sig(chart.e1.dot(d), chart.e2.dot(d));
    double eta = smooth_eta(sig.norm() / Rp);
    if (eta == 0.0) continue;
    A(grow, col0 + j) -= eta * kernel(Vec3(surf.points.row(j)), Vec3(surf.normals.row(j))) *
                         S(surf.weights[j]);
  }

  // Interpolation stencil: nearby nodes incl. the row node itself.
  std::vector<int> sten;
  std::vector<Vec2> sig_sten;
  double rs = std::max(2.4 * Rp, 4.0 * h);
  for (int tries = 0; tries < 6; ++tries) {
    sten.clear();
    sig_sten.clear();
    for (int j = 0; j < surf.size(); ++j) {
      Vec3 d = Vec3(surf.points.row(j)) - xr;
      if (d.norm() > rs) continue;
      sten.push_back(j);
      sig_sten.push_back(Vec2(chart.e1.dot(d), chart.e2.dot(d)));
    }
    if (static_cast<int>(sten.size()) >= 24) break;
    rs *= 1.5;
  }
  const int m = static_cast<int>(sten.size());
  MatXd V(m, 6);
  for (int a = 0; a < m; ++a) {
    auto mono = quad_monomials(sig_sten[a] / Rp);
    for (int b = 0; b < 6; ++b) V(a, b) = mono[b];
  }
  Eigen::Matrix<double, 6, 6> G = V.transpose() * V;
  G += 1e-12 * G.trace() * Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::LDLT<Eigen::Matrix<double, 6, 6>> gld(G);

  // Polar patch quadrature, accumulated against the monomial basis.
  Eigen::Matrix<S, 6, 1> c = Eigen::Matrix<S, 6, 1>::Zero();
  const int K = std::clamp(
      static_cast<int>(std::ceil(std::log2(std::max(1.0, Rp * mu / 3.0)))), 0, 14);
  const int n_ang = 20;
  const VecXd& gx = gl8_nodes();
  const VecXd& gw = gl8_weights();
  for (int kpanel = 0; kpanel <= K; ++kpanel) {
    double hi = Rp * std::pow(0.5, kpanel);
    double lo = (kpanel == K) ? 0.0 : 0.5 * hi;
    for (int q = 0; q < gx.size(); ++q) {
      double rq = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[q];
      double wr = 0.5 * (hi - lo) * gw[q];
      double eta = smooth_eta(rq / Rp);
      if (eta == 0.0) continue;
      for (int t = 0; t < n_ang; ++t) {
        double th = 2.0 * pi * (t + 0.5) / n_ang;
        Vec2 sq(rq * std::cos(th), rq * std::sin(th));
        Vec3 Xq = chart.point(sq);
        Vec3 nuq = chart.surface_normal(sq);
        double wq = wr * (2.0 * pi / n_ang) * rq * chart.jacobian(sq) * eta;
        S kq = kernel(Xq, nuq);
        auto mono = quad_monomials(sq / Rp);
        for (int b = 0; b < 6; ++b) c[b] += (wq * kq) * S(mono[b]);
      }
    }
  }

  // Scatter through the least-squares interpolation weights.
  Eigen::Matrix<S, 6, 1> y;
  if constexpr (std::is_same_v<S, Complex>) {
    Eigen::Matrix<double, 6, 1> yr = gld.solve(c.real());
    Eigen::Matrix<double, 6, 1> yi = gld.solve(c.imag());
    for (int b = 0; b < 6; ++b) y[b] = Complex(yr[b], yi[b]);
  } else {
    y = gld.solve(c);
  }
  for (int a = 0; a < m; ++a) {
    S acc = S(0);
    for (int b = 0; b < 6; ++b) acc += S(V(a, b)) * y[b];
    A(grow, col0 + sten[a]) += acc;
  }
}

// Kernel factories ------------------------------------------------------------

// Robin kernel with data at the ROW point: (dE/dnu_row + rho_row E)(x_row, xq).
template <class S>
S robin_row_kernel(S lam, const Vec3& xr, const Vec3& nur, double rho_r, const Vec3& xq) {
  Vec3 d = xq - xr;
  double r = d.norm();
  double h0 = nur.dot(d) / (r * r);
  return std::exp(-lam * r) / (2.0 * pi) * (lam * h0 + S((h0 + rho_r) / r));
}

// Robin kernel with data at the SOURCE point: value of the transposed kernel.
template <class S>
S robin_src_kernel(S lam, const Vec3& xr, const Vec3& xq, const Vec3& nuq, double rho_q) {
  Vec3 d = xr - xq;
  double r = d.norm();
  double h0 = nuq.dot(d) / (r * r);
  return std::exp(-lam * r) / (2.0 * pi) * (lam * h0 + S((h0 + rho_q) / r));
}

// Negated normal derivative at the ROW point: -dE/dnu_row (Y11/Y12 kernel).
template <class S>
S neg_dnu_row_kernel(S lam, const Vec3& xr, const Vec3& nur, const Vec3& xq) {
  Vec3 d = xq - xr;
  double r = d.norm();
  double h0 = nur.dot(d) / (r * r);
  return -std::exp(-lam * r) / (2.0 * pi) * (lam + S(1.0 / r)) * S(h0);
}

}  // namespace

// -----------------------------------------------------------------------------

template <class S>
MatX<S> assemble_y11(const Scene& scene, S lam) {
  const DiscretizedSurface& d = scene.outer;
  const int N = d.size();
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const Vec3 xr = d.points.row(i), nur = d.normals.row(i);
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      A(i, j) = neg_dnu_row_kernel(lam, xr, nur, Vec3(d.points.row(j))) * S(d.weights[j]);
    }
  }
  for (int i = 0; i < N; ++i) {
    const Vec3 xr = d.points.row(i), nur = d.normals.row(i);
    patch_row(A, i, 0, i, d, mu,
              [&](const Vec3& xq, const Vec3&) { return neg_dnu_row_kernel(lam, xr, nur, xq); });
  }
  return A;
}

template <class S>
MatX<S> assemble_y12(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const DiscretizedSurface& d = scene.outer;
  MatX<S> A(d.size(), st.total);
  for (int i = 0; i < d.size(); ++i) {
    const Vec3 xr = d.points.row(i), nur = d.normals.row(i);
    for (int j = 0; j < st.total; ++j)
      A(i, j) = neg_dnu_row_kernel(lam, xr, nur, Vec3(st.points.row(j))) * S(st.weights[j]);
  }
  return A;
}

template <class S>
MatX<S> assemble_y21(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const DiscretizedSurface& d = scene.outer;
  MatX<S> A(st.total, d.size());
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i), nur = st.normals.row(i);
    for (int j = 0; j < d.size(); ++j)
      A(i, j) =
          robin_row_kernel(lam, xr, nur, st.rho[i], Vec3(d.points.row(j))) * S(d.weights[j]);
  }
  return A;
}

template <class S>
MatX<S> assemble_y22(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i), nur = st.normals.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      A(i, j) =
          robin_row_kernel(lam, xr, nur, st.rho[i], Vec3(st.points.row(j))) * S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i), nur = ds.normals.row(i);
      const double rho_r = scene.rho[bi];
      patch_row(A, off + i, off, i, ds, mu, [&](const Vec3& xq, const Vec3&) {
        return robin_row_kernel(lam, xr, nur, rho_r, xq);
      });
    }
  }
  return A;
}

template <class S>
MatX<S> assemble_ty22(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      A(i, j) = robin_src_kernel(lam, xr, Vec3(st.points.row(j)), Vec3(st.normals.row(j)),
                                 st.rho[j]) *
                S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    const double rho_q = scene.rho[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i);
      patch_row(A, off + i, off, i, ds, mu, [&](const Vec3& xq, const Vec3& nuq) {
        return robin_src_kernel(lam, xr, xq, nuq, rho_q);
      });
    }
  }
  return A;
}

template <class S>
MatX<S> assemble_m0(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  auto kern = [&](const Vec3& xr, const Vec3& xq, const Vec3& nuq) -> S {
    Vec3 d = xr - xq;
    double r = d.norm();
    return lam / (2.0 * pi) * std::exp(-lam * r) * S(nuq.dot(d) / (r * r));
  };
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      A(i, j) = kern(xr, Vec3(st.points.row(j)), Vec3(st.normals.row(j))) * S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i);
      patch_row(A, off + i, off, i, ds, mu,
                [&](const Vec3& xq, const Vec3& nuq) { return kern(xr, xq, nuq); });
    }
  }
  return A;
}

template <class S>
MatX<S> assemble_single_layer_cavities(const Scene& scene, S lam) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      double r = (Vec3(st.points.row(j)) - xr).norm();
      A(i, j) = fundamental_solution(lam, r) * S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i);
      patch_row(A, off + i, off, i, ds, mu, [&](const Vec3& xq, const Vec3&) {
        return fundamental_solution(lam, (xq - xr).norm());
      });
    }
  }
  return A;
}

template <class S>
MatX<S> assemble_single_layer_outer_self(const Scene& scene, S lam) {
  const DiscretizedSurface& d = scene.outer;
  const int N = d.size();
  const double mu = real_of(lam);
  MatX<S> A = MatX<S>::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const Vec3 xr = d.points.row(i);
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      double r = (Vec3(d.points.row(j)) - xr).norm();
      A(i, j) = fundamental_solution(lam, r) * S(d.weights[j]);
    }
  }
  for (int i = 0; i < N; ++i) {
    const Vec3 xr = d.points.row(i);
    patch_row(A, i, 0, i, d, mu, [&](const Vec3& xq, const Vec3&) {
      return fundamental_solution(lam, (xq - xr).norm());
    });
  }
  return A;
}

template <class S>
MatX<S> eval_single_layer(const MatXd& targets, const DiscretizedSurface& src, S lam) {
  MatX<S> A(targets.rows(), src.size());
  for (int i = 0; i < targets.rows(); ++i) {
    const Vec3 xr = targets.row(i);
    for (int j = 0; j < src.size(); ++j) {
      double r = (Vec3(src.points.row(j)) - xr).norm();
      A(i, j) = fundamental_solution(lam, r) * S(src.weights[j]);
    }
  }
  return A;
}

template <class S>
MatX<S> eval_single_layer_dnu(const MatXd& targets, const MatXd& target_normals,
                              const DiscretizedSurface& src, S lam) {
  MatX<S> A(targets.rows(), src.size());
  for (int i = 0; i < targets.rows(); ++i) {
    const Vec3 xr = targets.row(i), nur = target_normals.row(i);
    for (int j = 0; j < src.size(); ++j) {
      // + dE/dnu at the target: the negation in neg_dnu_row_kernel undone.
      A(i, j) = -neg_dnu_row_kernel(lam, xr, nur, Vec3(src.points.row(j))) * S(src.weights[j]);
    }
  }
  return A;
}

// --- probe-rescaled assemblies ------------------------------------------------

template <class S>
MatX<S> assemble_ty22_pscaled(const Scene& scene, S lam, const Vec3& p) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  VecXd dp(st.total);
  for (int i = 0; i < st.total; ++i) dp[i] = (Vec3(st.points.row(i)) - p).norm();
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      Vec3 d = xr - Vec3(st.points.row(j));
      double r = d.norm();
      double h0 = Vec3(st.normals.row(j)).dot(d) / (r * r);
      // exp(lambda (|x_i-p| - |x_j-p| - r)) <= 1 by the triangle inequality.
      S e = std::exp(lam * (dp[i] - dp[j] - r));
      A(i, j) = e / (2.0 * pi) * (lam * h0 + S((h0 + st.rho[j]) / r)) * S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    const double rho_q = scene.rho[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i);
      const double dpi = (xr - p).norm();
      patch_row(A, off + i, off, i, ds, mu, [&](const Vec3& xq, const Vec3& nuq) -> S {
        Vec3 d = xr - xq;
        double r = d.norm();
        double h0 = nuq.dot(d) / (r * r);
        S e = std::exp(lam * (dpi - (xq - p).norm() - r));
        return e / (2.0 * pi) * (lam * h0 + S((h0 + rho_q) / r));
      });
    }
  }
  return A;
}

template <class S>
MatX<S> assemble_m0_pscaled(const Scene& scene, S lam, const Vec3& p) {
  StackedCavities st = stack_cavities(scene);
  const double mu = real_of(lam);
  VecXd dp(st.total);
  for (int i = 0; i < st.total; ++i) dp[i] = (Vec3(st.points.row(i)) - p).norm();
  MatX<S> A = MatX<S>::Zero(st.total, st.total);
  for (int i = 0; i < st.total; ++i) {
    const Vec3 xr = st.points.row(i);
    for (int j = 0; j < st.total; ++j) {
      if (j == i) continue;
      Vec3 d = xr - Vec3(st.points.row(j));
      double r = d.norm();
      double h0 = Vec3(st.normals.row(j)).dot(d) / (r * r);
      A(i, j) = lam / (2.0 * pi) * std::exp(lam * (dp[i] - dp[j] - r)) * S(h0) *
                S(st.weights[j]);
    }
  }
  for (int bi = 0; bi < scene.n_cavities(); ++bi) {
    const auto& ds = scene.cavities[bi];
    int off = st.offsets[bi];
    for (int i = 0; i < ds.size(); ++i) {
      const Vec3 xr = ds.points.row(i);
      const double dpi = (xr - p).norm();
      patch_row(A, off + i, off, i, ds, mu, [&](const Vec3& xq, const Vec3& nuq) -> S {
        Vec3 d = xr - xq;
        double r = d.norm();
        double h0 = nuq.dot(d) / (r * r);
        return lam / (2.0 * pi) * std::exp(lam * (dpi - (xq - p).norm() - r)) * S(h0);
      });
    }
  }
  return A;
}

// --- block split ---------------------------------------------------------------

template <class S>
BlockSplit<S> block_split(const Scene& scene, const MatX<S>& A, const MatX<S>* m_full) {
  const int n = static_cast<int>(A.rows());
  const int nb = scene.n_cavities();
  BlockSplit<S> out;
  std::vector<MatX<S>> inv_blocks(nb);  // (I - A_jj)^{-1}
  out.M_diag.resize(nb);
  for (int k = 0; k < nb; ++k) {
    int off = scene.cavity_offsets[k];
    int sz = scene.cavities[k].size();
    MatX<S> C = MatX<S>::Identity(sz, sz) - A.block(off, off, sz, sz);
    MatX<S> I = MatX<S>::Identity(sz, sz);
    lu_solve_inplace(C, I);
    inv_blocks[k] = std::move(I);
    out.M_diag[k] = A.block(off, off, sz, sz) * inv_blocks[k];
  }
  out.W = MatX<S>::Zero(n, n);
  for (int kc = 0; kc < nb; ++kc) {
    int c0 = scene.cavity_offsets[kc];
    int sz = scene.cavities[kc].size();
    MatX<S> off_col = A.middleCols(c0, sz);
    off_col.middleRows(c0, sz).setZero();  // remove the diagonal block
    out.W.middleCols(c0, sz) = off_col * inv_blocks[kc];
  }
  out.Winf = resolvent(out.W);
  if (m_full != nullptr) {
    MatX<S> R = out.Winf - *m_full;
    for (int k = 0; k < nb; ++k) {
      int off = scene.cavity_offsets[k];
      int sz = scene.cavities[k].size();
      R.block(off, off, sz, sz) += out.M_diag[k];
      R.middleRows(off, sz) += out.M_diag[k] * out.Winf.middleRows(off, sz);
    }
    out.identity_residual = norm_inf(MatX<S>(R)) / norm_inf(*m_full);
  }
  return out;
}

template <class S>
double block_envelope(const Scene& scene, const MatX<S>& A, int i, int j) {
  int r0 = scene.cavity_offsets[i], nr = scene.cavities[i].size();
  int c0 = scene.cavity_offsets[j], nc = scene.cavities[j].size();
  return A.block(r0, c0, nr, nc).cwiseAbs().maxCoeff();
}

// --- explicit instantiations ----------------------------------------------------

#define CAVENC_INSTANTIATE(S)                                                        \
  template MatX<S> assemble_y11<S>(const Scene&, S);                                 \
  template MatX<S> assemble_y12<S>(const Scene&, S);                                 \
  template MatX<S> assemble_y21<S>(const Scene&, S);                                 \
  template MatX<S> assemble_y22<S>(const Scene&, S);                                 \
  template MatX<S> assemble_ty22<S>(const Scene&, S);                                \
  template MatX<S> assemble_m0<S>(const Scene&, S);                                  \
  template MatX<S> assemble_single_layer_cavities<S>(const Scene&, S);               \
  template MatX<S> assemble_single_layer_outer_self<S>(const Scene&, S);              \
  template MatX<S> eval_single_layer<S>(const MatXd&, const DiscretizedSurface&, S); \
  template MatX<S> eval_single_layer_dnu<S>(const MatXd&, const MatXd&,              \
                                            const DiscretizedSurface&, S);           \
  template MatX<S> assemble_ty22_pscaled<S>(const Scene&, S, const Vec3&);           \
  template MatX<S> assemble_m0_pscaled<S>(const Scene&, S, const Vec3&);             \
  template BlockSplit<S> block_split<S>(const Scene&, const MatX<S>&, const MatX<S>*); \
  template double block_envelope<S>(const Scene&, const MatX<S>&, int, int);

CAVENC_INSTANTIATE(double)
CAVENC_INSTANTIATE(Complex)
#undef CAVENC_INSTANTIATE

}  // namespace cavenc::bie
