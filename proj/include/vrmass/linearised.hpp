#pragma once

#include "vrmass/geometry.hpp"
#include "vrmass/weighted.hpp"

namespace vrmass {

/// Covariant coordinate coefficients of a radial symmetric 2-tensor
/// T = rr dr² + tan h.
struct RadialTensor {
  double rr = 0.0;
  double tan = 0.0;
};

/// Radial density of (scal + n(n-1)) dV_g, including Vol(N).
double constraint_density(const RadialMetric& g, double r);

/// D scal_g[h] at r.
double linearised_scalar(const RadialMetric& g, const SymmetricPerturbation& h, double r);

/// Δ_g f at r.
double laplacian(const RadialMetric& g, const RadialProfile& f, double r);

/// D scal*_g(f) = -Δf g + ∇²f - f Ric.
RadialTensor adjoint_linearised_scalar(const RadialMetric& g, const RadialProfile& f, double r);

/// Full contraction g^{ia}g^{jb} S_ij T_ab.
double contract(const RadialMetric& g, const RadialTensor& s, const RadialTensor& t, double r);

/// g-trace.
double trace(const RadialMetric& g, const RadialTensor& t, double r);

/// Norm of T in the g orthonormal frame.
double frame_norm(const RadialMetric& g, const RadialTensor& t, double r);

/// Radial densities of the densitised operators
///   D𝔯[h]  = (D scal[h] + ½ tr h (scal + n(n-1))) dV,
///   D𝔯*[f] = (D scal*(f) + ½ f (scal + n(n-1)) g) dV,
/// the latter already contracted with h.
double linearised_constraint_density(const RadialMetric& g, const SymmetricPerturbation& h,
                                     double r);
double adjoint_pairing_density(const RadialMetric& g, const RadialProfile& f,
                               const SymmetricPerturbation& h, double r);

/// Outward flux through {r} of the vector field 𝔅 with
/// f D𝔯[h] - h·D𝔯*[f] = div(𝔅) dV:
///   𝔅 = f (div h - d tr h) - h(∇f, ·) + tr h df.
double flux_term(const RadialMetric& g, const RadialProfile& f, const SymmetricPerturbation& h,
                 double r);

/// |∫_{r1}^{r2} (f D𝔯[h] - h·D𝔯*[f]) - (flux(r2) - flux(r1))|
double adjoint_identity_defect(const RadialMetric& g, const RadialProfile& f,
                               const SymmetricPerturbation& h, double r1, double r2,
                               double tol = kDefaultTolerance);

/// D_g H[h] for the coordinate sphere through r (normal towards infinity).
double linearised_mean_curvature(const RadialMetric& g, const SymmetricPerturbation& h, double r);

/// The same quantity from the boundary-form identity
///   -2 DH = (div h - d tr h)(ν) + K·h.
double linearised_mean_curvature_boundary_form(const RadialMetric& g,
                                               const SymmetricPerturbation& h, double r);

/// Boundary integrand of the variation in reduced form, with area factor:
///   ∫ (-2 f DH[h] - f K·h + g^{AB} h_AB ∇_ν f) dA.
double reduced_boundary_term(const RadialMetric& g, const RadialProfile& f,
                             const SymmetricPerturbation& h, double r);

/// D_g𝓗[h] = (n-1) ∫ tr h dV - ∫ h·D𝔯*[f] (+ flux of 𝔅 at r0 with a boundary).
double hamiltonian_variation(const RadialMetric& g, const RadialProfile& f,
                             const SymmetricPerturbation& h, double tol = kDefaultTolerance);

}  // namespace vrmass
