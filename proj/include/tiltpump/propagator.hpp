#pragma once

#include <Eigen/Dense>

#include "tiltpump/model.hpp"

namespace tiltpump {

/// How the time-dependent Hamiltonian is sampled inside one step.
///
/// magnus4:      fourth-order commutator-free Magnus scheme (two exponentials
///               of H at the Gauss-Legendre nodes). Default.
/// midpoint:     exp(-i dt H(t + dt/2)), second order.
/// frozen_start: exp(-i dt H(t)), first order; H frozen at the left end.
enum class Stepper { magnus4, midpoint, frozen_start };

/// psi <- exp(-i tau H) psi for a real symmetric tridiagonal H.
///
/// Chebyshev expansion over the Gershgorin interval of H, truncated once the
/// Bessel coefficients drop below tol. The result is exact to tol, so the
/// step is unitary to that level.
void apply_tridiagonal_exponential(const TridiagonalHamiltonian& H, double tau,
                                   Eigen::VectorXcd& psi, double tol = 1e-16);

/// Advances psi from t to t + dt under the lattice Hamiltonian.
void propagate_step(const ModelParams& params, double t, double dt, Stepper stepper,
                    Eigen::VectorXcd& psi);

} // namespace tiltpump
