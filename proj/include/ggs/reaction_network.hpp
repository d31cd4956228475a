#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ggs/gradient_system.hpp"
#include "ggs/potentials.hpp"

namespace ggs {

/// One reversible reaction  alpha -> beta  with forward/backward mass-action
/// rate constants.
struct Reaction {
  Eigen::VectorXi alpha;
  Eigen::VectorXi beta;
  double k_forward = 1.0;
  double k_backward = 1.0;
};

/// Mass-action vector field  sum_r (k_b c^beta - k_f c^alpha)(alpha - beta)...
/// written so that the forward reaction consumes the alpha side.
Eigen::VectorXd mass_action_field(const std::vector<Reaction>& reactions,
                                  const Eigen::VectorXd& c);

/// Build the gradient system of a reversible mass-action network with respect
/// to the equilibrium w (which must satisfy detailed balance for every
/// reaction, checked to relative tolerance db_tol):
///   E(c)      = sum_i boltzmann(c_i / w_i) * w_i
///   R*(c,mu)  = sum_r H_r(c) * psi_star((alpha_r - beta_r) . mu)
/// where H_r is the dual-slope prefactor of the chosen dissipation pair.
/// The generated field coincides with mass action for every admissible pair.
GradientSystem reaction_gs(const std::vector<Reaction>& reactions, const Eigen::VectorXd& w,
                           const DissipationPair& pair, double db_tol = 1e-10);

}  // namespace ggs
