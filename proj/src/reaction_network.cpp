#include "ggs/reaction_network.hpp"

#include <cmath>
#include <stdexcept>

namespace ggs {

namespace {

double monomial(const Eigen::VectorXd& c, const Eigen::VectorXi& expo) {
  double m = 1.0;
  for (int i = 0; i < c.size(); ++i) {
    for (int k = 0; k < expo[i]; ++k) m *= c[i];
  }
  return m;
}

// prefactor with arguments clamped away from zero so that vanishing species
// shut a reaction channel off smoothly
double safe_slope_ratio(const DissipationPair& pair, double p, double q) {
  constexpr double tiny = 1e-300;
  return dual_slope_ratio(pair, std::max(p, tiny), std::max(q, tiny));
}

}  // namespace

Eigen::VectorXd mass_action_field(const std::vector<Reaction>& reactions,
                                  const Eigen::VectorXd& c) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(c.size());
  for (const auto& r : reactions) {
    double rate = r.k_backward * monomial(c, r.beta) - r.k_forward * monomial(c, r.alpha);
    f += rate * (r.alpha - r.beta).cast<double>();
  }
  return f;
}

GradientSystem reaction_gs(const std::vector<Reaction>& reactions, const Eigen::VectorXd& w,
                           const DissipationPair& pair, double db_tol) {
  const int n = static_cast<int>(w.size());
  if (w.minCoeff() <= 0.0) throw std::domain_error("reaction_gs: equilibrium must be positive");
  for (const auto& r : reactions) {
    if (r.alpha.size() != n || r.beta.size() != n)
      throw std::invalid_argument("reaction_gs: stoichiometry dimension mismatch");
    if (r.alpha.minCoeff() < 0 || r.beta.minCoeff() < 0)
      throw std::invalid_argument("reaction_gs: negative stoichiometric coefficient");
    double fwd = r.k_forward * monomial(w, r.alpha);
    double bwd = r.k_backward * monomial(w, r.beta);
    if (std::abs(fwd - bwd) > db_tol * std::max(fwd, bwd))
      throw std::domain_error("reaction_gs: equilibrium violates detailed balance");
  }

  GradientSystem gs;
  gs.dim = n;
  gs.constraint = Constraint::none;
  gs.energy = [w](const Eigen::VectorXd& c) {
    double e = 0.0;
    for (int i = 0; i < c.size(); ++i) e += boltzmann(c[i] / w[i]) * w[i];
    return e;
  };
  gs.d_energy = [w](const Eigen::VectorXd& c) {
    Eigen::VectorXd g(c.size());
    for (int i = 0; i < c.size(); ++i) g[i] = boltzmann_prime(c[i] / w[i]);
    return g;
  };
  gs.r_star = [reactions, pair](const Eigen::VectorXd& c, const Eigen::VectorXd& mu) {
    double val = 0.0;
    for (const auto& r : reactions) {
      double p = r.k_backward * monomial(c, r.beta);
      double q = r.k_forward * monomial(c, r.alpha);
      double gap = (r.alpha - r.beta).cast<double>().dot(mu);
      val += safe_slope_ratio(pair, p, q) * pair.psi_star(gap);
    }
    return val;
  };
  gs.d_r_star = [reactions, pair](const Eigen::VectorXd& c, const Eigen::VectorXd& mu) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(c.size());
    for (const auto& r : reactions) {
      double p = r.k_backward * monomial(c, r.beta);
      double q = r.k_forward * monomial(c, r.alpha);
      Eigen::VectorXd dir = (r.alpha - r.beta).cast<double>();
      g += safe_slope_ratio(pair, p, q) * pair.dpsi_star(dir.dot(mu)) * dir;
    }
    return g;
  };
  return gs;
}

}  // namespace ggs
