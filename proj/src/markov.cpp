#include "ggs/markov.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ggs/csv.hpp"
#include "ggs/linalg.hpp"
#include "ggs/potentials.hpp"

namespace ggs {

MarkovGenerator generator_from_offdiag(const Eigen::MatrixXd& offdiag) {
  MarkovGenerator gen;
  gen.a = offdiag;
  const int n = gen.n();
  for (int j = 0; j < n; ++j) {
    gen.a(j, j) = 0.0;
    double colsum = gen.a.col(j).sum();
    gen.a(j, j) = -colsum;
  }
  return gen;
}

void validate_generator(const MarkovGenerator& gen, double tol) {
  const int n = gen.n();
  if (gen.a.cols() != n) throw std::domain_error("validate_generator: matrix not square");
  double scale = std::max(1.0, gen.a.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i)
      if (i != j && gen.a(i, j) < -tol * scale)
        throw std::domain_error("validate_generator: negative off-diagonal rate");
    if (std::abs(gen.a.col(j).sum()) > tol * scale * n)
      throw std::domain_error("validate_generator: column sum not zero");
  }
}

DetailedBalance detailed_balance(const MarkovGenerator& gen, double tol) {
  validate_generator(gen);
  Eigen::VectorXd k = null_vector(gen.a);
  if (k.sum() < 0) k = -k;
  DetailedBalance db;
  db.w = k / k.sum();
  if (db.w.minCoeff() <= 0.0)
    throw std::runtime_error("detailed_balance: stationary vector not strictly positive");
  const int n = gen.n();
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double mij = gen.a(i, j) * db.w[j];
      double mji = gen.a(j, i) * db.w[i];
      worst = std::max(worst, std::abs(mij - mji));
      scale = std::max({scale, std::abs(mij), std::abs(mji)});
    }
  db.residual = scale > 0.0 ? worst / scale : 0.0;
  db.reversible = db.residual <= tol;
  return db;
}

GradientSystem entropic_gs(const MarkovGenerator& gen, const Eigen::VectorXd& w,
                           EntropyConvention conv) {
  const int n = gen.n();
  if (w.size() != n || w.minCoeff() <= 0.0)
    throw std::domain_error("entropic_gs: invalid stationary vector");
  // symmetrized edge weights m_ij = a_ij w_j
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m(i, j) = 0.5 * (gen.a(i, j) * w[j] + gen.a(j, i) * w[i]);

  const double epref = (conv == EntropyConvention::half) ? 0.5 : 1.0;
  const double tilt = (conv == EntropyConvention::half) ? 2.0 : 1.0;

  GradientSystem gs;
  gs.dim = n;
  gs.constraint = Constraint::simplex;
  gs.energy = [w, epref](const Eigen::VectorXd& c) {
    double e = 0.0;
    for (int i = 0; i < c.size(); ++i) e += w[i] * boltzmann(c[i] / w[i]);
    return epref * e;
  };
  gs.d_energy = [w, epref](const Eigen::VectorXd& c) {
    Eigen::VectorXd g(c.size());
    for (int i = 0; i < c.size(); ++i) g[i] = epref * boltzmann_prime(c[i] / w[i]);
    return g;
  };
  gs.r_star = [m, w, epref, tilt, n](const Eigen::VectorXd& c, const Eigen::VectorXd& xi) {
    double val = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (m(i, j) == 0.0) continue;
        double fij = std::sqrt((c[i] / w[i]) * (c[j] / w[j]));
        val += epref * m(i, j) * fij * cosh_star(tilt * (xi[i] - xi[j]));
      }
    return val;
  };
  gs.d_r_star = [m, w, tilt, n](const Eigen::VectorXd& c, const Eigen::VectorXd& xi) {
    // epref * tilt = 1 in both conventions, so the prefactor drops out
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i || m(i, j) == 0.0) continue;
        double fij = std::sqrt((c[i] / w[i]) * (c[j] / w[j]));
        g[i] += m(i, j) * fij * cosh_star_prime(tilt * (xi[i] - xi[j]));
      }
    return g;
  };
  return gs;
}

double h_functional(const MarkovGenerator& gen, const Eigen::VectorXd& rho,
                    const Eigen::VectorXd& xi) {
  const int n = gen.n();
  Eigen::VectorXd ex = xi.array().exp();
  Eigen::VectorXd qex = gen.a.transpose() * ex;  // Q = A^T
  double h = 0.0;
  for (int i = 0; i < n; ++i) h += std::exp(-xi[i]) * qex[i] * rho[i];
  return h;
}

double r_star_via_h(const MarkovGenerator& gen, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& rho, const Eigen::VectorXd& xi) {
  const int n = gen.n();
  Eigen::VectorXd half_log_f(n);
  for (int i = 0; i < n; ++i)
    half_log_f[i] = 0.5 * std::log(std::max(rho[i] / w[i], kDensityFloor));
  return h_functional(gen, rho, xi + half_log_f) - h_functional(gen, rho, half_log_f);
}

Eigen::VectorXd field_via_h(const MarkovGenerator& gen, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& rho, const Eigen::VectorXd& xi) {
  const int n = gen.n();
  Eigen::VectorXd zeta(n);
  for (int i = 0; i < n; ++i)
    zeta[i] = xi[i] + 0.5 * std::log(std::max(rho[i] / w[i], kDensityFloor));
  Eigen::VectorXd ez = zeta.array().exp();
  Eigen::VectorXd emz = (-zeta).array().exp();
  Eigen::VectorXd qez = gen.a.transpose() * ez;
  Eigen::VectorXd g(n);
  for (int m = 0; m < n; ++m) {
    double s = -emz[m] * qez[m] * rho[m];
    for (int i = 0; i < n; ++i) s += emz[i] * gen.a(m, i) * ez[m] * rho[i];  // Q_{im} = a_{mi}
    g[m] = s;
  }
  return g;
}

void DensityPath::write_csv(std::ostream& os) const {
  os << "t";
  const int n = states.empty() ? 0 : static_cast<int>(states.front().size());
  for (int j = 1; j <= n; ++j) os << ",c_" << j;
  os << '\n';
  for (size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row;
    row.push_back(times[k]);
    for (int j = 0; j < n; ++j) row.push_back(states[k][j]);
    write_csv_row(os, row);
  }
}

DensityPath forward_solve(const MarkovGenerator& gen, const Eigen::VectorXd& c0, double T,
                          double dt) {
  validate_generator(gen);
  const int nsteps = static_cast<int>(std::round(T / dt));
  Eigen::MatrixXd p = expm(gen.a * dt);
  DensityPath path;
  Eigen::VectorXd c = c0;
  path.times.push_back(0.0);
  path.states.push_back(c);
  for (int k = 0; k < nsteps; ++k) {
    c = p * c;
    path.times.push_back((k + 1) * dt);
    path.states.push_back(c);
  }
  return path;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

DensityPath simulate_empirical(const MarkovGenerator& gen, const Eigen::VectorXd& c0,
                               int n_particles, double T, double dt_out, std::uint64_t seed) {
  validate_generator(gen);
  const int n = gen.n();
  const int ngrid = static_cast<int>(std::round(T / dt_out)) + 1;
  std::vector<std::vector<long>> counts(ngrid, std::vector<long>(n, 0));

  // cumulative initial distribution
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::max(c0[i], 0.0);
    cdf[i] = acc;
  }
  for (int i = 0; i < n; ++i) cdf[i] /= acc;

  for (int p = 0; p < n_particles; ++p) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(p) + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    int s = 0;
    while (s < n - 1 && u > cdf[s]) ++s;
    double t = 0.0;
    int grid = 0;
    while (true) {
      double rate = -gen.a(s, s);
      double t_next = (rate > 0.0) ? t - std::log(1.0 - unif(rng)) / rate : T + 1.0;
      // record the state on all grid points inside [t, t_next)
      while (grid < ngrid && grid * dt_out < t_next - 1e-15 * T) {
        counts[grid][s] += 1;
        ++grid;
      }
      if (t_next > T || grid >= ngrid) break;
      // jump: destination j with probability a(j,s)/rate
      double r = unif(rng) * rate;
      double run = 0.0;
      int dest = -1;
      for (int j = 0; j < n; ++j) {
        if (j == s) continue;
        run += gen.a(j, s);
        if (r <= run) {
          dest = j;
          break;
        }
      }
      s = (dest >= 0) ? dest : s;
      t = t_next;
    }
  }

  DensityPath path;
  for (int g = 0; g < ngrid; ++g) {
    Eigen::VectorXd rho(n);
    for (int i = 0; i < n; ++i) rho[i] = static_cast<double>(counts[g][i]) / n_particles;
    path.times.push_back(g * dt_out);
    path.states.push_back(rho);
  }
  return path;
}

MarkovGenerator random_reversible(int n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.2 + unif(rng);
  w /= w.sum();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double keep = unif(rng);
      double mij = (keep < 0.4 || j == i + 1) ? scale * (0.1 + unif(rng)) : 0.0;  // chain edges keep connectivity
      m(i, j) = m(j, i) = mij;
    }
  Eigen::MatrixXd off = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && m(i, j) > 0.0) off(i, j) = m(i, j) / w[j];
  return generator_from_offdiag(off);
}

}  // namespace ggs
