#pragma once

#include <functional>
#include <vector>

namespace ggs {

/// Viscous evolution in a rapidly oscillating ("wiggly") energy landscape,
/// sampled on a uniform time grid together with the rate-independent play
/// solution it approaches as the oscillation scale goes to zero.
struct WigglyResult {
  std::vector<double> times;
  std::vector<double> u;     // viscous solution of eps u' = -(u - load + r cos(u/eps))
  std::vector<double> play;  // play-operator solution with yield radius r
  std::vector<double> load;  // loading curve at the sample times
  double sup_gap = 0.0;      // max_k |u_k - play_k|
};

WigglyResult demo_wiggly(double eps, double r, const std::function<double(double)>& load,
                         double T, double u0, int samples = 2001);

/// Width of the hysteresis loop in the (load, u) plane, measured as the spread
/// of u - load over samples with t >= t_min (skip the initial transient).
double hysteresis_width(const WigglyResult& res, double t_min);

struct TwoStructuresEntry {
  double epsilon = 0.0;
  double min_ratio = 0.0;  // min over x of u(1, x) / u0(x)
  double max_ratio = 0.0;  // max over x of u(1, x) / u0(x)
};

/// Pointwise decay u' = -a(x/eps) u on [0, 1] admits two gradient structures
/// whose limits generate different evolutions (decay at rate a_min vs a_max).
/// The report records the decay envelopes for each epsilon and the energy
/// values along oscillatory profiles concentrated at the coefficient's
/// minimizer / maximizer: a profile prepared for the first energy has
/// energy_along_first -> a_min while its second energy stays near 1/a_min,
/// far above the second structure's limit value 1/a_max, and symmetrically.
struct TwoStructuresReport {
  double a_min = 0.0;
  double a_max = 0.0;
  double y_min = 0.0;  // location of the minimum in one period [0, 1)
  double y_max = 0.0;
  std::vector<TwoStructuresEntry> entries;
  double energy_along_first = 0.0;      // -> a_min (well prepared)
  double hat_energy_along_first = 0.0;  // -> 1/a_min, gap to 1/a_max is O(1)
  double energy_along_second = 0.0;     // -> a_max, gap to a_min is O(1)
  double hat_energy_along_second = 0.0; // -> 1/a_max (well prepared)
};

TwoStructuresReport demo_two_structures(const std::function<double(double)>& a_profile,
                                        const std::vector<double>& eps_list,
                                        int grid_points = 1024, double bump_width = 0.05);

}  // namespace ggs
