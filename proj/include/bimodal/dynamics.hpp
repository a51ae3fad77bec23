#pragma once

#include <variant>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal {

/// x' = A_i x + B with the input held at u = 1.
struct AffineMode {};
/// x' = (A_i + B F) x.
struct ClosedLoopMode {
  Eigen::RowVectorXd F;
};
using SimulationMode = std::variant<AffineMode, ClosedLoopMode>;

struct SimulationOptions {
  double horizon = 10.0;
  /// Upper bound on the RK4 step; the step is further limited to
  /// step_factor / ||A_i||_inf.
  double max_step = 0.01;
  double step_factor = 0.05;
  /// Event brackets are refined to event_width * horizon.
  double event_width = 1e-10;
  /// Stop once |x| <= stop_norm * |x0| (0 disables).
  double stop_norm = 0.0;
  double blowup_norm = 1e12;
};

struct ModeSwitch {
  double time;       // first bracketed time on the new side
  double bracket_lo; // last bracketed time on the old side
  int direction;     // +1 for x1 crossing from negative to positive
  double x1;         // x1 at `time`
};

/// Samples of a trajectory. The mode of a sample is 1 on x1 < 0, 2 on x1 > 0
/// and the active mode on the hyperplane itself.
struct Trajectory {
  int n = 0;
  std::vector<double> times;
  std::vector<double> data;  // row k holds the state at times[k]
  std::vector<int> modes;
  std::vector<ModeSwitch> switches;
  bool blew_up = false;
  bool stopped_early = false;

  std::size_t size() const { return times.size(); }
  Eigen::Map<const Eigen::VectorXd> state(std::size_t k) const {
    return {data.data() + k * static_cast<std::size_t>(n), n};
  }
  Eigen::Map<const Eigen::VectorXd> final_state() const { return state(size() - 1); }
};

/// Explicit RK4 integration of the bimodal system. A sign change of x1
/// within a step is localized by bisection on the step length, and
/// integration restarts at the crossing in the other mode. The vector field
/// is continuous across x1 = 0, so no sliding motion can occur. BlowUp is
/// reported through Trajectory::blew_up.
Trajectory simulate(const Triple& x, const SimulationMode& mode, const Eigen::VectorXd& x0,
                    const SimulationOptions& options = {});

}  // namespace bimodal
