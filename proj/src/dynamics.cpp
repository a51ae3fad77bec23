#include "bimodal/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace bimodal {
namespace {

struct Field {
  Eigen::MatrixXd M[2];
  Eigen::VectorXd c;  // constant term, zero in closed loop
};

class Stepper {
 public:
  Stepper(const Field& field, int n)
      : field_(field), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  /// One RK4 step of length h in mode m (0 or 1); writes into out.
  void step(const Eigen::VectorXd& x, double h, int m, Eigen::VectorXd& out) {
    const Eigen::MatrixXd& M = field_.M[m];
    k1_.noalias() = M * x;
    k1_ += field_.c;
    tmp_ = x + (0.5 * h) * k1_;
    k2_.noalias() = M * tmp_;
    k2_ += field_.c;
    tmp_ = x + (0.5 * h) * k2_;
    k3_.noalias() = M * tmp_;
    k3_ += field_.c;
    tmp_ = x + h * k3_;
    k4_.noalias() = M * tmp_;
    k4_ += field_.c;
    out = x + (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  const Field& field_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

/// Side of the hyperplane as a mode index: 0 for x1 < 0, 1 for x1 > 0.
int side(double x1, int fallback) { return x1 < 0.0 ? 0 : (x1 > 0.0 ? 1 : fallback); }

}  // namespace

Trajectory simulate(const Triple& x, const SimulationMode& mode, const Eigen::VectorXd& x0,
                    const SimulationOptions& options) {
  const int n = x.n();
  if (x0.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has wrong dimension", "simulate");
  }
  if (!x0.allFinite()) {
    throw Error(ErrorCode::NonFiniteEntry, "initial state is not finite", "simulate");
  }
  if (!(options.horizon > 0.0) || !(options.max_step > 0.0)) {
    throw Error(ErrorCode::DimensionMismatch, "horizon and step bound must be positive",
                "simulate");
  }

  Field field{{x.A1(), x.A2()}, Eigen::VectorXd::Zero(n)};
  if (const auto* closed = std::get_if<ClosedLoopMode>(&mode)) {
    if (closed->F.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "feedback gain has wrong dimension", "simulate");
    }
    field.M[0] += x.B() * closed->F;
    field.M[1] += x.B() * closed->F;
  } else {
    field.c = x.B();
  }
  const double rho = std::max({field.M[0].cwiseAbs().rowwise().sum().maxCoeff(),
                               field.M[1].cwiseAbs().rowwise().sum().maxCoeff(), 1e-300});
  const double h_max = std::min(options.max_step, options.step_factor / rho);
  const double width = options.event_width * options.horizon;

  Trajectory traj;
  traj.n = n;
  const double x0_norm = x0.norm();
  Eigen::VectorXd state = x0;
  Eigen::VectorXd next(n);
  double t = 0.0;

  // On the hyperplane pick the side the field points to.
  int m = 0;
  if (state(0) != 0.0) {
    m = side(state(0), 0);
  } else {
    const double drift = (field.M[0] * state + field.c)(0);
    m = drift > 0.0 ? 1 : 0;
  }

  auto record = [&](double time, const Eigen::VectorXd& s) {
    traj.times.push_back(time);
    traj.data.insert(traj.data.end(), s.data(), s.data() + n);
    traj.modes.push_back(side(s(0), m) + 1);
  };
  record(t, state);

  Stepper stepper(field, n);
  while (t < options.horizon) {
    const double h = std::min(h_max, options.horizon - t);
    stepper.step(state, h, m, next);
    const int new_side = side(next(0), m);
    if (new_side != m) {
      // Bisect for the first time on the new side.
      double lo = 0.0, hi = h;
      Eigen::VectorXd probe(n);
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        stepper.step(state, mid, m, probe);
        if (side(probe(0), m) == m) lo = mid;
        else hi = mid;
      }
      if (hi < h) stepper.step(state, hi, m, next);
      traj.switches.push_back({t + hi, t + lo, new_side == 1 ? 1 : -1, next(0)});
      t += hi;
      m = new_side;
    } else {
      t += h;
    }
    state = next;
    record(t, state);
    const double norm = state.norm();
    if (!std::isfinite(norm) || norm > options.blowup_norm) {
      traj.blew_up = true;
      break;
    }
    if (options.stop_norm > 0.0 && norm <= options.stop_norm * x0_norm) {
      traj.stopped_early = true;
      break;
    }
  }
  return traj;
}

}  // namespace bimodal
