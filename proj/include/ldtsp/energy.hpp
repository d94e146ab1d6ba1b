#pragma once

#include <vector>

namespace ldtsp {

enum class DragMode { aerodynamic, rolling };

/// Drag-law parameters. Aerodynamic mode reads rho, cd, af; rolling mode
/// reads mass, g, fr. Fields of the inactive mode are ignored.
struct DragParams {
  DragMode mode = DragMode::aerodynamic;
  double rho = 1.225; ///< fluid density, kg/m^3
  double cd = 1.0;    ///< drag coefficient
  double af = 1.0;    ///< frontal area, m^2
  double fr = 0.01;   ///< rolling-resistance coefficient
  double g = 9.81;    ///< gravitational acceleration, m/s^2
  double mass = 1.0;  ///< nominal mass, kg
};

/// Constant-speed power model. Instantaneous draw is p0 + p1*cos(theta)
/// with theta the heading against the medium's eastward drift.
/// Requires 0 <= vw < v0 so the agent can always make way upstream.
struct PowerModel {
  double v0;  ///< speed relative to the medium, m/s
  double vw;  ///< medium speed, eastward, m/s
  double phi; ///< drag-force magnitude at v0, N
  double p0;  ///< phi * v0, W
  double p1;  ///< phi * vw, W
};

struct HeadingBreakpoint {
  double t;
  double theta;
};

/// Piecewise-linear heading over [0, duration]. Breakpoint times are
/// strictly increasing, start at 0 and end at duration.
struct HeadingProfile {
  std::vector<HeadingBreakpoint> samples;
  double duration = 0.0;
};

struct KinematicState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct SimResult {
  KinematicState end;
  double elapsed = 0.0;
  double energy = 0.0;
};

/// Builds the power model for the given drag law and speeds.
/// Throws std::invalid_argument on v0 <= 0 or vw outside [0, v0).
PowerModel build_power_model(const DragParams& drag, double v0, double vw);

/// p0 + p1*cos(theta).
double instantaneous_power(const PowerModel& model, double theta);

/// Heading at time t by linear interpolation between breakpoints.
double heading_at(const HeadingProfile& profile, double t);

/// Integrates xdot = v0*cos(theta) + vw, ydot = v0*sin(theta) and the
/// dissipated energy with a fixed-step midpoint rule (second order).
/// The heading midpoint sample drives both the position and the energy
/// update of a step, so the energy/time/displacement identity checked by
/// energy_identity_residual cancels to rounding error at any step size.
/// Requires dt > 0 and dt <= duration / 10; a shorter final step absorbs
/// any remainder of duration not divisible by dt.
SimResult simulate(const PowerModel& model, const HeadingProfile& profile,
                   const KinematicState& start, double dt);

/// |energy - ((p0 - p1*vw/v0) * elapsed + (p1/v0) * (x_end - x_start))|
/// for the simulated trajectory. Holds for every profile, optimal or not.
double energy_identity_residual(const PowerModel& model, const HeadingProfile& profile,
                         const KinematicState& start, double dt);

/// alpha * mass * distance, the still-medium edge cost.
double edge_energy(double alpha, double mass, double distance);

} // namespace ldtsp
