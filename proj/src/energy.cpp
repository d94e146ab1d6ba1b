#include "ldtsp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldtsp {

PowerModel build_power_model(const DragParams& drag, double v0, double vw) {
  if (!(v0 > 0.0))
    throw std::invalid_argument("power model: v0 must be positive");
  if (!(vw >= 0.0) || vw >= v0)
    throw std::invalid_argument("power model: requires 0 <= vw < v0");

  double phi = 0.0;
  switch (drag.mode) {
  case DragMode::aerodynamic:
    if (!(drag.rho > 0.0) || !(drag.cd > 0.0) || !(drag.af > 0.0))
      throw std::invalid_argument("power model: rho, cd, af must be positive");
    phi = 0.5 * drag.rho * drag.cd * drag.af * v0 * v0;
    break;
  case DragMode::rolling:
    if (!(drag.mass > 0.0) || !(drag.g > 0.0) || !(drag.fr > 0.0))
      throw std::invalid_argument("power model: mass, g, fr must be positive");
    phi = drag.mass * drag.g * drag.fr;
    break;
  }
  return PowerModel{v0, vw, phi, phi * v0, phi * vw};
}

double instantaneous_power(const PowerModel& model, double theta) {
  return model.p0 + model.p1 * std::cos(theta);
}

static void check_profile(const HeadingProfile& profile) {
  if (profile.samples.empty())
    throw std::invalid_argument("heading profile: empty");
  if (profile.samples.front().t != 0.0)
    throw std::invalid_argument("heading profile: first breakpoint must be at t = 0");
  for (std::size_t k = 1; k < profile.samples.size(); ++k)
    if (!(profile.samples[k].t > profile.samples[k - 1].t))
      throw std::invalid_argument("heading profile: breakpoint times must increase");
  if (profile.samples.back().t != profile.duration)
    throw std::invalid_argument("heading profile: last breakpoint must be at t = duration");
  if (!(profile.duration > 0.0))
    throw std::invalid_argument("heading profile: duration must be positive");
}

double heading_at(const HeadingProfile& profile, double t) {
  const auto& s = profile.samples;
  if (t <= s.front().t) return s.front().theta;
  if (t >= s.back().t) return s.back().theta;
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double v, const HeadingBreakpoint& b) { return v < b.t; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  double w = (t - lo.t) / (hi.t - lo.t);
  return lo.theta + w * (hi.theta - lo.theta);
}

SimResult simulate(const PowerModel& model, const HeadingProfile& profile,
                   const KinematicState& start, double dt) {
  check_profile(profile);
  const double T = profile.duration;
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (dt > T / 10.0) throw std::invalid_argument("simulate: dt must be <= duration / 10");

  const long n_full = static_cast<long>(std::floor(T / dt));
  const double rem = T - static_cast<double>(n_full) * dt;

  KinematicState s = start;
  double energy = 0.0;
  auto step = [&](double t_mid, double h) {
    const double th = heading_at(profile, t_mid);
    const double c = std::cos(th);
    s.x += (model.v0 * c + model.vw) * h;
    s.y += model.v0 * std::sin(th) * h;
    energy += (model.p0 + model.p1 * c) * h;
  };
  for (long k = 0; k < n_full; ++k)
    step((static_cast<double>(k) + 0.5) * dt, dt);
  if (rem > 0.0)
    step(static_cast<double>(n_full) * dt + 0.5 * rem, rem);

  s.theta = heading_at(profile, T);
  return SimResult{s, T, energy};
}

double energy_identity_residual(const PowerModel& model, const HeadingProfile& profile,
                         const KinematicState& start, double dt) {
  const SimResult r = simulate(model, profile, start, dt);
  const double affine = (model.p0 - model.p1 * model.vw / model.v0) * r.elapsed +
                        (model.p1 / model.v0) * (r.end.x - start.x);
  return std::fabs(r.energy - affine);
}

double edge_energy(double alpha, double mass, double distance) {
  if (!(alpha > 0.0)) throw std::invalid_argument("edge energy: alpha must be positive");
  if (mass < 0.0 || distance < 0.0)
    throw std::invalid_argument("edge energy: mass and distance must be nonnegative");
  return alpha * mass * distance;
}

} // namespace ldtsp
