#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "uavair/channel.hpp"
#include "uavair/phy.hpp"

namespace uavair {

struct SolverConfig {
  double gamma = 0.015;       // MSE threshold
  double tol = 1e-3;          // convergence accuracy of both alternations
  int max_outer = 50;         // (p, b) <-> eta alternations
  int max_inner = 50;         // t <-> (p, b, Psi) alternations
  int max_newton_steps = 400; // per convex subproblem, across all barrier stages
};

std::vector<std::string> validate(const SolverConfig& cfg);

/// Powers held fixed by the ablation schemes. Unset members are optimized.
struct PowerPins {
  std::optional<double> user_power;
  std::optional<std::vector<double>> sensor_coeffs;
};

struct FeasibilityResult {
  bool feasible = false;
  double min_mse = 0.0;
  std::vector<double> sensor_coeffs;  // minimizer
  double eta = 0.0;                   // minimizer
};

/// Smallest MSE reachable over the sensor box and eta >= 0 with the user
/// silent (or at its pinned power), and whether it meets `gamma`.
///
/// With c_j = b_j h_j the minimum over eta is (1/J^2)(J - L^2 / (Q + n)),
/// L = sum c_j, Q = sum c_j^2, n = sigma^2 + user term. L / sqrt(Q + n) is
/// quasi-concave, so its maximizer over the box is the water level
/// c_j = min(c_max_j, tau) with tau = (Q + n) / L, found by sorting.
FeasibilityResult check_feasibility(const ChannelState& chan, std::optional<std::size_t> scheduled,
                                    const PowerLimits& limits, double gamma, const PowerPins& pins = {});

/// Closed-form maximizer of -t Psi + ln t + 1 over t > 0.
double update_t(double psi);

struct TransmissionStart {
  double user_power = 0.0;
  std::vector<double> sensor_coeffs;
};

struct TransmissionResult {
  double user_power = 0.0;
  std::vector<double> sensor_coeffs;
  double psi = 0.0;
  double surrogate = 0.0;  // last value of ln(|eta g|^2 p + Psi) - t Psi + ln t + 1
  bool feasible = false;   // false: no (p, b) meets the budget at this eta
  int iterations = 0;
  /// ln(1 + SINR) at the start, then alternately the surrogate after each
  /// (p, b, Psi) block and ln(1 + SINR) after the following t block. Non-decreasing.
  std::vector<double> objective_trace;
};

/// Maximizes the scheduled user's rate over (p, b) for a fixed eta > 0 by
/// alternating the closed-form t update with the concave (p, b, Psi)
/// subproblem, until successive (p, b) differ by at most `cfg.tol`
/// (scaled by p_max and sqrt(pb_max)).
TransmissionResult solve_transmission(const ChannelState& chan, std::size_t scheduled, double eta,
                                      const PowerLimits& limits, const SolverConfig& cfg,
                                      const TransmissionStart& start, const PowerPins& pins = {});

struct SlotSolution {
  SlotDecision decision;
  double rate = 0.0;
  double mse = 0.0;
  bool feasible = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<double> rate_trace;  // rate after every outer iteration
};

/// Per-slot alternating optimization of (p, b) and eta. Infeasible slots come
/// back with feasible = false and the MSE-minimizing point (user silent unless
/// its power is pinned).
SlotSolution solve_slot(const ChannelState& chan, std::optional<std::size_t> scheduled, const PowerLimits& limits,
                        const SolverConfig& cfg, const PowerPins& pins = {});

}  // namespace uavair
