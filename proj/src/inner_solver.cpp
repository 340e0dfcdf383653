#include "uavair/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace uavair {

std::vector<std::string> validate(const SolverConfig& cfg) {
  std::vector<std::string> out;
  if (!(cfg.gamma > 0.0)) out.emplace_back("gamma must be positive");
  if (!(cfg.tol > 0.0)) out.emplace_back("tol must be positive");
  if (cfg.max_outer < 1 || cfg.max_inner < 1 || cfg.max_newton_steps < 1) out.emplace_back("iteration caps must be at least 1");
  return out;
}

double update_t(double psi) {
  if (!(psi > 0.0)) throw std::domain_error("update_t: Psi must be positive");
  return 1.0 / psi;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sensor_bound(const PowerLimits& limits) { return std::sqrt(limits.pb_max); }

std::vector<double> full_coeffs(std::size_t num_sensors, const PowerLimits& limits) {
  return std::vector<double>(num_sensors, sensor_bound(limits));
}

void check_pins(const ChannelState& chan, const PowerLimits& limits, const PowerPins& pins) {
  if (pins.user_power && (*pins.user_power < 0.0 || *pins.user_power > limits.p_max)) {
    throw std::invalid_argument("pinned user power outside [0, p_max]");
  }
  if (pins.sensor_coeffs) {
    if (pins.sensor_coeffs->size() != chan.sensor_amp.size()) throw std::invalid_argument("pinned coefficient count mismatch");
    for (double b : *pins.sensor_coeffs) {
      if (b < 0.0 || b * b > limits.pb_max * (1.0 + 1e-12)) throw std::invalid_argument("pinned sensor coefficient outside box");
    }
  }
}

// Received-domain view of one slot for a fixed eta: x_j = eta b_j h_j and
// y = eta^2 g^2 p. The MSE budget reads sum (x_j - 1)^2 + y <= budget, and the
// interference bound reads Psi >= sum x_j^2 + noise.
struct ScaledSlot {
  std::size_t num_sensors = 0;
  std::vector<double> x_max;
  double y_max = 0.0;
  double noise = 0.0;   // eta^2 sigma^2
  double budget = 0.0;  // J^2 Gamma - eta^2 sigma^2
  double x_scale_p = 0.0;  // eta^2 g^2, maps p -> y
  std::vector<double> x_scale_b;  // eta h_j, maps b_j -> x_j
  bool free_x = true;
  bool free_y = true;
  std::vector<double> x_fixed;
  double y_fixed = 0.0;

  double residual(const std::vector<double>& x) const {
    double r = 0.0;
    for (double v : x) r += (v - 1.0) * (v - 1.0);
    return r;
  }
  double interference(const std::vector<double>& x) const {
    double q = noise;
    for (double v : x) q += v * v;
    return q;
  }
};

ScaledSlot make_scaled(const ChannelState& chan, std::size_t scheduled, double eta, const PowerLimits& limits,
                       double gamma, const PowerPins& pins) {
  ScaledSlot s;
  s.num_sensors = chan.sensor_amp.size();
  const double j = static_cast<double>(s.num_sensors);
  const double g = chan.user_amp.at(scheduled);
  s.x_scale_p = eta * eta * g * g;
  s.y_max = s.x_scale_p * limits.p_max;
  s.noise = eta * eta * chan.noise_power;
  s.budget = j * j * gamma - s.noise;
  s.x_scale_b.resize(s.num_sensors);
  s.x_max.resize(s.num_sensors);
  const double b_max = sensor_bound(limits);
  for (std::size_t k = 0; k < s.num_sensors; ++k) {
    s.x_scale_b[k] = eta * chan.sensor_amp[k];
    s.x_max[k] = s.x_scale_b[k] * b_max;
  }
  if (pins.sensor_coeffs) {
    s.free_x = false;
    s.x_fixed.resize(s.num_sensors);
    for (std::size_t k = 0; k < s.num_sensors; ++k) s.x_fixed[k] = s.x_scale_b[k] * (*pins.sensor_coeffs)[k];
  }
  if (pins.user_power) {
    s.free_y = false;
    s.y_fixed = s.x_scale_p * *pins.user_power;
  }
  return s;
}

// Log-barrier Newton solver for
//   max ln(y + Psi) - t Psi
//   s.t. 0 <= x <= x_max, 0 <= y <= y_max,
//        sum (x - 1)^2 + y <= budget, sum x^2 + noise <= Psi,
// with x and/or y possibly held fixed. Concave objective, convex constraints.
class BarrierSubproblem {
 public:
  BarrierSubproblem(const ScaledSlot& slot, double t) : s_(slot), t_(t) {
    nx_ = s_.free_x ? s_.num_sensors : 0;
    iy_ = nx_;
    ipsi_ = nx_ + (s_.free_y ? 1 : 0);
    iu_ = ipsi_ + 1;
    n_ = iu_ + 1;
    m_ = 2 * nx_ + (s_.free_y ? 2 : 0) + 4;
  }

  struct Point {
    std::vector<double> x;
    double y = 0.0;
    double psi = 0.0;
    double u = 0.0;  // epigraph variable, u < ln(y + Psi) - t Psi
  };

  Point unpack(const Eigen::VectorXd& z) const {
    Point p;
    if (s_.free_x) {
      p.x.assign(z.data(), z.data() + nx_);
    } else {
      p.x = s_.x_fixed;
    }
    p.y = s_.free_y ? z(iy_) : s_.y_fixed;
    p.psi = z(ipsi_);
    p.u = z(iu_);
    return p;
  }

  Eigen::VectorXd pack(const Point& p) const {
    Eigen::VectorXd z(n_);
    if (s_.free_x) {
      for (std::size_t k = 0; k < nx_; ++k) z(k) = p.x[k];
    }
    if (s_.free_y) z(iy_) = p.y;
    z(ipsi_) = p.psi;
    z(iu_) = p.u;
    return z;
  }

  double objective(const Point& p) const { return std::log(p.y + p.psi) - t_ * p.psi; }

  // Barrier function; +inf outside the strict interior.
  double barrier(const Eigen::VectorXd& z, double tau) const {
    const Point p = unpack(z);
    double acc = 0.0;
    if (s_.free_x) {
      for (std::size_t k = 0; k < nx_; ++k) {
        const double lo = p.x[k];
        const double hi = s_.x_max[k] - p.x[k];
        if (!(lo > 0.0) || !(hi > 0.0)) return kInf;
        acc -= std::log(lo) + std::log(hi);
      }
    }
    if (s_.free_y) {
      const double lo = p.y;
      const double hi = s_.y_max - p.y;
      if (!(lo > 0.0) || !(hi > 0.0)) return kInf;
      acc -= std::log(lo) + std::log(hi);
    }
    const double s_mse = s_.budget - p.y - s_.residual(p.x);
    const double s_psi = p.psi - s_.interference(p.x);
    const double w = p.y + p.psi;
    if (!(s_mse > 0.0) || !(s_psi > 0.0) || !(w > 0.0)) return kInf;
    const double s_epi = objective(p) - p.u;
    if (!(s_epi > 0.0)) return kInf;
    acc -= std::log(s_mse) + std::log(s_psi) + std::log(s_epi) + std::log(w);
    return acc - tau * p.u;
  }

  void derivatives(const Eigen::VectorXd& z, double tau, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const Point p = unpack(z);
    grad.setZero(n_);
    hess.setZero(n_, n_);

    grad(iu_) -= tau;

    // Epigraph: -ln(ln w - t Psi - u) - ln w with w = y + Psi
    {
      const double w = p.y + p.psi;
      const double h = objective(p) - p.u;
      Eigen::VectorXd dh = Eigen::VectorXd::Zero(n_);
      Eigen::VectorXd dw = Eigen::VectorXd::Zero(n_);
      if (s_.free_y) {
        dh(iy_) = 1.0 / w;
        dw(iy_) = 1.0;
      }
      dh(ipsi_) = 1.0 / w - t_;
      dh(iu_) = -1.0;
      dw(ipsi_) = 1.0;
      grad += -dh / h - dw / w;
      // Hessian of ln w is -dw dw^T / w^2, so -Hess(h) / h adds dw dw^T / (h w^2).
      hess += dh * dh.transpose() / (h * h) + dw * dw.transpose() * (1.0 / (h * w * w) + 1.0 / (w * w));
    }

    if (s_.free_x) {
      for (std::size_t k = 0; k < nx_; ++k) {
        const double lo = p.x[k];
        const double hi = s_.x_max[k] - p.x[k];
        grad(k) += -1.0 / lo + 1.0 / hi;
        hess(k, k) += 1.0 / (lo * lo) + 1.0 / (hi * hi);
      }
    }
    if (s_.free_y) {
      const double lo = p.y;
      const double hi = s_.y_max - p.y;
      grad(iy_) += -1.0 / lo + 1.0 / hi;
      hess(iy_, iy_) += 1.0 / (lo * lo) + 1.0 / (hi * hi);
    }

    // MSE budget: c = residual + y - budget <= 0
    {
      const double slack = s_.budget - p.y - s_.residual(p.x);
      Eigen::VectorXd dc = Eigen::VectorXd::Zero(n_);
      if (s_.free_x) {
        for (std::size_t k = 0; k < nx_; ++k) dc(k) = 2.0 * (p.x[k] - 1.0);
      }
      if (s_.free_y) dc(iy_) = 1.0;
      grad += dc / slack;
      hess += dc * dc.transpose() / (slack * slack);
      if (s_.free_x) {
        for (std::size_t k = 0; k < nx_; ++k) hess(k, k) += 2.0 / slack;
      }
    }
    // Interference bound: c = sum x^2 + noise - Psi <= 0
    {
      const double slack = p.psi - s_.interference(p.x);
      Eigen::VectorXd dc = Eigen::VectorXd::Zero(n_);
      if (s_.free_x) {
        for (std::size_t k = 0; k < nx_; ++k) dc(k) = 2.0 * p.x[k];
      }
      dc(ipsi_) = -1.0;
      grad += dc / slack;
      hess += dc * dc.transpose() / (slack * slack);
      if (s_.free_x) {
        for (std::size_t k = 0; k < nx_; ++k) hess(k, k) += 2.0 / slack;
      }
    }
  }

  // Path-following from a strictly feasible point. Returns the final iterate.
  Point solve(const Point& start, int max_newton_steps) const {
    constexpr double kGap = 1e-9;
    constexpr double kGrowth = 20.0;
    Point first = start;
    first.u = objective(first) - 1.0;
    Eigen::VectorXd z = pack(first);
    Eigen::VectorXd grad(n_);
    Eigen::MatrixXd hess(n_, n_);
    double tau = 1.0;
    int steps = 0;
    while (steps < max_newton_steps) {
      // centering
      while (steps < max_newton_steps) {
        derivatives(z, tau, grad, hess);
        const Eigen::VectorXd dir = -hess.ldlt().solve(grad);
        const double decrement = -grad.dot(dir);
        ++steps;
        if (!(decrement > 0.0) || decrement * 0.5 <= 1e-9) break;
        const double f0 = barrier(z, tau);
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
          const Eigen::VectorXd trial = z + alpha * dir;
          const double f1 = barrier(trial, tau);
          if (f1 <= f0 - 0.25 * alpha * decrement) {
            z = trial;
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
        // Near the center a short step means rounding noise, not progress.
        if (!moved || (alpha < 1.0 && decrement < 1e-6)) break;
      }
      if (static_cast<double>(m_) / tau < kGap) break;
      tau *= kGrowth;
    }
    return unpack(z);
  }

 private:
  const ScaledSlot& s_;
  double t_;
  std::size_t nx_ = 0;
  std::size_t iy_ = 0;
  std::size_t ipsi_ = 0;
  std::size_t iu_ = 0;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
};

double log_rate(double y, double psi) { return std::log(y + psi) - std::log(psi); }

}  // namespace

FeasibilityResult check_feasibility(const ChannelState& chan, std::optional<std::size_t> scheduled,
                                    const PowerLimits& limits, double gamma, const PowerPins& pins) {
  check_pins(chan, limits, pins);
  const std::size_t num_sensors = chan.sensor_amp.size();
  const double user_power = pins.user_power.value_or(0.0);
  const double disturbance = chan.noise_power + user_received_power(chan, user_power, scheduled);
  const double b_max = sensor_bound(limits);

  FeasibilityResult r;
  if (pins.sensor_coeffs) {
    r.sensor_coeffs = *pins.sensor_coeffs;
  } else {
    std::vector<double> c_max(num_sensors);
    for (std::size_t k = 0; k < num_sensors; ++k) c_max[k] = chan.sensor_amp[k] * b_max;
    std::vector<std::size_t> order(num_sensors);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c_max[a] < c_max[b]; });

    // The k weakest links transmit at full power, the rest are capped at the level.
    double level = c_max[order.back()];
    double sum_c = 0.0;
    double sum_c2 = disturbance;
    for (std::size_t k = 0; k < num_sensors; ++k) {
      const double c = c_max[order[k]];
      sum_c += c;
      sum_c2 += c * c;
      const double candidate = sum_c2 / sum_c;
      const bool next_ok = (k + 1 == num_sensors) || candidate <= c_max[order[k + 1]];
      if (candidate >= c && next_ok) {
        level = candidate;
        break;
      }
    }
    r.sensor_coeffs.resize(num_sensors);
    for (std::size_t k = 0; k < num_sensors; ++k) {
      r.sensor_coeffs[k] = std::min(c_max[k], level) / chan.sensor_amp[k];
      r.sensor_coeffs[k] = std::min(r.sensor_coeffs[k], b_max);
    }
  }
  r.eta = optimal_eta(chan, user_power, r.sensor_coeffs, scheduled);
  SlotDecision dec{scheduled, user_power, r.sensor_coeffs, r.eta};
  r.min_mse = aircomp_mse(chan, dec);
  r.feasible = r.min_mse <= gamma;
  return r;
}

TransmissionResult solve_transmission(const ChannelState& chan, std::size_t scheduled, double eta,
                                      const PowerLimits& limits, const SolverConfig& cfg,
                                      const TransmissionStart& start, const PowerPins& pins) {
  if (!(eta > 0.0)) throw std::invalid_argument("solve_transmission: eta must be positive");
  check_pins(chan, limits, pins);
  const std::size_t num_sensors = chan.sensor_amp.size();
  if (start.sensor_coeffs.size() != num_sensors) throw std::invalid_argument("solve_transmission: start size mismatch");

  const ScaledSlot slot = make_scaled(chan, scheduled, eta, limits, cfg.gamma, pins);
  const double b_max = sensor_bound(limits);

  auto to_result = [&](const std::vector<double>& x, double y, TransmissionResult& r) {
    r.user_power = pins.user_power ? *pins.user_power : std::clamp(y / slot.x_scale_p, 0.0, limits.p_max);
    r.sensor_coeffs.resize(num_sensors);
    for (std::size_t k = 0; k < num_sensors; ++k) {
      r.sensor_coeffs[k] = pins.sensor_coeffs ? (*pins.sensor_coeffs)[k] : std::clamp(x[k] / slot.x_scale_b[k], 0.0, b_max);
    }
  };

  // Most MSE-friendly sensor setting at this eta, and the budget it leaves for the user.
  std::vector<double> x_best(num_sensors);
  for (std::size_t k = 0; k < num_sensors; ++k) {
    x_best[k] = slot.free_x ? std::min(1.0, slot.x_max[k]) : slot.x_fixed[k];
  }
  const double room = slot.budget - slot.residual(x_best) - (slot.free_y ? 0.0 : slot.y_fixed);
  const double room_tol = 1e-12 * std::max(1.0, std::abs(slot.budget));

  TransmissionResult r;
  if (room < -room_tol || (room <= room_tol && !slot.free_y)) {
    to_result(x_best, 0.0, r);
    r.psi = slot.interference(x_best);
    r.feasible = false;
    return r;
  }
  if (room <= room_tol) {
    to_result(x_best, 0.0, r);
    r.psi = slot.interference(x_best);
    r.surrogate = 0.0;
    r.objective_trace.push_back(0.0);
    r.feasible = true;
    return r;
  }

  // Strict interior point shared by every barrier solve.
  BarrierSubproblem::Point interior;
  interior.x.resize(num_sensors);
  for (std::size_t k = 0; k < num_sensors; ++k) {
    interior.x[k] = slot.free_x ? std::min(1.0, slot.x_max[k] * (1.0 - 1e-3)) : slot.x_fixed[k];
  }
  {
    const double interior_room = slot.budget - slot.residual(interior.x) - (slot.free_y ? 0.0 : slot.y_fixed);
    if (!(interior_room > 0.0)) {
      // Budget is so tight that only the exact box corner fits; stay there.
      to_result(x_best, 0.0, r);
      r.psi = slot.interference(x_best);
      r.objective_trace.push_back(0.0);
      r.feasible = true;
      return r;
    }
    interior.y = slot.free_y ? 0.5 * std::min(interior_room, slot.y_max) : slot.y_fixed;
  }

  // Current iterate in scaled form, starting from the warm start when feasible.
  std::vector<double> x(num_sensors);
  for (std::size_t k = 0; k < num_sensors; ++k) {
    x[k] = slot.free_x ? std::clamp(start.sensor_coeffs[k], 0.0, b_max) * slot.x_scale_b[k] : slot.x_fixed[k];
  }
  double y = slot.free_y ? std::clamp(start.user_power, 0.0, limits.p_max) * slot.x_scale_p : slot.y_fixed;
  if (slot.residual(x) + y > slot.budget) {
    x = interior.x;
    y = 0.0;
    if (!slot.free_y) y = slot.y_fixed;
  }
  double psi = slot.interference(x);
  to_result(x, y, r);
  r.objective_trace.push_back(log_rate(y, psi));

  for (int it = 1; it <= cfg.max_inner; ++it) {
    const double t = update_t(psi);
    BarrierSubproblem sub(slot, t);
    interior.psi = slot.interference(interior.x) + psi;
    const auto next = sub.solve(interior, cfg.max_newton_steps);
    r.surrogate = sub.objective(next) + std::log(t) + 1.0;
    r.objective_trace.push_back(r.surrogate);

    // Psi at its lower bound is the tightest auxiliary value for these powers.
    x = next.x;
    y = next.y;
    psi = slot.interference(x);
    r.objective_trace.push_back(log_rate(y, psi));

    const double prev_p = r.user_power;
    const std::vector<double> prev_b = r.sensor_coeffs;
    to_result(x, y, r);
    r.iterations = it;
    double delta = std::abs(r.user_power - prev_p) / limits.p_max;
    for (std::size_t k = 0; k < num_sensors; ++k) {
      delta = std::max(delta, std::abs(r.sensor_coeffs[k] - prev_b[k]) / b_max);
    }
    if (delta <= cfg.tol) break;
  }
  r.psi = psi / (eta * eta);
  r.feasible = true;
  return r;
}

SlotSolution solve_slot(const ChannelState& chan, std::optional<std::size_t> scheduled, const PowerLimits& limits,
                        const SolverConfig& cfg, const PowerPins& pins) {
  if (auto problems = validate(cfg); !problems.empty()) throw std::invalid_argument("solve_slot: " + problems.front());
  const std::size_t num_sensors = chan.sensor_amp.size();
  const double b_max = sensor_bound(limits);
  const FeasibilityResult feas = check_feasibility(chan, scheduled, limits, cfg.gamma, pins);

  SlotSolution sol;
  auto finish = [&](const SlotDecision& dec) {
    sol.decision = dec;
    sol.mse = aircomp_mse(chan, dec);
    sol.rate = user_rate(chan, dec);
    sol.feasible = sol.mse <= cfg.gamma + 1e-9;
    return sol;
  };
  const SlotDecision fallback{scheduled, pins.user_power.value_or(0.0), feas.sensor_coeffs, feas.eta};
  if (!scheduled || !feas.feasible) {
    finish(fallback);
    sol.feasible = scheduled ? false : feas.feasible;
    return sol;
  }
  const std::size_t user = *scheduled;

  double p = pins.user_power.value_or(0.0);
  std::vector<double> b = pins.sensor_coeffs ? *pins.sensor_coeffs : full_coeffs(num_sensors, limits);
  double eta = optimal_eta(chan, p, b, scheduled);
  if (!(eta > 0.0)) eta = feas.eta;

  for (int l = 1; l <= cfg.max_outer; ++l) {
    TransmissionResult tr = solve_transmission(chan, user, eta, limits, cfg, {p, b}, pins);
    if (!tr.feasible && l == 1) {
      // The starting eta admits no admissible powers; restart from the MSE-minimizing one.
      eta = feas.eta;
      tr = solve_transmission(chan, user, eta, limits, cfg, {p, b}, pins);
    }
    sol.inner_iterations += tr.iterations;
    const double next_eta = optimal_eta(chan, tr.user_power, tr.sensor_coeffs, scheduled);
    double delta = std::abs(tr.user_power - p) / limits.p_max;
    for (std::size_t k = 0; k < num_sensors; ++k) delta = std::max(delta, std::abs(tr.sensor_coeffs[k] - b[k]) / b_max);
    delta = std::max(delta, std::abs(next_eta - eta) / std::max(next_eta, std::numeric_limits<double>::min()));
    p = tr.user_power;
    b = std::move(tr.sensor_coeffs);
    eta = next_eta;
    sol.outer_iterations = l;
    sol.rate_trace.push_back(user_rate(chan, SlotDecision{scheduled, p, b, eta}));
    if (delta <= cfg.tol) break;
  }

  finish(SlotDecision{scheduled, p, b, eta});
  if (!sol.feasible) {
    // Numerical slip past the budget: fall back to the certified point.
    const auto traces = std::move(sol.rate_trace);
    finish(fallback);
    sol.rate_trace = traces;
  }
  return sol;
}

}  // namespace uavair
