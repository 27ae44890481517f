/*
 * Copyright 2026 The gmclab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gmclab/ibp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gmclab/errors.hpp"
#include "gmclab/quadrature.hpp"
#include "gmclab/sampler.hpp"

namespace gmclab {

namespace {

constexpr int kCdfPanels = 256;

double raw_bump(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

}  // namespace

BumpFunction::BumpFunction(double center, double width) : center_(center), width_(width) {
  if (!(width > 0.0) || !(center - width > 0.0)) {
    throw ParameterError("bump support must lie in (0, inf) with positive width");
  }
  // Panel masses of the unnormalized bump by 10-point Gauss-Legendre.
  const GaussLegendre& rule = gauss_legendre(10);
  const double h = 2.0 / kCdfPanels;
  cdf_table_.assign(kCdfPanels + 1, 0.0);
  for (int k = 0; k < kCdfPanels; ++k) {
    double mass = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) mass += rule.weights[q] * raw_bump(-1.0 + (k + rule.nodes[q]) * h);
    cdf_table_[k + 1] = cdf_table_[k] + mass * h;
  }
  const double total = cdf_table_.back();
  normalization_ = 1.0 / (width * total);
  for (double& v : cdf_table_) v /= total;
}

double BumpFunction::operator()(double x) const {
  return normalization_ * raw_bump((x - center_) / width_);
}

double BumpFunction::derivative(double x) const {
  const double u = (x - center_) / width_;
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double s = 1.0 - u * u;
  return normalization_ * raw_bump(u) * (-2.0 * u / (s * s)) / width_;
}

double BumpFunction::cdf(double x) const {
  if (x <= lower()) return 0.0;
  if (x >= upper()) return 1.0;
  const double h = 2.0 * width_ / kCdfPanels;
  const int k = std::min(kCdfPanels - 1, static_cast<int>((x - lower()) / h));
  const double a = lower() + k * h;
  const GaussLegendre& rule = gauss_legendre(10);
  double partial = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) partial += rule.weights[q] * (*this)(a + rule.nodes[q] * (x - a));
  return cdf_table_[k] + partial * (x - a);
}

double BumpFunction::first_moment() const {
  return integrate([this](double a) { return a * (*this)(a); }, lower(), upper(), 1e-15);
}

bool IbpReport::passed() const {
  return std::abs(difference) <= 3.0 * paired_stderr + 1e-10;
}

double IbpReport::rejection_rate() const {
  const std::size_t total = replicates + rejected_replicates;
  return total == 0 ? 0.0 : static_cast<double>(rejected_replicates) / total;
}

namespace {

constexpr int kThetaOrder = 8;

enum class KernelForm { exact, log_limit };

struct ReplicateOut {
  double window = 0.0;
  double hitting = 0.0;
  double bracket = 0.0;
  double bracket_log = 0.0;
  double eta_T = 0.0;
  bool complete = false;
};

// Per-realization evaluation of both sides of the window and hitting identities on
// the piecewise-constant-density model. All s-integrals of the kernel are exact
// through second differences of its antiderivative.
class Engine {
 public:
  Engine(const IbpParams& p, double T, bool with_log_limit)
      : p_(p), with_log_(with_log_limit) {
    p.kernel.validate();
    p.chaos.validate();
    if (!(p.lambda_exp >= 0.0 && p.lambda_exp < std::sqrt(2.0))) {
      throw ParameterError("lambda_exp must lie in [0, sqrt(2))");
    }
    if (!(p.L > 0.0) || !(T > 0.0)) throw ParameterError("L and T must be positive");
    if (p.cells_per_epsilon < 1) throw ParameterError("cells_per_epsilon must be >= 1");
    step_ = p.kernel.epsilon / p.cells_per_epsilon;
    grid_ = GridSpec::with_step(0.0, T + p.L, step_);
    i_T_ = grid_.node_index(T);
    const GridSpec window = GridSpec::with_step(0.0, p.L, step_);
    lm_ = window.n - 1;
    e_max_ = static_cast<int>(std::ceil(p.kernel.support() / step_)) + 2;
    const GaussLegendre& rule = gauss_legendre(kThetaOrder);
    nodes_ = rule.nodes;
    weights_ = rule.weights;
    exact_ = make_tables(KernelForm::exact);
    if (with_log_) log_ = make_tables(KernelForm::log_limit);
  }

  const GridSpec& grid() const { return grid_; }

  ReplicateOut run(std::size_t rep) const {
    const FieldSample f = sample_field(p_.kernel, grid_, p_.seed, rep);
    const ChaosMeasure eta = build_measure(f.values, f, p_.chaos.gamma, p_.chaos.rule);
    ChaosMeasure separate;
    if (p_.lambda_exp != p_.chaos.gamma) separate = build_measure(f.values, f, p_.lambda_exp, p_.chaos.rule);
    const ChaosMeasure& mu = p_.lambda_exp != p_.chaos.gamma ? separate : eta;
    const BumpFunction& psi = p_.psi;
    ReplicateOut out;
    out.eta_T = eta.cum[i_T_];
    out.complete = out.eta_T >= psi.upper();
    for (int i = 0; i < i_T_; ++i) {
      if (eta.cum[i + 1] <= psi.lower() || eta.cum[i] >= psi.upper()) continue;
      const double rho = eta.density[i];
      const double w_lo = mu.cum[i + lm_] - mu.cum[i];
      const double w_slope = mu.cell_mass[i + lm_] - mu.cell_mass[i];
      double psi_q[kThetaOrder];
      for (int q = 0; q < kThetaOrder; ++q) {
        const double f_q = nodes_[q];
        psi_q[q] = psi(eta.cum[i] + f_q * eta.cell_mass[i]);
        const double weight = weights_[q] * step_ * psi_q[q] * rho;
        out.window += weight * (w_lo + f_q * w_slope);
        out.hitting += weight * (grid_.at(i) + f_q * step_);
      }
      out.bracket += cell_bracket(exact_, eta, mu, i, psi_q);
      if (with_log_) out.bracket_log += cell_bracket(log_, eta, mu, i, psi_q);
    }
    if (!out.complete) {
      const double tail = 1.0 - psi.cdf(out.eta_T);
      out.window += tail * (mu.cum[i_T_ + lm_] - mu.cum[i_T_]);
      out.hitting += tail * grid_.at(i_T_);
    }
    return out;
  }

 private:
  struct Tables {
    std::vector<double> full;                  // indexed by lag e >= 1
    std::vector<std::vector<double>> first;    // [q][e], partial cell containing theta
    std::vector<std::vector<double>> last;     // [q][e], partial cell containing theta + L
    std::vector<std::vector<double>> own;      // [q][m], cell of theta itself
  };

  Tables make_tables(KernelForm form) const {
    const KernelParams& k = p_.kernel;
    const double eps = k.epsilon;
    const double g_eps = profile(k, eps);
    const double anti_eps = profile_antiderivative(k, eps);
    auto G = [&](double x) {
      if (form == KernelForm::exact || x >= eps) {
        const double base = profile_antiderivative(k, x);
        return form == KernelForm::exact ? base : base - anti_eps + g_eps * eps;
      }
      return g_eps * x;
    };
    const double d = step_;
    Tables t;
    t.full.assign(e_max_ + lm_ + 2, 0.0);
    for (int e = 1; e < static_cast<int>(t.full.size()); ++e) {
      t.full[e] = G((e + 1) * d) - 2.0 * G(e * d) + G((e - 1) * d);
    }
    t.first.assign(kThetaOrder, std::vector<double>(e_max_ + 1, 0.0));
    t.last.assign(kThetaOrder, std::vector<double>(e_max_ + 1, 0.0));
    t.own.assign(kThetaOrder, std::vector<double>(lm_ + 1, 0.0));
    for (int q = 0; q < kThetaOrder; ++q) {
      const double f = nodes_[q];
      for (int e = 1; e <= e_max_; ++e) {
        t.first[q][e] = G((e + 1) * d) - G((e + f) * d) - G(e * d) + G((e - 1 + f) * d);
        const int el = e + lm_;
        t.last[q][e] = G((el + f) * d) - G(el * d) - G((el - 1 + f) * d) + G((el - 1) * d);
      }
      for (int m = 0; m <= lm_; ++m) {
        const double alpha = m == 0 ? f * d : m * d;
        const double beta = m == lm_ ? (lm_ + f) * d : (m + 1) * d;
        t.own[q][m] = (G(beta) - G(alpha)) - (G(beta - f * d) - G(alpha - f * d));
      }
    }
    return t;
  }

  // int over cell i of psi(eta(theta)) K(theta) d theta.
  double cell_bracket(const Tables& t, const ChaosMeasure& eta, const ChaosMeasure& mu, int i,
                      const double* psi_q) const {
    const int e_top = std::min(i, e_max_);
    double full = 0.0;
    for (int e = 1; e <= e_top; ++e) {
      const int m_top = std::min(lm_ - 1, e_max_ - e);
      double inner = 0.0;
      for (int m = 1; m <= m_top; ++m) inner += mu.density[i + m] * t.full[e + m];
      full += eta.density[i - e] * inner;
    }
    double total = 0.0;
    for (int q = 0; q < kThetaOrder; ++q) {
      if (psi_q[q] == 0.0) continue;
      double partial = 0.0;
      for (int e = 1; e <= e_top; ++e) {
        partial += eta.density[i - e] *
                   (mu.density[i] * t.first[q][e] + mu.density[i + lm_] * t.last[q][e]);
      }
      double own = 0.0;
      for (int m = 0; m <= lm_; ++m) own += mu.density[i + m] * t.own[q][m];
      total += weights_[q] * step_ * psi_q[q] * (full + partial + eta.density[i] * own);
    }
    return total;
  }

  IbpParams p_;
  bool with_log_;
  double step_ = 0.0;
  GridSpec grid_;
  int i_T_ = 0;
  int lm_ = 0;
  int e_max_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Tables exact_;
  Tables log_;
};

using Sides = std::function<std::pair<double, double>(const ReplicateOut&)>;

struct Collected {
  std::vector<ReplicateOut> accepted;
  std::size_t rejected = 0;
};

Collected collect(const Engine& engine, const IbpParams& p, bool reject_incomplete, const Sides& sides) {
  Collected c;
  std::size_t done = 0;
  std::size_t target = std::max<std::size_t>(p.replicates, 2);
  while (true) {
    auto outs = parallel_map(target - done, p.workers,
                             [&](std::size_t k) { return engine.run(done + k); });
    for (const ReplicateOut& o : outs) {
      if (reject_incomplete && !o.complete) {
        ++c.rejected;
      } else {
        c.accepted.push_back(o);
      }
    }
    done = target;
    if (!p.escalate || done >= p.max_replicates || c.accepted.size() < 2) break;
    McAccumulator lhs, rhs;
    for (const ReplicateOut& o : c.accepted) {
      const auto s = sides(o);
      lhs.add(s.first);
      rhs.add(s.second);
    }
    const McEstimate l = lhs.estimate();
    const McEstimate r = rhs.estimate();
    if (std::hypot(l.std_error, r.std_error) < 0.02 * std::abs(l.mean)) break;
    target = std::min(p.max_replicates, done * 10);
  }
  if (c.accepted.size() < 2) throw GridTooShortError("fewer than two replicates survived rejection");
  return c;
}

IbpReport summarize(const std::string& identity, const IbpParams& p, const Engine& engine,
                    const Collected& c, const Sides& sides) {
  std::vector<double> lhs, rhs;
  for (const ReplicateOut& o : c.accepted) {
    const auto s = sides(o);
    lhs.push_back(s.first);
    rhs.push_back(s.second);
  }
  IbpReport report;
  report.identity = identity;
  report.lhs = mc_accumulate(lhs, p.seed);
  report.rhs = mc_accumulate(rhs, p.seed);
  const McEstimate diff = paired_difference(lhs, rhs, p.seed);
  report.difference = diff.mean;
  report.paired_stderr = diff.std_error;
  report.combined_stderr = std::hypot(report.lhs.std_error, report.rhs.std_error);
  report.replicates = c.accepted.size();
  report.rejected_replicates = c.rejected;
  report.grid = engine.grid();
  report.params = p;
  report.params.replicates = c.accepted.size() + c.rejected;
  return report;
}

void add_estimate(IbpReport& report, const std::string& name, const std::vector<double>& xs) {
  const McEstimate e = mc_accumulate(xs, report.params.seed);
  report.extras[name] = e.mean;
  report.extras[name + "_stderr"] = e.std_error;
}

}  // namespace

IbpReport verify_fixed_epsilon(const IbpParams& p) {
  const Engine engine(p, p.T, false);
  const double gl = p.chaos.gamma * p.lambda_exp;
  Sides sides = [&](const ReplicateOut& o) { return std::make_pair(o.window, p.L - gl * o.bracket); };
  const Collected c = collect(engine, p, false, sides);
  IbpReport report = summarize("fixed-epsilon", p, engine, c, sides);
  std::vector<double> bracket, unscaled, gap;
  std::size_t truncated = 0;
  for (const ReplicateOut& o : c.accepted) {
    bracket.push_back(o.bracket);
    unscaled.push_back(o.window - (p.L - p.lambda_exp * o.bracket));
    gap.push_back(o.window - p.L);
    if (!o.complete) ++truncated;
  }
  add_estimate(report, "bracket", bracket);
  add_estimate(report, "difference_without_gamma_factor", unscaled);
  add_estimate(report, "lhs_minus_L", gap);
  report.extras["truncated_replicates"] = static_cast<double>(truncated);
  return report;
}

std::vector<IbpReport> verify_epsilon_zero_formula(const IbpParams& params,
                                                   const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw ParameterError("epsilon sequence is empty");
  for (std::size_t k = 1; k < epsilons.size(); ++k) {
    if (!(epsilons[k] < epsilons[k - 1])) throw ParameterError("epsilon sequence must decrease");
  }
  std::vector<IbpReport> out;
  for (double eps : epsilons) {
    IbpParams p = params;
    p.kernel.epsilon = eps;
    const Engine engine(p, p.T, true);
    const double gl = p.chaos.gamma * p.lambda_exp;
    Sides sides = [&](const ReplicateOut& o) {
      return std::make_pair(o.window, p.L - gl * o.bracket_log);
    };
    const Collected c = collect(engine, p, false, sides);
    IbpReport report = summarize("epsilon-zero", p, engine, c, sides);
    std::vector<double> exact_diff, gap;
    for (const ReplicateOut& o : c.accepted) {
      exact_diff.push_back(o.window - (p.L - gl * o.bracket));
      gap.push_back(o.window - p.L);
    }
    add_estimate(report, "exact_kernel_difference", exact_diff);
    add_estimate(report, "lhs_minus_L", gap);
    report.extras["epsilon"] = eps;
    out.push_back(report);
  }
  return out;
}

bool gap_trend_non_increasing(const std::vector<IbpReport>& reports) {
  for (std::size_t k = 1; k < reports.size(); ++k) {
    if (std::abs(reports[k].difference) > std::abs(reports[k - 1].difference) + reports[k].paired_stderr) {
      return false;
    }
  }
  return true;
}

IbpReport verify_infinite_T(const IbpParams& p) {
  const double gl = p.chaos.gamma * p.lambda_exp;
  Sides sides = [&](const ReplicateOut& o) { return std::make_pair(o.window, p.L - gl * o.bracket); };
  const Engine engine(p, p.T, true);
  const Collected c = collect(engine, p, true, sides);
  IbpReport report = summarize("infinite-T", p, engine, c, sides);
  std::vector<double> log_diff;
  for (const ReplicateOut& o : c.accepted) log_diff.push_back(o.window - (p.L - gl * o.bracket_log));
  add_estimate(report, "log_limit_difference", log_diff);

  IbpParams doubled = p;
  doubled.T = 2.0 * p.T;
  doubled.replicates = report.params.replicates;
  doubled.escalate = false;
  const Engine engine2(doubled, doubled.T, false);
  const Collected c2 = collect(engine2, doubled, true, sides);
  const IbpReport second = summarize("infinite-T", doubled, engine2, c2, sides);
  report.extras["T2_lhs"] = second.lhs.mean;
  report.extras["T2_difference"] = second.difference;
  report.extras["T2_paired_stderr"] = second.paired_stderr;
  report.extras["T_vs_2T_lhs_shift"] = second.lhs.mean - report.lhs.mean;
  report.extras["T_vs_2T_combined_stderr"] = std::hypot(second.lhs.std_error, report.lhs.std_error);
  report.extras["T2_rejected"] = static_cast<double>(second.rejected_replicates);
  return report;
}

IbpReport verify_hitting_expectation(const IbpParams& p) {
  if (p.L < p.kernel.r) throw ParameterError("hitting expectation identity needs L >= r");
  const double gl = p.chaos.gamma * p.lambda_exp;
  const double moment = p.psi.first_moment();
  Sides sides = [&](const ReplicateOut& o) { return std::make_pair(o.hitting, moment - gl * o.bracket); };
  const Engine engine(p, p.T, true);
  const Collected c = collect(engine, p, true, sides);
  IbpReport report = summarize("hitting-expectation", p, engine, c, sides);
  std::vector<double> shift, window_gap, gap_equality, log_diff;
  for (const ReplicateOut& o : c.accepted) {
    shift.push_back(o.hitting - moment);
    window_gap.push_back(o.window - p.L);
    gap_equality.push_back((o.hitting - moment) - (o.window - p.L));
    log_diff.push_back(o.hitting - (moment - gl * o.bracket_log));
  }
  add_estimate(report, "lhs_minus_first_moment", shift);
  add_estimate(report, "window_gap", window_gap);
  add_estimate(report, "gap_equality", gap_equality);
  add_estimate(report, "log_limit_difference", log_diff);
  return report;
}

TripleIntegral deterministic_integral_check(double r, double T) {
  if (!(r > 0.0 && r <= 1.0) || !(T > r)) throw ParameterError("need 0 < r <= 1 and T > r");
  TripleIntegral out;
  out.closed_form = -r * std::log(1.0 / r) * (1.0 - 1.5 * r) - r * (T - r / 6.0);
  out.rederived = r * (T / 2.0 - r / 12.0);
  // Innermost integral in closed form: int_{(theta-r) v 0}^{theta-zeta} (1/(theta-t) - 1/r) dt.
  auto inner = [r](double zeta, double theta) {
    const double top = std::min(theta, r);
    return std::log(top / zeta) - (top - zeta) / r;
  };
  auto over_theta = [&](double zeta) {
    const double knee = std::min(r, zeta + T);
    double total = integrate_singular([&](double theta) { return inner(zeta, theta); }, zeta, knee, 1e-12);
    if (zeta + T > r) total += integrate([&](double theta) { return inner(zeta, theta); }, r, zeta + T, 1e-13);
    return total;
  };
  out.quadrature = integrate_singular(over_theta, 0.0, r, 1e-10);
  out.agrees = std::abs(out.quadrature - out.closed_form) <= 1e-6;
  return out;
}

}  // namespace gmclab
