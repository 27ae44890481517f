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

// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/errors.hpp"
#include "gmclab/ibp.hpp"
#include "gmclab/inverse.hpp"
#include "gmclab/kernel.hpp"
#include "gmclab/malliavin.hpp"
#include "gmclab/moments.hpp"
#include "gmclab/sampler.hpp"
#include "gmclab/stats.hpp"
#include "oracles.hpp"

using namespace gmclab;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = true;
  bool finding = false;  // a documented discrepancy that does not fail the run
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string est(const McEstimate& e) { return num(e.mean) + " +- " + num(e.std_error); }

// Independent profile and slope of the standard kernel.
double ref_profile(const KernelParams& k, double h) {
  const double a = std::abs(h);
  if (a >= k.r) return 0.0;
  if (a <= k.epsilon) return std::log(k.r / k.epsilon) - (1.0 / k.epsilon - 1.0 / k.r) * a;
  return std::log(k.r / a) + a / k.r - 1.0;
}

double ref_abs_slope(const KernelParams& k, double h) {
  const double a = std::abs(h);
  if (a < k.epsilon) return 1.0 / k.epsilon - 1.0 / k.r;
  if (a < k.r) return 1.0 / a - 1.0 / k.r;
  return 0.0;
}

// --- criterion 1 -------------------------------------------------------------

void kernel_exactness(Outcome& o) {
  double sym = 0.0, cont = 0.0, dv = 0.0, integ = 0.0;
  const std::vector<KernelParams> kernels{{0.1, 1.0, std::nullopt}, {0.05, 1.0, std::nullopt},
                                          {0.01, 0.5, std::nullopt}, {0.2, 2.0, std::nullopt}};
  for (const auto& k : kernels) {
    for (double s = -1.3; s <= 1.3; s += 0.137) {
      for (double t = -1.1; t <= 1.7; t += 0.0913) {
        sym = std::max(sym, std::abs(cov(k, s, t).value - cov(k, t, s).value));
        dv = std::max(dv, std::abs(difference_variance(k, s, t) - 2.0 * (cov(k, s, s).value - cov(k, s, t).value)));
      }
    }
    for (double edge : {k.epsilon, k.r}) {
      for (double s : {0.0, 0.7, -2.3}) {
        const double d = 1e-15 * std::max(1.0, edge);
        cont = std::max(cont, std::abs(cov(k, s, s + edge - d).value - cov(k, s, s + edge + d).value));
        cont = std::max(cont, std::abs(cov(k, s, s - edge + d).value - cov(k, s, s - edge - d).value));
      }
    }
  }
  // 20-point sweep over (s, epsilon, r, T).
  int points = 0;
  for (int i = 0; i < 20; ++i) {
    const KernelParams k{0.02 + 0.015 * (i % 7), 0.5 + 0.25 * (i % 4), std::nullopt};
    const double T = 0.6 + 0.37 * i;
    const double s = T * (0.05 + 0.9 * ((i * 7) % 20) / 19.0);
    const double got = abs_derivative_integral(k, s, T, 1.0);
    const double ref = oracle::simpson_pieces([&](double t) { return ref_abs_slope(k, t - s); }, 0.0, T,
                                              {s - k.r, s - k.epsilon, s, s + k.epsilon, s + k.r}, 20000);
    integ = std::max(integ, std::abs(got - ref));
    ++points;
  }
  o.detail << "symmetry " << num(sym) << ", continuity " << num(cont) << ", difference-variance " << num(dv)
           << ", |D| integral max err " << num(integ) << " over " << points << " points";
  o.require(sym <= 1e-12, "symmetry");
  o.require(cont <= 1e-12, "continuity");
  o.require(dv <= 1e-12, "difference variance");
  o.require(integ <= 1e-6, "derivative integral");
}

// --- criterion 2 -------------------------------------------------------------

void sampler_fidelity(Outcome& o) {
  const KernelParams k{0.1, 1.0, std::nullopt};
  const GridSpec g{0.0, 4.0, 256};
  const std::vector<std::pair<int, int>> pairs{{10, 11}, {40, 43}, {100, 110}, {128, 160}, {30, 200}};
  const std::vector<int> points{0, 127, 255};
  const std::size_t N = 100000;
  auto rows = parallel_map(N, 0, [&](std::size_t rep) {
    const FieldSample f = sample_field(k, g, kSeed, rep);
    std::vector<double> row;
    for (auto [i, j] : pairs) row.push_back(f.values[i] * f.values[j]);
    for (int i : points) row.push_back(f.values[i] * f.values[i]);
    return row;
  });
  double worst = 0.0;
  for (std::size_t q = 0; q < pairs.size() + points.size(); ++q) {
    McAccumulator acc;
    for (const auto& r : rows) acc.add(r[q]);
    const McEstimate e = acc.estimate();
    const double target = q < pairs.size() ? ref_profile(k, g.at(pairs[q].second) - g.at(pairs[q].first)) : std::log(10.0);
    const double z = std::abs(e.mean - target) / e.std_error;
    worst = std::max(worst, z);
    o.require(z <= 3.0, "probe " + std::to_string(q) + " at " + num(z) + " sigma");
  }
  o.detail << "N=" << N << ", largest deviation " << num(worst) << " stderr over 8 probes";
}

// --- criterion 3 -------------------------------------------------------------

void degenerate_chaos(Outcome& o) {
  const KernelParams k{0.1, 1.0, std::nullopt};
  const GridSpec g = GridSpec::with_step(0.0, 4.0, 0.025);
  double worst = 0.0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const FieldSample f = sample_field(k, g, kSeed, rep);
    const ChaosMeasure m = build_measure(f, ChaosParams{0.0, RiemannRule::mid});
    const InverseMap q(m);
    for (double a : {0.0, 0.3, 1.7, 3.9}) {
      worst = std::max(worst, std::abs(measure_of(m, a, a + 0.1) - 0.1));
      worst = std::max(worst, std::abs(hitting_time(q, a) - a));
    }
    for (double x : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      worst = std::max(worst, std::abs(homeomorphism(q, x) - x));
      worst = std::max(worst, std::abs(inverse_homeomorphism(q, x) - x));
    }
  }
  IbpParams p;
  p.kernel = k;
  p.chaos.gamma = 0.0;
  p.lambda_exp = 0.0;
  p.replicates = 50;
  p.escalate = false;
  p.seed = kSeed;
  double ibp = 0.0;
  ibp = std::max(ibp, std::abs(verify_fixed_epsilon(p).difference));
  for (const auto& r : verify_epsilon_zero_formula(p, {0.1, 0.05, 0.025})) ibp = std::max(ibp, std::abs(r.difference));
  p.L = 1.0;
  ibp = std::max(ibp, std::abs(verify_infinite_T(p).difference));
  ibp = std::max(ibp, std::abs(verify_hitting_expectation(p).difference));
  o.detail << "measure/inverse/homeomorphism max err " << num(worst) << ", IBP max |difference| " << num(ibp);
  o.require(worst <= 1e-10, "measure");
  o.require(ibp <= 1e-10, "IBP");
}

// --- criterion 4 -------------------------------------------------------------

void linear_expectation(Outcome& o) {
  const KernelParams k{0.05, 1.0, std::nullopt};
  const GridSpec g = GridSpec::with_step(0.0, 1.0, 0.0125);
  const std::size_t N = 10000;
  auto mass = parallel_map(N, 0, [&](std::size_t rep) {
    return build_measure(sample_field(k, g, kSeed, rep), ChaosParams{0.5, RiemannRule::mid}).total();
  });
  const McEstimate unit = mc_accumulate(mass, kSeed);
  MomentsConfig cfg;
  cfg.replicates = N;
  cfg.seed = kSeed;
  const ErgodicResult e = ergodic_ratio(cfg, {8.0, 64.0});
  o.detail << "E eta(0,1) = " << est(unit) << "; eta(0,T)/T at T=8: " << est(e.ratio[0]) << ", T=64: "
           << est(e.ratio[1]) << "; variance drop " << est(e.variance_drop);
  o.require(std::abs(unit.mean - 1.0) <= 3.0 * unit.std_error, "E eta(0,1)");
  for (const auto& r : e.ratio) o.require(std::abs(r.mean - 1.0) <= 3.0 * r.std_error, "ergodic ratio");
}

// --- criterion 5 -------------------------------------------------------------

struct Functional {
  CylindricalFunctional F;
  std::vector<double> times;
};

std::vector<Functional> functionals(const GridSpec& g) {
  const std::vector<double> t{1.0, 1.125, 1.25, 1.375};
  auto idx = [&](int i) { return g.node_index(t[i]); };
  std::vector<Functional> out;
  out.push_back({{{idx(0)},
                  [](const std::vector<double>& x) { return x[0]; },
                  [](const std::vector<double>&) { return std::vector<double>{1.0}; },
                  "x1"},
                 {t[0]}});
  out.push_back({{{idx(0), idx(1)},
                  [](const std::vector<double>& x) { return std::tanh(x[0] - 0.5 * x[1]); },
                  [](const std::vector<double>& x) {
                    const double s = 1.0 / std::cosh(x[0] - 0.5 * x[1]);
                    return std::vector<double>{s * s, -0.5 * s * s};
                  },
                  "tanh(x1 - x2/2)"},
                 {t[0], t[1]}});
  out.push_back({{{idx(0), idx(1), idx(2), idx(3)},
                  [](const std::vector<double>& x) {
                    return std::cos(x[0] + 0.3 * x[2]) * std::exp(-0.1 * x[1] * x[1]) + 0.2 * std::sin(x[3]);
                  },
                  [](const std::vector<double>& x) {
                    const double e = std::exp(-0.1 * x[1] * x[1]);
                    const double s = std::sin(x[0] + 0.3 * x[2]);
                    const double c = std::cos(x[0] + 0.3 * x[2]);
                    return std::vector<double>{-s * e, -0.2 * x[1] * c * e, -0.3 * s * e, 0.2 * std::cos(x[3])};
                  },
                  "cos(x1 + 0.3 x3) exp(-0.1 x2^2) + 0.2 sin(x4)"},
                 {t[0], t[1], t[2], t[3]}});
  return out;
}

// E[F(X)(M_u - 1)/lambda] and E[<DF, u>] by Gauss-Hermite on the node covariance,
// using the library covariance and its derivative.
std::pair<double, double> duality_oracle(const Functional& fn, const KernelParams& k, double lambda, double u) {
  const std::size_t d = fn.times.size();
  Eigen::MatrixXd C(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) C(i, j) = cov(k, fn.times[i], fn.times[j]).value;
  const int order = d <= 2 ? 40 : 16;
  auto shifted_mean = [&](double s, const std::function<double(const std::vector<double>&)>& g) {
    std::vector<double> shift(d);
    for (std::size_t i = 0; i < d; ++i) shift[i] = lambda * cov(k, fn.times[i], s).value;
    std::vector<double> x(d);
    return oracle::gaussian_expectation(
        C,
        [&](const Eigen::VectorXd& z) {
          for (std::size_t i = 0; i < d; ++i) x[i] = z(i) + shift[i];
          return g(x);
        },
        order);
  };
  const double lhs = (shifted_mean(u, fn.F.f) - shifted_mean(-1e3, fn.F.f)) / lambda;
  std::vector<double> cuts;
  for (double t : fn.times)
    for (double off : {-k.r, -k.epsilon, 0.0, k.epsilon, k.r}) cuts.push_back(t + off);
  auto integrand = [&](double s) {
    std::vector<double> slope(d);
    for (std::size_t i = 0; i < d; ++i) slope[i] = cov_derivative(k, fn.times[i], s);
    return shifted_mean(s, [&](const std::vector<double>& x) {
      const std::vector<double> grad = fn.F.gradient(x);
      double v = 0.0;
      for (std::size_t i = 0; i < d; ++i) v += grad[i] * slope[i];
      return v;
    });
  };
  const double rhs = oracle::gauss_legendre_pieces(integrand, fn.times.front() - k.r, u, cuts, 16, d <= 2 ? 4 : 2);
  return {lhs, rhs};
}

void malliavin_duality(Outcome& o) {
  const KernelParams k{0.1, 1.0, std::nullopt};
  const GridSpec g = GridSpec::with_step(0.0, 63.0 / 32.0, 1.0 / 32.0);
  const double lambda = 0.5, u = 1.5;
  double worst_oracle = 0.0;
  bool mc_ok = true;
  for (const Functional& fn : functionals(g)) {
    const auto [lhs, rhs] = duality_oracle(fn, k, lambda, u);
    worst_oracle = std::max(worst_oracle, std::abs(lhs - rhs));
    DualityConfig cfg;
    cfg.kernel = k;
    cfg.grid = g;
    cfg.lambda_exp = lambda;
    cfg.t = 1.0;
    cfg.zeta = u - 1.0;
    cfg.replicates = 10000;
    cfg.seed = kSeed;
    const DualityReport d = duality_residual(fn.F, cfg);
    const bool ok = std::abs(d.residual.mean) <= 3.0 * d.residual.std_error;
    mc_ok = mc_ok && ok;
    o.detail << "\n    " << fn.F.description << ": oracle lhs " << num(lhs) << " rhs " << num(rhs)
             << "; MC residual " << est(d.residual) << " on n=" << g.n;
  }
  o.detail << "\n    worst oracle residual " << num(worst_oracle);
  o.require(worst_oracle <= 1e-6, "oracle residual");
  o.require(mc_ok, "MC residual");
}

// --- criterion 6 -------------------------------------------------------------

void mollified_inverse(Outcome& o) {
  const KernelParams k{0.1, 1.0, std::nullopt};
  const GridSpec g = GridSpec::with_step(-1.0, 5.0, 0.0125);
  const BumpFunction psi(1.0, 0.5);
  double worst = 0.0, worst_cm = 0.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const FieldSample f = sample_field(k, g, kSeed, rep);
    const ChaosMeasure m = build_measure(f, ChaosParams{0.5, RiemannRule::mid});
    for (double r : {0.3, 1.1}) {
      const MollifiedDerivative d = derivative_mollified_inverse(m, psi, 4.0, r);
      worst = std::max(worst, std::abs(d.theta_form - d.y_form) / std::max(1.0, std::abs(d.theta_form)));
    }
    const CameronMartinCheck c = cameron_martin_check(f, ChaosParams{0.5, RiemannRule::mid}, 0.8, 1.6);
    worst_cm = std::max(worst_cm, c.relative_error);
  }
  o.detail << "theta/y forms max rel diff " << num(worst) << "; Cameron-Martin max rel err " << num(worst_cm)
           << " over 20 realizations";
  o.require(worst <= 1e-8, "forms");
  o.require(worst_cm <= 1e-3, "Cameron-Martin");
}

// --- criterion 7 -------------------------------------------------------------

IbpParams ibp_defaults() {
  IbpParams p;
  p.kernel = KernelParams{0.05, 1.0, std::nullopt};
  p.chaos = ChaosParams{0.5, RiemannRule::mid};
  p.lambda_exp = 0.5;
  p.replicates = 10000;
  p.seed = kSeed;
  return p;
}

std::string describe(const IbpReport& r) {
  return r.identity + ": lhs " + est(r.lhs) + ", rhs " + est(r.rhs) + ", diff " + num(r.difference) +
         " (paired se " + num(r.paired_stderr) + ", combined se " + num(r.combined_stderr) + "), N=" +
         std::to_string(r.replicates) + ", rejected " + std::to_string(r.rejected_replicates);
}

IbpReport& fixed_epsilon_report() {
  static IbpReport r = verify_fixed_epsilon(ibp_defaults());
  return r;
}

void ibp_identities(Outcome& o) {
  bool hard_failure = false;
  auto gate = [&](const IbpReport& r, const std::string& name, bool limit_form = false) {
    o.detail << "\n    " << describe(r);
    const bool ok = r.passed() && r.rejection_rate() < 0.01;
    if (!limit_form) hard_failure = hard_failure || !ok;
    o.require(r.passed(), name);
    o.require(r.rejection_rate() < 0.01, name + " rejection");
  };
  gate(fixed_epsilon_report(), "fixed epsilon");
  // The epsilon-zero formula is a limit statement; at finite epsilon it carries a
  // deterministic bias that shrinks along the sequence.
  const auto eps = verify_epsilon_zero_formula(ibp_defaults(), {0.1, 0.05, 0.025});
  for (const auto& r : eps) gate(r, "epsilon-zero at " + num(r.extras.at("epsilon")), true);
  const bool trend = gap_trend_non_increasing(eps);
  o.detail << "\n    epsilon-zero gap trend non-increasing: " << (trend ? "yes" : "no");
  o.require(trend, "gap trend");
  hard_failure = hard_failure || !trend;
  IbpParams p = ibp_defaults();
  p.L = 1.0;
  const IbpReport inf = verify_infinite_T(p);
  gate(inf, "infinite T");
  const double shift = inf.extras.at("T_vs_2T_lhs_shift");
  const double shift_se = inf.extras.at("T_vs_2T_combined_stderr");
  o.detail << "\n    T vs 2T: lhs shift " << num(shift) << " (se " << num(shift_se) << "), 2T diff "
           << num(inf.extras.at("T2_difference")) << " (se " << num(inf.extras.at("T2_paired_stderr")) << ")";
  const bool stable = std::abs(shift) <= 3.0 * shift_se + 1e-10 &&
                      std::abs(inf.extras.at("T2_difference")) <= 3.0 * inf.extras.at("T2_paired_stderr") + 1e-10;
  o.require(stable, "T vs 2T");
  hard_failure = hard_failure || !stable;
  gate(verify_hitting_expectation(p), "hitting expectation");
  o.finding = !o.pass && !hard_failure;
}

// --- criterion 8 -------------------------------------------------------------

void positivity(Outcome& o) {
  GapConfig cfg;
  cfg.kernel = KernelParams{0.05, 1.0, std::nullopt};
  cfg.chaos = ChaosParams{0.5, RiemannRule::mid};
  cfg.grid = GridSpec::with_step(0.0, 8.0, 0.0125);
  cfg.a_values = {0.5, 1.0, 2.0};
  cfg.replicates = 10000;
  cfg.seed = kSeed;
  for (const GapEstimate& g : expectation_gap(cfg)) {
    o.detail << "\n    a=" << num(g.a) << ": E[Q(a)]-a " << est(g.hitting_gap) << ", window gap "
             << est(g.window_gap) << ", estimator difference " << est(g.difference) << " (combined se "
             << num(g.combined_stderr) << ")";
    o.require(g.hitting_gap.mean > 3.0 * g.hitting_gap.std_error, "positive gap at a=" + num(g.a));
    o.require(std::abs(g.difference.mean) <= 3.0 * g.combined_stderr, "estimator equality at a=" + num(g.a));
  }
  const IbpReport& r = fixed_epsilon_report();
  const double gap = r.extras.at("lhs_minus_L");
  const double se = r.extras.at("lhs_minus_L_stderr");
  o.detail << "\n    smeared lhs - L = " << num(gap) << " +- " << num(se);
  o.require(gap > 3.0 * se, "smeared lhs >= L");
}

// --- criterion 9 -------------------------------------------------------------

void triple_integral(Outcome& o) {
  bool agree = true;
  for (auto [r, T] : {std::pair{0.5, 2.0}, std::pair{0.25, 1.0}}) {
    const TripleIntegral t = deterministic_integral_check(r, T);
    o.detail << "\n    (r,T)=(" << num(r) << "," << num(T) << "): quadrature " << num(t.quadrature)
             << ", closed form " << num(t.closed_form) << ", r(T/2 - r/12) " << num(t.rederived);
    agree = agree && t.agrees;
    if (!t.agrees) {
      o.finding = true;
      o.require(std::abs(t.quadrature - t.rederived) <= 1e-6, "quadrature vs re-derived form");
    }
  }
  o.require(agree, "closed form disagrees with quadrature (finding; quadrature authoritative)");
}

// --- criterion 10 ------------------------------------------------------------

void scaling(Outcome& o) {
  MomentsConfig cfg;
  cfg.kernel = KernelParams{0.01, 1.0, std::nullopt};
  cfg.chaos = ChaosParams{0.5, RiemannRule::mid};
  cfg.replicates = 10000;
  cfg.seed = kSeed;
  const std::vector<double> xs{0.05, 0.1, 0.2, 0.4};
  const ScalingResult one = scaling_exponent(cfg, 1.0, xs);
  o.detail << "p=1 slope " << num(one.slope) << " +- " << num(one.std_error);
  o.require(std::abs(one.slope - 1.0) <= 3.0 * one.std_error, "p=1 slope");
  for (double p : {0.5, 2.0}) {
    const ScalingResult s = scaling_exponent(cfg, p, xs);
    const double target = multifractal_zeta(p, cfg.chaos.gamma);
    o.detail << "; p=" << num(p) << " slope " << num(s.slope) << " +- " << num(s.std_error)
             << " vs external multifractal oracle " << num(target);
    o.require(std::abs(s.slope - target) <= 0.1 * std::abs(target), "p=" + num(p) + " slope");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"kernel exactness", kernel_exactness},
      {"sampler fidelity", sampler_fidelity},
      {"degenerate chaos", degenerate_chaos},
      {"linear expectation and ergodicity", linear_expectation},
      {"Malliavin duality", malliavin_duality},
      {"mollified-inverse derivative", mollified_inverse},
      {"IBP identities", ibp_identities},
      {"positivity", positivity},
      {"deterministic triple integral", triple_integral},
      {"scaling", scaling},
  };
  int hard_failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.finding = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.pass ? "PASS" : (o.finding ? "FAIL (finding)" : "FAIL");
    std::cout << tag << " criterion " << index << ": " << name << " [" << num(seconds) << " s] " << o.detail.str()
              << std::endl;
    if (!o.pass && !o.finding) ++hard_failures;
  }
  drain_warnings();
  std::cout << (hard_failures == 0 ? "acceptance: no unexplained failures" : "acceptance: failures present")
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}
