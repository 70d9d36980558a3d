// Copyright 2026 The dpshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpshape/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dpshape/simplex.hpp"

namespace dpshape::optimizer {

namespace {

// The strict stability constraint is replaced by this relative margin; the
// objective pushes the output rate upward, so the bound is never active at
// an optimum.
constexpr double kStabilityMargin = 1e-9;
// Finite budgets beyond this never bind through their exponential
// coefficients and are treated as unconstrained.
constexpr double kBudgetExpCap = 50.0;

using Law = std::map<std::int64_t, double>;

// The optimization variable x, its constraint polytope, and the linear map
// from x to the per-slot increment law. One instance per variant.
struct Model {
  int dim = 0;
  // var k contributes x[k] * weight of mass at the byte offset, per pair.
  std::vector<std::vector<std::pair<std::int64_t, double>>> var_offsets;
  std::vector<std::pair<std::int64_t, double>> base_law;
  std::vector<double> b_out_coeffs;  // output byte rate = coeffs . x
  lp::LinearProgram polytope;        // objective filled per oracle call
  double b_in = 0.0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void add_rate_constraints(Model* model, double rho) {
  // efficiency: b_out <= b_in / rho;  stability: b_out >= b_in (1 + margin)
  model->polytope.a_ub.push_back(model->b_out_coeffs);
  model->polytope.b_ub.push_back(model->b_in / rho);
  std::vector<double> neg(model->b_out_coeffs);
  for (double& v : neg) v = -v;
  model->polytope.a_ub.push_back(std::move(neg));
  model->polytope.b_ub.push_back(-model->b_in * (1.0 + kStabilityMargin));
}

Model build_dps_model(const OptimizationProblem& problem) {
  const Pmf& lambda = problem.lambda;
  const PacketAlphabet& in = lambda.alphabet();
  const PacketAlphabet& out = problem.output_alphabet;
  const int n = in.count();
  const int m = out.count();

  Model model;
  model.dim = n * m;
  model.b_in = input_byte_rate(lambda);
  model.var_offsets.resize(model.dim);
  model.b_out_coeffs.assign(model.dim, 0.0);
  auto idx = [m](int i, int j) { return i * m + j; };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double li = lambda.prob_at(i);
      if (li > 0.0) {
        model.var_offsets[idx(i, j)].emplace_back(
            in.size_at(i) - out.size_at(j), li);
      }
      model.b_out_coeffs[idx(i, j)] =
          li * static_cast<double>(out.size_at(j));
    }
  }

  // Right-stochastic rows.
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(model.dim, 0.0);
    for (int j = 0; j < m; ++j) row[idx(i, j)] = 1.0;
    model.polytope.a_eq.push_back(std::move(row));
    model.polytope.b_eq.push_back(1.0);
  }

  add_rate_constraints(&model, problem.rho_target);

  const double eps_s = problem.budget.eps_size();
  const double eps_t_half = problem.budget.eps_timing() / 2.0;
  if (eps_s <= kBudgetExpCap) {
    const double bound = std::exp(eps_s);
    for (int j = 0; j < m; ++j) {
      for (int i = 1; i < n; ++i) {
        for (int k = 1; k < n; ++k) {
          if (i == k) continue;
          std::vector<double> row(model.dim, 0.0);
          row[idx(i, j)] = 1.0;
          row[idx(k, j)] -= bound;
          model.polytope.a_ub.push_back(std::move(row));
          model.polytope.b_ub.push_back(0.0);
        }
      }
    }
  }
  if (eps_t_half <= kBudgetExpCap) {
    const double bound = std::exp(eps_t_half);
    for (int j = 0; j < m; ++j) {
      for (int i = 1; i < n; ++i) {
        std::vector<double> row(model.dim, 0.0);
        row[idx(i, j)] = 1.0;
        row[idx(0, j)] -= bound;
        model.polytope.a_ub.push_back(std::move(row));
        model.polytope.b_ub.push_back(0.0);

        std::vector<double> rev(model.dim, 0.0);
        rev[idx(0, j)] = 1.0;
        rev[idx(i, j)] -= bound;
        model.polytope.a_ub.push_back(std::move(rev));
        model.polytope.b_ub.push_back(0.0);
      }
    }
  }
  return model;
}

Model build_output_pmf_model(const OptimizationProblem& problem) {
  const Pmf& lambda = problem.lambda;
  const PacketAlphabet& in = lambda.alphabet();
  const PacketAlphabet& out = problem.output_alphabet;
  const int n = in.count();
  const int m = out.count();
  const bool timing_preserving = problem.variant == Variant::kPps;
  const double event_rate = arrival_rate(lambda);

  Model model;
  model.dim = m;
  model.b_in = input_byte_rate(lambda);
  model.var_offsets.resize(m);
  model.b_out_coeffs.assign(m, 0.0);

  for (int j = 0; j < m; ++j) {
    for (int i = timing_preserving ? 1 : 0; i < n; ++i) {
      const double li = lambda.prob_at(i);
      if (li > 0.0) {
        model.var_offsets[j].emplace_back(in.size_at(i) - out.size_at(j), li);
      }
    }
    model.b_out_coeffs[j] = (timing_preserving ? event_rate : 1.0) *
                            static_cast<double>(out.size_at(j));
  }
  if (timing_preserving && lambda.prob_at(0) > 0.0) {
    model.base_law.emplace_back(0, lambda.prob_at(0));
  }

  std::vector<double> ones(m, 1.0);
  model.polytope.a_eq.push_back(std::move(ones));
  model.polytope.b_eq.push_back(1.0);
  add_rate_constraints(&model, problem.rho_target);
  return model;
}

// Objective evaluations with a shared warm-started stationary solver.
class Evaluator {
 public:
  Evaluator(const Model& model, const SolveOptions& options)
      : model_(model), fd_step_(options.fd_step) {
    auto& opts = solver_.options();
    opts.tail_tol = options.queue_tol;
    opts.method = queue_analysis::StationaryMethod::kAuto;
    opts.best_effort = false;
  }

  Law law_at(const std::vector<double>& x) const {
    Law law;
    for (const auto& [offset, weight] : model_.base_law) law[offset] += weight;
    for (int k = 0; k < model_.dim; ++k) {
      const double v = x[k];
      if (v == 0.0) continue;
      for (const auto& [offset, weight] : model_.var_offsets[k]) {
        law[offset] += v * weight;
      }
    }
    return law;
  }

  // Expected stationary backlog for a (near-)normalized law; infinity when
  // the walk is numerically critical or unstable.
  double eval_law(const Law& law) {
    std::vector<std::int64_t> support;
    std::vector<double> probs;
    double mass = 0.0;
    for (const auto& [offset, p] : law) {
      const double clipped = std::max(p, 0.0);
      if (clipped == 0.0) continue;
      support.push_back(offset);
      probs.push_back(clipped);
      mass += clipped;
    }
    if (support.empty() || mass <= 0.0) return kInfinity;
    for (double& p : probs) p /= mass;
    try {
      queue_analysis::IncrementDistribution inc(std::move(support),
                                                std::move(probs));
      if (inc.max_up_units() == 0) return 0.0;
      if (!(inc.mean_bytes() < 0.0)) return kInfinity;
      return solver_.solve(inc).expected_queue_bytes;
    } catch (const AccuracyError&) {
      return kInfinity;
    } catch (const InstabilityError&) {
      return kInfinity;
    }
  }

  double eval_x(const std::vector<double>& x) { return eval_law(law_at(x)); }

  // Gradient modulo per-row constants: finite differences of the backlog
  // over the increment-law masses, pushed through the linear map from x.
  // Row-constant shifts cancel in every Frank-Wolfe inner product because
  // feasible directions have fixed row sums.
  std::vector<double> gradient(const std::vector<double>& x, double f0) {
    const Law base = law_at(x);
    std::set<std::int64_t> offsets;
    for (const auto& [offset, weight] : model_.base_law) offsets.insert(offset);
    for (const auto& per_var : model_.var_offsets) {
      for (const auto& [offset, weight] : per_var) offsets.insert(offset);
    }

    std::map<std::int64_t, double> dmass;
    const double h = fd_step_;
    for (std::int64_t offset : offsets) {
      if (offset == 0) {
        // Extra mass at zero only adds a self-loop; the stationary law is
        // unchanged, so the normalized directional derivative vanishes.
        dmass[offset] = 0.0;
        continue;
      }
      auto it = base.find(offset);
      const double m0 = it == base.end() ? 0.0 : it->second;

      Law plus = base;
      plus[offset] += h;
      const double fp = eval_law(scaled(plus, 1.0 / (1.0 + h)));

      double derivative;
      if (m0 >= h) {
        Law minus = base;
        minus[offset] -= h;
        const double fm = eval_law(scaled(minus, 1.0 / (1.0 - h)));
        derivative = (fp - fm) / (2.0 * h);
        if (!std::isfinite(derivative)) derivative = (fp - f0) / h;
      } else {
        derivative = (fp - f0) / h;
      }
      dmass[offset] = std::isfinite(derivative) ? derivative : 0.0;
    }

    std::vector<double> grad(model_.dim, 0.0);
    for (int k = 0; k < model_.dim; ++k) {
      for (const auto& [offset, weight] : model_.var_offsets[k]) {
        grad[k] += weight * dmass[offset];
      }
    }
    return grad;
  }

 private:
  static Law scaled(Law law, double factor) {
    for (auto& [offset, p] : law) p *= factor;
    return law;
  }

  const Model& model_;
  double fd_step_;
  queue_analysis::StationarySolver solver_;
};

std::vector<double> lp_vertex(const Model& model,
                              const std::vector<double>& objective) {
  lp::LinearProgram lp = model.polytope;
  lp.objective = objective;
  lp::LpResult result = lp::solve(lp);
  if (result.status != lp::LpStatus::kOptimal) {
    throw FeasibilityError(
        result.status == lp::LpStatus::kInfeasible
            ? "optimizer: constraint polytope is empty"
            : "optimizer: linear oracle unbounded");
  }
  return result.x;
}

struct FwOutcome {
  std::vector<double> x;
  double objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

FwOutcome run_frank_wolfe(const Model& model, const SolveOptions& options) {
  Evaluator evaluator(model, options);

  // Start at the most-stable vertex: the linear oracle applied to the
  // negated output-rate coefficients, i.e. max output bytes per slot.
  std::vector<double> neg_rate(model.b_out_coeffs);
  for (double& v : neg_rate) v = -v;
  std::vector<double> x = lp_vertex(model, neg_rate);

  std::vector<std::vector<double>> vertices{x};
  std::vector<double> weights{1.0};

  auto rebuild_x = [&] {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      for (int k = 0; k < model.dim; ++k) x[k] += weights[v] * vertices[v][k];
    }
  };

  double f_x = evaluator.eval_x(x);
  double gap = kInfinity;
  int iter = 0;

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

  for (; iter < options.max_iterations; ++iter) {
    const std::vector<double> grad = evaluator.gradient(x, f_x);

    const std::vector<double> s = lp_vertex(model, grad);
    const double g_x = dot(grad, x);
    gap = g_x - dot(grad, s);
    if (gap <= options.gap_tol_rel * (1.0 + std::abs(f_x))) break;

    std::size_t away = 0;
    double away_score = -kInfinity;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      const double score = dot(grad, vertices[v]);
      if (score > away_score) {
        away_score = score;
        away = v;
      }
    }

    const bool use_fw =
        gap >= away_score - g_x || weights[away] >= 1.0 - 1e-12;
    std::vector<double> dir(model.dim, 0.0);
    double gamma_max;
    if (use_fw) {
      for (int k = 0; k < model.dim; ++k) dir[k] = s[k] - x[k];
      gamma_max = 1.0;
    } else {
      for (int k = 0; k < model.dim; ++k) dir[k] = x[k] - vertices[away][k];
      gamma_max = weights[away] / (1.0 - weights[away]);
    }

    auto phi = [&](double gamma) {
      std::vector<double> point(model.dim);
      for (int k = 0; k < model.dim; ++k) point[k] = x[k] + gamma * dir[k];
      return evaluator.eval_x(point);
    };

    // Golden-section over [0, gamma_max]; the objective is convex along
    // the segment.
    double lo = 0.0, hi = gamma_max;
    double m1 = hi - golden * (hi - lo);
    double m2 = lo + golden * (hi - lo);
    double f1 = phi(m1), f2 = phi(m2);
    double best_gamma = 0.0, best_f = f_x;
    const double f_end = phi(gamma_max);
    if (f_end < best_f) {
      best_f = f_end;
      best_gamma = gamma_max;
    }
    for (int e = 0; e < options.line_search_evals - 3; ++e) {
      if (f1 <= f2) {
        if (f1 < best_f) {
          best_f = f1;
          best_gamma = m1;
        }
        hi = m2;
        m2 = m1;
        f2 = f1;
        m1 = hi - golden * (hi - lo);
        f1 = phi(m1);
      } else {
        if (f2 < best_f) {
          best_f = f2;
          best_gamma = m2;
        }
        lo = m1;
        m1 = m2;
        f1 = f2;
        m2 = lo + golden * (hi - lo);
        f2 = phi(m2);
      }
    }
    if (f1 < best_f) {
      best_f = f1;
      best_gamma = m1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_gamma = m2;
    }

    if (!(best_f < f_x) || best_gamma == 0.0) {
      // No representable progress along either direction.
      ++iter;
      break;
    }

    if (use_fw) {
      for (double& w : weights) w *= 1.0 - best_gamma;
      bool merged = false;
      for (std::size_t v = 0; v < vertices.size(); ++v) {
        double diff = 0.0;
        for (int k = 0; k < model.dim; ++k) {
          diff = std::max(diff, std::abs(vertices[v][k] - s[k]));
        }
        if (diff <= 1e-12) {
          weights[v] += best_gamma;
          merged = true;
          break;
        }
      }
      if (!merged) {
        vertices.push_back(s);
        weights.push_back(best_gamma);
      }
    } else {
      for (double& w : weights) w *= 1.0 + best_gamma;
      weights[away] -= best_gamma;
    }

    // Prune dead vertices and renormalize the convex weights.
    for (std::size_t v = vertices.size(); v-- > 0;) {
      if (weights[v] < 1e-14) {
        vertices.erase(vertices.begin() + v);
        weights.erase(weights.begin() + v);
      }
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;

    rebuild_x();
    f_x = best_f;
  }

  FwOutcome outcome;
  outcome.objective = evaluator.eval_x(x);
  outcome.x = std::move(x);
  outcome.gap = std::min(gap, kInfinity);
  outcome.iterations = iter;
  return outcome;
}

ChannelMatrix channel_from_vars(const OptimizationProblem& problem,
                                const std::vector<double>& x) {
  const int n = problem.lambda.alphabet().count();
  const int m = problem.output_alphabet.count();
  std::vector<std::vector<double>> rows(n, std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      rows[i][j] = std::clamp(x[i * m + j], 0.0, 1.0);
      sum += rows[i][j];
    }
    for (int j = 0; j < m; ++j) rows[i][j] /= sum;
  }
  return ChannelMatrix(problem.lambda.alphabet(), problem.output_alphabet,
                       std::move(rows));
}

Pmf pmf_from_vars(const PacketAlphabet& alphabet,
                  const std::vector<double>& x) {
  std::vector<double> probs(x.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    probs[j] = std::clamp(x[j], 0.0, 1.0);
    sum += probs[j];
  }
  for (double& p : probs) p /= sum;
  return Pmf(alphabet, std::move(probs));
}

ChannelMatrix timing_preserving_channel(const PacketAlphabet& input,
                                        const Pmf& upsilon) {
  const int n = input.count();
  const int m = upsilon.count();
  std::vector<std::vector<double>> rows(n, upsilon.probs());
  rows[0].assign(m, 0.0);
  rows[0][0] = 1.0;
  return ChannelMatrix(input, upsilon.alphabet(), std::move(rows));
}

OptimizationResult solve_pad_only(const OptimizationProblem& problem) {
  const PacketAlphabet& in = problem.lambda.alphabet();
  if (!(problem.output_alphabet == in)) {
    throw InvalidArgumentError(
        "optimizer: pad-only policies require matching input and output "
        "alphabets");
  }
  const double b_in = input_byte_rate(problem.lambda);
  ChannelMatrix channel = shaping::make_pad_only_channel(in, problem.budget);
  std::optional<Pmf> output_pmf;
  switch (problem.variant) {
    case Variant::kDps:
      break;
    case Variant::kPst:
      output_pmf = Pmf::point_mass(in, in.max_size());
      channel = ChannelMatrix::rank_one(in, *output_pmf);
      break;
    case Variant::kPps:
      output_pmf = Pmf::point_mass(in, in.max_size());
      channel = timing_preserving_channel(in, *output_pmf);
      break;
  }
  const double b_out = output_byte_rate_dps(problem.lambda, channel);
  const double achieved = transmission_efficiency(b_in, b_out);
  if (achieved < problem.rho_target - privacy::kLogTolerance) {
    throw FeasibilityError(
        "optimizer: pad-only policy cannot reach the requested efficiency " +
        std::to_string(problem.rho_target) + "; it attains " +
        std::to_string(achieved));
  }
  const privacy::LdpAudit audit = privacy::ldp_level(channel);
  return OptimizationResult{
      .variant = problem.variant,
      .channel = channel,
      .output_pmf = output_pmf,
      // Departures always cover arrivals, so the backlog is identically 0.
      .objective_eq_bytes = 0.0,
      .achieved_rho = achieved,
      .realized_budget =
          PrivacyBudget(audit.eps_size_realized, audit.eps_timing_realized),
      .solver_gap = 0.0,
      .iterations = 0,
      .efficiency_capped = false,
  };
}

}  // namespace

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::kDps: return "dps";
    case Variant::kPst: return "pst";
    case Variant::kPps: return "pps";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "dps") return Variant::kDps;
  if (name == "pst") return Variant::kPst;
  if (name == "pps") return Variant::kPps;
  throw InvalidArgumentError("unknown optimizer variant: " + name);
}

shaping::Mechanism OptimizationResult::mechanism(std::uint64_t seed) const {
  switch (variant) {
    case Variant::kPst:
      return shaping::Mechanism::pst(channel.input_alphabet(), *output_pmf,
                                     seed);
    case Variant::kPps:
      return shaping::Mechanism::pps(channel.input_alphabet(), *output_pmf,
                                     seed);
    default:
      return shaping::Mechanism::dps(channel, seed);
  }
}

OptimizationResult solve(const OptimizationProblem& problem,
                         const SolveOptions& options) {
  const double b_in = input_byte_rate(problem.lambda);
  const double d_max =
      static_cast<double>(problem.output_alphabet.max_size());
  if (problem.output_alphabet.max_size() <
      problem.lambda.alphabet().max_size()) {
    throw InvalidArgumentError(
        "optimizer: output alphabet must cover the largest input size");
  }
  // Pad-only policies have a fixed achieved efficiency; the only question
  // is whether it reaches the target, checked inside.
  if (problem.pad_only) {
    if (!(problem.rho_target > 0.0 && problem.rho_target < 1.0)) {
      throw FeasibilityError("optimizer: rho target must lie in (0, 1)");
    }
    return solve_pad_only(problem);
  }

  const double rho_min = b_in / d_max;
  if (!(problem.rho_target >= rho_min && problem.rho_target < 1.0)) {
    throw FeasibilityError(
        "optimizer: rho target " + std::to_string(problem.rho_target) +
        " outside the feasible range [" + std::to_string(rho_min) + ", 1)");
  }

  if (problem.variant == Variant::kPps) {
    const double max_b_out = arrival_rate(problem.lambda) * d_max;
    if (!(max_b_out > b_in * (1.0 + kStabilityMargin))) {
      throw FeasibilityError(
          "optimizer: timing-preserving shaping is unstable for this input; "
          "event-slot capacity " +
          std::to_string(max_b_out) + " bytes/slot does not exceed the " +
          std::to_string(b_in) + " bytes/slot arriving");
    }
  }

  const Model model = problem.variant == Variant::kDps
                          ? build_dps_model(problem)
                          : build_output_pmf_model(problem);

  FwOutcome outcome = run_frank_wolfe(model, options);

  OptimizationResult result{
      .variant = problem.variant,
      .channel = problem.variant == Variant::kDps
                     ? channel_from_vars(problem, outcome.x)
                     : ChannelMatrix::identity(problem.lambda.alphabet()),
      .output_pmf = std::nullopt,
      .objective_eq_bytes = outcome.objective,
      .achieved_rho = 0.0,
      .realized_budget = PrivacyBudget::unconstrained(),
      .solver_gap = outcome.gap,
      .iterations = outcome.iterations,
      .efficiency_capped = false,
  };
  if (problem.variant != Variant::kDps) {
    result.output_pmf = pmf_from_vars(problem.output_alphabet, outcome.x);
    result.channel =
        problem.variant == Variant::kPst
            ? ChannelMatrix::rank_one(problem.lambda.alphabet(),
                                      *result.output_pmf)
            : timing_preserving_channel(problem.lambda.alphabet(),
                                        *result.output_pmf);
  }

  const double b_out = dot(model.b_out_coeffs, outcome.x);
  result.achieved_rho = transmission_efficiency(b_in, b_out);

  // Largest output rate the polytope supports; when it falls short of the
  // efficiency bound, the bound cannot be tight at the optimum.
  std::vector<double> neg_rate(model.b_out_coeffs);
  for (double& v : neg_rate) v = -v;
  const double attainable = -lp::solve([&] {
                               lp::LinearProgram lp = model.polytope;
                               lp.objective = neg_rate;
                               return lp;
                             }())
                                 .objective_value;
  result.efficiency_capped = attainable < b_in / problem.rho_target - 1e-9;

  const privacy::LdpAudit audit = privacy::ldp_level(result.channel);
  result.realized_budget =
      PrivacyBudget(audit.eps_size_realized, audit.eps_timing_realized);
  return result;
}

DeterministicRate deterministic_rate(const Pmf& lambda, double rho,
                                     shaping::MechanismKind kind,
                                     std::int64_t mtu_bytes) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw InvalidArgumentError(
        "deterministic_rate: rho must be in (0, 1), got " +
        std::to_string(rho));
  }
  const double b_in = input_byte_rate(lambda);
  double value = b_in / rho;
  if (kind == shaping::MechanismKind::kPpsStar) {
    const double events = arrival_rate(lambda);
    if (!(events > 0.0)) {
      throw InvalidArgumentError(
          "deterministic_rate: no event packets ever arrive");
    }
    value /= events;
  } else if (kind != shaping::MechanismKind::kPstStar) {
    throw InvalidArgumentError(
        "deterministic_rate: only the constant-size kinds have a rate");
  }
  // The guard keeps exact-integer targets from rounding up one extra byte.
  std::int64_t size =
      static_cast<std::int64_t>(std::ceil(value - kProbTolerance));
  if (kind == shaping::MechanismKind::kPstStar &&
      static_cast<double>(size) <= b_in) {
    size = static_cast<std::int64_t>(std::floor(b_in)) + 1;
  }
  return DeterministicRate{size, size > mtu_bytes};
}

std::vector<SweepEntry> sweep(const Pmf& lambda,
                              const PacketAlphabet& output_alphabet,
                              const std::vector<SweepPoint>& grid,
                              const SolveOptions& options) {
  std::vector<SweepEntry> entries;
  entries.reserve(grid.size());
  for (const SweepPoint& point : grid) {
    SweepEntry entry{point, "ok", std::nullopt};
    try {
      OptimizationProblem problem{
          .lambda = lambda,
          .output_alphabet = output_alphabet,
          .rho_target = point.rho,
          .budget = point.budget,
          .variant = point.variant,
          .pad_only = point.pad_only,
      };
      entry.result = solve(problem, options);
    } catch (const Error& e) {
      entry.status = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

double expected_queue_bytes(const Pmf& lambda,
                            const shaping::Mechanism& mechanism, double tol) {
  const auto inc =
      queue_analysis::increment_distribution(lambda, mechanism,
                                             /*require_stable=*/false);
  if (inc.max_up_units() == 0) return 0.0;  // departures always cover arrivals
  if (!(inc.mean_bytes() < 0.0)) {
    throw InstabilityError(
        "expected_queue_bytes: configuration is unstable (mean increment " +
        std::to_string(inc.mean_bytes()) + " bytes/slot)");
  }
  return queue_analysis::stationary_expected_queue(inc, tol)
      .expected_queue_bytes;
}

}  // namespace dpshape::optimizer
