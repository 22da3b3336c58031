#include "mvsg/metric.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mvsg/error.hpp"

namespace mvsg {

namespace {

void check_feasible(double mass, double volume, double view_mass, double view_volume) {
  if (!(volume >= 1.0) || !(view_volume > 0.0) || !(view_mass > 0.0)) {
    throw InfeasibleViewError("view_nll: requires v >= 1, C > 0, V > 0", 0);
  }
  if (!(mass > 0.0)) throw InfeasibleViewError("view_nll: block mass is zero", 0);
  if (!(mass / volume > view_mass / view_volume)) {
    throw InfeasibleViewError("view_nll: block density does not exceed view density", 0);
  }
}

}  // namespace

double view_nll(double c, double v, double C, double V) {
  check_feasible(c, v, C, V);
  return v * std::log(C / V) + v * std::log(v) - v - std::log(v) - v * std::log(c) +
         std::log(c) + V * c / C;
}

double density_nll(double rho, double P, double v) {
  if (!(v >= 1.0) || !(P > 0.0)) throw InfeasibleViewError("density_nll: requires v >= 1, P > 0", 0);
  if (!(rho > P)) throw InfeasibleViewError("density_nll: rho must exceed P", 0);
  return v * std::log(P) - v * std::log(rho) - v + std::log(rho) + v * rho / P;
}

double exact_view_nll(double c, double v, double C, double V) {
  check_feasible(c, v, C, V);
  // -log Gamma(c; shape v, rate V/C)
  const double rate = V / C;
  return -v * std::log(rate) + std::lgamma(v) - (v - 1.0) * std::log(c) + rate * c;
}

double view_score_or_nan(const BlockState& block, std::size_t view) {
  const View& vw = block.graph().view(view);
  const double c = block.mass(view);
  const double v = block.volume();
  if (v < 1.0 || !vw.eligible() || !(c > 0.0) || !(c / v > vw.density)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return view_nll(c, v, vw.mass, block.graph().volume());
}

BlockScore suspiciousness(const BlockState& block, std::span<const std::size_t> views) {
  BlockScore score;
  score.per_view.reserve(views.size());
  for (std::size_t i : views) {
    const View& vw = block.graph().view(i);
    const double f = view_score_or_nan(block, i);
    if (std::isnan(f)) {
      throw InfeasibleViewError("view '" + vw.name + "' violates rho > P for this block", i);
    }
    score.per_view.push_back({i, f, block.mass(i), block.density(i), vw.density});
    score.total += f;
  }
  return score;
}

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::Mass: return "mass";
    case Baseline::AvgDeg: return "avgdeg";
    case Baseline::Dens: return "dens";
    case Baseline::SingVal: return "singval";
  }
  return "?";
}

Baseline parse_baseline(std::string_view name) {
  for (Baseline b : kAllBaselines) {
    if (to_string(b) == name) return b;
  }
  throw InputError("unknown baseline '" + std::string(name) + "'");
}

DenseMatrix aggregated_adjacency(const BlockState& block, std::span<const std::size_t> views) {
  const auto nodes = block.sorted_nodes();
  DenseMatrix a{nodes.size(), std::vector<double>(nodes.size() * nodes.size(), 0.0)};
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    for (std::size_t c = r + 1; c < nodes.size(); ++c) {
      double w = 0.0;
      for (std::size_t i : views) w += block.graph().pair_weight(i, nodes[r], nodes[c]);
      a.at(r, c) = w;
      a.at(c, r) = w;
    }
  }
  return a;
}

double leading_singular_value(const DenseMatrix& a, double rel_tol, int max_iterations) {
  const std::size_t n = a.n;
  if (n == 0) return 0.0;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  std::vector<double> z(n);
  auto multiply = [&](const std::vector<double>& in, std::vector<double>& out, bool transpose) {
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += (transpose ? a.at(c, r) : a.at(r, c)) * in[c];
      out[r] = s;
    }
  };
  double sigma = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    multiply(x, y, false);
    const double norm_y = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    if (norm_y == 0.0) return 0.0;
    multiply(y, z, true);
    const double norm_z = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
    // ||A^T A x|| for unit x converges to sigma^2.
    const double next = std::sqrt(norm_z);
    for (std::size_t r = 0; r < n; ++r) x[r] = z[r] / norm_z;
    if (it > 0 && std::abs(next - sigma) <= rel_tol * next) return next;
    sigma = next;
  }
  throw ConvergenceError("power iteration did not converge within " +
                         std::to_string(max_iterations) + " iterations (last estimate " +
                         std::to_string(sigma) + ")");
}

double baseline_score(Baseline kind, const BlockState& block, std::span<const std::size_t> views) {
  if (block.size() == 0) return 0.0;
  double mass = 0.0;
  for (std::size_t i : views) mass += block.mass(i);
  switch (kind) {
    case Baseline::Mass: return mass;
    case Baseline::AvgDeg: return mass / static_cast<double>(block.size());
    case Baseline::Dens: return block.volume() > 0.0 ? mass / block.volume() : 0.0;
    case Baseline::SingVal:
      if (mass == 0.0) return 0.0;
      return leading_singular_value(aggregated_adjacency(block, views));
  }
  return 0.0;
}

}  // namespace mvsg
