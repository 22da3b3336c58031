#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvsg/graph.hpp"

namespace mvsg {

// Negative log-likelihood of block mass c over volume v in a view with total
// mass C over volume V, Stirling-simplified:
//   v log(C/V) + v log v - v - log v - v log c + log c + V c / C
// Requires v >= 1, c > 0, C > 0, V > 0 and c/v > C/V; throws
// InfeasibleViewError otherwise (view index 0 unless the caller rethrows).
double view_nll(double mass, double volume, double view_mass, double view_volume);

// The same quantity parameterized by densities:
//   v log P - v log rho - v + log rho + v rho / P
double density_nll(double density, double view_density, double volume);

// Exact Gamma(v, V/C) log-density without Stirling's approximation. Only for
// diagnostics; the search never uses it.
double exact_view_nll(double mass, double volume, double view_mass, double view_volume);

struct ViewScore {
  std::size_t view = 0;
  double f = 0.0;
  double mass = 0.0;
  double density = 0.0;
  double graph_density = 0.0;
};

struct BlockScore {
  double total = 0.0;
  std::vector<ViewScore> per_view;  // in the order the views were given
};

// Score over the selected views only. Throws InfeasibleViewError naming the
// first selected view with rho_i <= P_i or c_i = 0.
BlockScore suspiciousness(const BlockState& block, std::span<const std::size_t> views);

// f_i of one view, or NaN when the view is ineligible or rho_i <= P_i.
double view_score_or_nan(const BlockState& block, std::size_t view);

enum class Baseline { Mass, AvgDeg, Dens, SingVal };

std::string_view to_string(Baseline b);
Baseline parse_baseline(std::string_view name);
inline constexpr Baseline kAllBaselines[] = {Baseline::Mass, Baseline::AvgDeg, Baseline::Dens,
                                             Baseline::SingVal};

// Mass = sum c_i, AvgDeg = sum c_i / n, Dens = sum c_i / v, SingVal = leading
// singular value of the block adjacency aggregated (summed) over `views`.
// Empty blocks score 0.
double baseline_score(Baseline kind, const BlockState& block, std::span<const std::size_t> views);

// Dense symmetric n x n matrix in row-major order.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double& at(std::size_t r, std::size_t c) { return data[r * n + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

// Weighted adjacency of the block's nodes (sorted order), summed over views.
DenseMatrix aggregated_adjacency(const BlockState& block, std::span<const std::size_t> views);

// Leading singular value by power iteration on A^T A from the all-ones
// vector, to `rel_tol` relative change. Throws ConvergenceError after
// `max_iterations`.
double leading_singular_value(const DenseMatrix& a, double rel_tol = 1e-8,
                              int max_iterations = 10000);

}  // namespace mvsg
