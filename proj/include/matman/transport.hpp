#pragma once

#include <vector>

#include <Eigen/Dense>

namespace matman {

/// Exact optimal transport cost between discrete measures `a` (sources) and
/// `b` (sinks) of equal mass, with cost(i, j). Solved as a min-cost flow
/// by successive shortest paths; intended for supports of a few dozen atoms.
double transport_cost(const std::vector<double>& a, const std::vector<double>& b,
                      const Eigen::MatrixXd& cost, Eigen::MatrixXd* plan = nullptr);

}  // namespace matman
