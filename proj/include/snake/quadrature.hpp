#pragma once

#include <span>
#include <vector>

namespace snake {

/// Gauss–Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the n-point rule (Newton on P_n, cached for n = 8).
const GaussRule& gauss_legendre(int n);

constexpr int kGaussOrder = 8;

/// Lagrange basis weights for interpolating at `x` from `nodes`.
std::vector<double> lagrange_weights(std::span<const double> nodes, double x);

}  // namespace snake
