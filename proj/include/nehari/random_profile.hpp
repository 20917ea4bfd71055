#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/radial.hpp"

namespace nehari {

/// Piecewise-linear profile on [0, R] with value 0 at R. Grid independent,
/// so the same profile can be sampled on successively refined grids.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;

  double operator()(double r) const;
  RadialField sample(const GridPtr& grid) const;
};

/// Random knots (clustered towards the origin) with values in [-1, 1]
/// (or [0, 1] when !sign_changing), times an amplitude 10^U(-1, 1).
PiecewiseLinear random_profile(std::mt19937_64& gen, double radius, bool sign_changing,
                               std::size_t knots = 8);

std::vector<PiecewiseLinear> random_profiles(std::mt19937_64& gen, double radius, std::size_t d,
                                             bool sign_changing, std::size_t knots = 8);

FieldVector sample_all(const std::vector<PiecewiseLinear>& profiles, const GridPtr& grid);

}  // namespace nehari
