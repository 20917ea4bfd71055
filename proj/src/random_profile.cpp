#include "nehari/random_profile.hpp"

#include <algorithm>
#include <cmath>

namespace nehari {

double PiecewiseLinear::operator()(double r) const {
  if (r <= x.front()) return y.front();
  if (r >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double s = (r - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + s * (y[j] - y[j - 1]);
}

RadialField PiecewiseLinear::sample(const GridPtr& grid) const {
  return RadialField::sample(grid, [this](double r) { return (*this)(r); });
}

PiecewiseLinear random_profile(std::mt19937_64& gen, double radius, bool sign_changing,
                               std::size_t knots) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PiecewiseLinear f;
  f.x.push_back(0.0);
  for (std::size_t i = 0; i < knots; ++i) {
    const double u = unit(gen);
    f.x.push_back(0.6 * radius * u * u);
  }
  f.x.push_back(radius);
  std::sort(f.x.begin(), f.x.end());
  f.x.erase(std::unique(f.x.begin(), f.x.end()), f.x.end());
  const double amp = std::pow(10.0, 2.0 * unit(gen) - 1.0);
  for (std::size_t i = 0; i + 1 < f.x.size(); ++i) {
    const double v = unit(gen);
    f.y.push_back(amp * (sign_changing ? 2.0 * v - 1.0 : v));
  }
  f.y.push_back(0.0);
  return f;
}

std::vector<PiecewiseLinear> random_profiles(std::mt19937_64& gen, double radius, std::size_t d,
                                             bool sign_changing, std::size_t knots) {
  std::vector<PiecewiseLinear> out;
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) out.push_back(random_profile(gen, radius, sign_changing, knots));
  return out;
}

FieldVector sample_all(const std::vector<PiecewiseLinear>& profiles, const GridPtr& grid) {
  std::vector<RadialField> comps;
  comps.reserve(profiles.size());
  for (const auto& f : profiles) comps.push_back(f.sample(grid));
  return FieldVector(std::move(comps));
}

}  // namespace nehari
