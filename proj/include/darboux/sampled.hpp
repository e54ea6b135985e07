#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darboux/errors.hpp"

namespace darboux {

/// Uniform grid x_i = x0 + i*dx, i < n.
struct Grid {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t n = 0;

  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  double back() const noexcept { return x(n - 1); }

  static Grid linspace(double xmin, double xmax, std::size_t n) {
    if (n < 2 || !(xmax > xmin)) throw DomainError("Grid::linspace: need n >= 2 and xmin < xmax");
    return {xmin, (xmax - xmin) / static_cast<double>(n - 1), n};
  }

  bool aligned_with(const Grid& o) const noexcept {
    return n == o.n && std::abs(x0 - o.x0) <= 1e-12 * std::max(1.0, std::abs(x0)) &&
           std::abs(dx - o.dx) <= 1e-12 * dx;
  }
};

/// Potential values on a uniform grid, optionally periodic with period T.
struct SampledPotential {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> values;
  std::optional<double> period;
  std::string label;

  Grid grid() const noexcept { return {x0, dx, values.size()}; }
  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  std::size_t size() const noexcept { return values.size(); }

  /// Samples per period; throws unless the period is an integer number of steps.
  std::size_t samples_per_period() const {
    if (!period) throw DomainError("potential '" + label + "' carries no period");
    const double steps = *period / dx;
    const double r = std::round(steps);
    if (r < 4 || std::abs(steps - r) > 1e-6 * r) {
      throw DomainError("period is not an integer multiple of the grid step");
    }
    return static_cast<std::size_t>(r);
  }
};

/// Analytic potential with its derivative.
struct PotentialFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::optional<double> period;
  std::string label;

  double operator()(double x) const { return value(x); }
};

inline SampledPotential sample(const PotentialFunction& v, const Grid& g) {
  SampledPotential s{g.x0, g.dx, std::vector<double>(g.n), v.period, v.label};
  for (std::size_t i = 0; i < g.n; ++i) s.values[i] = v.value(g.x(i));
  return s;
}

inline PotentialFunction harmonic_potential() {
  return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }, std::nullopt, "harmonic"};
}

inline PotentialFunction constant_potential(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, std::nullopt, "constant"};
}

/// Real superpotential samples with their first derivative. Indices listed in
/// `guarded` were excluded (pole proximity or vanishing denominator) and hold NaN.
struct SuperpotentialSamples {
  Grid grid;
  std::vector<double> value;
  std::vector<double> derivative;
  std::vector<std::size_t> guarded;
  double imag_spread = 0.0;
};

/// Fourth-order first derivative on a uniform grid (one-sided at the ends).
inline std::vector<double> five_point_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw ShapeError("five_point_derivative: need at least 5 samples");
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  }
  auto fwd = [&](std::size_t i) {
    return (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) / (12.0 * h);
  };
  auto bwd = [&](std::size_t i) {
    return (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) / (12.0 * h);
  };
  d[0] = fwd(0);
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
  d[n - 1] = bwd(n - 1);
  return d;
}

/// Abscissae of simple poles of a sampled function (residue of order one,
/// e.g. -psi'/psi at a node of psi). A pole between x_i and x_{i+1} forces a
/// sign change with |f_i| + |f_{i+1}| >= 4/dx; a regular zero crossing keeps
/// that sum near dx*|f'|. Non-finite samples are reported as poles as well.
inline std::vector<double> pole_abscissae(const Grid& g, std::span<const double> f) {
  std::vector<double> poles;
  const double big = 1.0 / g.dx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      poles.push_back(g.x(i));
      continue;
    }
    if (i + 1 < f.size() && std::isfinite(f[i + 1]) && (f[i] > 0) != (f[i + 1] > 0) &&
        std::abs(f[i]) + std::abs(f[i + 1]) > big) {
      // Linear interpolation of 1/f locates the crossing.
      const double a = 1.0 / f[i];
      const double b = 1.0 / f[i + 1];
      poles.push_back(g.x(i) + g.dx * a / (a - b));
    }
  }
  return poles;
}

}  // namespace darboux
