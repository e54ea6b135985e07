// Displace a Lame potential by a Darboux step and check it is a pure translation.
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "darboux/darboux.hpp"

int main() {
  const darboux::LameSystem sys = darboux::make_lame(0.5);
  const double delta = 0.7;
  const auto grid = darboux::Grid::linspace(-3 * sys.inv.omega, 3 * sys.inv.omega, 1201);

  const auto alpha = darboux::Superpotential::zeta_form(sys, delta);
  const darboux::SampledPotential shifted = darboux::displaced_potential(alpha, grid);

  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    worst = std::max(worst, std::abs(shifted.values[i] - darboux::lame_potential(grid.x(i) + delta, sys)));
  }
  std::printf("factorization energy %.12f\n", alpha.epsilon());
  std::printf("max |V + alpha' - V(x + delta)| = %.3g\n", worst);
}
