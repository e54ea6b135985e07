// General-form partner that plants one bound state below the lowest band.
#include <algorithm>
#include <cstdio>
#include <optional>

#include "darboux/darboux.hpp"

int main() {
  const double eps = -0.35;
  const darboux::FigureResult fr = darboux::fig1_construction(0.5, eps, std::nullopt);
  std::printf("Gamma %g, %d periods each side\n", fr.gammas.front().real(), fr.periods_each_side);

  const auto& v = fr.tp.final;
  const double lowest = *std::min_element(v.values.begin(), v.values.end());
  for (const auto& s : darboux::bound_states(v, lowest - 0.01, fr.sys.E0 - 1e-6)) {
    std::printf("bound state at %.8f (target %.2f)\n", s.energy, eps);
  }
}
