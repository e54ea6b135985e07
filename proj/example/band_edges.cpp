// Lowest band edges of the Lame potential from one tabulated period.
#include <cstdio>

#include "darboux/darboux.hpp"

int main() {
  for (double m : {0.25, 0.5, 0.75}) {
    const darboux::LameSystem sys = darboux::make_lame(m);
    const double t = sys.period();
    auto v = darboux::sample(darboux::lame_function(sys), darboux::Grid{0.0, t / 4000.0, 4001});
    v.period = t;
    const auto edges = darboux::lowest_band_edges(v, 3);
    std::printf("m=%.2f:", m);
    for (const auto& e : edges) std::printf(" %.10f", e.energy);
    std::printf("   exact %.10f %.10f %.10f\n", sys.E0, sys.E1, sys.E1p);
  }
}
