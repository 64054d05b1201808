// Potentials of Cantor measures on the first Heisenberg group with the
// kernel gauge^{-2}: mean oscillation stays bounded at the critical exponent
// 2 and grows below it; the 1/2-Holder ratio stays bounded for exponent 2.5
// and grows at 2.
//
//   ./removability_thresholds [seed]

#include <cstdio>
#include <cstdlib>

#include "carnot/carnot.hpp"

using namespace carnot;

namespace {

void print(const char* label, const SeminormReport& rep) {
  std::printf("%-26s", label);
  for (const auto& d : rep.decades) std::printf(" %10.4g", d.median);
  std::printf("   spread %6.2f%s\n", rep.spread, rep.monotone_growth ? "  growing" : "");
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const KernelSpec ks(sys.spec(), 2);

  std::printf("%-26s %10s %10s %10s\n", "decade medians", "1e-3..1e-2", "1e-2..1e-1", "1e-1..1");
  for (double s : {2.0, 1.5}) {
    const PotentialField pf(ks, CantorMeasure(sys, s, 24));
    char label[64];
    std::snprintf(label, sizeof label, "BMO, exponent %.1f", s);
    print(label, bmo_seminorm_estimate(pf, seed));
  }
  for (double s : {2.5, 2.0}) {
    const PotentialField pf(ks, CantorMeasure(sys, s, 24));
    char label[64];
    std::snprintf(label, sizeof label, "Holder 1/2, exponent %.1f", s);
    print(label, holder_seminorm_estimate(pf, 0.5, seed));
  }

  // L^p of a single atom: finite exactly when 2p < 4.
  const PotentialField atom(ks, DiscreteMeasure(sys.spec(), {sys.center()}, {1.0}));
  const Box box{Point(std::vector<double>{-1, -1, -1}), Point(std::vector<double>{2, 2, 2})};
  std::printf("\n%-6s %12s %10s\n", "p", "norm", "shell slope");
  for (double p : {1.0, 1.5, 1.9, 2.0, 3.0}) {
    const auto rep = lp_norm_estimate(atom, p, box, 20000, seed);
    std::printf("%-6.1f %12s %10.3f\n", p, rep.divergent ? "divergent" : std::to_string(rep.norm).c_str(), rep.tail_slope);
  }
  return 0;
}
