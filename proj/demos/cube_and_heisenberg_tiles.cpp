// Builds the dyadic tile of R^3 and of the first Heisenberg group, certifies
// both, and prints radii, overlap constants and box-counting dimensions.
//
//   ./cube_and_heisenberg_tiles [samples]

#include <cstdio>
#include <cstdlib>

#include "carnot/carnot.hpp"

using namespace carnot;

int main(int argc, char** argv) {
  const std::size_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  std::printf("%-14s %4s %8s %8s %10s %4s %8s %6s\n", "group", "Q", "R_in", "R_out", "overlap", "K", "volume", "dim");
  for (const auto& g : {GroupSpec::euclidean(3), GroupSpec::heisenberg(1)}) {
    const auto sys = build_default_system(g);
    const auto rep = certify_tiling(sys, samples, 0.01, 1);
    const auto fit = dimension_estimate(sys, TileCenterRange(sys, 5), {2, 3, 4, 5});
    std::printf("%-14s %4d %8.4f %8.4f %10.2e %4d %8.4f %6.3f %s\n", g.name().c_str(), g.homogeneous_dim(), sys.r_in(),
                sys.r_out(), rep.max_overlap, rep.k_estimate, rep.volume, fit.s_hat, rep.pass ? "certified" : "FAILED");
  }

  // A few level-2 Heisenberg tiles: center, and how many level-2 tiles meet
  // the ball B(p_w, R^out_w) around it (at most K).
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const double r = tile_outer_radius(sys, {0, 0});
  std::printf("\nlevel-%d Heisenberg tiles meeting B(p_w, %.4f)\n%-8s %28s %6s\n", ball_level(r), r, "address",
              "center", "meets");
  for (const TileAddress& w : {TileAddress{0, 0}, TileAddress{5, 10}, TileAddress{15, 15}}) {
    const Point c = tile_center(sys, w);
    std::printf("%-8s (%8.4f, %8.4f, %8.4f) %6d\n", w.str().c_str(), c[0], c[1], c[2],
                count_tiles_meeting_ball(sys, c, r));
  }
  return 0;
}
