// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are the published acceptance thresholds; none
// are relaxed here.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/carnot.hpp"

using namespace carnot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-28s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), t);
  std::fflush(stdout);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : INFINITY;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// -------------------------------------------------------------------------

Outcome group_axioms() {
  std::string detail;
  bool pass = true;
  for (const auto& g : {GroupSpec::heisenberg(1), random_rational_step2(3, 2, 17)}) {
    GroupCheckOptions opt;
    opt.n_triples = 10000;
    opt.haar_samples = 0;
    opt.quasi_samples = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = group_invariant_suite(g, 1, opt);
    const double worst = std::max({rep.associativity, rep.identity, rep.inverse});
    const double t = seconds_since(t0);
    pass = pass && worst < 1e-9 && t < 5.0;
    detail += "Q=" + std::to_string(g.homogeneous_dim()) + " err " + fmt("%.1e", worst) + " in " + fmt("%.2f s; ", t);
  }
  return {pass, detail};
}

Outcome homogeneity() {
  const auto g = GroupSpec::heisenberg(1);
  GroupCheckOptions opt;
  opt.n_triples = 10000;
  const auto rep = group_invariant_suite(g, 2, opt);
  const auto kr = kernel_smoothness_check(g, KernelSpec(g, 2), 10000, 2);
  const double exact = std::max({rep.homogeneity, rep.automorphism, kr.homogeneity_defect});
  const double haar_rel = std::abs(rep.haar_exponent - 4.0) / 4.0;
  return {exact < 1e-12 && haar_rel < 0.02,
          "dilation identities " + fmt("%.1e", exact) + ", Haar exponent " + fmt("%.4f", rep.haar_exponent) + " (Q = 4)"};
}

Outcome certification() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = certify_tiling(build_default_system(GroupSpec::heisenberg(1)), 1000000, 0.01, 3);
  double worst_pair = 0.0;
  for (const auto& o : h.overlaps) worst_pair = std::max(worst_pair, o.ratio);
  const auto c = certify_tiling(build_default_system(GroupSpec::euclidean(3)), 1000000, 0.01, 3);
  auto digits = default_digits(GroupSpec::heisenberg(1));
  digits[5] = digits[3];
  TileSystemOptions lenient;
  lenient.allow_duplicate_digits = true;
  const auto bad = certify_tiling(build_system(GroupSpec::heisenberg(1), digits, lenient), 1000000, 0.01, 3);
  const double t = seconds_since(t0);
  const bool pass = h.pass && worst_pair < 0.01 && c.pass && c.max_overlap < 1e-3 && !bad.pass && t < 60.0;
  return {pass, "H1 max pair " + fmt("%.4f", worst_pair) + ", cube " + fmt("%.1e", c.max_overlap) + ", corrupted " +
                    fmt("%.4f", bad.max_overlap) + (bad.pass ? " (passed!)" : " (fails)")};
}

Outcome bounded_overlap() {
  std::string detail;
  bool pass = true;
  for (const auto& g : {GroupSpec::heisenberg(1), GroupSpec::euclidean(3)}) {
    const auto sys = build_default_system(g);
    std::vector<int> ks;
    for (int m = 2; m <= 5; ++m) ks.push_back(estimate_overlap_constant(sys, m, 400, derive_seed(1, m)).k_max);
    const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
    pass = pass && *hi - *lo <= 1 && *lo >= 1;
    detail += "Q=" + std::to_string(g.homogeneous_dim()) + " K";
    for (int k : ks) detail += " " + std::to_string(k);
    detail += "; ";
  }
  return {pass, detail};
}

Outcome dimension() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const auto& g = sys.spec();
  const std::vector<int> levels{2, 3, 4, 5, 6};
  bool pass = true;
  std::string detail;
  auto timed = [&](const char* name, double target, double tol, const std::function<DimensionFit()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fit = f();
    const double t = seconds_since(t0);
    pass = pass && std::abs(fit.s_hat - target) <= tol && t < 60.0;
    detail += std::string(name) + " " + fmt("%.3f", fit.s_hat) + "; ";
  };
  timed("full", 4.0, 0.15, [&] { return dimension_estimate(sys, TileCenterRange(sys, 6), levels); });
  timed("vertical", 2.0, 0.15, [&] {
    const double half = segment_half_length_inside(sys, sys.center(), 2, 0.2);
    return dimension_estimate(sys, segment_points(g, sys.center(), 2, half, 1u << 16), levels);
  });
  timed("horizontal", 1.0, 0.1, [&] {
    const double half = segment_half_length_inside(sys, sys.center(), 0, 0.4);
    return dimension_estimate(sys, segment_points(g, sys.center(), 0, half, 1u << 14), levels);
  });
  timed("cantor 2.5", 2.5, 0.2, [&] { return dimension_estimate(sys, cantor_subsystem(sys, 2.5, 8).points(), levels); });
  return {pass, detail};
}

Outcome partition() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  double sum_err = 0.0;
  double theta_err = 0.0;
  std::vector<std::vector<double>> per_order(2);
  for (int m = 2; m <= 5; ++m) {
    const auto part = build_partition(sys, sibling_tiles(sys, m));
    const auto rep = verify_partition(sys, part, 10000, derive_seed(6, m));
    sum_err = std::max(sum_err, rep.sum_error);
    theta_err = std::max(theta_err, rep.theta_error);
    for (int k = 1; k <= 2; ++k) {
      double mx = 0.0;
      for (const auto& e : rep.c_alpha)
        if (e.alpha.order() == k) mx = std::max(mx, e.c_alpha);
      per_order[static_cast<std::size_t>(k - 1)].push_back(mx);
    }
  }
  const double s1 = spread(per_order[0]);
  const double s2 = spread(per_order[1]);
  return {sum_err < 1e-8 && theta_err < 1e-12 && s1 <= 3.0 && s2 <= 3.0,
          "sum " + fmt("%.1e", sum_err) + ", theta " + fmt("%.1e", theta_err) + ", C_a spread |a|=1 " + fmt("%.2f", s1) +
              " |a|=2 " + fmt("%.2f", s2)};
}

Outcome cutoff() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const auto pts = cantor_subsystem(sys, 2.0, 8).points();
  std::vector<std::vector<double>> by_order(3);
  for (int k = 2; k <= 6; ++k) {
    const auto cut = build_cutoff(sys, pts, std::ldexp(sys.diameter(), -k));
    const auto rep = cutoff_lp_report(sys, cut, 2, 1.0, 2, 4000, derive_seed(7, k));
    for (int o = 0; o <= 2; ++o) {
      double mx = 0.0;
      for (const auto& r : rep.rows)
        if (r.alpha.order() == o) mx = std::max(mx, r.ratio);
      by_order[static_cast<std::size_t>(o)].push_back(mx);
    }
  }
  bool pass = true;
  std::string detail = "ratio spread";
  for (int o = 0; o <= 2; ++o) {
    const double s = spread(by_order[static_cast<std::size_t>(o)]);
    pass = pass && s <= 5.0;
    detail += " |a|=" + std::to_string(o) + " " + fmt("%.2f", s);
  }
  return {pass, detail};
}

Outcome bmo() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const KernelSpec ks(sys.spec(), 2);
  const auto t0 = std::chrono::steady_clock::now();
  const auto crit = bmo_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.0, 24)), 8);
  const auto sub = bmo_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 1.5, 24)), 8);
  const double t = seconds_since(t0);
  return {crit.spread <= 4.0 && sub.monotone_growth && sub.decades.size() >= 3 && t < 120.0,
          "critical spread " + fmt("%.2f", crit.spread) + ", exponent 1.5 spread " + fmt("%.2f", sub.spread) +
              (sub.monotone_growth ? " monotone" : " not monotone")};
}

Outcome holder() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const KernelSpec ks(sys.spec(), 2);
  const auto t0 = std::chrono::steady_clock::now();
  const auto margin = holder_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.5, 24)), 0.5, 9);
  const auto none = holder_seminorm_estimate(PotentialField(ks, CantorMeasure(sys, 2.0, 24)), 0.5, 9);
  const double t = seconds_since(t0);
  return {margin.spread <= 4.0 && none.monotone_growth && t < 120.0,
          "exponent 2.5 spread " + fmt("%.2f", margin.spread) + ", exponent 2.0 spread " + fmt("%.2f", none.spread) +
              (none.monotone_growth ? " growing" : " not growing")};
}

Outcome kernel() {
  const auto sys = build_default_system(GroupSpec::heisenberg(1));
  const auto& g = sys.spec();
  const KernelSpec ks(g, 2);
  const auto rep = kernel_smoothness_check(g, ks, 10000, 10);
  const PotentialField pf(ks, CantorMeasure(sys, 2.0, 16));
  const Point dir(std::vector<double>{0.6, -0.3, 0.5});
  std::vector<double> lx, ly;
  for (double r : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::abs(pf.eval(dilate(g, r / gauge(g, dir), dir)))));
  }
  const double slope = detail::ls_slope(lx, ly);
  const bool pass = std::abs(rep.bound_constant - 1.0) < 1e-12 && std::isfinite(rep.c_smooth) &&
                    rep.dilation_defect < 1e-10 && rep.band_spread <= 3.0 && std::abs(slope - ks.exponent()) <= 0.05;
  return {pass, "bound " + fmt("%.6f", rep.bound_constant) + ", C " + fmt("%.3f", rep.c_smooth) + ", band spread " +
                    fmt("%.2f", rep.band_spread) + ", dilation " + fmt("%.1e", rep.dilation_defect) + ", far slope " +
                    fmt("%.4f", slope)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "carnot_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> commands = {
      "group check --seed 11",
      "tile certify --seed 11 --samples 100000",
      "measure frostman --seed 11 --depth 10 --balls 2000",
      "hp cutoff --seed 11 --quad 1000",
      "potential bmo --seed 11",
      "potential lp --seed 11 --p 2",
  };
  int identical = 0;
  std::string bad;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string files[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path out = dir / (std::to_string(i) + "_" + std::to_string(r));
      const int code = shell(std::string(CARNOT_GMT_PATH) + " " + commands[i] + " --workers 1 --out " + out.string() +
                             " > " + (out.string() + ".json") + " 2>/dev/null");
      files[r] = code == 0 ? slurp(out.string() + ".json") : "exit " + std::to_string(code);
    }
    if (files[0] == files[1] && !files[0].empty() && files[0][0] == '{') {
      ++identical;
    } else {
      bad += " [" + commands[i] + "]";
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical" + bad};
}

}  // namespace

int main() {
  criterion(1, "group axioms", group_axioms);
  criterion(2, "homogeneity and Haar", homogeneity);
  criterion(3, "tiling certification", certification);
  criterion(4, "bounded overlap", bounded_overlap);
  criterion(5, "dimension estimator", dimension);
  criterion(6, "partition of unity", partition);
  criterion(7, "cutoff L^p bounds", cutoff);
  criterion(8, "BMO counterexample", bmo);
  criterion(9, "Holder counterexample", holder);
  criterion(10, "kernel estimates", kernel);
  criterion(11, "determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
