// carnot-gmt: command-line experiments over the carnot library.
//
//   carnot-gmt <group|tile|measure|hp|potential> <verb> --group NAME|PATH --seed N --out DIR [flags]
//
// Exit codes: 0 pass, 1 numerical or assertion failure, 2 usage or config error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carnot/carnot.hpp"

namespace fs = std::filesystem;
using carnot::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string group = "heisenberg:1";
  double kappa = 1.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
  std::string digits;
};

// Failure of a computed check, as opposed to a bad request.
struct CheckFailed {
  json report;
};

std::uint64_t need_seed(const Common& c) {
  if (!c.seed) throw carnot::Error("--seed is required for this command");
  return *c.seed;
}

carnot::GroupSpec load(const Common& c) { return carnot::load_group(c.group, c.kappa); }

json base_config(const Common& c, const carnot::GroupSpec& g) {
  json cfg = {{"group", c.group}, {"group_spec", carnot::group_to_json(g)}, {"workers", c.workers}};
  if (!c.digits.empty()) cfg["digits"] = c.digits;
  return cfg;
}

std::vector<carnot::Point> read_digits(const carnot::GroupSpec& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw carnot::Error("cannot open digit file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw carnot::Error(std::string("malformed digit JSON: ") + e.what());
  }
  const json& list = j.is_object() ? j.at("digits") : j;
  std::vector<carnot::Point> out;
  for (const auto& row : list) {
    if (!row.is_array() || static_cast<int>(row.size()) != g.dim()) throw carnot::Error("digit has wrong dimension");
    carnot::Point p(g.dim());
    for (int i = 0; i < g.dim(); ++i) p[i] = row[static_cast<std::size_t>(i)].get<double>();
    out.push_back(p);
  }
  return out;
}

carnot::TileSystem make_system(const Common& c, const carnot::GroupSpec& g, bool lenient) {
  carnot::TileSystemOptions opt;
  opt.allow_duplicate_digits = lenient;
  if (c.digits.empty()) return carnot::build_default_system(g, opt);
  return carnot::build_system(g, read_digits(g, c.digits), opt);
}

/// "a..b" gives the integers a..b; otherwise a comma list.
std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  try {
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const int a = std::stoi(s.substr(0, dots));
      const int b = std::stoi(s.substr(dots + 2));
      if (b < a) throw carnot::Error("empty level range: " + s);
      for (int m = a; m <= b; ++m) out.push_back(m);
      return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  } catch (const std::invalid_argument&) {
    throw carnot::Error("bad level list: " + s);
  } catch (const std::out_of_range&) {
    throw carnot::Error("bad level list: " + s);
  }
  if (out.empty()) throw carnot::Error("bad level list: " + s);
  return out;
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw carnot::Error("expected a range lo..hi: " + s);
  try {
    const double a = std::stod(s.substr(0, dots));
    const double b = std::stod(s.substr(dots + 2));
    if (!(a < b)) throw carnot::Error("empty range: " + s);
    return {a, b};
  } catch (const std::invalid_argument&) {
    throw carnot::Error("bad range: " + s);
  }
}

fs::path out_dir(const Common& c, bool required) {
  if (c.out.empty()) {
    if (required) throw carnot::Error("--out is required for this command");
    return {};
  }
  fs::create_directories(c.out);
  return fs::path(c.out);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw carnot::Error("cannot write " + path.string());
  f << text;
}

void emit(const Common& c, const std::string& name, const json& report) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  const fs::path dir = out_dir(c, false);
  if (!dir.empty()) write_text(dir / (name + ".json"), text);
}

std::string word_string(const std::vector<int>& letters) {
  std::string s;
  for (std::size_t i = 0; i < letters.size(); ++i) s += (i ? "." : "") + std::to_string(letters[i] + 1);
  return s;
}

// ---------------------------------------------------------------------------
// group

struct GroupArgs {
  std::size_t triples = 10000;
  std::size_t haar_samples = 1000000;
};

json cmd_group_check(const Common& c, const GroupArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  carnot::GroupCheckOptions opt;
  opt.n_triples = a.triples;
  opt.haar_samples = a.haar_samples;
  json cfg = base_config(c, g);
  cfg["triples"] = a.triples;
  cfg["haar_samples"] = a.haar_samples;
  const auto rep = carnot::group_invariant_suite(g, carnot::derive_seed(seed, "group.check"), opt);
  json out = carnot::stamp_report("group check", cfg, seed, carnot::to_json(rep));
  if (!rep.pass) throw CheckFailed{out};
  return out;
}

// ---------------------------------------------------------------------------
// tile

struct TileArgs {
  int level = 2;
  std::size_t per_tile = 4;
  int depth = 8;
  std::size_t samples = 1000000;
  std::size_t radii_samples = 20000;
  double tol = 0.01;
  int k_level = 2;
};

json cmd_tile_render(const Common& c, const TileArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, false);
  const fs::path dir = out_dir(c, true);
  if (a.level < 0 || std::pow(static_cast<double>(sys.size()), a.level) > 1 << 20)
    throw carnot::Error("render level out of range");
  json cfg = base_config(c, g);
  cfg.update({{"level", a.level}, {"per_tile", a.per_tile}, {"depth", a.depth}});
  const auto tiles = sys.level_addresses(a.level);
  std::string csv = carnot::csv_header(g, false) + "\n";
  std::size_t rows = 0;
  for (const auto& w : tiles) {
    const auto pts = carnot::sample_tile(sys, w, a.per_tile, a.depth, carnot::derive_seed(seed, w.key(sys.size())));
    for (const auto& p : pts) {
      csv += carnot::csv_row(a.level, w.str(), p) + "\n";
      ++rows;
    }
  }
  const std::string file = "tiles_level" + std::to_string(a.level) + ".csv";
  write_text(dir / file, csv);
  json body = {{"level", a.level}, {"n_tiles", tiles.size()}, {"n_points", rows}, {"csv", file},
               {"center", carnot::to_json(sys.center())}, {"R_out", sys.r_out()}};
  return carnot::stamp_report("tile render", cfg, seed, body);
}

json cmd_tile_certify(const Common& c, const TileArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, true);
  json cfg = base_config(c, g);
  cfg.update({{"samples", a.samples}, {"tol", a.tol}, {"k_level", a.k_level}});
  carnot::CertifyOptions opt;
  opt.workers = c.workers;
  opt.k_level = a.k_level;
  const auto rep = carnot::certify_tiling(sys, a.samples, a.tol, carnot::derive_seed(seed, "tile.certify"), opt);
  json out = carnot::stamp_report("tile certify", cfg, seed, carnot::to_json(rep));
  if (!rep.pass) throw CheckFailed{out};
  return out;
}

json cmd_tile_radii(const Common& c, const TileArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, false);
  json cfg = base_config(c, g);
  cfg["samples"] = a.radii_samples;
  const auto r = carnot::estimate_radii(sys, static_cast<int>(a.radii_samples), carnot::derive_seed(seed, "tile.radii"));
  json body = {{"R_in", r.r_in},
               {"R_out", r.r_out},
               {"center", carnot::to_json(sys.center())},
               {"diameter", sys.diameter()},
               {"quasi_constant", sys.quasi_constant()},
               {"M", sys.size()},
               {"bounding_box_volume", sys.bounding_box_volume()}};
  return carnot::stamp_report("tile radii", cfg, seed, body);
}

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
  std::string set = "full";
  std::string points;
  std::string levels = "2..6";
  double s = 2.0;
  std::optional<double> test_s;
  int depth = 8;
  int export_depth = 6;
  std::size_t balls = 2000;
  double r_min = 1.0 / 128.0;
  double r_max = 1.0;
};

json cmd_measure_dim(const Common& c, const MeasureArgs& a) {
  const auto g = load(c);
  const auto sys = make_system(c, g, false);
  const auto levels = parse_levels(a.levels);
  json cfg = base_config(c, g);
  cfg.update({{"set", a.set}, {"levels", levels}});
  carnot::DimensionFit fit;
  if (a.set == "full") {
    fit = carnot::dimension_estimate(sys, carnot::TileCenterRange(sys, levels.back()), levels);
  } else if (a.set == "vertical" || a.set == "horizontal") {
    if (a.set == "vertical" && g.vertical_dim() == 0) throw carnot::Error("abelian group has no vertical direction");
    const int dir = a.set == "vertical" ? g.horizontal_dim() : 0;
    const double half = carnot::segment_half_length_inside(sys, sys.center(), dir, a.set == "vertical" ? 0.2 : 0.4);
    const std::size_t n = a.set == "vertical" ? (1u << 16) : (1u << 14);
    cfg["half_length"] = half;
    fit = carnot::dimension_estimate(sys, carnot::segment_points(g, sys.center(), dir, half, n), levels);
  } else if (a.set == "cantor") {
    cfg.update({{"s", a.s}, {"depth", a.depth}});
    fit = carnot::dimension_estimate(sys, carnot::cantor_subsystem(sys, a.s, a.depth).points(), levels);
  } else if (a.set == "points") {
    if (a.points.empty()) throw carnot::Error("--points is required for --set points");
    cfg["points"] = a.points;
    fit = carnot::dimension_estimate(sys, carnot::read_points_csv(g, a.points), levels);
  } else {
    throw carnot::Error("unknown set: " + a.set);
  }
  return carnot::stamp_report("measure dim", cfg, 0, carnot::to_json(fit));
}

json cmd_measure_cantor(const Common& c, const MeasureArgs& a) {
  const auto g = load(c);
  const auto sys = make_system(c, g, false);
  const fs::path dir = out_dir(c, true);
  json cfg = base_config(c, g);
  cfg.update({{"s", a.s}, {"depth", a.export_depth}});
  const auto cm = carnot::cantor_subsystem(sys, a.s, a.export_depth);
  if (cm.atom_count() > 4e6) throw carnot::Error("Cantor export too large; lower --depth");
  std::string csv = carnot::csv_header(g, true) + "\n";
  const std::string w = carnot::csv_number(cm.node_mass(a.export_depth));
  cm.for_each_atom([&](const carnot::Point& p, const std::vector<int>& letters) {
    csv += carnot::csv_row(a.export_depth, word_string(letters), p) + "," + w + "\n";
  });
  const std::string file = "cantor_s" + carnot::csv_number(a.s) + "_d" + std::to_string(a.export_depth) + ".csv";
  write_text(dir / file, csv);
  json body = {{"s", a.s},
               {"depth", a.export_depth},
               {"branching", cm.branching()},
               {"atoms", static_cast<std::uint64_t>(std::llround(cm.atom_count()))},
               {"atom_mass", cm.node_mass(a.export_depth)},
               {"atom_resolution", std::ldexp(sys.r_out(), -a.export_depth)},
               {"csv", file}};
  return carnot::stamp_report("measure cantor", cfg, 0, body);
}

json cmd_measure_frostman(const Common& c, const MeasureArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, false);
  const double test_s = a.test_s.value_or(a.s);
  json cfg = base_config(c, g);
  cfg.update({{"s", a.s}, {"test_s", test_s}, {"depth", a.depth}, {"balls", a.balls}, {"r_min", a.r_min}, {"r_max", a.r_max}});
  json body;
  if (!a.points.empty()) {
    cfg["points"] = a.points;
    const auto mu = carnot::DiscreteMeasure::uniform(g, carnot::read_points_csv(g, a.points));
    body = carnot::to_json(
        carnot::frostman_check(mu, test_s, a.balls, a.r_min, a.r_max, carnot::derive_seed(seed, "measure.frostman")));
  } else {
    const auto cm = carnot::cantor_subsystem(sys, a.s, a.depth);
    body = carnot::to_json(
        carnot::frostman_check(cm, test_s, a.balls, a.r_min, a.r_max, carnot::derive_seed(seed, "measure.frostman")));
    body["atom_resolution"] = std::ldexp(sys.r_out(), -a.depth);
  }
  return carnot::stamp_report("measure frostman", cfg, seed, body);
}

// ---------------------------------------------------------------------------
// hp

struct HpArgs {
  std::string levels = "2..5";
  std::size_t samples = 10000;
  int max_order = 2;
  std::size_t derivative_samples = 400;
  double s = 2.0;
  int depth = 8;
  std::string eps_levels = "2..6";
  int ell = 2;
  double p = 1.0;
  std::size_t quad = 4000;
  std::string points;
};

json cmd_hp_verify(const Common& c, const HpArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, false);
  const auto levels = parse_levels(a.levels);
  json cfg = base_config(c, g);
  cfg.update({{"levels", levels}, {"samples", a.samples}, {"max_order", a.max_order},
              {"derivative_samples", a.derivative_samples}});
  json warnings = json::array();
  if (a.max_order > 2) {
    const std::string w = "derivative orders above 2 use nested finite differences with reduced accuracy";
    std::cerr << "warning: " << w << "\n";
    warnings.push_back(w);
  }
  carnot::PartitionCheckOptions opt;
  opt.max_order = a.max_order;
  opt.derivative_samples = a.derivative_samples;
  json per_level = json::array();
  bool pass = true;
  std::vector<std::vector<double>> maxima(static_cast<std::size_t>(a.max_order));
  for (int m : levels) {
    const auto part = carnot::build_partition(sys, carnot::sibling_tiles(sys, m));
    const auto rep = carnot::verify_partition(sys, part, a.samples, carnot::derive_seed(seed, static_cast<std::uint64_t>(m)), opt);
    json r = carnot::to_json(rep);
    r["level"] = m;
    per_level.push_back(r);
    pass = pass && rep.sum_error < 1e-8 && rep.theta_error < 1e-12;
    for (int k = 1; k <= a.max_order; ++k) {
      double mx = 0.0;
      for (const auto& e : rep.c_alpha)
        if (e.alpha.order() == k) mx = std::max(mx, e.c_alpha);
      maxima[static_cast<std::size_t>(k - 1)].push_back(mx);
    }
  }
  json stab = json::array();
  for (int k = 1; k <= a.max_order; ++k) {
    const auto& v = maxima[static_cast<std::size_t>(k - 1)];
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    stab.push_back({{"order", k}, {"max_over_min", carnot::detail::num(lo > 0.0 ? hi / lo : INFINITY)}});
  }
  json body = {{"levels", per_level}, {"stability_across_levels", stab}, {"pass", pass}, {"warnings", warnings}};
  json out = carnot::stamp_report("hp verify", cfg, seed, body);
  if (!pass) throw CheckFailed{out};
  return out;
}

json cmd_hp_cutoff(const Common& c, const HpArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  const auto sys = make_system(c, g, false);
  const auto ks = parse_levels(a.eps_levels);
  json cfg = base_config(c, g);
  cfg.update({{"eps_levels", ks}, {"ell", a.ell}, {"p", a.p}, {"alpha_max", a.max_order}, {"quad", a.quad}});
  if (a.max_order > 2) std::cerr << "warning: derivative orders above 2 use nested finite differences with reduced accuracy\n";
  std::vector<carnot::Point> pts;
  if (!a.points.empty()) {
    cfg["points"] = a.points;
    pts = carnot::read_points_csv(g, a.points);
  } else {
    cfg.update({{"s", a.s}, {"depth", a.depth}});
    pts = carnot::cantor_subsystem(sys, a.s, a.depth).points();
  }
  json tables = json::array();
  for (int k : ks) {
    const double eps = std::ldexp(sys.diameter(), -k);
    const auto cut = carnot::build_cutoff(sys, pts, eps);
    const auto rep = carnot::cutoff_lp_report(sys, cut, a.ell, a.p, a.max_order, a.quad,
                                              carnot::derive_seed(seed, static_cast<std::uint64_t>(k)));
    json t = carnot::to_json(rep);
    t["eps_level"] = k;
    t["tiles"] = cut.partition.size();
    tables.push_back(t);
  }
  return carnot::stamp_report("hp cutoff", cfg, seed, {{"tables", tables}});
}

// ---------------------------------------------------------------------------
// potential

struct PotentialArgs {
  int lambda = 2;
  double c = 1.0;
  std::string measure = "cantor";
  double s = 2.0;
  int depth = 24;
  double theta = 0.25;
  std::string atoms;
  std::string points;
  std::string decades = "1e-3..1";
  std::size_t balls = 24;
  std::size_t quad = 256;
  double delta = 0.5;
  std::size_t pairs = 200;
  std::size_t kernel_pairs = 10000;
  double p = 2.0;
  std::string box = "-1..2";
  std::size_t lp_quad = 40000;
};

carnot::PotentialField make_field(const Common& c, const carnot::GroupSpec& g, const PotentialArgs& a, json& cfg,
                                  json& body) {
  carnot::KernelSpec ks(g, a.lambda, a.c);
  cfg.update({{"lambda", a.lambda}, {"c", a.c}, {"measure", a.measure}, {"theta", a.theta}});
  if (a.measure == "cantor") {
    const auto sys = make_system(c, g, false);
    cfg.update({{"s", a.s}, {"depth", a.depth}});
    body["atom_resolution"] = std::ldexp(sys.r_out(), -a.depth);
    return carnot::PotentialField(ks, carnot::CantorMeasure(sys, a.s, a.depth), a.theta);
  }
  if (a.measure == "atom") {
    const auto sys = make_system(c, g, false);
    return carnot::PotentialField(ks, carnot::DiscreteMeasure(g, {sys.center()}, {1.0}), a.theta);
  }
  if (a.measure == "points") {
    if (a.atoms.empty()) throw carnot::Error("--atoms is required for --measure points");
    cfg["atoms"] = a.atoms;
    return carnot::PotentialField(ks, carnot::DiscreteMeasure::uniform(g, carnot::read_points_csv(g, a.atoms)), a.theta);
  }
  throw carnot::Error("unknown measure: " + a.measure);
}

std::vector<std::pair<double, double>> decade_list(const std::string& s) {
  const auto [lo, hi] = parse_range(s);
  if (!(lo > 0.0)) throw carnot::Error("decades must be positive");
  return carnot::detail::decades_between(lo, hi);
}

json cmd_potential_bmo(const Common& c, const PotentialArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  json cfg = base_config(c, g);
  json extra = json::object();
  const auto pf = make_field(c, g, a, cfg, extra);
  carnot::BmoOptions opt;
  opt.decades = decade_list(a.decades);
  opt.balls_per_decade = a.balls;
  opt.n_quad = a.quad;
  cfg.update({{"decades", a.decades}, {"balls", a.balls}, {"quad", a.quad}, {"exclusion", opt.exclusion}});
  json body = carnot::to_json(carnot::bmo_seminorm_estimate(pf, carnot::derive_seed(seed, "potential.bmo"), opt));
  body.update(extra);
  return carnot::stamp_report("potential bmo", cfg, seed, body);
}

json cmd_potential_holder(const Common& c, const PotentialArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  json cfg = base_config(c, g);
  json extra = json::object();
  const auto pf = make_field(c, g, a, cfg, extra);
  carnot::HolderOptions opt;
  opt.decades = decade_list(a.decades);
  opt.pairs_per_decade = a.pairs;
  cfg.update({{"decades", a.decades}, {"pairs", a.pairs}, {"delta", a.delta}});
  json body =
      carnot::to_json(carnot::holder_seminorm_estimate(pf, a.delta, carnot::derive_seed(seed, "potential.holder"), opt));
  body.update(extra);
  return carnot::stamp_report("potential holder", cfg, seed, body);
}

json cmd_potential_lp(const Common& c, const PotentialArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  json cfg = base_config(c, g);
  json extra = json::object();
  const auto pf = make_field(c, g, a, cfg, extra);
  const auto [lo, hi] = parse_range(a.box);
  carnot::Box box{carnot::Point(g.dim()), carnot::Point(g.dim())};
  for (int i = 0; i < g.dim(); ++i) {
    box.lo[i] = lo;
    box.hi[i] = hi;
  }
  cfg.update({{"p", a.p}, {"box", a.box}, {"quad", a.lp_quad}});
  json body = carnot::to_json(carnot::lp_norm_estimate(pf, a.p, box, a.lp_quad, carnot::derive_seed(seed, "potential.lp")));
  body.update(extra);
  return carnot::stamp_report("potential lp", cfg, seed, body);
}

json cmd_potential_kernel_check(const Common& c, const PotentialArgs& a) {
  const auto g = load(c);
  const auto seed = need_seed(c);
  carnot::KernelSpec ks(g, a.lambda, a.c);
  json cfg = base_config(c, g);
  cfg.update({{"lambda", a.lambda}, {"c", a.c}, {"pairs", a.kernel_pairs}});
  const auto rep = carnot::kernel_smoothness_check(g, ks, a.kernel_pairs, carnot::derive_seed(seed, "potential.kernel"));
  const bool pass = std::abs(rep.bound_constant - std::abs(a.c)) <= 1e-12 * std::abs(a.c) &&
                    rep.homogeneity_defect < 1e-12 && rep.dilation_defect < 1e-10 && rep.band_spread <= 3.0 &&
                    std::isfinite(rep.c_smooth);
  json body = carnot::to_json(rep);
  body["pass"] = pass;
  json out = carnot::stamp_report("potential kernel-check", cfg, seed, body);
  if (!pass) throw CheckFailed{out};
  return out;
}

json cmd_potential_eval(const Common& c, const PotentialArgs& a) {
  const auto g = load(c);
  const fs::path dir = out_dir(c, true);
  if (a.points.empty()) throw carnot::Error("--points is required for potential eval");
  json cfg = base_config(c, g);
  json extra = json::object();
  const auto pf = make_field(c, g, a, cfg, extra);
  cfg["points"] = a.points;
  const auto pts = carnot::read_points_csv(g, a.points);
  std::string csv;
  for (int i = 1; i <= g.dim(); ++i) csv += "x" + std::to_string(i) + ",";
  csv += "f\n";
  std::size_t singular = 0;
  for (const auto& p : pts) {
    for (int i = 0; i < g.dim(); ++i) csv += carnot::csv_number(p[i]) + ",";
    try {
      csv += carnot::csv_number(pf.eval(p)) + "\n";
    } catch (const carnot::SingularEvaluation&) {
      csv += "nan\n";
      ++singular;
    }
  }
  write_text(dir / "potential.csv", csv);
  json body = {{"n_points", pts.size()}, {"singular", singular}, {"csv", "potential.csv"}};
  body.update(extra);
  return carnot::stamp_report("potential eval", cfg, 0, body);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--group", c.group, "named spec (euclidean:N, heisenberg:N) or JSON path");
  sub->add_option("--kappa", c.kappa, "vertical weight in the gauge");
  sub->add_option("--seed", c.seed, "64-bit root seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carnot group tilings, measures, partitions and potentials"};
  app.require_subcommand(1);
  Common common;
  std::function<json()> run;
  std::string report_name;

  auto verb = [&](CLI::App* parent, const std::string& name, const std::string& help, auto fn) {
    auto* sub = parent->add_subcommand(name, help);
    add_common(sub, common);
    sub->callback([&, sub, fn, parent] {
      report_name = parent->get_name() + "_" + sub->get_name();
      run = fn;
    });
    return sub;
  };

  // group
  GroupArgs ga;
  auto* group = app.add_subcommand("group", "group-law invariant suites")->require_subcommand(1);
  auto* gcheck = verb(group, "check", "associativity, homogeneity and Haar scaling", [&] { return cmd_group_check(common, ga); });
  gcheck->add_option("--triples", ga.triples);
  gcheck->add_option("--haar-samples", ga.haar_samples);

  // tile
  TileArgs ta;
  auto* tile = app.add_subcommand("tile", "self-similar dyadic tiles")->require_subcommand(1);
  auto* trender = verb(tile, "render", "point cloud of level-m tiles", [&] { return cmd_tile_render(common, ta); });
  trender->add_option("--level", ta.level);
  trender->add_option("--per-tile", ta.per_tile);
  trender->add_option("--depth", ta.depth);
  auto* tcert = verb(tile, "certify", "Monte Carlo tiling certification", [&] { return cmd_tile_certify(common, ta); });
  tcert->add_option("--samples", ta.samples);
  tcert->add_option("--tol", ta.tol);
  tcert->add_option("--k-level", ta.k_level);
  auto* tradii = verb(tile, "radii", "inner and outer radii about the center", [&] { return cmd_tile_radii(common, ta); });
  tradii->add_option("--samples", ta.radii_samples);
  for (auto* s : {trender, tcert, tradii}) s->add_option("--digits", common.digits, "JSON list of digit points");

  // measure
  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "dyadic covers, dimensions and Frostman measures")->require_subcommand(1);
  auto* mdim = verb(measure, "dim", "dyadic box-counting dimension", [&] { return cmd_measure_dim(common, ma); });
  mdim->add_option("--set", ma.set, "full, vertical, horizontal, cantor or points");
  mdim->add_option("--points", ma.points, "CSV point list for --set points");
  mdim->add_option("--levels", ma.levels, "a..b or comma list");
  mdim->add_option("--s", ma.s);
  mdim->add_option("--depth", ma.depth);
  auto* mcant = verb(measure, "cantor", "export a Cantor set as weighted CSV", [&] { return cmd_measure_cantor(common, ma); });
  mcant->add_option("--s", ma.s);
  mcant->add_option("--depth", ma.export_depth);
  auto* mfro = verb(measure, "frostman", "growth-bound check mu(B(x,r)) <= C r^s", [&] { return cmd_measure_frostman(common, ma); });
  mfro->add_option("--s", ma.s, "exponent of the Cantor measure");
  mfro->add_option("--test-s", ma.test_s, "exponent tested (default --s)");
  mfro->add_option("--depth", ma.depth);
  mfro->add_option("--balls", ma.balls);
  mfro->add_option("--r-min", ma.r_min);
  mfro->add_option("--r-max", ma.r_max);
  mfro->add_option("--points", ma.points, "CSV atoms (uniform weights) instead of a Cantor measure");
  for (auto* s : {mdim, mcant, mfro}) s->add_option("--digits", common.digits, "JSON list of digit points");

  // hp
  HpArgs ha;
  auto* hp = app.add_subcommand("hp", "smooth partitions of unity and cutoffs")->require_subcommand(1);
  auto* hver = verb(hp, "verify", "sum-to-one, telescoping and C_alpha scaling", [&] { return cmd_hp_verify(common, ha); });
  hver->add_option("--levels", ha.levels);
  hver->add_option("--samples", ha.samples);
  hver->add_option("--max-order", ha.max_order)->check(CLI::Range(0, carnot::kMaxDerivativeOrder));
  hver->add_option("--derivative-samples", ha.derivative_samples);
  auto* hcut = verb(hp, "cutoff", "L^p table of cutoff derivatives", [&] { return cmd_hp_cutoff(common, ha); });
  hcut->add_option("--s", ha.s);
  hcut->add_option("--depth", ha.depth);
  hcut->add_option("--eps-levels", ha.eps_levels, "k values, eps = 2^-k diam T");
  hcut->add_option("--ell", ha.ell);
  hcut->add_option("--p", ha.p);
  hcut->add_option("--alpha-max", ha.max_order)->check(CLI::Range(0, carnot::kMaxDerivativeOrder));
  hcut->add_option("--quad", ha.quad);
  hcut->add_option("--points", ha.points, "CSV point list for E");
  for (auto* s : {hver, hcut}) s->add_option("--digits", common.digits, "JSON list of digit points");

  // potential
  PotentialArgs pa;
  auto* pot = app.add_subcommand("potential", "kernel potentials and their seminorms")->require_subcommand(1);
  auto* pbmo = verb(pot, "bmo", "ball mean oscillation by decade", [&] { return cmd_potential_bmo(common, pa); });
  auto* phol = verb(pot, "holder", "Holder ratios by decade", [&] { return cmd_potential_holder(common, pa); });
  auto* plp = verb(pot, "lp", "L^p norm over a box", [&] { return cmd_potential_lp(common, pa); });
  auto* pker = verb(pot, "kernel-check", "kernel bound, homogeneity and smoothness", [&] { return cmd_potential_kernel_check(common, pa); });
  auto* peval = verb(pot, "eval", "evaluate the potential on a CSV point list", [&] { return cmd_potential_eval(common, pa); });
  for (auto* s : {pbmo, phol, plp, pker, peval}) {
    s->add_option("--lambda", pa.lambda);
    s->add_option("--c", pa.c);
  }
  for (auto* s : {pbmo, phol, plp, peval}) {
    s->add_option("--measure", pa.measure, "cantor, atom or points");
    s->add_option("--s", pa.s);
    s->add_option("--depth", pa.depth);
    s->add_option("--theta", pa.theta, "tree-code opening parameter");
    s->add_option("--atoms", pa.atoms, "CSV atoms for --measure points");
    s->add_option("--digits", common.digits, "JSON list of digit points");
  }
  for (auto* s : {pbmo, phol}) s->add_option("--decades", pa.decades, "lo..hi");
  pbmo->add_option("--balls", pa.balls, "balls per decade");
  pbmo->add_option("--quad", pa.quad, "quadrature points per ball");
  phol->add_option("--delta", pa.delta);
  phol->add_option("--pairs", pa.pairs, "pairs per decade");
  pker->add_option("--pairs", pa.kernel_pairs);
  plp->add_option("--p", pa.p);
  plp->add_option("--box", pa.box, "lo..hi, same range on every coordinate");
  plp->add_option("--quad", pa.lp_quad);
  peval->add_option("--points", pa.points, "CSV evaluation points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = kExitPass;
  try {
    emit(common, report_name, run());
  } catch (const CheckFailed& f) {
    emit(common, report_name, f.report);
    rc = kExitFail;
  } catch (const carnot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "%s finished in %.2f s\n", report_name.c_str(), secs);
  return rc;
}
