#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include "owlab/owlab.hpp"

namespace owlab::cli {

namespace {

struct Table {
  std::string suffix;  // appended to the experiment name
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> summary;
  bool flagged = false;  // a numerical routine reported non-convergence

  Table& main(std::vector<std::string> header) {
    tables.push_back({"", std::move(header), {}});
    return tables.back();
  }
  void put(const std::string& key, double v) { summary.emplace_back(key, format_number(v)); }
  void put(const std::string& key, const std::string& v) { summary.emplace_back(key, v); }
};

struct Context {
  const Config& cfg;
  std::uint64_t seed;
  int threads;
};

using Runner = std::function<Outcome(const Context&)>;

void centers_for(const std::vector<double>& flat, int n, int m, const std::string& key,
                 std::vector<std::vector<double>>* out) {
  if (static_cast<int>(flat.size()) != n * m)
    throw ConfigError("config key '" + key + "' needs " + std::to_string(n * m) + " numbers (n * m)");
  for (int i = 0; i < m; ++i) out->emplace_back(flat.begin() + i * n, flat.begin() + (i + 1) * n);
}

Box box_from(const Config& cfg, const std::string& prefix, int n) {
  const auto lo = cfg.nums(prefix + ".lo", std::vector<double>(n, 0.0));
  const auto hi = cfg.nums(prefix + ".hi", std::vector<double>(n, 1.0));
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw ConfigError("config keys '" + prefix + ".lo' and '" + prefix + ".hi' need " + std::to_string(n) + " numbers");
  return Box{lo, hi};
}

WeightModel simple_weight(const Config& cfg, const std::string& kind, int n, double u) {
  if (kind == "identity") return WeightModel::identity(n, static_cast<int>(cfg.integer("weight.m", 1)), u);
  if (kind == "diagonal_power") {
    const auto ex = cfg.nums("weight.exponents");
    std::vector<std::vector<double>> cs;
    centers_for(cfg.nums("weight.centers"), n, static_cast<int>(ex.size()), "weight.centers", &cs);
    return WeightModel::diagonal_power(cs, ex, u);
  }
  if (kind == "diagonal_log") {
    const auto flat = cfg.nums("weight.centers");
    if (flat.size() % n != 0) throw ConfigError("config key 'weight.centers' must hold a multiple of n numbers");
    std::vector<std::vector<double>> cs;
    centers_for(flat, n, static_cast<int>(flat.size()) / n, "weight.centers", &cs);
    return WeightModel::diagonal_log(cs, u);
  }
  if (kind == "piecewise_constant") {
    const Box box = box_from(cfg, "weight.box", n);
    std::vector<int> cells;
    for (const auto c : cfg.integers("weight.cells")) cells.push_back(static_cast<int>(c));
    if (static_cast<int>(cells.size()) != n) throw ConfigError("config key 'weight.cells' needs n entries");
    std::size_t count = 1;
    for (const int c : cells) count *= static_cast<std::size_t>(std::max(c, 0));
    const auto vals = cfg.nums("weight.values");
    if (count == 0 || vals.size() % count != 0)
      throw ConfigError("config key 'weight.values' must hold m diagonal entries per cell");
    const int m = static_cast<int>(vals.size() / count);
    std::vector<Mat> mats;
    for (std::size_t c = 0; c < count; ++c) {
      Mat a = Mat::Zero(m, m);
      for (int i = 0; i < m; ++i) a(i, i) = vals[c * m + i];
      mats.push_back(a);
    }
    return WeightModel::piecewise_constant(box, cells, mats, u);
  }
  throw ConfigError("unknown weight.kind '" + kind + "'");
}

SpaceParams space_from(const Config& cfg) {
  SpaceParams s;
  s.s = cfg.num("space.s", 0.0);
  s.p = cfg.num("space.p", 2.0);
  s.q = cfg.num("space.q", 2.0);
  const std::string kind = cfg.str("space.kind", "besov");
  if (kind == "besov") s.kind = SpaceKind::Besov;
  else if (kind == "tl") s.kind = SpaceKind::TL;
  else throw ConfigError("space.kind must be besov or tl, got '" + kind + "'");
  return s;
}

GridWindow window_from(const Config& cfg, int n) {
  const int j0 = static_cast<int>(cfg.integer("window.j_min", 0));
  const int j1 = static_cast<int>(cfg.integer("window.j_max", 4));
  return build_window(n, j0, j1, box_from(cfg, "window", n));
}

Quadrature quad_from(const Config& cfg) { return Quadrature{static_cast<int>(cfg.integer("quadrature.nodes", 64))}; }

ADParams ad_from(const Config& cfg, const std::string& prefix) {
  return {cfg.num(prefix + ".D"), cfg.num(prefix + ".E"), cfg.num(prefix + ".F")};
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

Outcome run_ap(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const double p = c.cfg.num("ap.p", c.cfg.num("space.p", 2.0));
  const int depth = static_cast<int>(c.cfg.integer("ap.ancestor_depth", 3));
  const auto full = window_from(c.cfg, v.dim());
  const auto quad = quad_from(c.cfg);
  Outcome out;
  auto& t = out.main({"j_max", "ap_constant", "worst_level", "cubes"});
  ApEstimate last;
  for (int j = full.j_min(); j <= full.j_max(); ++j) {
    last = ap_constant_estimate(v, p, build_window(v.dim(), full.j_min(), j, full.box()), quad, {}, depth);
    t.rows.push_back({double(j), last.value, double(last.worst.level), double(last.cubes_examined)});
    out.flagged |= !last.converged;
  }
  out.put("ap_constant", last.value);
  out.put("worst_cube", last.worst.to_string());
  out.put("converged", yes_no(!out.flagged));
  out.put("cubes_examined", double(last.cubes_examined));
  return out;
}

Outcome run_rhi(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const double p = c.cfg.num("rhi.p", c.cfg.num("space.p", 2.0));
  std::vector<double> grid_default;
  for (int i = 1; i <= 20; ++i) grid_default.push_back(0.05 * i);
  const auto grid = c.cfg.nums("rhi.grid", grid_default);
  const auto r = rhi_index_estimate(v, p, window_from(c.cfg, v.dim()), grid, c.cfg.num("rhi.threshold", 2.0),
                                    quad_from(c.cfg), c.seed, static_cast<int>(c.cfg.integer("rhi.directions", 8)));
  Outcome out;
  auto& t = out.main({"cube", "level", "grid_value", "eps_ratio", "eta_ratio"});
  for (std::size_t i = 0; i < r.cubes.size(); ++i)
    for (std::size_t g = 0; g < r.grid.size(); ++g) {
      const double eta = i < r.eta_ratios.size() && g < r.eta_ratios[i].size() ? r.eta_ratios[i][g] : std::nan("");
      t.rows.push_back({double(i), double(r.cubes[i].level), r.grid[g], r.eps_ratios[i][g], eta});
    }
  out.put("eps", r.eps);
  out.put("eta", r.eta);
  out.put("eps_degenerate", yes_no(r.eps_degenerate));
  out.put("eta_degenerate", yes_no(r.eta_degenerate));
  out.put("eta_trivial", yes_no(r.eta_trivial));
  return out;
}

Outcome run_doubling(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const double p = c.cfg.num("doubling.p", c.cfg.num("space.p", 2.0));
  const auto r = doubling_dimension_estimate(v, p, window_from(c.cfg, v.dim()), quad_from(c.cfg), c.seed,
                                             static_cast<int>(c.cfg.integer("doubling.directions", 8)));
  Outcome out;
  auto& t = out.main({"depth", "log2_ratio"});
  for (std::size_t d = 0; d < r.envelope.size(); ++d) t.rows.push_back({double(d + 1), r.envelope[d]});
  out.put("beta", r.beta);
  out.put("raw_slope", r.raw_slope);
  out.put("residual", r.residual);
  return out;
}

Outcome run_seq_norm(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const auto params = space_from(c.cfg);
  const auto quad = quad_from(c.cfg);
  const auto fam = NormFamily::from_weight(v, c.cfg.num("seq.r", params.p), quad);
  const PointwiseWeight pw{v, quad};
  std::vector<DyadicSequence> seqs;
  if (c.cfg.has("seq.input")) {
    std::ifstream is(c.cfg.str("seq.input"));
    if (!is) throw ConfigError("cannot read sequence file " + c.cfg.str("seq.input"));
    seqs.push_back(read_sequence(is));
  } else {
    const auto w = window_from(c.cfg, v.dim());
    const int count = static_cast<int>(c.cfg.integer("seq.count", 20));
    for (int i = 0; i < count; ++i)
      seqs.push_back(random_sequence(w, v.m(), c.seed + static_cast<std::uint64_t>(i), c.cfg.num("seq.density", 1.0)));
  }
  Outcome out;
  auto& t = out.main({"sample", "norm_rho", "norm_pointwise", "rel_diff"});
  double worst = 0.0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const double a = seq_norm(seqs[i], params, fam), b = seq_norm(seqs[i], params, pw);
    const double d = a > 0 ? std::abs(b / a - 1.0) : std::abs(b);
    worst = std::max(worst, d);
    t.rows.push_back({double(i), a, b, d});
  }
  out.put("max_rel_diff", worst);
  return out;
}

Outcome run_ad_opnorm(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const auto params = space_from(c.cfg);
  const auto ad = ad_from(c.cfg, "ad");
  const auto fam = NormFamily::from_weight(v, c.cfg.num("ad.r", params.p), quad_from(c.cfg));
  const auto full = window_from(c.cfg, v.dim());
  Outcome out;
  auto& t = out.main({"j_max", "opnorm", "probes"});
  OpnormEstimate last;
  for (int j = full.j_min(); j <= full.j_max(); ++j) {
    last = ad_opnorm_estimate(ADMatrix::canonical(ad, build_window(v.dim(), full.j_min(), j, full.box())), params, fam,
                              v.m());
    t.rows.push_back({double(j), last.value, double(last.probes)});
  }
  out.put("opnorm", last.value);
  out.put("probe", last.probe);
  if (t.rows.size() >= 3) out.put("growth_two_levels", t.rows.back()[1] / t.rows[t.rows.size() - 3][1]);
  return out;
}

Outcome run_ad_compose(const Context& c) {
  const auto p1 = ad_from(c.cfg, "ad1"), p2 = ad_from(c.cfg, "ad2");
  const int n = static_cast<int>(c.cfg.integer("window.n", 1));
  const auto full = window_from(c.cfg, n);
  Outcome out;
  auto& t = out.main({"j_max", "ratio", "q_level", "r_level"});
  ComposeCheck last;
  for (int j = full.j_min(); j <= full.j_max(); ++j) {
    last = ad_compose_check(p1, p2, build_window(n, full.j_min(), j, full.box()));
    t.rows.push_back({double(j), last.ratio, double(last.q.level), double(last.r.level)});
  }
  out.put("ratio", last.ratio);
  out.put("worst_q", last.q.to_string());
  out.put("worst_r", last.r.to_string());
  if (t.rows.size() >= 3) out.put("growth_two_levels", t.rows.back()[1] / t.rows[t.rows.size() - 3][1]);
  return out;
}

Outcome run_sharp_ad(const Context& c) {
  const int m0 = static_cast<int>(c.cfg.integer("sharp.m_min", 3)), m1 = static_cast<int>(c.cfg.integer("sharp.m_max", 9));
  const auto r = sharp_ad_experiment(c.cfg.num("sharp.p", 2.0), c.cfg.num("sharp.beta", 1.8), m0, m1, quad_from(c.cfg));
  Outcome out;
  auto& t = out.main({"M", "lhs", "norm", "log2_lhs", "log2_corrected"});
  for (const auto& row : r.rows)
    t.rows.push_back({double(row.M), row.lhs, row.norm, std::log2(row.lhs), std::log2(row.M * row.lhs)});
  out.put("slope", r.slope);
  out.put("corrected_slope", r.corrected_slope);
  if (r.rows.size() >= 4) out.put("norm_increase_last_three", r.rows.back().norm / r.rows[r.rows.size() - 4].norm - 1.0);
  return out;
}

Outcome run_p22(const Context& c) {
  const auto r = p22_experiment(c.cfg.num("p22.p", 2.0), c.cfg.num("p22.eps", 0.05),
                                static_cast<int>(c.cfg.integer("p22.n_min", 4)),
                                static_cast<int>(c.cfg.integer("p22.n_max", 11)),
                                static_cast<int>(c.cfg.integer("p22.grid", 4096)));
  Outcome out;
  auto& t = out.main({"N", "lhs", "rhs", "log2_lhs", "log2_rhs"});
  for (const auto& row : r.rows) t.rows.push_back({double(row.N), row.lhs, row.rhs, std::log2(row.lhs), std::log2(row.rhs)});
  out.put("lhs_slope", r.lhs_slope);
  out.put("rhs_slope", r.rhs_slope);
  out.put("slope_gap", r.lhs_slope - r.rhs_slope);
  return out;
}

Outcome run_normal_sup(const Context& c) {
  std::vector<int> js;
  for (const auto j : c.cfg.integers("ns.j", {4, 16, 64, 256, 1024})) js.push_back(static_cast<int>(j));
  const auto samples = static_cast<std::size_t>(c.cfg.integer("ns.samples", 100000));
  const auto r = normal_sup_experiment(c.cfg.num("ns.p", 2.0), js, samples, c.seed, c.threads);
  Outcome out;
  auto& t = out.main({"J", "mean", "std_error"});
  for (const auto& row : r.rows) t.rows.push_back({double(row.J), row.mean, row.std_error});
  out.put("monotone", yes_no(r.monotone));
  if (!r.rows.empty() && r.rows.front().mean > 0) out.put("last_over_first", r.rows.back().mean / r.rows.front().mean);
  return out;
}

Outcome run_avg_norm(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const double p = c.cfg.num("avg.p", c.cfg.num("space.p", 2.0));
  const Box q = Box::interval(c.cfg.num("avg.lo", 0.0), c.cfg.num("avg.hi", 1.0));
  const auto rhs = averaging_norm_rhs(v, p, q, quad_from(c.cfg));
  Outcome out;
  auto& t = out.main({"lo", "hi", "rhs", "oracle", "rel_diff"});
  double oracle = std::nan("");
  if (v.dim() == 1 && v.m() == 1) {
    const auto o = averaging_norm_oracle(v, p, q, static_cast<int>(c.cfg.integer("avg.cells", 256)), c.seed);
    oracle = o.value;
    out.flagged |= !o.converged;
    out.put("oracle_cells", double(o.cells));
    out.put("oracle_sweeps", double(o.sweeps));
  }
  out.flagged |= !rhs.converged;
  const double d = std::isfinite(oracle) && rhs.value > 0 ? std::abs(oracle / rhs.value - 1.0) : std::nan("");
  t.rows.push_back({q.lo[0], q.hi[0], rhs.value, oracle, d});
  out.put("rhs", rhs.value);
  out.put("oracle", oracle);
  out.put("converged", yes_no(!out.flagged));
  return out;
}

Outcome run_sparse(const Context& c) {
  const auto v = weight_from_config(c.cfg);
  const double p = c.cfg.num("sparse.p", c.cfg.num("space.p", 2.0));
  const int max_depth = static_cast<int>(c.cfg.integer("sparse.depth", 4));
  const int trials = static_cast<int>(c.cfg.integer("sparse.trials", 50));
  const bool nonneg = c.cfg.flag("sparse.nonnegative", true);
  const int n = v.dim();
  const int cells = static_cast<int>(c.cfg.integer("sparse.cells", 1LL << (max_depth + 2)));
  const DyadicCube top(0, std::vector<std::int64_t>(n, 0));
  const SampledFunction shape(Box::of(top), std::vector<int>(n, cells), v.m());
  const auto quad = quad_from(c.cfg);
  Outcome out;
  auto& t = out.main({"depth", "trial", "cubes", "norm_f", "norm_tf", "ratio"});
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unif(nonneg ? 0.0 : -1.0, 1.0);
  for (int depth = 0; depth <= max_depth; ++depth) {
    const auto fam = make_sparse_family(top, shape, SparseOptions{depth, c.seed + static_cast<std::uint64_t>(depth), nonneg});
    fam.validate();
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
      SampledFunction f = shape;
      for (auto& x : f.values) x = unif(rng);
      const double nf = weighted_lp_norm(v, p, f, quad);
      const double ntf = weighted_lp_norm(v, p, sparse_apply(fam, f), quad);
      const double r = nf > 0 ? ntf / nf : 0.0;
      worst = std::max(worst, r);
      t.rows.push_back({double(depth), double(k), double(fam.entries.size()), nf, ntf, r});
    }
    out.put("max_ratio_depth_" + std::to_string(depth), worst);
  }
  return out;
}

Outcome run_trace(const Context& c) {
  Config cfg = c.cfg;
  if (!cfg.has("weight.kind")) cfg.set("weight.kind", "identity");
  if (!cfg.has("weight.n")) cfg.set("weight.n", "2");
  const auto v = weight_from_config(cfg);
  if (v.dim() < 2) throw PreconditionError("trace-check needs a weight in dimension at least 2");
  const auto params = space_from(cfg);
  const auto rho = NormFamily::from_weight(v, params.p, quad_from(cfg));
  const auto w = window_from(cfg, v.dim() - 1);
  const int count = static_cast<int>(cfg.integer("trace.count", 5));
  Outcome out;
  auto& t = out.main({"k", "sample", "lifted_norm", "source_norm", "ratio", "transfer_min", "transfer_max"});
  double lo = kInf, hi = 0.0;
  for (const auto k : cfg.integers("trace.k", {-2, -1, 0, 1, 2})) {
    const TraceOffset off{k};
    const auto d = trace_pullback(rho, off);
    for (int i = 0; i < count; ++i) {
      const auto u = random_sequence(w, v.m(), c.seed + static_cast<std::uint64_t>(i), cfg.num("trace.density", 1.0));
      const auto r = trace_norm_check(u, off, params, rho, d, c.seed);
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
      t.rows.push_back({double(k), double(i), r.lifted_norm, r.source_norm, r.ratio, r.transfer_min, r.transfer_max});
    }
  }
  out.put("ratio_min", lo);
  out.put("ratio_max", hi);
  return out;
}

Outcome run_lp(const Context& c) {
  FrequencyGrid g;
  g.nodes = static_cast<int>(c.cfg.integer("lp.nodes", g.nodes));
  g.half_width = c.cfg.num("lp.half_width", g.half_width);
  const auto pair = build_lp_pair(c.cfg.num("lp.alpha", 5.0 / 3.0), c.cfg.num("lp.beta", 2.0), g);
  const int i = static_cast<int>(c.cfg.integer("lp.i", 0));
  const double M = c.cfg.num("lp.M", 5.0);
  const int gaps = static_cast<int>(c.cfg.integer("lp.max_gap", 3));
  const auto fit = conv_decay_fit(pair, i, M, gaps, c.cfg.num("lp.x_max", 64.0));
  Outcome out;
  auto& t = out.main({"xi", "phi_hat", "psi_hat"});
  for (std::size_t k = 0; k < pair.xi.size(); ++k) t.rows.push_back({pair.xi[k], pair.phi[k], pair.psi[k]});
  Table decay{"_decay", {"gap", "constant", "log2_constant"}, {}};
  for (std::size_t d = 0; d < fit.constants.size(); ++d)
    decay.rows.push_back({double(d), fit.constants[d], std::log2(fit.constants[d])});
  out.tables.push_back(decay);
  out.put("partition_deviation", partition_check(pair));
  out.put("decay_slope", fit.slope);
  return out;
}

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"ap-estimate", run_ap},     {"rhi-estimate", run_rhi},   {"doubling", run_doubling},
      {"seq-norm", run_seq_norm},  {"ad-opnorm", run_ad_opnorm}, {"ad-compose", run_ad_compose},
      {"sharp-ad", run_sharp_ad},  {"p22", run_p22},             {"normal-sup", run_normal_sup},
      {"avg-norm", run_avg_norm},  {"sparse", run_sparse},       {"trace-check", run_trace},
      {"lp-filters", run_lp},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

WeightModel weight_from_config(const Config& cfg) {
  const std::string kind = cfg.str("weight.kind");
  const int n = static_cast<int>(cfg.integer("weight.n", 1));
  if (n < 1) throw ConfigError("weight.n must be positive");
  const double u = cfg.num("weight.u", 2.0);
  if (kind == "bmo_block") return make_bmo_block_weight(simple_weight(cfg, cfg.str("weight.inner", "diagonal_log"), n, u));
  return simple_weight(cfg, kind, n, u);
}

int run_experiment(const std::string& name, const Config& cfg, const RunOptions& opts, std::ostream& err) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    err << "unknown experiment '" << name << "'\n";
    return kUsage;
  }
  try {
    Context ctx{cfg, opts.seed ? *opts.seed : static_cast<std::uint64_t>(cfg.integer("run.seed", kDefaultSeed)),
                opts.threads ? *opts.threads : static_cast<int>(cfg.integer("run.threads", 1))};
    if (ctx.threads < 1) throw ConfigError("threads must be at least 1");
    const std::filesystem::path dir = opts.out_dir ? *opts.out_dir : cfg.str("run.out", ".");
    Outcome out = it->second(ctx);

    std::filesystem::create_directories(dir);
    for (const auto& t : out.tables) emit_csv(t.rows, t.header, (dir / (name + t.suffix + ".csv")).string());
    out.summary.insert(out.summary.begin(), {"experiment", name});
    out.summary.emplace_back("seed", std::to_string(ctx.seed));
    emit_summary(out.summary, (dir / (name + "_summary.csv")).string());
    if (out.flagged) {
      err << name << ": a numerical routine did not converge; results written but flagged\n";
      return kNumerical;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace owlab::cli
