#include "cli_commands.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dht/cover.hpp"
#include "dht/dht_bounds.hpp"
#include "dht/ensemble.hpp"
#include "dht/parallel.hpp"
#include "problem_io.hpp"

namespace dht::tool {

namespace {

using Clock = std::chrono::steady_clock;
using Config = std::vector<std::pair<std::string, std::string>>;

unsigned resolve_threads(unsigned cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("DHT_EXP_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // hardware concurrency
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "dht_exp";
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

void emit_outputs(const std::string& out_path, const std::string& content,
                  const std::string& command, const Config& config,
                  std::uint64_t seed, double wall_s) {
  write_file(out_path, content);
  std::string manifest = manifest_json(command, config, seed, wall_s,
                                       fnv1a64_hex(content));
  write_file(out_path + ".manifest.json", manifest);
}

std::string meta_block(const std::string& tool_line, const Config& config) {
  std::string s;
  s += "# " + tool_line + "\n";
  for (const auto& [k, v] : config) s += "# " + k + " = " + v + "\n";
  return s;
}

struct ProblemOpts {
  std::string problem_path;
  std::string preset;

  Problem load() const {
    if (!preset.empty()) return preset_problem(preset);
    if (!problem_path.empty()) return load_problem(problem_path);
    throw ProblemFormatError("one of --problem/--preset is required");
  }
};

void add_problem_flags(CLI::App* cmd, ProblemOpts& po) {
  auto* a = cmd->add_option("--problem", po.problem_path, "problem JSON file");
  auto* b = cmd->add_option("--preset", po.preset, "named preset (binary-example)");
  a->excludes(b);
}

// ---------------------------------------------------------------- d2 ------

int cmd_d2(const ProblemOpts& po, const std::string& d1_spec, double tau_max,
           int grid_res, const std::string& out, const std::string& format,
           const std::string& command) {
  Problem prob = po.load();
  std::vector<double> d1s = parse_range(d1_spec);
  for (double d1 : d1s)
    if (d1 < 0.0) throw std::invalid_argument("d2: negative D1");

  Pmf p = prob.pair.p_xy.flatten();
  Pmf pbar = prob.pair.pbar_xy.flatten();
  TauGrid grid;
  grid.tau_max = tau_max;
  double critical = d2_critical_point(p, pbar);

  auto t0 = Clock::now();
  std::vector<std::array<double, 3>> rows(d1s.size());
  for (std::size_t i = 0; i < d1s.size(); ++i) {
    double primal = d2_primal(p, pbar, d1s[i], grid_res);
    double dual = d2_chernoff(p, pbar, d1s[i], grid);
    rows[i] = {d1s[i], primal, dual};
  }
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  Config cfg{{"problem", prob.name},
             {"d1", d1_spec},
             {"tau_max", fmt9(tau_max)},
             {"grid_res", std::to_string(grid_res)},
             {"critical_point", fmt9(critical)}};
  std::string content;
  if (format == "json") {
    nlohmann::json j;
    j["meta"] = {{"tool", std::string("dht_exp d2 ") + kVersion},
                 {"problem", prob.name},
                 {"critical_point", critical}};
    for (const auto& r : rows)
      j["points"].push_back({{"d1", r[0]},
                             {"d2_primal", r[1]},
                             {"d2_dual", r[2]},
                             {"past_critical", r[0] > critical}});
    content = j.dump(2) + "\n";
  } else {
    content = meta_block(std::string("dht_exp d2 ") + kVersion, cfg);
    content += "d1,d2_primal,d2_dual,past_critical\n";
    for (const auto& r : rows) {
      content += fmt9(r[0]);
      content += ',';
      content += fmt9(r[1]);
      content += ',';
      content += fmt9(r[2]);
      content += ',';
      content += (r[0] > critical) ? '1' : '0';
      content += '\n';
    }
  }
  emit_outputs(out, content, command, cfg, 0, wall);
  return 0;
}

// --------------------------------------------------------- dht-bound ------

struct CurveRow {
  double rate, e1, lower, converse, qx0, tau;
};

// Cached sweep: the inner bracket min{(tau+1)d_tau, B} depends only on
// (R, Q_X, tau), so it is evaluated once per cell and shared across E1.
std::vector<CurveRow> compute_curve(const HypothesisPair& pair,
                                    const std::vector<double>& rates,
                                    const std::vector<double>& e1s,
                                    const SearchConfig& cfg) {
  double e1_max = 0.0;
  for (double e : e1s) e1_max = std::max(e1_max, e);
  std::vector<Pmf> grid = qx_grid(pair, cfg, e1_max);
  std::vector<double> taus = cfg.tau_grid.points();

  std::vector<CurveRow> rows;
  for (double rate : rates) {
    // inner[qi * taus.size() + ti]; each grid point walks its tau column in
    // order and reuses the solver warm starts
    std::vector<double> inner(grid.size() * taus.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t qi) {
      BCombinedCache cache;
      for (std::size_t ti = 0; ti < taus.size(); ++ti)
        inner[qi * taus.size() + ti] =
            theorem2_inner(rate, grid[qi], taus[ti], pair, cfg, &cache);
    });
    std::vector<double> d_p(grid.size()), d_pbar(grid.size());
    for (std::size_t qi = 0; qi < grid.size(); ++qi) {
      d_p[qi] = kl(grid[qi], pair.p_x());
      d_pbar[qi] = kl(grid[qi], pair.pbar_x());
    }
    for (double e1 : e1s) {
      double best = kInf, best_tau = 0.0;
      std::size_t best_qi = 0;
      for (std::size_t qi = 0; qi < grid.size(); ++qi) {
        if (cfg.restrict_qx_ball && !(d_p[qi] <= e1)) continue;
        if (d_pbar[qi] == kInf || d_p[qi] == kInf) continue;
        double sup = -kInf, sup_tau = 0.0;
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
          double v = inner[qi * taus.size() + ti];
          if (v == kInf) continue;
          double obj = -taus[ti] * (e1 - d_p[qi]) + v;
          if (obj > sup) {
            sup = obj;
            sup_tau = taus[ti];
          }
        }
        double val = d_pbar[qi] + sup;
        if (val < best) {
          best = val;
          best_tau = sup_tau;
          best_qi = qi;
        }
      }
      CurveRow row;
      row.rate = rate;
      row.e1 = e1;
      row.lower = best;
      row.converse = e2_converse({rate, e1}, pair);
      row.qx0 = grid[best_qi][0];
      row.tau = best_tau;
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_dht_bound(const ProblemOpts& po, const std::string& rates_spec,
                  const std::string& e1_spec, const SearchConfig& cfg_in,
                  bool no_loss, const std::string& out, const std::string& format,
                  const std::string& command, std::uint64_t seed) {
  Problem prob = po.load();
  std::vector<double> rates = parse_list(rates_spec);
  std::vector<double> e1s = parse_range(e1_spec);
  for (double r : rates)
    if (r < 0.0) throw std::invalid_argument("dht-bound: negative rate");
  for (double e : e1s)
    if (e < 0.0) throw std::invalid_argument("dht-bound: negative E1");

  SearchConfig cfg = cfg_in;
  auto t0 = Clock::now();
  std::vector<CurveRow> rows = compute_curve(prob.pair, rates, e1s, cfg);

  Config cfg_echo{{"problem", prob.name},
                  {"rates", rates_spec},
                  {"e1", e1_spec},
                  {"tau_max", fmt9(cfg.tau_grid.tau_max)},
                  {"u_card", std::to_string(cfg.u_cardinality)},
                  {"qx_res", std::to_string(cfg.qx_resolution)},
                  {"qux_res", std::to_string(cfg.qux_resolution)},
                  {"rb_grid", std::to_string(cfg.rb_grid_size)},
                  {"symmetric_qux", cfg.symmetry_reduction ? "1" : "0"},
                  {"seed", std::to_string(seed)}};
  if (no_loss) {
    for (double r : rates) {
      NoLossResult nl = no_loss_check(r, prob.pair, cfg);
      std::ostringstream key;
      key << "no_loss_R_" << fmt9(r);
      cfg_echo.emplace_back(key.str(), (nl.holds ? std::string("true") : std::string("false")) +
                                           " worst_margin=" + fmt9(nl.worst_margin));
    }
  }
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  std::string content;
  if (format == "json") {
    nlohmann::json j;
    j["meta"] = {{"tool", std::string("dht_exp dht-bound ") + kVersion},
                 {"problem", prob.name}};
    for (const auto& r : rows)
      j["points"].push_back({{"rate", r.rate},
                             {"e1", r.e1},
                             {"e2_lower", r.lower},
                             {"e2_converse", r.converse},
                             {"witness_qx0", r.qx0},
                             {"witness_tau", r.tau}});
    content = j.dump(2) + "\n";
  } else {
    content = meta_block(std::string("dht_exp dht-bound ") + kVersion, cfg_echo);
    content += "rate,e1,e2_lower,e2_converse,witness_qx0,witness_tau\n";
    for (const auto& r : rows) {
      content += fmt9(r.rate);
      content += ',';
      content += fmt9(r.e1);
      content += ',';
      content += fmt9(r.lower);
      content += ',';
      content += fmt9(r.converse);
      content += ',';
      content += fmt9(r.qx0);
      content += ',';
      content += fmt9(r.tau);
      content += '\n';
    }
  }
  emit_outputs(out, content, command, cfg_echo, seed, wall);
  return 0;
}

// --------------------------------------------------------------- lab ------

int cmd_lab_np(const ProblemOpts& po, int n, int x_symbol, double threshold,
               double eta, const std::string& out, const std::string& command) {
  Problem prob = po.load();
  if (x_symbol < 0 || static_cast<std::size_t>(x_symbol) >= prob.pair.nx())
    throw std::invalid_argument("lab np: --x outside the alphabet");
  Pmf p = prob.pair.p_y_given_x().row(x_symbol);
  Pmf pbar = prob.pair.pbar_y_given_x().row(x_symbol);
  auto t0 = Clock::now();
  NpResult r = np_exact(p, pbar, n, threshold, eta);
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  nlohmann::json j;
  j["n"] = n;
  j["x"] = x_symbol;
  j["threshold"] = threshold;
  j["eta"] = eta;
  j["p1"] = r.p1;
  j["p2"] = r.p2;
  j["empirical_exponent_1"] = r.p1 > 0 ? -std::log(r.p1) / n : kInf;
  j["empirical_exponent_2"] = r.p2 > 0 ? -std::log(r.p2) / n : kInf;
  std::string content = j.dump(2) + "\n";
  Config cfg{{"problem", prob.name}, {"n", std::to_string(n)}};
  emit_outputs(out, content, command, cfg, 0, wall);
  return 0;
}

int cmd_lab_cover(const ProblemOpts& po, int n, const std::string& type_spec,
                  int code_size, std::uint64_t seed, int max_perms,
                  const std::string& out, const std::string& command) {
  Problem prob = po.load();
  std::vector<int> counts = parse_int_list(type_spec);
  TypeDescriptor q(counts, n);
  u128 cls = type_class_size(q);
  if (code_size < 1 || static_cast<double>(u128_to_double(cls)) < code_size)
    throw std::invalid_argument("lab cover: code size exceeds the class");

  // base code: random distinct members of the class
  std::vector<std::vector<int>> all = type_enumerate(q);
  CounterRng rng(seed, 1);
  rng.shuffle(all);
  CdCode base;
  base.n = n;
  base.codewords.assign(all.begin(), all.begin() + code_size);

  auto t0 = Clock::now();
  CoverResult cover = greedy_cover(q, base, seed, max_perms);
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  // coupon-collector style budget used as the pass threshold
  double budget =
      std::ceil(u128_to_double(cls) / code_size * std::log(u128_to_double(cls))) + 5.0;

  std::size_t covered = 0;
  for (const auto& b : cover.bins) covered += b.size();
  bool partition_ok = covered == cover.class_size;

  nlohmann::json j;
  j["n"] = n;
  j["type"] = counts;
  j["class_size"] = static_cast<double>(u128_to_double(cls));
  j["code_size"] = code_size;
  j["permutations"] = cover.permutations.size();
  j["perm_budget"] = budget;
  j["partition_ok"] = partition_ok;
  j["pass"] = partition_ok &&
              static_cast<double>(cover.permutations.size()) <= budget;
  std::vector<std::size_t> sizes;
  for (const auto& b : cover.bins) sizes.push_back(b.size());
  j["bin_sizes"] = sizes;
  std::string content = j.dump(2) + "\n";
  Config cfg{{"problem", prob.name},
             {"n", std::to_string(n)},
             {"type", type_spec},
             {"code_size", std::to_string(code_size)},
             {"max_perms", std::to_string(max_perms)}};
  emit_outputs(out, content, command, cfg, seed, wall);
  return 0;
}

int cmd_lab_enumerators(const ProblemOpts& po, int n, int trials,
                        std::uint64_t seed, double rho_c,
                        const std::string& out, const std::string& command) {
  Problem prob = po.load();
  (void)prob;
  if (n % 4 != 0) throw std::invalid_argument("lab enumerators: n must be divisible by 4");
  // fixed binary (U,X) and Y shapes scaled with n
  int q = n / 4;
  TypeDescriptor q_ux({q, q, q, q}, n);  // independent-looking joint; U uniform
  EnsembleSpec spec(n, 2, 2, q_ux, rho_c, 0.0, seed);
  // target (U,Y) joint type with a dependence: [[n/2 - q, q], [q, n/2 - q]]
  TypeDescriptor q_uy({n / 2 - q, q, q, n / 2 - q}, n);
  std::vector<int> y(n, 0);
  std::fill(y.begin() + n / 2, y.end(), 1);

  auto t0 = Clock::now();
  double exact = enumerator_expectation_n(spec, q_uy, y, 2);
  std::vector<double> draws(trials);
  parallel_for(trials, 0, [&](std::size_t t) {
    HierarchicalDraw d = draw_hierarchical(spec, t);
    EnumeratorTally tally = enumerate_tally(d, y, 2, 2, 2);
    auto it = tally.n_counts.find(q_uy.counts);
    draws[t] = it == tally.n_counts.end() ? 0.0 : static_cast<double>(it->second);
  });
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= trials;
  double var = 0.0;
  for (double v : draws) var += (v - mean) * (v - mean);
  var /= std::max(1, trials - 1);
  double se = std::sqrt(var / trials);
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  // reference exponent rho_c - I(U;Y) for the normalized log
  JointPmf q_uy_pmf(
      {{double(n / 2 - q) / n, double(q) / n}, {double(q) / n, double(n / 2 - q) / n}});
  double target = spec.rho_c_effective() - q_uy_pmf.mutual_information();

  nlohmann::json j;
  j["n"] = n;
  j["trials"] = trials;
  j["rho_c_effective"] = spec.rho_c_effective();
  j["exact_expectation"] = exact;
  j["mc_mean"] = mean;
  j["mc_se"] = se;
  j["pass"] = std::abs(exact - mean) <= 3.0 * std::max(se, 1e-12);
  j["normalized_log_exact"] = exact > 0 ? std::log(exact) / n : -kInf;
  j["exponent_target"] = target;
  std::string content = j.dump(2) + "\n";
  Config cfg{{"n", std::to_string(n)},
             {"trials", std::to_string(trials)},
             {"rho_c", fmt9(rho_c)}};
  emit_outputs(out, content, command, cfg, seed, wall);
  return 0;
}

int cmd_lab_chernoff_mc(const ProblemOpts& po, int n, int trials,
                        std::uint64_t seed, double lambda, double rho_c,
                        double rho_s, const std::string& out,
                        const std::string& command, unsigned threads) {
  Problem prob = po.load();
  if (n % 4 != 0)
    throw std::invalid_argument("lab chernoff-mc: n must be divisible by 4");
  check_output_space(prob.pair.ny(), n);
  int q = n / 4;
  TypeDescriptor q_ux({n / 2 - q, q, q, n / 2 - q}, n);
  EnsembleSpec spec(n, 2, 2, q_ux, rho_c, rho_s, seed);

  auto t0 = Clock::now();
  std::vector<long double> sums(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    HierarchicalDraw d = draw_hierarchical(spec, t);
    CdCode code;
    code.n = n;
    code.codewords = d.satellites[0];  // placeholder, replaced below
    code.codewords.clear();
    for (const auto& sats : d.satellites)
      for (const auto& s : sats) code.codewords.push_back(s);
    // raw multiset: keep multiplicity by summing induced laws directly
    std::vector<long double> py = induced_distribution(code, prob.pair.p_y_given_x());
    std::vector<long double> pby =
        induced_distribution(code, prob.pair.pbar_y_given_x());
    long double sum = 0.0L;
    for (std::size_t i = 0; i < py.size(); ++i) {
      long double a = py[i] > 0.0L ? std::pow(py[i], (long double)(1.0 - lambda)) : 0.0L;
      long double b = pby[i] > 0.0L ? std::pow(pby[i], (long double)lambda) : 0.0L;
      sum += a * b;
    }
    sums[t] = sum;
  });
  long double mean = 0.0L;
  for (long double v : sums) mean += v;
  mean /= trials;
  double empirical = -static_cast<double>(std::log(mean)) / n;

  // single-letter references at the effective (rounded) rates
  double rho_eff = spec.rho_effective();
  double rho_c_eff = spec.rho_c_effective();
  Pmf q_x = q_ux.pmf().probs().size() == 4
                ? Pmf({q_ux.pmf()[0] + q_ux.pmf()[2], q_ux.pmf()[1] + q_ux.pmf()[3]})
                : Pmf::uniform(2);
  double d_lam = chernoff_diag_lambda(q_x, lambda, prob.pair);
  std::vector<std::vector<double>> jm(2, std::vector<double>(2));
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t x = 0; x < 2; ++x)
      jm[u][x] = static_cast<double>(q_ux.counts[u * 2 + x]) / n;
  JointPmf q_ux_pmf(jm);
  double hx = q_x.entropy();
  double tau = lambda_to_tau(lambda);
  SolveOptions sopt;
  sopt.multistarts = 4;
  RcProblem rc(std::max(0.0, hx - rho_eff), rho_c_eff, q_ux_pmf, tau, prob.pair);
  double brc = solve_brc(rc, sopt).value;
  double a_rc = lambda * brc;
  double bound = std::min(d_lam, a_rc);
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  nlohmann::json j;
  j["n"] = n;
  j["trials"] = trials;
  j["lambda"] = lambda;
  j["rho_c_effective"] = rho_c_eff;
  j["rho_s_effective"] = spec.rho_s_effective();
  j["empirical_exponent"] = empirical;
  j["d_lambda"] = d_lam;
  j["a_rc"] = a_rc;
  j["bound"] = bound;
  j["slack"] = 0.15;
  j["pass"] = empirical >= bound - 0.15;
  std::string content = j.dump(2) + "\n";
  Config cfg{{"problem", prob.name},
             {"n", std::to_string(n)},
             {"trials", std::to_string(trials)},
             {"lambda", fmt9(lambda)},
             {"rho_c", fmt9(rho_c)},
             {"rho_s", fmt9(rho_s)}};
  emit_outputs(out, content, command, cfg, seed, wall);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Bounds on the reliability of distributed hypothesis testing"};
  app.require_subcommand(1);

  // ---- d2
  auto* d2 = app.add_subcommand("d2", "ordinary HT reliability curve");
  ProblemOpts d2_prob;
  add_problem_flags(d2, d2_prob);
  std::string d2_range = "0.005:0.1:0.005", d2_out = "d2.csv", d2_fmt = "csv";
  double d2_tau_max = 64.0;
  int d2_grid = 400;
  d2->add_option("--d1", d2_range, "D1 range start:end:step");
  d2->add_option("--tau-max", d2_tau_max, "tau grid upper end");
  d2->add_option("--grid-res", d2_grid, "primal fallback grid resolution");
  d2->add_option("--out", d2_out, "output path");
  d2->add_option("--format", d2_fmt, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // ---- dht-bound
  auto* db = app.add_subcommand("dht-bound", "achievable and converse DHT bounds");
  ProblemOpts db_prob;
  add_problem_flags(db, db_prob);
  std::string db_rates = "0.2,0.5", db_e1 = "0:0.1:0.01", db_out = "dht_bound.csv",
              db_fmt = "csv";
  SearchConfig db_cfg;
  db_cfg.tau_grid.refine_iters = 0;
  db_cfg.refine_qx = false;
  db_cfg.qux_resolution = 4;
  db_cfg.rb_grid_size = 7;
  std::uint64_t db_seed = 1;
  unsigned db_threads = 0;
  bool db_no_loss = false, db_symmetric = false;
  db->add_option("--rates", db_rates, "comma list of rates R (nats)");
  db->add_option("--e1", db_e1, "E1 range start:end:step");
  db->add_option("--tau-max", db_cfg.tau_grid.tau_max, "tau grid upper end");
  db->add_option("--u-card", db_cfg.u_cardinality, "auxiliary alphabet size (0 = |X|+1)");
  db->add_option("--qx-res", db_cfg.qx_resolution, "Q_X simplex mesh");
  db->add_option("--qux-res", db_cfg.qux_resolution, "test channel mesh");
  db->add_option("--rb-grid", db_cfg.rb_grid_size, "binning-rate grid points");
  db->add_option("--seed", db_seed, "solver multistart seed");
  db->add_option("--threads", db_threads, "worker threads (0 = auto)");
  db->add_flag("--symmetric-qux", db_symmetric, "search swap-symmetric test channels");
  db->add_flag("--no-loss-check", db_no_loss, "print the Corollary-3 verdict per rate");
  db->add_option("--out", db_out, "output path");
  db->add_option("--format", db_fmt, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // ---- lab
  auto* lab = app.add_subcommand("lab", "desk-scale exact / Monte-Carlo experiments");
  lab->require_subcommand(1);

  auto* lnp = lab->add_subcommand("np", "exact Neyman-Pearson per-letter test");
  ProblemOpts lnp_prob;
  add_problem_flags(lnp, lnp_prob);
  int lnp_n = 1, lnp_x = 0;
  double lnp_thr = 0.0, lnp_eta = 0.0;
  std::string lnp_out = "lab_np.json";
  lnp->add_option("--n", lnp_n, "blocklength");
  lnp->add_option("--x", lnp_x, "conditioning input symbol");
  lnp->add_option("--threshold", lnp_thr, "threshold T (nats/symbol)");
  lnp->add_option("--eta", lnp_eta, "randomization at equality");
  lnp->add_option("--out", lnp_out, "output path");

  auto* lcov = lab->add_subcommand("cover", "permutation covering of a type class");
  ProblemOpts lcov_prob;
  add_problem_flags(lcov, lcov_prob);
  int lcov_n = 8, lcov_size = 7, lcov_max = 4000;
  std::string lcov_type = "4,4", lcov_out = "lab_cover.json";
  std::uint64_t lcov_seed = 1;
  lcov->add_option("--n", lcov_n, "blocklength");
  lcov->add_option("--type", lcov_type, "type counts, comma separated");
  lcov->add_option("--code-size", lcov_size, "base CD code size");
  lcov->add_option("--seed", lcov_seed, "permutation seed")->required();
  lcov->add_option("--max-perms", lcov_max, "permutation budget");
  lcov->add_option("--out", lcov_out, "output path");

  auto* lenu = lab->add_subcommand("enumerators", "type-class enumerator expectations");
  ProblemOpts lenu_prob;
  add_problem_flags(lenu, lenu_prob);
  int lenu_n = 8, lenu_trials = 2000;
  double lenu_rho_c = 0.25;
  std::uint64_t lenu_seed = 1;
  std::string lenu_out = "lab_enumerators.json";
  lenu->add_option("--n", lenu_n, "blocklength (multiple of 4)");
  lenu->add_option("--trials", lenu_trials, "Monte-Carlo draws");
  lenu->add_option("--rho-c", lenu_rho_c, "cloud-center rate");
  lenu->add_option("--seed", lenu_seed, "draw seed")->required();
  lenu->add_option("--out", lenu_out, "output path");

  auto* lmc = lab->add_subcommand("chernoff-mc", "ensemble Chernoff-parameter check");
  ProblemOpts lmc_prob;
  add_problem_flags(lmc, lmc_prob);
  int lmc_n = 12, lmc_trials = 200;
  double lmc_lambda = 0.5, lmc_rho_c = 0.15, lmc_rho_s = 0.15;
  std::uint64_t lmc_seed = 1;
  unsigned lmc_threads = 0;
  std::string lmc_out = "lab_chernoff_mc.json";
  lmc->add_option("--n", lmc_n, "blocklength (multiple of 4)");
  lmc->add_option("--trials", lmc_trials, "Monte-Carlo draws");
  lmc->add_option("--lambda", lmc_lambda, "Chernoff parameter lambda");
  lmc->add_option("--rho-c", lmc_rho_c, "cloud-center rate");
  lmc->add_option("--rho-s", lmc_rho_s, "satellite rate");
  lmc->add_option("--seed", lmc_seed, "draw seed")->required();
  lmc->add_option("--threads", lmc_threads, "worker threads (0 = auto)");
  lmc->add_option("--out", lmc_out, "output path");

  std::vector<const char*> argv;
  argv.push_back("dht_exp");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  }

  const std::string command = join_args(args);
  try {
    if (d2->parsed())
      return cmd_d2(d2_prob, d2_range, d2_tau_max, d2_grid, d2_out, d2_fmt, command);
    if (db->parsed()) {
      db_cfg.threads = resolve_threads(db_threads);
      db_cfg.symmetry_reduction = db_symmetric;
      db_cfg.seed = db_seed;
      db_cfg.solver.seed = db_seed;
      if (db_prob.preset == "binary-example") db_cfg.symmetry_reduction = true;
      return cmd_dht_bound(db_prob, db_rates, db_e1, db_cfg, db_no_loss, db_out,
                           db_fmt, command, db_seed);
    }
    if (lnp->parsed())
      return cmd_lab_np(lnp_prob, lnp_n, lnp_x, lnp_thr, lnp_eta, lnp_out, command);
    if (lcov->parsed())
      return cmd_lab_cover(lcov_prob, lcov_n, lcov_type, lcov_size, lcov_seed,
                           lcov_max, lcov_out, command);
    if (lenu->parsed())
      return cmd_lab_enumerators(lenu_prob, lenu_n, lenu_trials, lenu_seed,
                                 lenu_rho_c, lenu_out, command);
    if (lmc->parsed())
      return cmd_lab_chernoff_mc(lmc_prob, lmc_n, lmc_trials, lmc_seed, lmc_lambda,
                                 lmc_rho_c, lmc_rho_s, lmc_out, command,
                                 resolve_threads(lmc_threads));
  } catch (const ProblemFormatError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const SizeGuardError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}

}  // namespace dht::tool
