#ifndef SPARSE_ERGM_CLI_HPP
#define SPARSE_ERGM_CLI_HPP

// Command dispatch for the sparse_ergm tool. Needs OpenSSL (libcrypto) for
// manifest digests; link the sparse_ergm_cli target.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "sparse_ergm/ergm_sim.hpp"
#include "sparse_ergm/finner.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/io.hpp"
#include "sparse_ergm/nmf.hpp"
#include "sparse_ergm/planar.hpp"

namespace sparse_ergm::cli {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr const char* version = "1.0.0";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("sha256 digest failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::vector<std::string> command_line;
  ojson config = ojson::object();
  std::uint64_t seed = 0;
  std::string version_string = version;
  std::string started, finished;
  std::vector<std::pair<std::string, std::string>> digests;  // file name, sha256

  ojson to_json() const {
    ojson files = ojson::array();
    for (const auto& [name, d] : digests) files.push_back({{"file", name}, {"sha256", d}});
    return {{"command_line", command_line}, {"config", config},          {"seed", seed},
            {"version", version_string},    {"started", started},        {"finished", finished},
            {"outputs", files}};
  }
};

/// Shared per-run state: output directory, emitted files, manifest.
class Context {
public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::string out_dir;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool json_flag = false;
  RunManifest manifest;

  double tol_or(double fallback) const { return tol.value_or(fallback); }

  fs::path resolve(const std::string& name) const {
    fs::path p(name);
    if (!out_dir.empty() && p.is_relative()) return fs::path(out_dir) / p;
    return p;
  }

  void emit(const std::string& name, const std::string& content) {
    const fs::path p = resolve(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    io::write_text(p.string(), content);
    manifest.digests.emplace_back(p.string(), sha256_hex(content));
  }

  /// Result JSON goes to stdout, and to result.json when an output directory is set.
  void result(const ojson& j) {
    const std::string text = j.dump();
    out_ << text << '\n';
    if (!out_dir.empty()) emit("result.json", text + '\n');
  }

  void warn(const std::string& msg) { err_ << "warning: " << msg << '\n'; }

  void finish() {
    if (out_dir.empty()) return;
    manifest.finished = utc_now();
    fs::create_directories(out_dir);
    io::write_text((fs::path(out_dir) / "manifest.json").string(), manifest.to_json().dump(2) + '\n');
  }

private:
  std::ostream& out_;
  std::ostream& err_;
};

inline ojson point_json(const PlanarPoint& p) { return ojson::array({p.a, p.b}); }

inline ojson points_json(const std::vector<PlanarPoint>& ps) {
  ojson a = ojson::array();
  for (const auto& p : ps) a.push_back(point_json(p));
  return a;
}

inline std::vector<std::string> motif_names(const std::vector<Motif>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.name());
  return out;
}

inline HomAlgorithm parse_algorithm(const std::string& s) {
  if (s == "auto") return HomAlgorithm::automatic;
  if (s == "cycle") return HomAlgorithm::cycle;
  if (s == "star") return HomAlgorithm::star;
  if (s == "clique") return HomAlgorithm::clique;
  if (s == "generic") return HomAlgorithm::generic;
  throw DomainError("unknown algorithm " + s);
}

// ---------------------------------------------------------------------------
// hom-density

struct HomDensityArgs {
  std::string motifs = "C3";
  std::string motif_file, graph;
  int er_n = 0;
  double er_p = 0.1;
  double scale = 1.0;
  std::string algorithm = "auto";
};

inline void run_hom_density(Context& ctx, const HomDensityArgs& a) {
  std::vector<Motif> motifs =
      a.motif_file.empty() ? io::motif_list(a.motifs) : std::vector<Motif>{io::motif_ref(io::read_json(a.motif_file))};
  WeightTable table(1);
  if (!a.graph.empty()) {
    table = io::read_table(a.graph);
  } else if (a.er_n > 0) {
    CounterRng rng(ctx.seed);
    table = erdos_renyi(a.er_n, a.er_p, rng).to_table();
  } else {
    throw DomainError("hom-density: give --graph or --er");
  }
  if (!(a.scale > 0.0)) throw DomainError("hom-density: scale must be positive");
  const HomAlgorithm alg = parse_algorithm(a.algorithm);
  ojson dens = ojson::array(), counts = ojson::array();
  const bool binary = table.is_binary();
  std::optional<BinaryGraph> g;
  if (binary) g = BinaryGraph::from_table(table);
  for (const auto& f : motifs) {
    if (binary) {
      dens.push_back(hom_density(f, *g, a.scale, alg));
      counts.push_back(hom_count(f, *g, alg));
    } else {
      dens.push_back(hom_density(f, table, a.scale, alg));
    }
  }
  ojson j{{"n", table.n()}, {"scale", a.scale}, {"binary", binary}, {"motifs", motif_names(motifs)}, {"densities", dens}};
  if (binary) j["hom_counts"] = counts;
  ctx.result(j);
}

// ---------------------------------------------------------------------------
// planar-phi

struct PlanarArgs {
  std::string motifs, s;
  std::string emit_region, emit_curves;
  double a_max = 0.0, b_max = 0.0;
  int steps = 100;
};

inline ojson curves_json(const std::vector<Motif>& motifs, const std::vector<double>& s, const RegionData& region,
                         const PlanarSolution& sol) {
  ojson curves = ojson::array();
  for (const auto& line : region.curves) curves.push_back(points_json(line));
  return {{"motifs", motif_names(motifs)},
          {"s", s},
          {"curves", curves},
          {"objective_line", {{"value", sol.value}, {"points", ojson::array({{0.0, sol.value}, {2.0 * sol.value, 0.0}})}}},
          {"optimizers", points_json(sol.optimizers)}};
}

inline std::string region_csv(const RegionData& region) {
  std::string csv = "a,b,feasible,objective\n";
  for (const auto& r : region.rows)
    csv += io::csv_line({io::number(r.a), io::number(r.b), r.feasible ? "1" : "0", io::number(r.objective)});
  return csv;
}

inline RegionGrid default_grid(const PlanarSolution& sol, double a_max, double b_max, int steps) {
  RegionGrid g;
  const double v = std::max(sol.value, 0.5);
  g.a_max = a_max > 0.0 ? a_max : 2.5 * v;
  g.b_max = b_max > 0.0 ? b_max : 1.25 * v;
  g.a_steps = g.b_steps = steps;
  return g;
}

inline void run_planar(Context& ctx, const PlanarArgs& a) {
  const auto motifs = io::motif_list(a.motifs);
  const auto fam = MotifFamily::make(motifs);
  const auto s = io::number_list(a.s);
  PlanarOptions opt;
  if (ctx.tol) opt.tie_tolerance = *ctx.tol;
  const auto sol = phi_solve(fam, s, opt);
  if (!a.emit_region.empty() || !a.emit_curves.empty()) {
    const auto region = phi_region_emit(fam, s, default_grid(sol, a.a_max, a.b_max, a.steps));
    if (!a.emit_region.empty()) ctx.emit(a.emit_region, region_csv(region));
    if (!a.emit_curves.empty()) ctx.emit(a.emit_curves, curves_json(motifs, s, region, sol).dump() + '\n');
  }
  if (sol.near_tie) ctx.warn("optimal set decided within the near-tie window");
  ctx.result({{"value", sol.value}, {"optimizers", points_json(sol.optimizers)}});
}

// ---------------------------------------------------------------------------
// psi

inline void run_psi(Context& ctx, const std::string& path) {
  const auto spec = io::hamiltonian_from_json(io::read_json(path));
  PsiOptions opt;
  if (ctx.tol) opt.opt_tolerance = *ctx.tol;
  const auto sol = psi_solve(spec, opt);
  ctx.result({{"value", sol.value},
              {"dual_value", sol.dual_value},
              {"excess", sol.excess},
              {"radius", sol.radius},
              {"optimizers", points_json(sol.optimizers)},
              {"s_star", sol.s_star},
              {"warnings", sol.warnings}});
}

// ---------------------------------------------------------------------------
// edge-f

struct EdgeFArgs {
  std::string motif = "C3", motif_file;
  double gamma = 1.0, beta = 1.0;
  std::string beta_grid, emit;
};

inline ojson edge_f_json(const EdgeFReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); };
  return {{"regular", r.regular},       {"s_c", opt(r.s_c)},       {"beta_o", r.beta_o}, {"beta_c", opt(r.beta_c)},
          {"phase", to_string(r.phase)}, {"s_star", r.s_star},      {"a_star", r.a_star}, {"b_star", r.b_star},
          {"psi", r.psi},               {"warnings", r.warnings}};
}

/// lo:hi:step, inclusive of hi up to rounding.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(io::number_list(item).at(0));
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw DomainError("grid must be lo:hi:step with step > 0 and hi >= lo");
  const long count = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (count > 1000000) throw DomainError("grid has too many points");
  std::vector<double> out;
  for (long k = 0; k <= count; ++k) out.push_back(parts[0] + k * parts[2]);
  return out;
}

inline void run_edge_f(Context& ctx, const EdgeFArgs& a) {
  const Motif f = a.motif_file.empty() ? builtin_motif(a.motif) : io::motif_ref(io::read_json(a.motif_file));
  const auto report = edge_f_solve(edge_f_model(f, a.gamma, a.beta));
  if (!a.beta_grid.empty()) {
    std::string csv = "beta,phase,s_star,a_star,b_star,psi\n";
    for (double b : parse_grid(a.beta_grid)) {
      const auto r = edge_f_solve(edge_f_model(f, a.gamma, b));
      csv += io::csv_line({io::number(b), to_string(r.phase), io::number(r.s_star), io::number(r.a_star),
                           io::number(r.b_star), io::number(r.psi)});
    }
    if (a.emit.empty()) throw DomainError("edge-f: --beta-grid needs --emit");
    ctx.emit(a.emit, csv);
  }
  ojson j{{"motif", f.name()}, {"gamma", a.gamma}, {"beta", a.beta}};
  j.update(edge_f_json(report));
  ctx.result(j);
}

// ---------------------------------------------------------------------------
// nmf

struct NmfArgs {
  int n = 64;
  double p = 0.2;
  std::string hamiltonian, emit_q;
};

inline void run_nmf(Context& ctx, const NmfArgs& a) {
  const auto spec = io::hamiltonian_from_json(io::read_json(a.hamiltonian));
  NmfOptions opt;
  opt.seed = ctx.seed;
  if (ctx.tol) opt.grad_tol = *ctx.tol;
  const auto res = nmf_solve(spec, a.n, a.p, opt);
  if (res.value + 1e-9 * (1.0 + std::abs(res.value)) < res.witness_value)
    throw InternalError("nmf: value below the best clique-hub warm start");
  if (!a.emit_q.empty()) ctx.emit(a.emit_q, io::encode_binary(res.q));
  ojson restarts = ojson::array();
  for (const auto& r : res.restarts)
    restarts.push_back({{"origin", r.origin}, {"start_value", r.start_value}, {"value", r.value},
                        {"iterations", r.iterations}, {"grad_norm", r.grad_norm}, {"converged", r.converged}});
  ctx.result({{"value", res.value},
              {"iterations", res.iterations},
              {"residuals", {{"projected_gradient", res.grad_norm}}},
              {"witness_value", res.witness_value},
              {"constant_value", res.constant_value},
              {"rate", res.rate},
              {"value_over_rate", res.value / res.rate},
              {"converged", res.converged},
              {"restarts", restarts},
              {"warnings", res.warnings}});
}

// ---------------------------------------------------------------------------
// phi-np

struct PhiNpArgs {
  int n = 64;
  double p = 0.2;
  std::string motifs = "C3", s = "1.0", emit;
};

inline void run_phi_np(Context& ctx, const PhiNpArgs& a) {
  const auto fam = MotifFamily::make(io::motif_list(a.motifs));
  const auto s = io::number_list(a.s);
  PhiNpOptions opt;
  if (ctx.tol) opt.feasibility_tol = *ctx.tol;
  const auto res = phi_np_solve(fam, a.n, a.p, s, opt);
  if (res.value > res.witness_value + 1e-9 * (1.0 + std::abs(res.witness_value)))
    throw InternalError("phi-np: value above a feasible clique-hub witness");
  if (!a.emit.empty()) ctx.emit(a.emit, io::encode_binary(res.q));
  ctx.result({{"value", res.value},
              {"iterations", res.iterations},
              {"residuals", res.residuals},
              {"witness_value", res.witness_value},
              {"witness_origin", res.witness_origin},
              {"source", res.source},
              {"densities", res.densities},
              {"rate", res.rate},
              {"value_over_rate", res.value / res.rate},
              {"phi", phi_value(fam, s)},
              {"warnings", res.warnings}});
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  int n = 1024;
  double p = 0.1;
  std::string hamiltonian, emit_traj, emit_graph;
  int sweeps = 2000, burnin = 500, chains = 4, thin = 1;
  bool detect = false, start_empty = false;
};

inline std::string trajectory_csv(const ExperimentResult& res, std::size_t m, bool detect) {
  std::vector<std::string> head{"chain", "sweep", "edges"};
  for (std::size_t k = 1; k <= m; ++k) head.push_back("t_" + std::to_string(k));
  for (const char* c : {"hubSize", "cliqueSize", "xi1", "xi2"}) head.emplace_back(c);
  std::string csv = io::csv_line(head);
  for (const auto& r : res.rows) {
    std::vector<std::string> cells{std::to_string(r.chain), std::to_string(r.sweep), std::to_string(r.edges)};
    for (double t : r.t) cells.push_back(io::number(t));
    if (detect) {
      cells.insert(cells.end(), {std::to_string(r.hub_size), std::to_string(r.clique_size), io::number(r.xi1),
                                 io::number(r.xi2)});
    } else {
      cells.insert(cells.end(), {"", "", "", ""});
    }
    csv += io::csv_line(cells);
  }
  return csv;
}

inline void run_sample(Context& ctx, const SampleArgs& a) {
  ExperimentConfig cfg;
  cfg.n = a.n;
  cfg.p = a.p;
  cfg.spec = io::hamiltonian_from_json(io::read_json(a.hamiltonian));
  cfg.sweeps = a.sweeps;
  cfg.burnin = a.burnin;
  cfg.thin = a.thin;
  cfg.chains = a.chains;
  cfg.seed = ctx.seed;
  cfg.detect = a.detect;
  cfg.start_empty = a.start_empty;
  cfg.detect_options.seed = ctx.seed;
  const auto res = run_experiment(cfg);
  if (!a.emit_traj.empty()) ctx.emit(a.emit_traj, trajectory_csv(res, cfg.spec.family.size(), a.detect));
  if (!a.emit_graph.empty()) ctx.emit(a.emit_graph, io::encode_binary(res.final_graphs.at(0).to_table()));
  ojson chains = ojson::array(), targets = ojson::array();
  for (const auto& c : res.chains)
    chains.push_back({{"chain", c.chain}, {"mean_edge_density", c.mean_edge_density},
                      {"edge_density_stderr", c.edge_density_stderr}, {"max_drift", c.max_drift},
                      {"final_hub", c.final_hub}, {"final_clique", c.final_clique},
                      {"nearest_target", c.nearest_target}});
  for (const auto& t : res.targets)
    targets.push_back({{"a", t.optimizer.a}, {"b", t.optimizer.b}, {"clique", t.clique}, {"hub", t.hub}});
  ctx.result({{"n", a.n},
              {"p", a.p},
              {"sweeps", a.sweeps},
              {"burnin", a.burnin},
              {"chains", chains},
              {"targets", targets},
              {"multimodal", res.multimodal},
              {"rows", res.rows.size()},
              {"warnings", res.warnings}});
}

// ---------------------------------------------------------------------------
// finner-check

struct FinnerArgs {
  std::string instance, suite;
  bool recover = false;
  int count = 10000;
};

inline void run_finner(Context& ctx, const FinnerArgs& a) {
  const double slack = ctx.tol_or(1e-10);
  if (!a.instance.empty()) {
    const auto inst = io::instance_from_json(io::read_json(a.instance));
    const double integral = finner::finner_integral(inst);
    ojson j{{"integral", integral}, {"bound", 1.0}, {"holds", integral <= 1.0 + slack}, {"eps", std::max(0.0, 1.0 - integral)}};
    if (a.recover) {
      const auto rec = finner::recover_factors(inst);
      ojson factors = ojson::array();
      for (std::size_t c = 0; c < rec.factors.h.size(); ++c)
        factors.push_back({{"class", rec.factors.classes[c]}, {"h", rec.factors.h[c]}});
      j["residuals"] = rec.residuals;
      j["max_residual"] = rec.residuals.empty() ? 0.0 : *std::max_element(rec.residuals.begin(), rec.residuals.end());
      j["factors"] = factors;
    }
    ctx.result(j);
    if (integral > 1.0 + slack) throw InternalError("finner bound violated");
    return;
  }
  if (a.suite.empty()) throw DomainError("finner-check: give --instance or --suite");
  if (a.count <= 0) throw DomainError("finner-check: count must be positive");
  CounterRng rng(ctx.seed);
  int failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  if (a.suite == "random") {
    for (int k = 0; k < a.count; ++k) {
      const double v = finner::finner_integral(finner::random_instance(rng));
      worst = std::max(worst, v);
      if (v > 1.0 + slack) ++failures;
    }
    ctx.result({{"suite", a.suite}, {"count", a.count}, {"max_integral", worst}, {"failures", failures}});
  } else if (a.suite == "holder") {
    for (int k = 0; k < a.count; ++k) {
      const int size = 1 + static_cast<int>(rng.below(6));
      const auto nu = finner::random_masses(size, rng);
      std::vector<double> g(size);
      double mean = 0.0;
      for (int i = 0; i < size; ++i) mean += nu[i] * (g[i] = 2.0 * rng.uniform());
      for (double& x : g) x /= std::max(mean, 1e-300);
      const double lambda = 0.05 + 0.9 * rng.uniform();
      const auto r = finner::holder_stability_check(g, nu, lambda);
      worst = std::max(worst, r.l1 - r.bound);
      if (!r.pass) ++failures;
    }
    ctx.result({{"suite", a.suite}, {"count", a.count}, {"max_excess", worst}, {"failures", failures}});
  } else {
    throw DomainError("finner-check: unknown suite " + a.suite);
  }
  if (failures) throw InternalError("finner-check: " + std::to_string(failures) + " instances violate the bound");
}

// ---------------------------------------------------------------------------
// emit-figure

struct FigureScenario {
  std::string id;
  std::vector<double> s;
};

inline const std::vector<FigureScenario>& figure_scenarios() {
  static const std::vector<FigureScenario> all{{"fig2A", {2, 15, 100}},
                                               {"fig2B", {2, 24, 100}},
                                               {"fig2C", {4, 25, 100}},
                                               {"fig2D", {4, 31.5, 100}},
                                               {"fig3", {12, 88, 1000}}};
  return all;
}

inline const FigureScenario& figure_scenario(const std::string& id) {
  for (const auto& f : figure_scenarios())
    if (f.id == id) return f;
  throw DomainError("unknown scenario " + id + " (expected fig2A, fig2B, fig2C, fig2D or fig3)");
}

inline void run_emit_figure(Context& ctx, const std::string& id, int steps) {
  const auto& sc = figure_scenario(id);
  if (ctx.out_dir.empty()) ctx.out_dir = ".";
  const std::vector<Motif> motifs{star(2), cycle(3), cycle(4)};
  const auto fam = MotifFamily::make(motifs);
  PlanarOptions opt;
  if (ctx.tol) opt.tie_tolerance = *ctx.tol;
  const auto sol = phi_solve(fam, sc.s, opt);
  const auto region = phi_region_emit(fam, sc.s, default_grid(sol, 0.0, 0.0, steps));
  std::string opt_csv = "a,b,objective\n";
  for (const auto& p : sol.optimizers) opt_csv += io::csv_line({io::number(p.a), io::number(p.b), io::number(p.objective())});
  const std::string line_csv = "a,b\n" + io::csv_line({io::number(0.0), io::number(sol.value)}) +
                               io::csv_line({io::number(2.0 * sol.value), io::number(0.0)});
  ctx.emit(id + "_region.csv", region_csv(region));
  ctx.emit(id + "_curves.json", curves_json(motifs, sc.s, region, sol).dump() + '\n');
  ctx.emit(id + "_optimizers.csv", opt_csv);
  ctx.emit(id + "_line.csv", line_csv);
  ctx.result({{"scenario", id},
              {"s", sc.s},
              {"value", sol.value},
              {"optimizers", points_json(sol.optimizers)},
              {"near_tie", sol.near_tie}});
}

// ---------------------------------------------------------------------------
// dispatch

inline std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

/// Runs one command. Exit 0 on success, 1 on domain/config/hypothesis/usage
/// errors, 2 on capability errors. stderr gets one "error: CODE: message" line.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse ERGM toolkit: variational problems, sampling, structure detection, Finner checks",
               "sparse_ergm"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version);

  Context ctx(out, err);
  std::string out_dir;
  double tol = -1.0;
  app.add_option("--seed", ctx.seed, "Master seed (u64); sub-streams are split from it");
  app.add_option("--tol", tol, "Primary tolerance of the command")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory for emitted files, result.json and manifest.json");
  app.add_flag("--json", ctx.json_flag, "Machine output on stdout (always JSON)");

  HomDensityArgs hd;
  auto* c_hd = app.add_subcommand("hom-density", "Homomorphism densities of motifs in a graph or weight table");
  c_hd->add_option("--motifs", hd.motifs, "Comma separated built-in motif names");
  c_hd->add_option("--motif-file", hd.motif_file, "Motif JSON file");
  c_hd->add_option("--graph", hd.graph, "Weight table (.bin binary or JSON)");
  c_hd->add_option("--er", hd.er_n, "Generate G(n,p) with this n instead of reading a graph");
  c_hd->add_option("--p", hd.er_p, "Edge probability for --er");
  c_hd->add_option("--scale", hd.scale, "Density of X/scale");
  c_hd->add_option("--algorithm", hd.algorithm, "auto, cycle, star, clique or generic");

  PlanarArgs pl;
  auto* c_pl = app.add_subcommand("planar-phi", "Planar variational problem phi_F(s)");
  c_pl->add_option("--motifs", pl.motifs, "Comma separated built-in motif names")->required();
  c_pl->add_option("--s", pl.s, "Comma separated thresholds s_k")->required();
  c_pl->add_option("--emit-region", pl.emit_region, "Region grid CSV");
  c_pl->add_option("--emit-curves", pl.emit_curves, "Level curves JSON");
  c_pl->add_option("--a-max", pl.a_max, "Region grid extent in a");
  c_pl->add_option("--b-max", pl.b_max, "Region grid extent in b");
  c_pl->add_option("--steps", pl.steps, "Grid steps per axis")->check(CLI::PositiveNumber);

  std::string ham_path;
  auto* c_psi = app.add_subcommand("psi", "psi_{F,h} and its optimizers");
  c_psi->add_option("--hamiltonian", ham_path, "Hamiltonian JSON")->required();

  EdgeFArgs ef;
  auto* c_ef = app.add_subcommand("edge-f", "Edge-F model phase diagram");
  c_ef->add_option("--motif", ef.motif, "Built-in motif name");
  c_ef->add_option("--motif-file", ef.motif_file, "Motif JSON file");
  c_ef->add_option("--gamma", ef.gamma, "Exponent gamma (tilt beta (t-1)^(gamma/e(F)))");
  c_ef->add_option("--beta", ef.beta, "Tilt strength beta");
  c_ef->add_option("--beta-grid", ef.beta_grid, "lo:hi:step sweep written to --emit");
  c_ef->add_option("--emit", ef.emit, "Phase CSV");

  NmfArgs nm;
  auto* c_nm = app.add_subcommand("nmf", "Naive mean-field problem at finite n");
  c_nm->add_option("--n", nm.n, "Vertices")->required();
  c_nm->add_option("--p", nm.p, "Edge probability")->required();
  c_nm->add_option("--hamiltonian", nm.hamiltonian, "Hamiltonian JSON")->required();
  c_nm->add_option("--emit-q", nm.emit_q, "Optimizer weight table (binary)");

  PhiNpArgs ph;
  auto* c_ph = app.add_subcommand("phi-np", "Constrained upper-tail entropy problem Phi_{n,p}");
  c_ph->add_option("--n", ph.n, "Vertices")->required();
  c_ph->add_option("--p", ph.p, "Edge probability")->required();
  c_ph->add_option("--motifs", ph.motifs, "Comma separated built-in motif names");
  c_ph->add_option("--s", ph.s, "Comma separated thresholds s_k");
  c_ph->add_option("--emit", ph.emit, "Optimizer weight table (binary)");

  SampleArgs sa;
  auto* c_sa = app.add_subcommand("sample", "Glauber sampling of the generalized ERGM");
  c_sa->add_option("--n", sa.n, "Vertices");
  c_sa->add_option("--p", sa.p, "Edge probability");
  c_sa->add_option("--hamiltonian", sa.hamiltonian, "Hamiltonian JSON")->required();
  c_sa->add_option("--sweeps", sa.sweeps, "Sweeps per chain");
  c_sa->add_option("--burnin", sa.burnin, "Burn-in sweeps");
  c_sa->add_option("--thin", sa.thin, "Record every k-th sweep");
  c_sa->add_option("--chains", sa.chains, "Independent chains");
  c_sa->add_flag("--detect", sa.detect, "Run clique-hub detection on recorded states");
  c_sa->add_flag("--start-empty", sa.start_empty, "Start from the empty graph instead of G(n,p)");
  c_sa->add_option("--emit-traj", sa.emit_traj, "Trajectory CSV");
  c_sa->add_option("--emit-graph", sa.emit_graph, "Final graph of chain 0 (binary weight table)");

  FinnerArgs fi;
  auto* c_fi = app.add_subcommand("finner-check", "Finner inequality checks");
  c_fi->add_option("--instance", fi.instance, "Instance JSON");
  c_fi->add_flag("--recover", fi.recover, "Recover the product factors");
  c_fi->add_option("--suite", fi.suite, "random or holder");
  c_fi->add_option("--count", fi.count, "Suite size");

  std::string scenario;
  int fig_steps = 100;
  auto* c_fg = app.add_subcommand("emit-figure", "Figure data bundle for a planar scenario");
  c_fg->add_option("--scenario", scenario, "fig2A, fig2B, fig2C, fig2D or fig3")->required();
  c_fg->add_option("--steps", fig_steps, "Region grid steps per axis")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForVersion&) {
    out << version << '\n';
    return 0;
  } catch (const CLI::Success&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    err << "error: USAGE: " << one_line(e.what()) << '\n';
    return 1;
  }

  ctx.out_dir = out_dir;
  if (tol > 0.0) ctx.tol = tol;
  for (int i = 0; i < argc; ++i) ctx.manifest.command_line.emplace_back(argv[i]);
  ctx.manifest.seed = ctx.seed;
  ctx.manifest.started = utc_now();
  ctx.manifest.config = {{"command", app.get_subcommands().front()->get_name()}, {"seed", ctx.seed}};
  if (ctx.tol) ctx.manifest.config["tol"] = *ctx.tol;
  for (const auto* opt : app.get_subcommands().front()->get_options())
    if (opt->count() > 0 && !opt->get_lnames().empty()) ctx.manifest.config[opt->get_lnames().front()] = opt->as<std::string>();

  try {
    if (c_hd->parsed()) run_hom_density(ctx, hd);
    else if (c_pl->parsed()) run_planar(ctx, pl);
    else if (c_psi->parsed()) run_psi(ctx, ham_path);
    else if (c_ef->parsed()) run_edge_f(ctx, ef);
    else if (c_nm->parsed()) run_nmf(ctx, nm);
    else if (c_ph->parsed()) run_phi_np(ctx, ph);
    else if (c_sa->parsed()) run_sample(ctx, sa);
    else if (c_fi->parsed()) run_finner(ctx, fi);
    else if (c_fg->parsed()) run_emit_figure(ctx, scenario, fig_steps);
    ctx.finish();
  } catch (const Error& e) {
    err << "error: " << error_code(e.kind()) << ": " << one_line(e.what()) << '\n';
    return e.kind() == ErrorKind::capability ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: INTERNAL: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sparse_ergm::cli

#endif  // SPARSE_ERGM_CLI_HPP
