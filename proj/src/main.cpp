// Batch front-end over the graphex library. Subcommands mirror the module
// operations: validate, norm, distance, regularize, sample, density, converge,
// diagnose, canon, equiv, fixtures.
//
// Exit codes: 0 ok, 2 usage, 3 validation/domain failure, 4 budget exhausted
// without a trustworthy certificate (best-so-far is still printed).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphex/canonical.hpp"
#include "graphex/core.hpp"
#include "graphex/densities.hpp"
#include "graphex/diagnostics.hpp"
#include "graphex/distances.hpp"
#include "graphex/estimation.hpp"
#include "graphex/fixtures.hpp"
#include "graphex/io.hpp"
#include "graphex/norms.hpp"
#include "graphex/regularity.hpp"
#include "graphex/sampling.hpp"

namespace {

using nlohmann::json;

constexpr int exit_usage = 2;
constexpr int exit_invalid = 3;
constexpr int exit_exhausted = 4;

struct command_outcome {
  int code = 0;
};

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    graphex::write_text_file(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    graphex::write_text_file(out_path, text);
}

json breakdown_json(const graphex::distance_breakdown& b) {
  return json{{"kernel", b.kernel_component},
              {"marginal_l2", b.marginal_l2_component},
              {"density_gap", b.density_gap_component},
              {"d22", b.d22},
              {"djbl", b.d_jbl}};
}

json coupling_json(const graphex::coupling& c) {
  return json{{"matrix", c.matrix}, {"row_targets", c.row_targets}, {"col_targets", c.col_targets}};
}

json partition_json(const graphex::subspace_partition& p) {
  return json{{"part_of_atom", p.part_of}};
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument(std::string(what) + ": bad number " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

// The subcommand callbacks throw; main translates exceptions to exit codes.
struct exhausted_without_certificate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"step graphex toolkit: norms, distances, regularity, sampling, estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value defaults, [subcommand] sections supported");
  app.get_config_formatter_base()->comment('#');

  int exit_code = 0;

  // ---- validate ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("validate", "check a graphex file against the model invariants");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("input", *in, "graphex json file")->required();
    cmd->add_option("--out", *out, "write the report here instead of stdout");
    cmd->callback([in, out, &exit_code] {
      graphex::step_graphex g;
      json report;
      try {
        g = graphex::load_graphex(*in);
        graphex::require_valid(g);
      } catch (const std::exception& e) {
        report = json{{"valid", false}, {"error", e.what()}};
        emit(report, *out);
        exit_code = exit_invalid;
        return;
      }
      report = json{{"valid", true},
                    {"atoms", g.size()},
                    {"total_mass", graphex::total_mass(g)},
                    {"edge_density", graphex::edge_density(g)},
                    {"l1_norm", graphex::l1_norm(g)},
                    {"signed", g.signed_mode}};
      emit(report, *out);
    });
  }

  // ---- norm --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("norm", "kernel / jumble / cut norm of the graphon part");
    struct opts_t {
      std::string input, out, kind = "kernel", mode = "exact";
      int restarts = 20;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--kind", o->kind, "kernel|jumble|cut")
        ->check(CLI::IsMember({"kernel", "jumble", "cut"}));
    cmd->add_option("--mode", o->mode, "exact|heuristic")
        ->check(CLI::IsMember({"exact", "heuristic"}));
    cmd->add_option("--restarts", o->restarts, "heuristic restarts");
    auto* seed_opt = cmd->add_option("--seed", o->seed, "rng seed (required for heuristic set norms)");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o, seed_opt] {
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      const graphex::step_function_2d u{g.masses, g.graphon};
      json report{{"kind", o->kind}, {"mode", o->mode}};
      if (o->kind == "kernel") {
        report["value"] = o->mode == "exact" ? graphex::kernel_norm(u)
                                             : graphex::kernel_norm_estimate(u);
        report["exact"] = o->mode == "exact";
      } else {
        if (o->mode == "heuristic" && seed_opt->count() == 0)
          throw CLI::ValidationError("norm", "--seed is required for heuristic set norms");
        graphex::set_norm_options sopts;
        sopts.mode = o->mode == "exact" ? graphex::set_norm_mode::exact
                                        : graphex::set_norm_mode::heuristic;
        sopts.restarts = o->restarts;
        sopts.seed = o->seed;
        const auto kind = o->kind == "jumble" ? graphex::set_norm_kind::jumble
                                              : graphex::set_norm_kind::cut;
        const auto r = graphex::bilinear_set_norm(u, kind, sopts);
        report["value"] = r.value;
        report["exact"] = r.exact;
        report["witness_s"] = r.s;
        report["witness_t"] = r.t;
        report["seed"] = o->seed;
      }
      emit(report, o->out);
    });
  }

  // ---- distance ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("distance", "distances between two graphexes");
    struct opts_t {
      std::string a, b, out, metric = "d22", grid, objective = "d22";
      double slack = -1.0;
      int restarts = 50, budget = 400;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("a", o->a, "first graphex json")->required();
    cmd->add_option("b", o->b, "second graphex json")->required();
    cmd->add_option("--metric", o->metric, "d22|djbl|delta22|deltagp")
        ->check(CLI::IsMember({"d22", "djbl", "delta22", "deltagp"}));
    cmd->add_option("--slack", o->slack, "coupling slack mass (delta22; default: auto-doubling)");
    cmd->add_option("--budget", o->budget, "objective evaluations per restart");
    cmd->add_option("--restarts", o->restarts, "local search restarts");
    cmd->add_option("--grid", o->grid, "comma list of degree truncation levels (deltagp)");
    cmd->add_option("--objective", o->objective, "coupling objective: d22|kernel")
        ->check(CLI::IsMember({"d22", "kernel"}));
    auto* seed_opt = cmd->add_option("--seed", o->seed, "rng seed (required for delta22/deltagp)");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o, seed_opt, &exit_code] {
      const graphex::step_graphex a = graphex::load_graphex(o->a);
      const graphex::step_graphex b = graphex::load_graphex(o->b);
      graphex::require_valid(a);
      graphex::require_valid(b);
      json report{{"metric", o->metric}, {"seed", o->seed}};
      if (o->metric == "d22" || o->metric == "djbl") {
        graphex::set_norm_options jopts;
        jopts.seed = o->seed;
        const auto bd = graphex::d22(a, b, jopts);
        report["breakdown"] = breakdown_json(bd);
        report["value"] = o->metric == "d22" ? bd.d22 : bd.d_jbl;
        emit(report, o->out);
        return;
      }
      if (seed_opt->count() == 0)
        throw CLI::ValidationError("distance", "--seed is required for coupling searches");
      graphex::coupling_opts copts;
      copts.restarts = o->restarts;
      copts.max_moves = o->budget;
      copts.seed = o->seed;
      copts.objective = o->objective == "kernel" ? graphex::coupling_objective::kernel
                                                 : graphex::coupling_objective::d22;
      if (o->metric == "delta22") {
        const auto r = o->slack >= 0.0 ? graphex::optimize_coupling(a, b, o->slack, copts)
                                       : graphex::optimize_coupling_auto(a, b, copts);
        report["certificate"] = r.certificate;
        report["breakdown"] = breakdown_json(r.breakdown);
        report["coupling"] = coupling_json(r.nu);
        report["exhausted"] = r.exhausted;
        emit(report, o->out);
        if (r.exhausted && !std::isfinite(r.certificate)) exit_code = exit_exhausted;
        return;
      }
      const auto grid = o->grid.empty() ? graphex::default_degree_grid(a, b)
                                        : parse_list(o->grid, "--grid");
      const auto r = graphex::delta_gp_estimate(a, b, grid, copts);
      report["value"] = r.value;
      report["best_degree_bound"] = r.best_degree_bound;
      json rows = json::array();
      for (const auto& row : r.rows)
        rows.push_back(json{{"degree_bound", row.degree_bound},
                            {"removed_mass", row.removed_mass},
                            {"equalized_mass", row.equalized_mass},
                            {"certificate", row.coupling_certificate},
                            {"value", row.value}});
      report["rows"] = rows;
      report["exhausted"] = r.best_coupling.exhausted;
      emit(report, o->out);
      if (r.best_coupling.exhausted && !std::isfinite(r.value)) exit_code = exit_exhausted;
    });
  }

  // ---- regularize --------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("regularize", "weak regularity partition and step average");
    struct opts_t {
      std::string input, out;
      double eps = 0.3, b_bound = 0.0, c_bound = 0.0, d_bound = 0.0, rho = 0.0;
      std::size_t parts = 0;
      bool equal_parts = false;
      int budget = 20;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--eps", o->eps, "target regularity")->required();
    cmd->add_option("--B", o->b_bound, "graphon sup bound (default: derived)");
    cmd->add_option("--C", o->c_bound, "l1 bound (default: derived)");
    cmd->add_option("--D", o->d_bound, "marginal sup bound (default: derived)");
    cmd->add_flag("--equal-parts", o->equal_parts, "equal-mass partition variant");
    cmd->add_option("--rho", o->rho, "part mass for --equal-parts");
    cmd->add_option("--parts", o->parts, "part count for --equal-parts");
    cmd->add_option("--budget", o->budget, "witness finder restarts");
    cmd->add_option("--seed", o->seed, "rng seed for the witness finder");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o, &exit_code] {
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      const auto prof = graphex::marginal(g);
      double b = o->b_bound, c = o->c_bound, d = o->d_bound;
      if (b <= 0.0) {
        b = 1.0;
        for (const auto& row : g.graphon)
          for (double v : row) b = std::max(b, std::abs(v));
      }
      if (c <= 0.0) c = std::max(1.0, graphex::l1_norm(g));
      if (d <= 0.0) {
        d = 1.0;
        for (double v : prof.values) d = std::max(d, v);
      }
      json report{{"eps", o->eps}, {"B", b}, {"C", c}, {"D", d}, {"seed", o->seed}};
      if (o->equal_parts) {
        if (!(o->rho > 0.0) || o->parts == 0)
          throw CLI::ValidationError("regularize", "--equal-parts needs --rho and --parts");
        const auto r = graphex::equal_parts_partition(g, o->eps, o->rho, o->parts, b, c, d, o->seed);
        report["refined"] = graphex::to_json(r.refined);
        report["partition"] = partition_json(r.partition);
        report["certificate"] = r.certificate;
        report["part_mass"] = r.part_mass;
        emit(report, o->out);
        return;
      }
      const auto r = graphex::weak_regularity_partition(g, o->eps, b, c, d, nullptr, o->budget, o->seed);
      report["partition"] = partition_json(r.partition);
      report["parts"] = graphex::part_count(r.partition);
      report["rounds"] = r.rounds;
      report["certificate"] = r.certificate;
      report["certificate_d22"] = r.certificate_d22;
      report["certificate_exact"] = r.certificate_exact;
      report["part_bound"] = r.part_bound;
      report["measure_bound"] = r.measure_bound;
      report["budget_exhausted"] = r.budget_exhausted;
      report["step_average"] = graphex::to_json(graphex::step_average(g, r.partition));
      emit(report, o->out);
      if (r.budget_exhausted && !r.certificate_exact) exit_code = exit_exhausted;
    });
  }

  // ---- sample ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("sample", "draw graphex process samples, write graph files");
    struct opts_t {
      std::string input, out_dir = ".";
      double horizon = 1.0;
      int trials = 1;
      bool loops = false, keep_isolated = false;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--T", o->horizon, "time horizon")->required();
    cmd->add_option("--trials", o->trials, "number of samples");
    cmd->add_flag("--loops", o->loops, "Poisson multigraph variant with loops");
    cmd->add_flag("--keep-isolated", o->keep_isolated, "retain isolated cloud vertices");
    auto* seed_opt = cmd->add_option("--seed", o->seed, "rng seed (required)");
    cmd->add_option("--out-dir", o->out_dir, "directory for the graph files");
    cmd->callback([o, seed_opt] {
      if (seed_opt->count() == 0)
        throw CLI::ValidationError("sample", "--seed is required");
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      if (o->trials < 1) throw std::invalid_argument("sample: trials must be positive");
      std::filesystem::create_directories(o->out_dir);
      json manifest{{"seed", o->seed}, {"T", o->horizon}, {"loops", o->loops}};
      json files = json::array();
      graphex::rng root(o->seed);
      for (int t = 0; t < o->trials; ++t) {
        const std::uint64_t trial_seed = root.substream(static_cast<std::uint64_t>(t)).next_u64();
        const auto s = o->loops
                           ? graphex::sample_with_loops(g, o->horizon, trial_seed, o->keep_isolated)
                           : graphex::sample_process(g, o->horizon, trial_seed, o->keep_isolated);
        char name[32];
        std::snprintf(name, sizeof name, "sample_%03d.graph", t);
        const std::string path = (std::filesystem::path(o->out_dir) / name).string();
        graphex::write_text_file(path, graphex::write_graph(s));
        files.push_back(json{{"file", path},
                             {"vertices", s.vertices.size()},
                             {"edges", s.edges.size()}});
      }
      manifest["files"] = files;
      emit(manifest, "");
    });
  }

  // ---- density -----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("density", "homomorphism density of a pattern");
    struct opts_t {
      std::string input, out, pattern = "edge";
      long long root = -1, root_atom = -1;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--pattern", o->pattern,
                    "preset (edge|path2|triangle|star3|c4|two_edges) or edge list like 0-1,1-2");
    cmd->add_option("--root", o->root, "pattern vertex to pin (rooted density)");
    cmd->add_option("--root-atom", o->root_atom, "atom the pinned vertex lands on");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o] {
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      graphex::pattern_graph f;
      const auto& names = graphex::preset_pattern_names();
      if (std::find(names.begin(), names.end(), o->pattern) != names.end())
        f = graphex::preset_pattern(o->pattern);
      else
        f = graphex::parse_pattern(o->pattern);
      json report{{"pattern", o->pattern}, {"vertices", f.n}, {"edges", f.edges.size()}};
      if (o->root >= 0) {
        if (o->root_atom < 0)
          throw CLI::ValidationError("density", "--root needs --root-atom");
        report["value"] = graphex::rooted_density(f, static_cast<std::size_t>(o->root),
                                                  static_cast<std::size_t>(o->root_atom), g);
        report["root"] = o->root;
        report["root_atom"] = o->root_atom;
      } else {
        report["value"] = graphex::hom_density(f, g);
      }
      emit(report, o->out);
    });
  }

  // ---- converge ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("converge", "sampling convergence experiment");
    struct opts_t {
      std::string input, out, horizons = "5,10,20,40";
      int trials = 20, workers = 1;
      double rho = 0.0;
      bool csv = false;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--T", o->horizons, "comma list of horizons");
    cmd->add_option("--trials", o->trials, "trials per horizon");
    cmd->add_option("--workers", o->workers, "worker threads (output is identical for any count)");
    cmd->add_option("--rho", o->rho, "override the 1/T empirical normalization");
    cmd->add_flag("--csv", o->csv, "emit the per-trial table as csv");
    auto* seed_opt = cmd->add_option("--seed", o->seed, "rng seed (required)");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o, seed_opt] {
      if (seed_opt->count() == 0)
        throw CLI::ValidationError("converge", "--seed is required");
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      graphex::experiment_config cfg;
      cfg.trials = o->trials;
      cfg.workers = o->workers;
      cfg.rho_override = o->rho;
      cfg.seed = o->seed;
      const auto horizons = parse_list(o->horizons, "--T");
      const auto rep = graphex::convergence_experiment(g, horizons, cfg);
      if (o->csv) {
        std::string csv = "T,trial,vertices,edges,distance,coarsen_allowance,coarsened,exhausted\n";
        for (const auto& r : rep.rows) {
          csv += graphex::format_double(r.horizon) + "," + std::to_string(r.trial) + "," +
                 std::to_string(r.vertices) + "," + std::to_string(r.edges) + "," +
                 graphex::format_double(r.distance) + "," +
                 graphex::format_double(r.coarsen_allowance) + "," +
                 (r.coarsened ? "1" : "0") + "," + (r.exhausted ? "1" : "0") + "\n";
        }
        emit_text(csv, o->out);
        return;
      }
      json rows = json::array();
      for (const auto& r : rep.rows)
        rows.push_back(json{{"T", r.horizon},
                            {"trial", r.trial},
                            {"vertices", r.vertices},
                            {"edges", r.edges},
                            {"distance", r.distance},
                            {"coarsen_allowance", r.coarsen_allowance},
                            {"coarsened", r.coarsened},
                            {"exhausted", r.exhausted}});
      json sums = json::array();
      for (const auto& s : rep.summary)
        sums.push_back(json{{"T", s.horizon},
                            {"trials", s.trials},
                            {"q25", s.q25},
                            {"median", s.median},
                            {"q75", s.q75},
                            {"mean_edges", s.mean_edges}});
      emit(json{{"seed", rep.seed}, {"rows", rows}, {"summary", sums}}, o->out);
    });
  }

  // ---- diagnose ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("diagnose", "tightness profile, UI metric, moment predictions");
    struct opts_t {
      std::string input, out, grid = "0.25,0.5,1,2,4,8";
      double bound = 1.0, delta = 0.1, horizon = 10.0;
      bool csv = false;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--grid", o->grid, "degree bounds for the tightness profile");
    cmd->add_option("--bound", o->bound, "threshold for the uniform integrability metric");
    cmd->add_option("--delta", o->delta, "tail regularity cut (pure graphons only)");
    cmd->add_option("--T", o->horizon, "horizon for the edge moment prediction");
    cmd->add_flag("--csv", o->csv, "emit the tightness profile as csv");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o] {
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      const auto grid = parse_list(o->grid, "--grid");
      const auto prof = graphex::tightness_profile(g, grid);
      if (o->csv) {
        std::string csv = "degree_bound,excess_mass,truncated_l1\n";
        for (const auto& r : prof)
          csv += graphex::format_double(r.degree_bound) + "," +
                 graphex::format_double(r.excess_mass) + "," +
                 graphex::format_double(r.truncated_l1) + "\n";
        emit_text(csv, o->out);
        return;
      }
      json rows = json::array();
      for (const auto& r : prof)
        rows.push_back(json{{"degree_bound", r.degree_bound},
                            {"excess_mass", r.excess_mass},
                            {"truncated_l1", r.truncated_l1}});
      json report{{"tightness", rows},
                  {"ui_metric", graphex::uniform_integrability_metric(g, o->bound)},
                  {"ui_bound", o->bound}};
      bool pure_graphon = g.dust == 0.0;
      for (double s : g.star) pure_graphon = pure_graphon && s == 0.0;
      if (pure_graphon) {
        report["tail_regularity_gap"] = graphex::tail_regularity_gap(g, o->delta);
        report["tail_delta"] = o->delta;
      }
      const auto moments = graphex::edge_moment_prediction(g, o->horizon);
      report["edge_moments"] = json{{"T", o->horizon}, {"mean", moments.mean},
                                    {"variance", moments.variance}};
      emit(report, o->out);
    });
  }

  // ---- canon -------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("canon", "canonical form and quotient map");
    struct opts_t {
      std::string input, out;
      double tol = 1e-9;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("input", o->input, "graphex json file")->required();
    cmd->add_option("--tol", o->tol, "fiber merge tolerance");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o] {
      const graphex::step_graphex g = graphex::load_graphex(o->input);
      graphex::require_valid(g);
      const auto r = graphex::canonicalize(g, o->tol);
      emit(json{{"canonical", graphex::to_json(r.canonical)}, {"quotient", r.quotient}}, o->out);
    });
  }

  // ---- equiv -------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("equiv", "decide equivalence of two graphexes");
    struct opts_t {
      std::string a, b, out;
      double tol = 1e-9;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("a", o->a, "first graphex json")->required();
    cmd->add_option("b", o->b, "second graphex json")->required();
    cmd->add_option("--tol", o->tol, "comparison tolerance");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o] {
      const graphex::step_graphex a = graphex::load_graphex(o->a);
      const graphex::step_graphex b = graphex::load_graphex(o->b);
      graphex::require_valid(a);
      graphex::require_valid(b);
      const auto r = graphex::equivalent(a, b, o->tol);
      emit(json{{"equal", r.equal}, {"witness", r.witness}}, o->out);
    });
  }

  // ---- fixtures ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("fixtures", "emit the reference fixtures as graphex json");
    struct opts_t {
      std::string name, out;
      double c = 0.5, p = 0.25, s = 1.0, i = 1.0, mass = 1.0;
      std::size_t n = 4;
    };
    auto o = std::make_shared<opts_t>();
    cmd->add_option("name", o->name, "constant|example-ex1|star-only|dust-only|ui-family|zero")
        ->required()
        ->check(CLI::IsMember({"constant", "example-ex1", "star-only", "dust-only", "ui-family",
                               "zero"}));
    cmd->add_option("--c", o->c, "constant graphon value");
    cmd->add_option("--p", o->p, "bipartite block mass");
    cmd->add_option("--s", o->s, "star intensity");
    cmd->add_option("--i", o->i, "dust value");
    cmd->add_option("--mass", o->mass, "atom mass for constant/star-only");
    cmd->add_option("--n", o->n, "ui-family index");
    cmd->add_option("--out", o->out, "output path");
    cmd->callback([o] {
      graphex::step_graphex g;
      if (o->name == "constant")
        g = graphex::fixtures::constant(o->c, o->mass);
      else if (o->name == "example-ex1")
        g = graphex::fixtures::example_ex1(o->p);
      else if (o->name == "star-only")
        g = graphex::fixtures::star_only(o->s, o->mass);
      else if (o->name == "dust-only")
        g = graphex::fixtures::dust_only(o->i);
      else if (o->name == "ui-family")
        g = graphex::fixtures::ui_family(o->n);
      else
        g = graphex::fixtures::zero();
      emit_text(graphex::serialize(g), o->out);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  }
  return exit_code;
}
