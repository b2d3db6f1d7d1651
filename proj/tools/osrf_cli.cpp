// osrf: simulate operator-self-similar stable fields and check their
// regularity and dimension properties.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "osrf/osrf.hpp"

namespace {

using namespace osrf;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> psi;
  int threads = 0;
  std::string out = ".";
};

struct Context {
  RunConfig config;
  ExponentPair pair;
  std::string hash;
  int threads = 0;
  fs::path out;
};

Context prepare(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (c.seed) config.seed = *c.seed;
  if (c.psi) config.psi = parse_psi_variant(*c.psi);
  ExponentPair pair = validate_config(config);
  fs::create_directories(c.out);
  return {config, std::move(pair), config_hash(config), c.threads, c.out};
}

FrequencyPlan make_plan(const Context& ctx) {
  return build_plan(ctx.pair, ctx.config.alpha, HomogeneousFunction(ctx.config.psi, ctx.pair.e),
                    ctx.config.spacing, ctx.config.radius, ctx.config.max_cells);
}

SimulationOptions sim_options(const Context& ctx) {
  SimulationOptions opt;
  opt.resolution = ctx.config.resolution;
  opt.realizations = ctx.config.realizations;
  opt.seed = ctx.config.seed;
  opt.first_realization = ctx.config.first_realization;
  opt.threads = ctx.threads;
  opt.method = ctx.config.method;
  return opt;
}

std::vector<Eigen::VectorXd> vectors(const std::vector<std::vector<double>>& vs) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : vs) out.push_back(to_vector(v));
  return out;
}

std::vector<double> as_list(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Json stamp(const Context& ctx, const std::string& kind) {
  return Json{{"kind", kind}, {"config_hash", ctx.hash}, {"seed", ctx.config.seed}};
}

class JsonLines {
 public:
  explicit JsonLines(const fs::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
  }
  void write(const Json& record) { out_ << record.dump() << '\n'; }

 private:
  std::ofstream out_;
};

void write_config_copy(const Context& ctx) {
  std::ofstream(ctx.out / "config.ini") << serialize(ctx.config);
}

Json fit_json(const BoxDimFit& fit) {
  return Json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r_squared", fit.r_squared},
              {"window", {fit.window.lo, fit.window.hi}},
              {"degenerate", fit.degenerate},
              {"counts", fit.counts}};
}

Json cf_json(const CFProbe& p) {
  Json j{{"theta", as_list(p.theta)},
         {"empirical", {p.empirical.real(), p.empirical.imag()}},
         {"std_error", p.std_error}};
  if (p.theoretical_exponent) {
    j["theoretical_exponent"] = *p.theoretical_exponent;
    j["discrepancy"] = p.discrepancy();
  }
  return j;
}

int run_simulate(const Context& ctx) {
  const FrequencyPlan plan = make_plan(ctx);
  write_config_copy(ctx);
  JsonLines meta(ctx.out / "simulate.jsonl");
  for (const FieldSample& s : simulate(plan, sim_options(ctx))) {
    const std::string name = "sample_" + std::to_string(s.realization) + ".csv";
    std::FILE* f = std::fopen((ctx.out / name).c_str(), "w");
    if (!f) throw ConfigError("cannot write '" + (ctx.out / name).string() + "'");
    std::fprintf(f, "# config_hash=%s seed=%llu realization=%llu\n", ctx.hash.c_str(),
                 static_cast<unsigned long long>(s.seed), static_cast<unsigned long long>(s.realization));
    for (std::size_t i = 0; i < s.index_dim; ++i) std::fprintf(f, "%sx%zu", i ? "," : "", i + 1);
    for (std::size_t j = 0; j < s.state_dim; ++j) std::fprintf(f, ",v%zu", j + 1);
    std::fputc('\n', f);
    for (std::size_t i = 0; i < s.point_count(); ++i) {
      const Eigen::VectorXd x = s.point(i);
      for (Eigen::Index a = 0; a < x.size(); ++a) std::fprintf(f, "%s%.17g", a ? "," : "", x(a));
      for (std::size_t j = 0; j < s.state_dim; ++j) std::fprintf(f, ",%.17g", s.component(i, j));
      std::fputc('\n', f);
    }
    std::fclose(f);
    Json rec = stamp(ctx, "sample");
    rec["realization"] = s.realization;
    rec["file"] = name;
    rec["index_dim"] = s.index_dim;
    rec["state_dim"] = s.state_dim;
    rec["resolution"] = s.resolution;
    rec["alpha"] = s.alpha;
    rec["h"] = s.spacing;
    rec["R"] = s.radius;
    rec["cells"] = plan.cell_count();
    meta.write(rec);
  }
  std::cout << "wrote " << ctx.config.realizations << " realization(s) to " << ctx.out.string() << "\n";
  return 0;
}

int run_theory_dims(const Context& ctx) {
  const DimensionReport r = dimension_report(ctx.pair);
  Json rec = stamp(ctx, "theory-dims");
  rec["range_dim_min_form"] = r.range_dim_min_form;
  rec["range_dim_case_form"] = r.range_dim_case_form;
  rec["graph_dim_min_form"] = r.graph_dim_min_form;
  rec["graph_dim_case_form"] = r.graph_dim_case_form;
  rec["range_branch"] = r.range_branch;
  rec["graph_branch"] = r.graph_branch;
  JsonLines(ctx.out / "theory-dims.jsonl").write(rec);
  std::cout << rec.dump() << "\n";
  return 0;
}

int run_boxdim(const Context& ctx) {
  const FrequencyPlan plan = make_plan(ctx);
  const DimensionReport theory = dimension_report(ctx.pair);
  const bool graph = ctx.config.set == "graph";
  const int levels = ctx.config.levels;
  JsonLines report(ctx.out / "boxdim.jsonl");
  std::ofstream csv(ctx.out / "boxdim.csv");
  csv << "# config_hash=" << ctx.hash << " seed=" << ctx.config.seed << "\n";
  csv << "realization,level,log_inv_eps,log_count\n";
  std::vector<double> slopes;
  for (const FieldSample& s : simulate(plan, sim_options(ctx))) {
    BoxDimFit fit;
    // One-parameter graphs are covered column by column on the interpolant.
    if (graph && s.index_dim == 1 && s.state_dim == 1 && s.resolution % (std::size_t{1} << levels) == 0)
      fit = graph_box_dimension(s, 0, levels);
    else
      fit = box_dimension(graph ? graph_points(s) : range_points(s), levels);
    slopes.push_back(fit.slope);
    Json rec = stamp(ctx, "boxdim");
    rec["realization"] = s.realization;
    rec["set"] = ctx.config.set;
    rec["fit"] = fit_json(fit);
    report.write(rec);
    char line[128];
    for (std::size_t l = 0; l < fit.counts.size(); ++l) {
      std::snprintf(line, sizeof line, "%llu,%zu,%.17g,%.17g\n", static_cast<unsigned long long>(s.realization), l,
                    std::log(1.0 / fit.scales[l]), std::log(fit.counts[l]));
      csv << line;
    }
  }
  const EstimateSummary sum = summarize(slopes);
  Json rec = stamp(ctx, "boxdim-summary");
  rec["set"] = ctx.config.set;
  rec["mean"] = sum.mean;
  rec["median"] = sum.median;
  rec["theory"] = graph ? theory.graph_dim_min_form : theory.range_dim_min_form;
  report.write(rec);
  std::cout << rec.dump() << "\n";
  return 0;
}

int run_cf_check(const Context& ctx) {
  const FrequencyPlan plan = make_plan(ctx);
  const MonteCarloOptions mc{ctx.config.mc_realizations, ctx.config.seed, ctx.threads, ctx.config.allowance};
  const CfCheckReport r =
      cf_check(plan, vectors(ctx.config.points), vectors(ctx.config.thetas), mc, ctx.config.convention);
  JsonLines report(ctx.out / "cf-check.jsonl");
  for (const auto& p : r.probes) {
    Json rec = stamp(ctx, "cf-probe");
    rec["point"] = as_list(p.point);
    rec["probe"] = cf_json(p.probe);
    rec["tolerance"] = p.tolerance;
    rec["pass"] = p.pass;
    report.write(rec);
  }
  Json rec = stamp(ctx, "cf-check");
  rec["realizations"] = ctx.config.mc_realizations;
  rec["convention"] = detail::to_string(ctx.config.convention);
  rec["max_discrepancy"] = r.max_discrepancy;
  rec["pass"] = r.pass;
  report.write(rec);
  std::cout << rec.dump() << "\n";
  return 0;
}

int run_scaling_check(const Context& ctx) {
  const FrequencyPlan plan = make_plan(ctx);
  const MonteCarloOptions mc{ctx.config.mc_realizations, ctx.config.seed, ctx.threads, ctx.config.allowance};
  const ScalingReport r =
      scaling_check(plan, ctx.config.scale, vectors(ctx.config.points), vectors(ctx.config.thetas), mc);
  JsonLines report(ctx.out / "scaling-check.jsonl");
  for (const auto& p : r.probes) {
    Json rec = stamp(ctx, "scaling-probe");
    rec["point"] = as_list(p.point);
    rec["theta"] = as_list(p.theta);
    rec["cf_scaled_point"] = {p.cf_scaled_point.real(), p.cf_scaled_point.imag()};
    rec["cf_scaled_value"] = {p.cf_scaled_value.real(), p.cf_scaled_value.imag()};
    rec["discrepancy"] = p.discrepancy;
    rec["tolerance"] = p.tolerance;
    if (p.quadrature_lhs) rec["quadrature_lhs"] = *p.quadrature_lhs;
    if (p.quadrature_rhs) rec["quadrature_rhs"] = *p.quadrature_rhs;
    report.write(rec);
  }
  Json rec = stamp(ctx, "scaling-check");
  rec["c"] = r.c;
  rec["max_discrepancy"] = r.max_discrepancy;
  if (r.max_quadrature_relative_gap) rec["max_quadrature_relative_gap"] = *r.max_quadrature_relative_gap;
  rec["pass"] = r.pass;
  report.write(rec);
  std::cout << rec.dump() << "\n";
  return 0;
}

int run_modulus(const Context& ctx) {
  const FrequencyPlan plan = make_plan(ctx);
  JsonLines report(ctx.out / "modulus.jsonl");
  std::vector<double> ratios;
  for (const FieldSample& s : simulate(plan, sim_options(ctx))) {
    const RunConfig& c = ctx.config;
    const auto fine = modulus_statistic(s, ctx.pair, c.alpha, c.epsilon, c.delta, c.pairs);
    const auto coarse = modulus_statistic(coarsen(s), ctx.pair, c.alpha, c.epsilon, c.delta, c.pairs);
    for (std::size_t j = 0; j < fine.size(); ++j) {
      Json rec = stamp(ctx, "modulus");
      rec["realization"] = s.realization;
      rec["component"] = fine[j].component;
      rec["epsilon"] = fine[j].epsilon;
      rec["delta"] = fine[j].delta;
      rec["pairs"] = detail::to_string(ctx.config.pairs);
      rec["value"] = fine[j].value;
      rec["argmax_level"] = fine[j].argmax_level;
      rec["value_half_resolution"] = coarse[j].value;
      rec["refinement_ratio"] = fine[j].value / coarse[j].value;
      ratios.push_back(fine[j].value / coarse[j].value);
      report.write(rec);
    }
  }
  const EstimateSummary sum = summarize(ratios);
  Json rec = stamp(ctx, "modulus-summary");
  rec["median_refinement_ratio"] = sum.median;
  rec["max_refinement_ratio"] = *std::max_element(ratios.begin(), ratios.end());
  report.write(rec);
  std::cout << rec.dump() << "\n";
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return 2;
  if (dynamic_cast<const Error*>(&e)) return 1;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 1;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-self-similar stable random fields: simulation and checks"};
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Config file (sectioned key = value)")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override run.seed");
    sub->add_option("--psi", common.psi, "Override model.psi")->check(CLI::IsMember({"tau", "diag"}));
    sub->add_option("--threads", common.threads, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", common.out, "Output directory");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Command commands[] = {
      {"simulate", "Write field realizations as CSV plus JSON-lines metadata", run_simulate},
      {"theory-dims", "Theoretical range and graph dimensions", run_theory_dims},
      {"boxdim", "Box-counting dimension of simulated ranges or graphs", run_boxdim},
      {"cf-check", "Empirical characteristic function against quadrature", run_cf_check},
      {"scaling-check", "Operator-self-similarity check at scale c", run_scaling_check},
      {"modulus", "Modulus-of-continuity statistic and its refinement ratio", run_modulus},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) return cmd->run(prepare(common));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 1;
}
