// Command line surface of the sketch library: generate instances, derive
// plans, build sketch files, estimate distances, and verify the accuracy
// guarantees against exact truth.
//
// Exit codes: 0 success, 1 usage, 2 precondition violation, 3 data
// integrity, 4 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypersketch/cascade.hpp"
#include "hypersketch/errors.hpp"
#include "hypersketch/harness.hpp"
#include "hypersketch/io.hpp"
#include "hypersketch/jl_baseline.hpp"
#include "hypersketch/planner.hpp"
#include "hypersketch/recovery.hpp"

namespace hsk = hypersketch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitDataIntegrity = 3;
constexpr int kExitVerification = 4;

struct CommonArgs {
  double epsilon = 0.2;
  std::uint64_t seed = 1;
  double n_constant = 48.0;
  int threads = 0;
};

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return file;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> parse_pairs(const std::string& spec) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      throw hsk::PreconditionError("bad pair '" + item + "', expected i-j");
    }
    pairs.emplace_back(static_cast<std::uint32_t>(std::stoul(item.substr(0, dash))),
                       static_cast<std::uint32_t>(std::stoul(item.substr(dash + 1))));
  }
  return pairs;
}

int cmd_gen(const std::string& generator, std::size_t n, std::size_t d, double min_dist,
            double m_exact, double rho, std::uint64_t seed, const std::string& out) {
  hsk::PointSet set;
  if (generator == "sphere") {
    set = hsk::gen_sphere(n, d, min_dist, seed);
  } else if (generator == "ball") {
    set = hsk::gen_ball(n, d, rho, min_dist, seed);
  } else if (generator == "close-pairs") {
    set = hsk::gen_close_pairs(n, d, m_exact, seed);
  } else {
    throw hsk::PreconditionError("unknown generator: " + generator);
  }
  hsk::write_point_file(out, set);
  const auto ms = hsk::measure(set);
  std::printf("wrote %s: n=%zu d=%zu mode=%s min_dist=%.6g min_gap=%.6g rho=%.6g\n",
              out.c_str(), set.n, set.d, hsk::mode_name(set.mode), ms.min_dist, ms.min_gap,
              ms.min_sq_norm);
  return kExitOk;
}

int cmd_plan(const std::string& input, const CommonArgs& args) {
  const auto points = hsk::read_point_file(input);
  hsk::PlannerOptions opts{args.n_constant};
  const auto plan = hsk::make_plan(points, args.epsilon, args.seed, opts);
  std::cout << hsk::plan_to_text(plan);

  // Baseline bit accounting for the same instance.
  const auto truth = hsk::true_sq_dists(points);
  double min_sq = 1e300;
  for (std::size_t i = 0; i < points.n; ++i) {
    for (std::size_t j = i + 1; j < points.n; ++j) {
      min_sq = std::min(min_sq, truth[i * points.n + j]);
    }
  }
  const std::uint64_t k = hsk::jl_dimension(points.n, args.epsilon);
  const std::uint64_t jl_bits =
      points.n * hsk::jl_bits_per_point(points.n, std::sqrt(min_sq), args.epsilon);
  std::cout << "jl_k = " << k << '\n';
  std::cout << "jl_bits_total = " << jl_bits << '\n';
  return kExitOk;
}

int cmd_sketch(const std::string& input, const std::string& out, const CommonArgs& args) {
  const auto points = hsk::read_point_file(input);
  hsk::PlannerOptions opts{args.n_constant};
  const auto plan = hsk::make_plan(points, args.epsilon, args.seed, opts);
  const double ops = hsk::estimated_sketch_ops(plan);
  if (ops > 2e11) {
    throw hsk::InfeasibleError("sketching this plan would need ~" + std::to_string(ops) +
                                   " operations; refusing",
                               ops, 2e11);
  }
  const auto bundle = hsk::sketch_set(points, plan, args.threads);
  hsk::write_sketch_file(out, bundle);
  std::printf("wrote %s: n=%llu N=%llu levels=%d bits=%llu\n", out.c_str(),
              static_cast<unsigned long long>(plan.n),
              static_cast<unsigned long long>(plan.final_dim()), plan.levels,
              static_cast<unsigned long long>(hsk::bit_budget(plan)));
  return kExitOk;
}

int cmd_estimate(const std::string& sketch_path, bool all, const std::string& pairs_spec,
                 const std::string& truth_path, const std::string& out_path) {
  const auto bundle = hsk::read_sketch_file(sketch_path);
  const std::size_t n = bundle.sketches.size();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (all) {
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else if (!pairs_spec.empty()) {
    pairs = parse_pairs(pairs_spec);
  } else {
    throw hsk::PreconditionError("estimate needs --all or --pairs");
  }

  std::vector<double> truth;
  if (!truth_path.empty()) {
    const auto points = hsk::read_point_file(truth_path);
    if (points.n != n) {
      throw hsk::PreconditionError("truth file has " + std::to_string(points.n) +
                                   " points, sketch has " + std::to_string(n));
    }
    truth = hsk::true_sq_dists(points);
  }

  std::ofstream file;
  auto& out = open_output(file, out_path);
  out << (truth.empty() ? "i,j,est_sq_dist\n" : "i,j,est_sq_dist,true_sq_dist,rel_error\n");
  char buf[128];
  for (const auto& [i, j] : pairs) {
    if (i >= n || j >= n) {
      throw hsk::PreconditionError("pair index out of range: " + std::to_string(i) + "-" +
                                   std::to_string(j));
    }
    double est;
    if (bundle.plan.mode == hsk::Mode::Ball) {
      est = hsk::estimate_sq_dist_ball(
                bundle.sketches[i], bundle.sketches[j], bundle.plan.levels,
                hsk::reconstructed_norm(bundle.plan, bundle.quantized_norms[i]),
                hsk::reconstructed_norm(bundle.plan, bundle.quantized_norms[j]))
                .sq_dist;
    } else {
      est = hsk::estimate_sq_dist_sphere(bundle.sketches[i], bundle.sketches[j],
                                         bundle.plan.levels);
    }
    if (truth.empty()) {
      std::snprintf(buf, sizeof(buf), "%u,%u,%.17g\n", i, j, est);
    } else {
      const double tru = truth[i * n + j];
      const double rel = tru > 0.0 ? std::abs(est - tru) / tru
                                   : std::numeric_limits<double>::quiet_NaN();
      std::snprintf(buf, sizeof(buf), "%u,%u,%.17g,%.17g,%.17g\n", i, j, est, tru, rel);
    }
    out << buf;
  }
  return kExitOk;
}

int cmd_verify(const std::string& input, std::uint64_t trials, double slack,
               std::uint64_t divisor, const std::string& csv_path, const CommonArgs& args) {
  const auto points = hsk::read_point_file(input);
  hsk::TrialOptions opts;
  opts.planner.n_constant = args.n_constant;
  opts.dim_divisor = divisor;
  opts.threads = args.threads;
  const auto report = hsk::run_trials(points, args.epsilon, trials, args.seed, opts);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << "trial,seed,all_pairs_ok,max_rel_error,max_additive_ratio\n";
    for (std::size_t t = 0; t < report.per_trial.size(); ++t) {
      const auto& rec = report.per_trial[t];
      csv << t << ',' << rec.seed << ',' << (rec.all_pairs_ok ? 1 : 0) << ','
          << rec.max_rel_error << ',' << rec.max_additive_ratio << '\n';
    }
  }

  std::printf("plan: levels=%d N=%llu bits=%llu%s\n", report.plan.levels,
              static_cast<unsigned long long>(report.plan.final_dim()),
              static_cast<unsigned long long>(hsk::bit_budget(report.plan)),
              divisor > 1 ? " (dims divided)" : "");
  if (!report.defined) {
    std::printf("trials: 0 (success rate undefined)\n");
    return kExitOk;
  }
  std::printf("trials: %llu  successes: %llu  success_rate: %.4f\n",
              static_cast<unsigned long long>(report.trials),
              static_cast<unsigned long long>(report.successes), report.success_rate);
  std::printf("cp_lower_95: %.4f  target: %.4f  slack: %.3f\n", report.cp_lower_95,
              report.target_rate, slack);
  const bool pass = report.cp_lower_95 >= report.target_rate - slack;
  std::printf("verdict: %s\n", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitVerification;
}

int cmd_compare_jl(const std::string& input, std::uint64_t trials, double slack,
                   const CommonArgs& args) {
  const auto points = hsk::read_point_file(input);
  hsk::TrialOptions opts;
  opts.planner.n_constant = args.n_constant;
  opts.threads = args.threads;
  const auto ours = hsk::run_trials(points, args.epsilon, trials, args.seed, opts);
  const auto jl = hsk::jl_run_trials(points, args.epsilon, trials, args.seed, args.threads);

  double ours_max_rel = 0.0;
  for (const auto& rec : ours.per_trial) ours_max_rel = std::max(ours_max_rel, rec.max_rel_error);

  std::printf("method,bits_total,max_rel_error,success_rate\n");
  std::printf("hypersketch,%llu,%.6g,%.4f\n",
              static_cast<unsigned long long>(hsk::bit_budget(ours.plan)), ours_max_rel,
              ours.success_rate);
  std::printf("jl_baseline,%llu,%.6g,%.4f\n",
              static_cast<unsigned long long>(jl.total_bits), jl.max_rel_error,
              jl.success_rate);

  const bool pass = ours.defined && jl.defined &&
                    ours.cp_lower_95 >= ours.target_rate - slack &&
                    jl.cp_lower_95 >= jl.target_rate - slack;
  return pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bit-packed cascade sketches for pairwise distance estimation"};
  app.require_subcommand(1);

  CommonArgs common;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a point set file");
  std::string gen_mode = "sphere";
  std::size_t gen_n = 100, gen_d = 64;
  double gen_min_dist = 0.3, gen_m_exact = 0.01, gen_rho = 0.25;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--mode", gen_mode, "sphere | ball | close-pairs");
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--d", gen_d, "ambient dimension");
  gen->add_option("--min-dist", gen_min_dist, "minimum pairwise distance");
  gen->add_option("--m-exact", gen_m_exact, "exact planted distance (close-pairs)");
  gen->add_option("--rho", gen_rho, "minimum squared norm (ball)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output point file")->required();

  // plan
  auto* plan = app.add_subcommand("plan", "derive and print the sketch plan");
  std::string plan_input;
  plan->add_option("input", plan_input, "point file")->required();
  plan->add_option("--epsilon", common.epsilon, "accuracy target in (0,1)");
  plan->add_option("--seed", common.seed, "master seed");
  plan->add_option("--n-constant", common.n_constant, "final dimension constant (default 48)");

  // sketch
  auto* sketch = app.add_subcommand("sketch", "sketch a point set to a file");
  std::string sketch_input, sketch_out;
  sketch->add_option("input", sketch_input, "point file")->required();
  sketch->add_option("--out", sketch_out, "output sketch file")->required();
  sketch->add_option("--epsilon", common.epsilon, "accuracy target in (0,1)");
  sketch->add_option("--seed", common.seed, "master seed");
  sketch->add_option("--n-constant", common.n_constant, "final dimension constant");
  sketch->add_option("--threads", common.threads, "worker threads (0 = auto)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "decode pairwise squared distances");
  std::string est_sketch, est_pairs, est_truth, est_out;
  bool est_all = false;
  estimate->add_option("sketch", est_sketch, "sketch file")->required();
  estimate->add_flag("--all", est_all, "all pairs");
  estimate->add_option("--pairs", est_pairs, "comma-separated list like 0-1,2-5");
  estimate->add_option("--truth", est_truth, "original point file for error columns");
  estimate->add_option("--out", est_out, "output CSV (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run seeded trials against exact distances");
  std::string verify_input, verify_csv;
  std::uint64_t verify_trials = 50, verify_divisor = 1;
  double verify_slack = 0.05;
  verify->add_option("input", verify_input, "point file")->required();
  verify->add_option("--epsilon", common.epsilon, "accuracy target in (0,1)");
  verify->add_option("--trials", verify_trials, "number of independent sketches");
  verify->add_option("--seed", common.seed, "first master seed");
  verify->add_option("--slack", verify_slack, "allowed gap below the target rate");
  verify->add_option("--divisor", verify_divisor, "divide all sketch dimensions (ablation)");
  verify->add_option("--csv", verify_csv, "write per-trial CSV here");
  verify->add_option("--n-constant", common.n_constant, "final dimension constant");
  verify->add_option("--threads", common.threads, "worker threads (0 = auto)");

  // compare-jl
  auto* compare = app.add_subcommand("compare-jl", "side-by-side with the projection baseline");
  std::string cmp_input;
  std::uint64_t cmp_trials = 50;
  double cmp_slack = 0.05;
  compare->add_option("input", cmp_input, "point file")->required();
  compare->add_option("--epsilon", common.epsilon, "accuracy target in (0,1)");
  compare->add_option("--trials", cmp_trials, "number of independent sketches");
  compare->add_option("--seed", common.seed, "first master seed");
  compare->add_option("--slack", cmp_slack, "allowed gap below the target rates");
  compare->add_option("--n-constant", common.n_constant, "final dimension constant");
  compare->add_option("--threads", common.threads, "worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_mode, gen_n, gen_d, gen_min_dist, gen_m_exact, gen_rho, gen_seed,
                     gen_out);
    }
    if (plan->parsed()) return cmd_plan(plan_input, common);
    if (sketch->parsed()) return cmd_sketch(sketch_input, sketch_out, common);
    if (estimate->parsed()) {
      return cmd_estimate(est_sketch, est_all, est_pairs, est_truth, est_out);
    }
    if (verify->parsed()) {
      return cmd_verify(verify_input, verify_trials, verify_slack, verify_divisor, verify_csv,
                        common);
    }
    if (compare->parsed()) return cmd_compare_jl(cmp_input, cmp_trials, cmp_slack, common);
  } catch (const hsk::DataIntegrityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDataIntegrity;
  } catch (const hsk::PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const hsk::InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDataIntegrity;
  }
  return kExitUsage;
}
