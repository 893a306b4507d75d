#include "wiretap/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wiretap/converse.hpp"
#include "wiretap/rng.hpp"

namespace wiretap::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kLn2 = 0.6931471805599453094172321214581766;

struct RunConfig {
  std::string command;
  std::string input_path;
  std::uint64_t seed = 42;
  std::size_t restarts = 8;
  std::size_t budget = 200'000;
  double tol = 1e-8;
  std::string format = "text";
  double p_min = 0.1;
  double p_max = 10.0;
  std::size_t steps = 10;
  std::size_t dims = 3;
  bool inject_broken_tolerance = false;  // verify harness self-test
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

WiretapChannel load_channel(const RunConfig& cfg) {
  std::ifstream in(cfg.input_path);
  if (!in) throw SchemaError("cannot open input file: " + cfg.input_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_channel(buffer.str());
}

OptimizerOptions optimizer_options(const RunConfig& cfg) {
  OptimizerOptions opts;
  opts.seed = cfg.seed;
  opts.restarts = cfg.restarts;
  opts.tol_grad = cfg.tol;
  return opts;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json optimum_json(const Optimum& opt) {
  ordered_json j;
  j["C_S_nats"] = opt.value;
  j["C_S_bits"] = opt.value / kLn2;
  j["rank"] = opt.rank;
  j["trace"] = opt.trace;
  j["iterations"] = opt.iterations;
  j["converged"] = opt.converged;
  j["multiplier"] = opt.multiplier_estimate;
  j["K_eigenvalues"] = eig_herm(opt.K_star.K()).values;
  j["K_star"] = matrix_json(opt.K_star.K().matrix());
  return j;
}

// --- capacity ---------------------------------------------------------------

int cmd_capacity(const RunConfig& cfg, std::ostream& out) {
  const WiretapChannel ch = load_channel(cfg);
  validate(ch);
  const Optimum opt = maximize_secrecy(ch, optimizer_options(cfg));
  if (cfg.format == "json") {
    out << optimum_json(opt).dump(2) << "\n";
    return 0;
  }
  out << "C_S = " << fmt("%.6f", opt.value) << " nat (" << fmt("%.6f", opt.value / kLn2)
      << " bit)\n";
  out << "K* eigenvalues:";
  for (double lam : eig_herm(opt.K_star.K()).values) out << " " << fmt("%.6f", lam);
  out << "\n";
  out << "rank = " << opt.rank << ", trace = " << fmt("%.6f", opt.trace) << "\n";
  out << "converged = " << (opt.converged ? "yes" : "no") << " (" << opt.iterations
      << " iterations)\n";
  return 0;
}

// --- classify ---------------------------------------------------------------

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const WiretapChannel ch = load_channel(cfg);
  const ChannelClass cls = classify(ch);
  const EigenH gap = eig_herm(herm_sub(ch.gram_main(), ch.gram_eve()));
  if (cfg.format == "json") {
    ordered_json j;
    j["class"] = to_string(cls);
    j["gram_difference_eigenvalues"] = gap.values;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << to_string(cls) << "\n";
  out << "eigenvalues of H_M*H_M - H_E*H_E:";
  for (double lam : gap.values) out << " " << fmt("%.6f", lam);
  out << "\n";
  return 0;
}

// --- saddle -----------------------------------------------------------------

int cmd_saddle(const RunConfig& cfg, std::ostream& out) {
  const WiretapChannel ch = load_channel(cfg);
  validate(ch);
  const SaddleReport rep = saddle_check(ch, optimizer_options(cfg));
  if (cfg.format == "json") {
    ordered_json j;
    j["class"] = to_string(rep.channel_class);
    j["achievability_nats"] = rep.achievability;
    j["converse_nats"] = rep.converse;
    j["gap"] = rep.gap;
    j["minmax_nats"] = rep.minmax;
    j["K_rank"] = rep.K_rank;
    j["riccati_residual"] = rep.riccati_residual;
    j["feasible"] = rep.feasible;
    j["certified"] = rep.certified;
    j["notice"] = rep.notice;
    j["A_star"] = matrix_json(rep.A_star);
    j["K_star"] = matrix_json(rep.K_star.K().matrix());
    out << j.dump(2) << "\n";
  } else {
    out << "class         = " << to_string(rep.channel_class) << "\n";
    out << "achievability = " << fmt("%.9f", rep.achievability) << " nat\n";
    out << "converse      = " << fmt("%.9f", rep.converse) << " nat\n";
    out << "gap           = " << fmt("%.3e", rep.gap) << "\n";
    out << "min-max side  = " << fmt("%.9f", rep.minmax) << " nat\n";
    out << "K* rank       = " << rep.K_rank << "\n";
    out << "riccati residual = " << fmt("%.3e", rep.riccati_residual) << "\n";
    out << "feasible      = " << (rep.feasible ? "yes" : "no") << "\n";
    out << "certified     = " << (rep.certified ? "yes" : "no") << "\n";
    if (!rep.notice.empty()) out << "notice: " << rep.notice << "\n";
  }
  return rep.certified ? 0 : 4;
}

// --- verify -----------------------------------------------------------------

struct Suite {
  std::string name;
  std::size_t instances = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  ordered_json first_failure;
  std::string metric = "worst residual";
  std::string bound = "tolerance";
};

Matrix random_feasible_a(Rng& rng, std::size_t nm, std::size_t ne) {
  Matrix a(nm, ne);
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = 0; j < ne; ++j) a(i, j) = rng.complex_normal();
  const double top = singular_values(a).back();
  return a * ((0.1 + 0.8 * rng.uniform()) / std::max(top, 1e-12));
}

HermMatrix random_psd(Rng& rng, std::size_t n, std::size_t rank, double trace) {
  if (rank == 0) return HermMatrix::zero(n);
  Matrix g(n, rank);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = rng.complex_normal();
  HermMatrix k = HermMatrix::symmetrized(g * g.adjoint());
  return herm_scale(k, trace / std::max(k.trace_real(), 1e-12));
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<Suite> suites;
  const std::size_t dim_cap = std::max<std::size_t>(cfg.dims, 1);

  std::optional<WiretapChannel> fixed;
  if (!cfg.input_path.empty()) {
    fixed = load_channel(cfg);
    validate(*fixed);
  }

  const auto channel_for = [&](std::uint64_t seed, Rng& rng,
                               std::optional<ChannelClass> want) {
    if (fixed) return *fixed;
    const std::size_t n = 1 + rng.integer(dim_cap);
    return random_channel(seed, n, n + rng.integer(2), n + rng.integer(2), 1.0, want);
  };

  // 1. The four forms of the bound agree.
  {
    Suite s{"tilde-I form agreement", 200, 0.0, 1e-9, false, {}};
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < s.instances; ++i) {
      const WiretapChannel ch = channel_for(cfg.seed + i, rng, std::nullopt);
      const HermMatrix k = random_psd(rng, ch.n(), 1 + rng.integer(ch.n()),
                                      rng.uniform(0.1, 1.0) * ch.P);
      const Matrix a = random_feasible_a(rng, ch.n_M(), ch.n_E());
      double vals[4];
      const TildeForm forms[] = {TildeForm::JOINT, TildeForm::BFORM, TildeForm::SCHUR,
                                 TildeForm::RAW};
      for (int f = 0; f < 4; ++f) vals[f] = tilde_I(ch, k, a, forms[f]);
      if (cfg.inject_broken_tolerance) vals[2] += 1e-3;
      double rel = 0.0;
      for (int f = 1; f < 4; ++f)
        rel = std::max(rel, std::abs(vals[f] - vals[0]) /
                                std::max({std::abs(vals[0]), std::abs(vals[f]), 1e-300}));
      if (rel > s.worst) {
        s.worst = rel;
        if (rel > s.tolerance && s.first_failure.is_null()) {
          s.first_failure = ordered_json::parse(serialize_channel(ch));
          s.first_failure["K"] = matrix_json(k.matrix());
          s.first_failure["A"] = matrix_json(a);
        }
      }
    }
    s.passed = s.worst <= s.tolerance;
    suites.push_back(std::move(s));
  }

  // 2. F(M+I) rank factorization.
  {
    Suite s{"riccati F(M+I) factorization", 100, 0.0, 1e-9, false, {}};
    Rng rng(cfg.seed + 1);
    for (std::size_t i = 0; i < s.instances; ++i) {
      const WiretapChannel ch = channel_for(cfg.seed + 1000 + i, rng, std::nullopt);
      const HermMatrix k = random_psd(rng, ch.n(), 1 + rng.integer(ch.n()),
                                      rng.uniform(0.1, 1.0) * ch.P);
      const RiccatiProblem prob = build_M(ch, k);
      const Matrix b1 = inv_pd(HermMatrix::symmetrized(
                                   Matrix::identity(ch.n_M()) +
                                   ch.H_M * k.matrix() * ch.H_M.adjoint()))
                            .matrix();
      const Matrix left = Matrix::vcat(
          -ch.H_M, -ch.H_E + ch.H_E * k.matrix() * ch.H_M.adjoint() * b1 * ch.H_M);
      const Matrix right = Matrix::hcat(-(k.matrix() * ch.H_M.adjoint()),
                                        k.matrix() * ch.H_E.adjoint());
      const Matrix fmi = prob.F * (prob.M + Matrix::identity(prob.M.rows()));
      const double res = (fmi - left * right).frobenius_norm();
      if (res > s.worst) {
        s.worst = res;
        if (res > s.tolerance && s.first_failure.is_null())
          s.first_failure = ordered_json::parse(serialize_channel(ch));
      }
    }
    s.passed = s.worst <= s.tolerance;
    suites.push_back(std::move(s));
  }

  // 3. Degraded-main identity.
  {
    Suite s{"degraded-main identity", 50, 0.0, 1e-8, false, {}};
    Rng rng(cfg.seed + 2);
    for (std::size_t i = 0; i < s.instances; ++i) {
      WiretapChannel ch = channel_for(cfg.seed + 2000 + i, rng, ChannelClass::DEGRADED_MAIN);
      if (fixed && classify(ch) != ChannelClass::DEGRADED_MAIN) {
        s.instances = 0;  // fixed input of another class: suite not applicable
        break;
      }
      const double res =
          degraded_identity_check(ch) / std::max(1.0, ch.gram_main().frobenius_norm());
      if (res > s.worst) {
        s.worst = res;
        if (res > s.tolerance && s.first_failure.is_null())
          s.first_failure = ordered_json::parse(serialize_channel(ch));
      }
    }
    s.passed = s.worst <= s.tolerance;
    suites.push_back(std::move(s));
  }

  // 4. Entropy decomposition.
  {
    Suite s{"entropy decomposition", 50, 0.0, 1e-8, false, {}};
    Rng rng(cfg.seed + 3);
    for (std::size_t i = 0; i < s.instances; ++i) {
      const std::size_t m = 1 + rng.integer(dim_cap);
      Matrix g(2 * m, 2 * m);
      for (std::size_t r = 0; r < 2 * m; ++r)
        for (std::size_t c = 0; c < 2 * m; ++c) g(r, c) = rng.complex_normal();
      const HermMatrix joint = HermMatrix::symmetrized(
          g * g.adjoint() + Matrix::identity(2 * m) * 0.1);
      const HermMatrix k_x = random_psd(rng, m, 1 + rng.integer(m), rng.uniform(0.0, 2.0));
      const double res = entropy_decomposition_check(joint, k_x);
      if (res > s.worst) {
        s.worst = res;
        if (res > s.tolerance && s.first_failure.is_null()) {
          s.first_failure["K_joint"] = matrix_json(joint.matrix());
          s.first_failure["K_X"] = matrix_json(k_x.matrix());
        }
      }
    }
    s.passed = s.worst <= s.tolerance;
    suites.push_back(std::move(s));
  }

  // 5. SPD product lemma: eigenvalues of a product of PD matrices stay positive.
  {
    Suite s{"spd product lemma", 200, 0.0, 0.0, false, {}, "min eigenvalue", "must exceed"};
    Rng rng(cfg.seed + 4);
    double min_eig = 1e300;
    for (std::size_t i = 0; i < s.instances; ++i) {
      const std::size_t n = 1 + rng.integer(5);
      Matrix ga(n, n), gb(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          ga(r, c) = rng.complex_normal();
          gb(r, c) = rng.complex_normal();
        }
      const HermMatrix a =
          HermMatrix::symmetrized(ga * ga.adjoint() + Matrix::identity(n) * 0.05);
      const HermMatrix b =
          HermMatrix::symmetrized(gb * gb.adjoint() + Matrix::identity(n) * 0.05);
      min_eig = std::min(min_eig, spd_product_eigs(a, b).front());
    }
    s.worst = min_eig;
    s.passed = min_eig > 0.0;
    suites.push_back(std::move(s));
  }

  bool all_passed = true;
  for (const Suite& s : suites) {
    if (s.instances == 0) {
      out << "[SKIP] " << s.name << "\n";
      continue;
    }
    all_passed = all_passed && s.passed;
    out << (s.passed ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.instances
        << " instances, " << s.metric << " " << fmt("%.3e", s.worst) << " (" << s.bound
        << " " << fmt("%.0e", s.tolerance) << ")\n";
  }
  const std::size_t passed_count =
      static_cast<std::size_t>(std::count_if(suites.begin(), suites.end(),
                                             [](const Suite& s) { return s.passed; }));
  out << passed_count << "/" << suites.size() << " suites passed\n";
  if (!all_passed) {
    for (const Suite& s : suites)
      if (!s.passed && !s.first_failure.is_null()) {
        err << "first failing instance of \"" << s.name << "\":\n"
            << s.first_failure.dump(2) << "\n";
        break;
      }
    return 5;
  }
  return 0;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.p_min > 0.0) || cfg.p_max < cfg.p_min || cfg.steps < 1)
    throw SchemaError("sweep: require p_min > 0, p_max >= p_min, steps >= 1");
  WiretapChannel ch = load_channel(cfg);
  validate(ch);

  ordered_json rows = ordered_json::array();
  std::string csv = "P,C_S_nats,rank,trace,converged\n";
  for (std::size_t i = 0; i < cfg.steps; ++i) {
    const double t = cfg.steps == 1
                         ? 0.0
                         : static_cast<double>(i) / static_cast<double>(cfg.steps - 1);
    const double power = cfg.p_min * std::pow(cfg.p_max / cfg.p_min, t);
    ch.P = power;
    const Optimum opt = maximize_secrecy(ch, optimizer_options(cfg));
    csv += g17(power) + "," + g17(opt.value) + "," + std::to_string(opt.rank) + "," +
           g17(opt.trace) + "," + (opt.converged ? "1" : "0") + "\n";
    if (cfg.format == "json") {
      ordered_json row;
      row["P"] = power;
      row["C_S_nats"] = opt.value;
      row["rank"] = opt.rank;
      row["trace"] = opt.trace;
      row["converged"] = opt.converged;
      rows.push_back(std::move(row));
    }
  }
  if (cfg.format == "json")
    out << rows.dump(2) << "\n";
  else
    out << csv;
  return 0;
}

}  // namespace

// -----------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Perfect secrecy capacity of the MIMO wiretap channel"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub, bool needs_input) {
    auto* input = sub->add_option("--input", cfg.input_path, "channel JSON file");
    if (needs_input) input->required();
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--restarts", cfg.restarts, "optimizer restarts");
    sub->add_option("--budget", cfg.budget, "oracle sampling budget");
    sub->add_option("--tol", cfg.tol, "optimizer gradient tolerance");
    sub->add_option("--format", cfg.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
  };

  CLI::App* capacity = app.add_subcommand("capacity", "maximize the secrecy rate");
  add_common(capacity, true);
  CLI::App* classify_cmd = app.add_subcommand("classify", "channel class and Gram gap");
  add_common(classify_cmd, true);
  CLI::App* saddle = app.add_subcommand("saddle", "achievability vs converse certificate");
  add_common(saddle, true);
  CLI::App* verify = app.add_subcommand("verify", "run the identity property suites");
  add_common(verify, false);
  verify->add_option("--dims", cfg.dims, "largest transmit dimension");
  verify->add_flag("--inject-broken-tolerance", cfg.inject_broken_tolerance,
                   "harness self-test: force a suite failure")
      ->group("");  // hidden
  CLI::App* sweep = app.add_subcommand("sweep", "capacity across a power range (CSV)");
  add_common(sweep, true);
  sweep->add_option("--pmin", cfg.p_min, "lowest power");
  sweep->add_option("--pmax", cfg.p_max, "highest power");
  sweep->add_option("--steps", cfg.steps, "number of log-spaced powers");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (capacity->parsed()) return cmd_capacity(cfg, out);
    if (classify_cmd->parsed()) return cmd_classify(cfg, out);
    if (saddle->parsed()) return cmd_saddle(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
  } catch (const SchemaError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const RankDeficientChannel& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const NonPositivePower& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const DimensionMismatch& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const InvalidMatrix& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace wiretap::cli
