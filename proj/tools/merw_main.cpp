// Command-line front end: simulation, exact moment oracles, limit constants,
// and the verification suite.
//
// Exit codes: 0 success, 1 verification/consistency failure, 2 usage error,
// 3 enumeration budget exceeded.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "merw/closedform.hpp"
#include "merw/engines.hpp"
#include "merw/errors.hpp"
#include "merw/exact.hpp"
#include "merw/mcstats.hpp"
#include "merw/model.hpp"
#include "merw/report.hpp"
#include "merw/verify.hpp"
#include "merw/version.hpp"

namespace {

using merw::fmt17;

struct OutputSink {
  std::string path;  // empty -> stdout

  void write(const std::string& content) const {
    if (path.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    file << content;
  }
};

void write_manifest(const merw::RunManifest& manifest, const std::string& out_path) {
  if (out_path.empty()) return;
  std::ofstream file(out_path + ".manifest.json", std::ios::binary);
  if (file) file << manifest.to_json() << "\n";
}

merw::RunManifest make_manifest(const std::string& subcommand, int argc, char** argv,
                                std::uint64_t seed) {
  merw::RunManifest manifest;
  manifest.subcommand = subcommand;
  for (int i = 1; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);
  manifest.tool_version = merw::kVersion;
  manifest.seed = seed;
  manifest.timestamp = merw::iso8601_utc_now();
  return manifest;
}

merw::RecordPolicy parse_record(const std::string& text) {
  if (text == "final") return merw::RecordPolicy::final_only();
  if (text == "positions") return merw::RecordPolicy::positions();
  if (text.rfind("checkpoints:", 0) == 0) {
    const auto stride = std::stoull(text.substr(12));
    return merw::RecordPolicy::checkpoints(stride);
  }
  throw CLI::ValidationError("--record", "expected final, positions, or checkpoints:<stride>");
}

std::string trajectory_json(const merw::Trajectory& traj) {
  merw::JsonWriter w;
  w.begin_object();
  w.key("d").value(traj.d);
  w.key("horizon").value(traj.horizon);
  w.key("header").begin_array();
  w.value("step");
  for (int i = 1; i <= traj.d; ++i) w.value("s" + std::to_string(i));
  w.end_array();
  w.key("rows").begin_array();
  const auto emit_row = [&](std::uint64_t step, const std::int64_t* pos) {
    w.begin_array();
    w.value(step);
    for (int i = 0; i < traj.d; ++i) w.value(pos[i]);
    w.end_array();
  };
  for (std::size_t row = 0; row < traj.steps.size(); ++row)
    emit_row(traj.steps[row], &traj.positions[row * traj.d]);
  if (traj.steps.empty()) emit_row(traj.horizon, traj.final_state.position.data());
  w.end_array();
  w.end_object();
  return w.str();
}

int cmd_simulate(int argc, char** argv, const merw::WalkConfig& config, std::uint64_t runs,
                 const std::string& engine_str, const std::string& record_str,
                 const std::string& out, const std::string& format) {
  const merw::Engine engine = engine_str == "full" ? merw::Engine::Full : merw::Engine::Reduced;
  const merw::RecordPolicy record = parse_record(record_str);

  auto manifest = make_manifest("simulate", argc, argv, config.seed);
  manifest.config = {{"dim", std::to_string(config.d)},
                     {"p", fmt17(config.p)},
                     {"steps", std::to_string(config.horizon)},
                     {"runs", std::to_string(runs)},
                     {"engine", engine_str},
                     {"record", record_str},
                     {"format", format}};
  if (config.first_step.is_biased()) manifest.config.emplace_back("q", fmt17(config.first_step.q));

  for (std::uint64_t run = 0; run < runs; ++run) {
    merw::RngStream rng(config.seed, run);
    const auto traj = merw::simulate(config, engine, rng, record);
    std::string body;
    if (format == "json") {
      body = trajectory_json(traj) + "\n";
    } else {
      std::ostringstream stream;
      merw::write_trajectory_csv(stream, traj);
      body = stream.str();
    }
    std::string path = out;
    if (!out.empty() && runs > 1) path = out + ".run" + std::to_string(run);
    OutputSink{path}.write(body);
    if (!path.empty()) manifest.outputs.push_back(path);
  }
  write_manifest(manifest, out);
  return 0;
}

int cmd_moments(int argc, char** argv, int d, const std::string& p_str, const std::string& q_str,
                std::uint64_t n, bool exact_enum, std::uint64_t budget, const std::string& out,
                const std::string& format) {
  const double p = merw::exact::to_double(merw::exact::from_decimal(p_str));
  merw::FirstStepLaw law = merw::FirstStepLaw::uniform();
  if (!q_str.empty()) law = merw::FirstStepLaw::biased(merw::exact::to_double(merw::exact::from_decimal(q_str)));

  const auto table = merw::exact_second_moment(n, d, p, law);
  // Criticality decided on the exact rational literal, not its double image.
  const bool critical =
      merw::exact::classify_exact(d, merw::exact::from_decimal(p_str)) == merw::RegimeKind::Critical;
  const bool closed_form = !law.is_biased() && !critical;
  std::vector<double> closed;
  if (closed_form) closed = merw::second_moment_closed_form_series(n, d, p);

  // Oracle columns from exact enumeration, when requested.
  std::vector<std::vector<double>> enum_diag;  // per n, d entries
  if (exact_enum) {
    merw::exact::ExactConfig config{d, merw::exact::from_decimal(p_str), law.is_biased(),
                                    q_str.empty() ? merw::exact::Rational(0)
                                                  : merw::exact::from_decimal(q_str)};
    const auto levels = merw::exact::enumerate_exact_levels(n, config, budget);
    enum_diag.resize(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
      const auto moments = merw::exact::law_moments(levels[k - 1], config);
      enum_diag[k - 1].resize(d);
      for (int i = 0; i < d; ++i)
        enum_diag[k - 1][i] = merw::exact::to_double(moments.second_moment[i * d + i]);
    }
  }

  // Any disagreement between the recurrence, the closed form, and the
  // enumeration beyond 1e-10 relative is a hard error.
  for (std::uint64_t k = 1; k <= n; ++k) {
    for (int i = 1; i <= d; ++i) {
      const double rec = table.second_at(k, i, i);
      if (closed_form) {
        const double cf = closed[k - 1];
        if (std::fabs(cf - rec) > 1e-10 * std::max(1.0, std::fabs(rec))) {
          std::cerr << "moments: closed form disagrees with the recurrence at n=" << k
                    << " (rec=" << fmt17(rec) << ", closed=" << fmt17(cf) << ")\n";
          return 1;
        }
      }
      if (exact_enum) {
        const double en = enum_diag[k - 1][i - 1];
        if (std::fabs(en - rec) > 1e-10 * std::max(1.0, std::fabs(rec))) {
          std::cerr << "moments: enumeration disagrees with the recurrence at n=" << k << "\n";
          return 1;
        }
      }
    }
  }

  std::string body;
  if (format == "json") {
    merw::JsonWriter w;
    w.begin_array();
    for (std::uint64_t k = 1; k <= n; ++k) {
      w.begin_object();
      w.key("n").value(k);
      w.key("mean").begin_array();
      for (int i = 1; i <= d; ++i) w.value(table.mean_at(k, i));
      w.end_array();
      w.key("cov").begin_array();
      for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) w.value(table.second_at(k, i, j));
      w.end_array();
      if (closed_form) w.key("closed_form").value(closed[k - 1]);
      if (exact_enum) {
        w.key("exact_enum_diag").begin_array();
        for (int i = 0; i < d; ++i) w.value(enum_diag[k - 1][i]);
        w.end_array();
      }
      w.end_object();
    }
    w.end_array();
    body = w.str() + "\n";
  } else {
    std::ostringstream csv;
    csv << "n";
    for (int i = 1; i <= d; ++i) csv << ",e_s" << i;
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j) csv << ",cov_" << i << "_" << j;
    if (closed_form) csv << ",closed_form";
    if (exact_enum)
      for (int i = 1; i <= d; ++i) csv << ",exact_enum_" << i << "_" << i;
    csv << "\n";
    for (std::uint64_t k = 1; k <= n; ++k) {
      csv << k;
      for (int i = 1; i <= d; ++i) csv << "," << fmt17(table.mean_at(k, i));
      for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) csv << "," << fmt17(table.second_at(k, i, j));
      if (closed_form) csv << "," << fmt17(closed[k - 1]);
      if (exact_enum)
        for (int i = 0; i < d; ++i) csv << "," << fmt17(enum_diag[k - 1][i]);
      csv << "\n";
    }
    body = csv.str();
  }
  OutputSink{out}.write(body);

  auto manifest = make_manifest("moments", argc, argv, 0);
  manifest.config = {{"dim", std::to_string(d)}, {"p", p_str}, {"n", std::to_string(n)},
                     {"exact_enum", exact_enum ? "true" : "false"}, {"format", format}};
  if (!q_str.empty()) manifest.config.emplace_back("q", q_str);
  if (!out.empty()) manifest.outputs.push_back(out);
  write_manifest(manifest, out);
  return 0;
}

int cmd_limits(int argc, char** argv, int d, const std::string& p_str, const std::string& q_str,
               const std::string& out, const std::string& format) {
  const auto p_rat = merw::exact::from_decimal(p_str);
  const double p = merw::exact::to_double(p_rat);
  merw::FirstStepLaw law = merw::FirstStepLaw::uniform();
  if (!q_str.empty()) law = merw::FirstStepLaw::biased(merw::exact::to_double(merw::exact::from_decimal(q_str)));
  // Trichotomy decided on the exact rational literal.
  merw::Regime regime;
  regime.kind = merw::exact::classify_exact(d, p_rat);
  regime.a = merw::exact::to_double(merw::exact::memory_to_a_exact(d, p_rat));
  regime.p_d = merw::critical_memory(d);
  const auto constants = merw::limit_constants(d, p, law, regime);

  std::vector<std::pair<std::string, std::string>> fields;
  const auto regime_name = [](merw::RegimeKind kind) {
    switch (kind) {
      case merw::RegimeKind::Diffusive: return "diffusive";
      case merw::RegimeKind::Critical: return "critical";
      default: return "superdiffusive";
    }
  };
  fields.emplace_back("regime", regime_name(constants.regime.kind));
  fields.emplace_back("a", fmt17(constants.regime.a));
  fields.emplace_back("p_d", fmt17(constants.regime.p_d));
  if (constants.regime.kind != merw::RegimeKind::Superdiffusive) {
    fields.emplace_back("cov_scale", fmt17(constants.cov_scale));
    fields.emplace_back("vn_limit", fmt17(constants.vn_limit));
  } else {
    fields.emplace_back("vn_limit_3f2", fmt17(constants.vn_limit));
    fields.emplace_back("vn_limit_bound", fmt17(constants.vn_limit_bound));
    fields.emplace_back("e_l_norm2", fmt17(constants.e_l_norm2));
    for (int i = 0; i < d; ++i)
      fields.emplace_back("e_l_" + std::to_string(i + 1), fmt17(constants.e_l[i]));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        fields.emplace_back("e_llt_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                            fmt17(constants.e_llt[i * d + j]));
  }

  std::string body;
  if (format == "csv") {
    std::ostringstream csv;
    csv << "key,value\n";
    for (const auto& [k, v] : fields) csv << k << "," << v << "\n";
    body = csv.str();
  } else {
    merw::JsonWriter w;
    w.begin_object();
    w.key("d").value(d);
    w.key("p").value(p);
    if (law.is_biased()) w.key("q").value(law.q);
    for (const auto& [k, v] : fields) {
      w.key(k);
      if (k == "regime") {
        w.value(v);
      } else {
        // Values are already %.17g strings; re-emit them as raw numbers.
        w.value(std::stod(v));
      }
    }
    w.end_object();
    body = w.str() + "\n";
  }
  OutputSink{out}.write(body);

  auto manifest = make_manifest("limits", argc, argv, 0);
  manifest.config = {{"dim", std::to_string(d)}, {"p", p_str}, {"format", format}};
  if (!q_str.empty()) manifest.config.emplace_back("q", q_str);
  if (!out.empty()) manifest.outputs.push_back(out);
  write_manifest(manifest, out);
  return 0;
}

int cmd_verify(int argc, char** argv, const merw::VerifyOptions& options, const std::string& out) {
  const auto report = merw::run_verify(options);
  std::cerr << report.to_table();
  OutputSink{out}.write(report.to_json() + "\n");

  auto manifest = make_manifest("verify", argc, argv, options.seed);
  manifest.config = {{"tier", options.tier},
                     {"seed", std::to_string(options.seed)},
                     {"workers", std::to_string(options.workers)}};
  if (!out.empty()) manifest.outputs.push_back(out);
  write_manifest(manifest, out);
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"merw: multi-dimensional elephant random walk toolkit"};
  app.set_config("--config");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate trajectories");
  int sim_d = 1;
  std::string sim_p = "0.5";
  std::string sim_q;
  std::uint64_t sim_steps = 1;
  std::uint64_t sim_runs = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_engine = "reduced";
  std::string sim_record = "final";
  std::string sim_out;
  std::string sim_format = "csv";
  sim->add_option("--dim", sim_d, "dimension d >= 1")->required();
  sim->add_option("--p", sim_p, "memory parameter in [0,1]")->required();
  sim->add_option("--q", sim_q, "first-step bias (selects the biased variant)");
  sim->add_option("--steps,--n", sim_steps, "horizon n >= 1")->required();
  sim->add_option("--runs", sim_runs, "number of trajectories (streams 0..R-1)");
  sim->add_option("--seed", sim_seed, "root seed");
  sim->add_option("--engine", sim_engine, "full | reduced (default reduced)")
      ->check(CLI::IsMember({"full", "reduced"}));
  sim->add_option("--record", sim_record, "final | positions | checkpoints:<stride>");
  sim->add_option("--out", sim_out, "output path (stdout if omitted)");
  sim->add_option("--format", sim_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  // moments
  auto* mom = app.add_subcommand("moments", "exact moment tables");
  int mom_d = 1;
  std::string mom_p = "0.5";
  std::string mom_q;
  std::uint64_t mom_n = 1;
  bool mom_exact = false;
  std::uint64_t mom_budget = merw::exact::kDefaultStateBudget;
  std::string mom_out;
  std::string mom_format = "csv";
  mom->add_option("--dim", mom_d)->required();
  mom->add_option("--p", mom_p)->required();
  mom->add_option("--q", mom_q);
  mom->add_option("--n,--steps", mom_n)->required();
  mom->add_flag("--exact-enum", mom_exact, "add the exact-enumeration oracle column");
  mom->add_option("--budget", mom_budget, "enumeration state budget");
  mom->add_option("--out", mom_out);
  mom->add_option("--format", mom_format)->check(CLI::IsMember({"csv", "json"}));

  // limits
  auto* lim = app.add_subcommand("limits", "regime constants");
  int lim_d = 1;
  std::string lim_p = "0.5";
  std::string lim_q;
  std::string lim_out;
  std::string lim_format = "json";
  lim->add_option("--dim", lim_d)->required();
  lim->add_option("--p", lim_p)->required();
  lim->add_option("--q", lim_q);
  lim->add_option("--out", lim_out);
  lim->add_option("--format", lim_format)->check(CLI::IsMember({"csv", "json"}));

  // verify
  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  merw::VerifyOptions options;
  std::string ver_out;
  ver->add_option("--tier", options.tier, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  ver->add_option("--seed", options.seed, "suite seed (default 42)");
  ver->add_option("--workers", options.workers, "worker threads");
  ver->add_flag("--inject-fault", options.inject_fault,
                "corrupt one oracle target (negative testing)");
  ver->add_option("--out", ver_out, "report path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      merw::WalkConfig config;
      config.d = sim_d;
      config.p = merw::exact::to_double(merw::exact::from_decimal(sim_p));
      if (!sim_q.empty())
        config.first_step =
            merw::FirstStepLaw::biased(merw::exact::to_double(merw::exact::from_decimal(sim_q)));
      config.horizon = sim_steps;
      config.seed = sim_seed;
      config.validate();
      return cmd_simulate(argc, argv, config, sim_runs, sim_engine, sim_record, sim_out, sim_format);
    }
    if (mom->parsed())
      return cmd_moments(argc, argv, mom_d, mom_p, mom_q, mom_n, mom_exact, mom_budget, mom_out,
                         mom_format);
    if (lim->parsed()) return cmd_limits(argc, argv, lim_d, lim_p, lim_q, lim_out, lim_format);
    if (ver->parsed()) return cmd_verify(argc, argv, options, ver_out);
  } catch (const merw::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
