#pragma once

// Command-line front end. `run` returns the process exit status:
//   0 success, 1 invalid input, 2 solver unconverged, 3 invariant violation.
// Reports never contain timestamps; those go to a `<output>.log` sidecar.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shotbound/data.hpp"
#include "shotbound/depth.hpp"
#include "shotbound/discrimination.hpp"
#include "shotbound/io_json.hpp"
#include "shotbound/singleshot.hpp"

namespace shotbound::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";

inline std::string report_schema_version() { return kSchemaVersion; }

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kUnconverged = 2, kInvariant = 3 };

using io::Json;

namespace cli_detail {

inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<double> parse_doubles(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
      throw InputError(what + ": '" + cell + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

inline std::vector<std::uint64_t> parse_counts(const std::string& s, const std::string& what) {
  std::vector<std::uint64_t> out;
  for (double v : parse_doubles(s, ',', what)) {
    if (v < 0.0 || v != std::floor(v)) throw InputError(what + ": expected nonnegative integers");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

// "a:b" inclusive integer range.
inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  const auto v = parse_doubles(s, ':', "--l-range");
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 0 || v[1] < v[0])
    throw InputError("--l-range: expected 'min:max' with 0 <= min <= max");
  return {static_cast<std::int64_t>(v[0]), static_cast<std::int64_t>(v[1])};
}

// "lo:hi:n,lo:hi:n"
inline Grid2D parse_grid(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InputError("--grid: expected 'lo:hi:n,lo:hi:n'");
  const auto a = parse_doubles(s.substr(0, comma), ':', "--grid");
  const auto b = parse_doubles(s.substr(comma + 1), ':', "--grid");
  if (a.size() != 3 || b.size() != 3 || a[2] < 1 || b[2] < 1 || a[2] != std::floor(a[2]) || b[2] != std::floor(b[2]))
    throw InputError("--grid: expected 'lo:hi:n,lo:hi:n' with integer n >= 1");
  return {a[0], a[1], static_cast<std::size_t>(a[2]), b[0], b[1], static_cast<std::size_t>(b[2])};
}

inline Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

inline void require_valid(const Povm& povm, const std::string& what) {
  const auto report = validate(povm);
  if (!report.ok()) throw InvariantViolation(what + ": emitted POVM fails validation: " + report.summary());
}

struct Outputs {
  std::vector<std::string> files;
};

inline void emit(const std::string& path, const std::string& text, std::ostream& out, Outputs& outs) {
  if (path.empty()) {
    out << text;
    return;
  }
  io::write_text_file(path, text);
  outs.files.push_back(path);
}

inline void write_sidecars(const Outputs& outs, const std::string& command_line, int status) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  for (const auto& f : outs.files) {
    std::ofstream log(f + ".log");
    log << "timestamp=" << ts.str() << "\ncommand=" << command_line << "\nexit=" << status
        << "\nthreads=" << thread_count() << "\n";
  }
}

// ---- subcommands --------------------------------------------------------

struct DiscriminateArgs {
  std::string input, output;
  double tol = kDefaultSolverTol;
};

inline int discriminate(const DiscriminateArgs& a, std::ostream& out, Outputs& outs) {
  const auto ens = io::ensemble_from_json(io::read_json_file(a.input));
  if (ens.size() < 2) throw InputError("discriminate: at least two states required");
  Json rep = header("discriminate");
  rep["dim"] = ens.dim();
  rep["num_states"] = ens.size();
  rep["tol"] = a.tol;
  bool converged = true;
  std::ostringstream summary;
  if (ens.has_priors()) {
    const auto bayes = bayes_optimal(ens, a.tol);
    require_valid(bayes.povm, "bayes");
    converged = converged && bayes.converged;
    const auto [pgm, pgm_err] = pretty_good_measurement(ens);
    require_valid(pgm, "pretty good measurement");
    const auto l1 = lemma1_lower_bound(ens);
    rep["bayes"] = io::to_json(bayes);
    rep["pretty_good_measurement"] = {{"error", pgm_err}, {"povm", io::to_json(pgm)}};
    rep["lemma1"] = {{"prior_weighted", l1.prior_weighted}, {"min_max", l1.min_max}, {"value", l1.value}};
    if (ens.size() == 2)
      rep["helstrom"] = helstrom_error_weighted(ens.prior(0), ens.state(0).matrix(), ens.prior(1), ens.state(1).matrix());
    summary << "bayes error        " << bayes.error << " (gap " << bayes.duality_gap << ", " << bayes.method << ")\n"
            << "pgm error          " << pgm_err << "\n"
            << "pairwise lower     " << l1.value << "\n";
  } else {
    rep["bayes"] = nullptr;
  }
  const auto mm = minimax_optimal(ens.states(), a.tol);
  require_valid(mm.povm, "minimax");
  converged = converged && mm.converged;
  const double mm_pair = minimax_pairwise_lower_bound(ens.states(), a.tol);
  rep["minimax"] = io::to_json(mm);
  rep["minimax_pairwise_lower_bound"] = mm_pair;
  rep["converged"] = converged;
  summary << "minimax error      " << mm.error << " (gap " << mm.duality_gap << ", " << mm.method << ")\n"
          << "minimax pairwise   " << mm_pair << "\n";
  emit(a.output, io::dump(rep), out, outs);
  if (!a.output.empty()) out << summary.str();
  return converged ? kOk : kUnconverged;
}

struct AnalyzeArgs {
  std::string input, dataset, candidates, output;
  double tol = kDefaultSolverTol;
};

inline Json stats_json(const ClassStats& s) {
  return {{"labels", s.labels}, {"priors", s.priors}, {"support", s.support}, {"excluded", s.excluded}};
}

inline int analyze(const AnalyzeArgs& a, std::ostream& out, Outputs& outs) {
  const auto clf = io::classifier_from_json(io::read_json_file(a.input));
  const auto ds = load_csv(a.dataset);
  if (ds.d() != clf.circuit().d()) throw ShapeError("analyze: dataset dimension differs from circuit d");
  const auto cands = a.candidates.empty() ? ds.points() : load_csv(a.candidates).points();

  Json rep = header("analyze");
  bool converged = true;
  const double delta = bayes_delta(clf, ds);
  const double delta_bar = agnostic_delta(clf, cands);
  rep["bayes_delta"] = delta;
  rep["agnostic_delta"] = delta_bar;

  const auto assigned = class_average_states(clf, ds, LabelSource::assigned);
  const auto t6 = bayes_floor(assigned, a.tol);
  converged = converged && t6.converged;
  rep["assigned_classes"] = stats_json(assigned);
  rep["theorem6_floor"] = {{"value", t6.value}, {"duality_gap", t6.duality_gap}, {"converged", t6.converged}};
  if (assigned.labels.size() >= 2) {
    const auto pw = pairwise_bayes_floor(assigned);
    rep["pairwise_floor"] = {{"prior_weighted", pw.prior_weighted}, {"min_max", pw.min_max}};
  } else {
    rep["pairwise_floor"] = nullptr;
  }

  const auto t7 = theorem7_floor(clf, cands, a.tol);
  rep["theorem7_floor"] = {{"value", t7.value},       {"duality_gap", t7.duality_gap}, {"exhaustive", t7.exhaustive},
                           {"labels", t7.labels},     {"selection", t7.selection},     {"skipped", t7.skipped}};
  const auto ac = assign_candidates(clf, cands);
  std::size_t present = 0;
  for (const auto& s : ac.by_label) present += s.empty() ? 0 : 1;
  if (present >= 2) rep["agnostic_pairwise_floor"] = 0.5 - 0.25 * closest_cross_pair(ac).trace_norm;
  else rep["agnostic_pairwise_floor"] = nullptr;
  rep["required_half_trace_distance"] = required_distance(delta_bar);

  const auto acc = accuracy_and_floor(clf, ds, a.tol);
  converged = converged && acc.floor.converged;
  rep["accuracy"] = {{"success", acc.success},
                     {"error", 1.0 - acc.success},
                     {"optimal_error_floor", acc.floor.value},
                     {"duality_gap", acc.floor.duality_gap},
                     {"true_classes", stats_json(acc.stats)}};
  rep["min_gap"] = gap_profile(clf, cands).gap;
  rep["converged"] = converged;
  emit(a.output, io::dump(rep), out, outs);
  if (!a.output.empty())
    out << "delta " << delta << ", delta-bar " << delta_bar << ", floor " << t6.value << ", agnostic floor "
        << t7.value << ", accuracy " << acc.success << "\n";
  return converged ? kOk : kUnconverged;
}

struct DepthPlanArgs {
  std::string input, output, l_range = "1:50";
  double spread = 2.0, delta = 0.1, p = 1.0;
  std::int64_t ell = 0, n_qubits = 1;
};

inline int depth_plan(const DepthPlanArgs& a, std::ostream& out, Outputs& outs) {
  const auto ds = load_csv(a.input);
  const auto cd = davg_matrix(ds);
  const auto [lmin, lmax] = parse_range(a.l_range);
  Json rep = header("depth-plan");
  rep["labels"] = cd.labels;
  rep["excluded_labels"] = cd.excluded;
  rep["priors"] = cd.priors;
  Json m = Json::array();
  for (Eigen::Index i = 0; i < cd.davg.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(cd.davg.cols()));
    for (Eigen::Index j = 0; j < cd.davg.cols(); ++j) row[static_cast<std::size_t>(j)] = cd.davg(i, j);
    m.push_back(row);
  }
  rep["davg"] = std::move(m);
  const double dsc = davg_scalar(cd.davg);
  rep["davg_scalar"] = dsc;
  rep["spread"] = a.spread;
  rep["delta"] = a.delta;
  rep["min_depth"] = dsc > 0.0 ? Json(min_depth(a.delta, a.spread, dsc)) : Json(nullptr);

  BoundInputs bi;
  bi.ell = a.ell;
  bi.n = a.n_qubits;
  bi.p = a.p;
  bi.spread = a.spread;
  bi.validate();
  rep["noise"] = {{"p", a.p}, {"ell", a.ell}, {"n_qubits", a.n_qubits}};
  const auto l0 = L0_or_limit(bi);
  rep["L0"] = l0 ? Json(*l0) : Json(nullptr);
  Json table = Json::array();
  for (std::int64_t L = lmin; L <= lmax; ++L) {
    bi.L = L;
    const double eff = effective_layers(bi);
    table.push_back({{"L", L},
                     {"floor", theorem9_floor(cd.priors, cd.davg, static_cast<double>(L), a.spread)},
                     {"effective_layers", eff},
                     {"floor_noisy", theorem9_floor(cd.priors, cd.davg, eff, a.spread)}});
  }
  rep["table"] = std::move(table);
  emit(a.output, io::dump(rep), out, outs);
  if (!a.output.empty()) out << "d_avg " << dsc << ", required depth " << rep["min_depth"].dump() << "\n";
  return kOk;
}

struct SweepArgs {
  std::string params, output, report, l_range = "1:200";
  BoundInputs in{0, 2, 1000, 0.9, 1.0, 0.005, 0.0};
};

inline std::string sweep_csv(const BoundCurve& c) {
  std::ostringstream s;
  s << "L,L0,bound_noiseless,bound_noise_only,bound_noisy_continuity,bound_combined,bound_combined_capped,"
       "clamped_noiseless,clamped_noise_only,clamped_combined\n";
  const std::string l0 = c.L0 ? std::to_string(*c.L0) : "";
  for (const auto& r : c.rows) {
    s << r.L << ',' << l0 << ',' << fmt(r.noiseless) << ',' << fmt(r.noise_only) << ',' << fmt(r.noisy_continuity)
      << ',' << fmt(r.combined) << ',' << fmt(capped(r.combined)) << ',' << (r.noiseless > kTraceDistanceCap) << ','
      << (r.noise_only > kTraceDistanceCap) << ',' << (r.combined > kTraceDistanceCap) << '\n';
  }
  return s.str();
}

inline int sweep_bounds(const SweepArgs& a, std::ostream& out, Outputs& outs) {
  const auto [lmin, lmax] = parse_range(a.l_range);
  const auto curve = sweep(a.in, lmin, lmax);
  emit(a.output, sweep_csv(curve), out, outs);
  bool combined_below = true;
  for (const auto& r : curve.rows) combined_below = combined_below && r.combined <= r.noiseless;
  if (!a.report.empty()) {
    Json rep = header("sweep-bounds");
    rep["inputs"] = {{"n_qubits", a.in.n}, {"ell", a.in.ell}, {"p", a.in.p}, {"spread", a.in.spread}, {"x_dist", a.in.x_dist}};
    rep["L_range"] = {lmin, lmax};
    rep["L0"] = curve.L0 ? Json(*curve.L0) : Json(nullptr);
    const auto t0v = t0(a.in.p, a.in.n);
    rep["t0"] = t0v ? Json(*t0v) : Json(nullptr);
    rep["combined_le_noiseless"] = combined_below;
    rep["rows"] = curve.rows.size();
    emit(a.report, io::dump(rep), out, outs);
  }
  if (!a.output.empty())
    out << "L0 " << (curve.L0 ? std::to_string(*curve.L0) : "undefined") << ", " << curve.rows.size() << " rows\n";
  if (!combined_below) throw InvariantViolation("combined bound exceeds the noiseless bound");
  return kOk;
}

struct BoostArgs {
  std::string gaps = "0.1,0.2,0.4", ms = "11,51,101", targets = "0.1,0.01", probs, output;
  std::size_t labels = 2;
  std::uint64_t trials = 10000, seed = 0;
};

// Profile with the largest entry exactly `gap` above the others.
inline std::vector<double> gap_profile_probs(double gap, std::size_t k) {
  const double top = (gap * static_cast<double>(k - 1) + 1.0) / static_cast<double>(k);
  std::vector<double> p(k, (1.0 - top) / static_cast<double>(k - 1));
  p[0] = top;
  return p;
}

inline int boost(const BoostArgs& a, std::ostream& out, Outputs& outs) {
  if (a.labels < 2) throw InputError("boost: --labels must be >= 2");
  std::vector<std::vector<double>> profiles;
  if (!a.probs.empty()) {
    profiles.push_back(parse_doubles(a.probs, ',', "--probs"));
  } else {
    for (double g : parse_doubles(a.gaps, ',', "--gap")) {
      if (!(g >= 0.0 && g <= 1.0)) throw InputError("--gap values must lie in [0,1]");
      profiles.push_back(gap_profile_probs(g, a.labels));
    }
  }
  const auto ms = parse_counts(a.ms, "--m");
  const auto targets = parse_doubles(a.targets, ',', "--targets");
  Json rep = header("boost");
  rep["trials"] = a.trials;
  rep["seed"] = a.seed;
  Json rows = Json::array();
  std::ostringstream summary;
  for (const auto& probs : profiles) {
    const double g = probability_gap(probs);
    Json jp;
    jp["probs"] = probs;
    jp["gap"] = g;
    Json table = Json::array();
    for (auto m : ms) {
      const double bound = boost_bound(m, g, probs.size());
      const auto mc = monte_carlo_majority(probs, m, a.trials, a.seed);
      const double sigma = std::sqrt(std::max(mc.failure_rate * (1.0 - mc.failure_rate), 0.25 / static_cast<double>(a.trials)) /
                                     static_cast<double>(a.trials));
      table.push_back({{"m", m},
                       {"bound", bound},
                       {"mc_failure", mc.failure_rate},
                       {"mc_sigma", sigma},
                       {"within_bound", mc.failure_rate <= bound + 3.0 * sigma}});
      summary << "gap " << g << " m " << m << ": bound " << bound << ", monte carlo " << mc.failure_rate << "\n";
    }
    jp["table"] = std::move(table);
    Json shots = Json::array();
    for (double t : targets) {
      const auto s = shots_needed(t, g, probs.size());
      shots.push_back({{"target", t}, {"shots", s ? Json(*s) : Json(nullptr)}});
    }
    jp["shots_needed"] = std::move(shots);
    rows.push_back(std::move(jp));
  }
  rep["profiles"] = std::move(rows);
  emit(a.output, io::dump(rep), out, outs);
  if (!a.output.empty()) out << summary.str();
  return kOk;
}

struct RegionsArgs {
  std::string input, output, report, grid = "0:1:21,0:1:21";
  double delta = 0.1;
};

inline int regions(const RegionsArgs& a, std::ostream& out, Outputs& outs) {
  const auto clf = io::classifier_from_json(io::read_json_file(a.input));
  const auto cells = decision_regions(clf, parse_grid(a.grid), a.delta);
  std::ostringstream csv;
  csv << "x1,x2,label,singleshot_flag\n";
  std::vector<std::size_t> per_label(clf.num_labels(), 0);
  std::size_t flagged = 0;
  for (const auto& c : cells) {
    csv << fmt(c.x1) << ',' << fmt(c.x2) << ',' << c.label << ',' << (c.singleshot ? 1 : 0) << '\n';
    ++per_label[c.label];
    flagged += c.singleshot ? 1 : 0;
  }
  emit(a.output, csv.str(), out, outs);
  if (!a.report.empty()) {
    Json rep = header("regions");
    rep["grid"] = a.grid;
    rep["delta"] = a.delta;
    rep["cells"] = cells.size();
    rep["cells_per_label"] = per_label;
    rep["singleshot_cells"] = flagged;
    emit(a.report, io::dump(rep), out, outs);
  }
  if (!a.output.empty()) out << cells.size() << " cells, " << flagged << " single-shot\n";
  return kOk;
}

struct GenDataArgs {
  std::string centers, spreads, counts, output;
  std::uint64_t seed = 0;
};

inline int gen_data(const GenDataArgs& a, std::ostream& out, Outputs& outs) {
  std::vector<std::vector<double>> centers;
  std::string cell;
  std::istringstream in(a.centers);
  while (std::getline(in, cell, ';')) centers.push_back(parse_doubles(cell, ',', "--centers"));
  const auto spreads = parse_doubles(a.spreads, ',', "--spreads");
  const auto counts64 = parse_counts(a.counts, "--counts");
  const std::vector<std::size_t> counts(counts64.begin(), counts64.end());
  const auto ds = gen_blobs(centers, spreads, counts, a.seed);
  std::ostringstream csv;
  write_csv(csv, ds, false);
  emit(a.output, csv.str(), out, outs);
  if (!a.output.empty()) out << ds.size() << " points, d = " << ds.d() << "\n";
  return kOk;
}

}  // namespace cli_detail

// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Single-shot analysis of quantum classifiers"};
  app.name("shotbound");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("shotbound, report schema ") + kSchemaVersion);

  DiscriminateArgs da;
  auto* c_disc = app.add_subcommand("discriminate", "Optimal and bounded state discrimination of an ensemble");
  c_disc->add_option("--input", da.input, "ensemble JSON")->required();
  c_disc->add_option("--output", da.output, "report JSON (stdout if omitted)");
  c_disc->add_option("--tol", da.tol, "solver duality-gap tolerance")->check(CLI::PositiveNumber);

  AnalyzeArgs aa;
  auto* c_an = app.add_subcommand("analyze", "Single-shot quantities of a classifier on a dataset");
  c_an->add_option("--input", aa.input, "classifier JSON")->required();
  c_an->add_option("--dataset", aa.dataset, "dataset CSV")->required();
  c_an->add_option("--candidates", aa.candidates, "candidate points CSV for agnostic quantities (default: dataset)");
  c_an->add_option("--output", aa.output, "report JSON");
  c_an->add_option("--tol", aa.tol)->check(CLI::PositiveNumber);
  std::uint64_t unused_seed = 0;
  c_an->add_option("--seed", unused_seed, "accepted for uniformity; analysis is deterministic");

  DepthPlanArgs dp;
  auto* c_dp = app.add_subcommand("depth-plan", "Class distances, required depth and depth floors of a dataset");
  c_dp->add_option("--input", dp.input, "dataset CSV")->required();
  c_dp->add_option("--output", dp.output, "report JSON");
  c_dp->add_option("--spread", dp.spread, "encoding spectral spread")->check(CLI::PositiveNumber);
  c_dp->add_option("--delta", dp.delta, "target single-shot error");
  c_dp->add_option("--l-range", dp.l_range, "layer range min:max");
  c_dp->add_option("--p", dp.p, "depolarizing survival probability")->check(CLI::Range(0.0, 1.0));
  c_dp->add_option("--ell", dp.ell, "non-encoding steps per layer")->check(CLI::NonNegativeNumber);
  c_dp->add_option("--n-qubits", dp.n_qubits)->check(CLI::PositiveNumber);

  SweepArgs sa;
  auto* c_sw = app.add_subcommand("sweep-bounds", "Noiseless, noise-only and combined distance bounds versus depth");
  c_sw->add_option("--params", sa.params, "JSON with n_qubits, ell, p, spread, x_dist (flags take precedence)");
  c_sw->add_option("--output", sa.output, "CSV (stdout if omitted)");
  c_sw->add_option("--report", sa.report, "summary JSON");
  auto* o_lr = c_sw->add_option("--l-range", sa.l_range, "layer range min:max");
  auto* o_p = c_sw->add_option("--p", sa.in.p)->check(CLI::Range(0.0, 1.0));
  auto* o_ell = c_sw->add_option("--ell", sa.in.ell)->check(CLI::NonNegativeNumber);
  auto* o_n = c_sw->add_option("--n-qubits", sa.in.n)->check(CLI::PositiveNumber);
  auto* o_sp = c_sw->add_option("--spread", sa.in.spread)->check(CLI::NonNegativeNumber);
  auto* o_xd = c_sw->add_option("--x-dist", sa.in.x_dist)->check(CLI::NonNegativeNumber);

  BoostArgs ba;
  auto* c_bo = app.add_subcommand("boost", "Majority-vote amplification bounds with a Monte Carlo check");
  c_bo->add_option("--gap", ba.gaps, "comma-separated gaps");
  c_bo->add_option("--probs", ba.probs, "explicit label-probability profile (overrides --gap)");
  c_bo->add_option("--labels", ba.labels, "number of labels");
  c_bo->add_option("--m", ba.ms, "comma-separated repetition counts");
  c_bo->add_option("--targets", ba.targets, "comma-separated target errors for the shot count");
  c_bo->add_option("--trials", ba.trials)->check(CLI::PositiveNumber);
  c_bo->add_option("--seed", ba.seed);
  c_bo->add_option("--output", ba.output, "report JSON");

  RegionsArgs ra;
  auto* c_re = app.add_subcommand("regions", "Decision regions of a 2-D classifier on a grid");
  c_re->add_option("--input", ra.input, "classifier JSON")->required();
  c_re->add_option("--grid", ra.grid, "lo:hi:n,lo:hi:n");
  c_re->add_option("--delta", ra.delta, "single-shot threshold")->check(CLI::Range(0.0, 1.0));
  c_re->add_option("--output", ra.output, "CSV (stdout if omitted)");
  c_re->add_option("--report", ra.report, "summary JSON");

  GenDataArgs ga;
  auto* c_gd = app.add_subcommand("gen-data", "Synthetic Gaussian clusters");
  c_gd->add_option("--centers", ga.centers, "centers 'x,y;x,y'")->required();
  c_gd->add_option("--spreads", ga.spreads, "per-center standard deviations")->required();
  c_gd->add_option("--counts", ga.counts, "per-center point counts")->required();
  c_gd->add_option("--seed", ga.seed);
  c_gd->add_option("--output", ga.output, "CSV (stdout if omitted)");

  std::string command_line;
  for (const auto& s : args) command_line += (command_line.empty() ? "" : " ") + s;

  Outputs outs;
  int status = kOk;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (*c_disc) status = discriminate(da, out, outs);
    else if (*c_an) status = analyze(aa, out, outs);
    else if (*c_dp) status = depth_plan(dp, out, outs);
    else if (*c_sw) {
      if (!sa.params.empty()) {
        const auto j = io::read_json_file(sa.params);
        auto pick = [&](const char* key, CLI::Option* opt, auto& dst) {
          if (j.contains(key) && opt->count() == 0) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        };
        pick("n_qubits", o_n, sa.in.n);
        pick("ell", o_ell, sa.in.ell);
        pick("p", o_p, sa.in.p);
        pick("spread", o_sp, sa.in.spread);
        pick("x_dist", o_xd, sa.in.x_dist);
        pick("l_range", o_lr, sa.l_range);
      }
      sa.in.validate();
      status = sweep_bounds(sa, out, outs);
    } else if (*c_bo) status = boost(ba, out, outs);
    else if (*c_re) status = regions(ra, out, outs);
    else if (*c_gd) status = gen_data(ga, out, outs);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  } catch (const InvariantViolation& e) {
    err << "error: invariant violation: " << e.what() << "\n";
    status = kInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    status = kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    status = kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    status = kInvariant;
  }
  if (status == kUnconverged) err << "warning: solver did not reach the requested tolerance\n";
  write_sidecars(outs, command_line, status);
  return status;
}

}  // namespace shotbound::cli
