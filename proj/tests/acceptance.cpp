// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "shotbound/cli.hpp"
#include "test_util.hpp"

using namespace shotbound;
using Big = boost::multiprecision::cpp_dec_float_50;
namespace fs = std::filesystem;

namespace {

const fs::path kSamples = SHOTBOUND_SAMPLE_DIR;
constexpr double kSlack = 1e-6;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << what;
    pass = pass && ok;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "shotbound_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

// 1. Distance bounds versus depth at n = 1000, |dx| = 0.005, spread 1, ell = 2, p = 0.9.
void reference_point(Outcome& o) {
  const auto csv = scratch() / "reference_point.csv";
  o.require(cli_run({"sweep-bounds", "--n-qubits", "1000", "--x-dist", "0.005", "--spread", "1", "--ell", "2", "--p",
                     "0.9", "--l-range", "1:200", "--output", csv.string()}) == 0,
            "sweep-bounds failed");
  const auto rows = read_csv(csv);
  o.require(rows.size() == 201, "expected 200 rows");
  const Big p("0.9"), n(1000), k(3), dx("0.005");
  const Big l0_big = ceil(1 + log(2 * n) / (2 * k * log(1 / p)));
  const auto l0 = static_cast<std::int64_t>(l0_big);
  o.require(l0 == 14, "oracle L0 != 14");
  double worst = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& c = rows[r];
    const std::int64_t L = std::stoll(c[0]);
    o.require(c[1] == "14", "L0 column != 14");
    const double noiseless = std::stod(c[2]), noise = std::stod(c[3]), noisy = std::stod(c[4]), comb = std::stod(c[5]);
    const Big b_noiseless = Big(L) * dx;
    const Big b_noise = pow(p, Big(L) * k) * sqrt(8 * n);
    const Big b_noisy = L <= l0 ? b_noiseless
                                : dx * (Big(l0) + sqrt(2 * n) * (pow(p, Big(l0) * k) - pow(p, Big(L) * k)) / (1 - pow(p, k)));
    const Big b_comb = b_noise < b_noisy ? b_noise : b_noisy;
    for (auto [got, want] : {std::pair{noiseless, b_noiseless}, std::pair{noise, b_noise}, std::pair{noisy, b_noisy},
                             std::pair{comb, b_comb}})
      worst = std::max(worst, rel_err(got, static_cast<double>(want)));
    o.require(comb <= noiseless, "combined above noiseless at L=" + std::to_string(L));
    if (L == 100) o.require(noiseless == 0.5, "noiseless(100) != 0.5");
    if (L >= 50) o.require(noise < 1e-4, "noise-only not below 1e-4 at L=" + std::to_string(L));
  }
  o.require(worst <= 1e-12, "relative error vs 50-digit oracle " + std::to_string(worst));
  o.detail << "L0=14, max rel err " << worst;
}

// 2. Binary Bayes error equals the closed form.
void helstrom(Outcome& o) {
  auto g = testutil::rng(1002);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 2;
    const auto a = t % 3 == 0 ? testutil::random_pure(dim, g) : testutil::random_state(dim, g);
    const auto b = testutil::random_state(dim, g);
    const double q = u(g);
    const double err = bayes_optimal(Ensemble({a, b}, std::vector<double>{q, 1 - q})).error;
    worst = std::max(worst, std::abs(err - helstrom_error(q, a, b)));
  }
  o.require(worst <= kSlack, "max deviation " + std::to_string(worst));
  o.detail << "100 ensembles, max |diff| " << worst;
}

// 3. Commuting states reduce to the classical pointwise maximum.
void classical(Outcome& o) {
  auto g = testutil::rng(1003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int dim = 1 + t % 8 + (t % 8 == 0 ? 1 : 0);
    const std::size_t r = 2 + t % 4;
    std::vector<DensityMatrix> states;
    std::vector<std::vector<double>> diag;
    for (std::size_t j = 0; j < r; ++j) {
      std::vector<double> v(static_cast<std::size_t>(dim));
      double s = 0.0;
      for (auto& x : v) s += (x = u(g) * u(g));
      for (auto& x : v) x /= s;
      ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
      for (int k = 0; k < dim; ++k) m(k, k) = v[static_cast<std::size_t>(k)];
      states.emplace_back(m);
      diag.push_back(v);
    }
    const auto pri = testutil::random_prior(r, g);
    double success = 0.0;
    for (int k = 0; k < dim; ++k) {
      double best = 0.0;
      for (std::size_t j = 0; j < r; ++j) best = std::max(best, pri[j] * diag[j][static_cast<std::size_t>(k)]);
      success += best;
    }
    worst = std::max(worst, std::abs(bayes_optimal(Ensemble(states, pri)).error - (1 - success)));
  }
  o.require(worst <= kSlack, "max deviation " + std::to_string(worst));
  o.detail << "50 ensembles, max |diff| " << worst;
}

// 4. Lower bound <= Bayes <= pretty good measurement; pairwise <= minimax.
void sandwich(Outcome& o) {
  auto g = testutil::rng(1004);
  std::uniform_int_distribution<int> dim(2, 4), count(2, 5);
  int violations = 0;
  for (int t = 0; t < 200; ++t) {
    const auto ens = testutil::random_ensemble(dim(g), static_cast<std::size_t>(count(g)), g);
    const double bayes = bayes_optimal(ens).error;
    const double low = lemma1_lower_bound(ens).value;
    const double pgm = pretty_good_measurement(ens).second;
    const double mm = minimax_optimal(ens.states()).error;
    const double pair = minimax_pairwise_lower_bound(ens.states());
    if (low > bayes + kSlack || bayes > pgm + kSlack || pair > mm + kSlack) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.detail << "200 ensembles, " << violations << " violations";
}

// 5. Noiseless continuity and saturation.
void continuity(Outcome& o) {
  auto g = testutil::rng(1005);
  double worst_ratio = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 3, d = 1 + t % 3, layers = 1 + t % 4, ell = t % 3;
    const auto c = testutil::random_circuit(n, d, layers, ell, g);
    const auto x = testutil::random_point(d, g), xp = testutil::random_point(d, g);
    double l1 = 0.0;
    for (int i = 0; i < d; ++i) l1 += std::abs(x[i] - xp[i]);
    const double measured =
        trace_norm(embed(c, x, NoiseSchedule::off()).matrix() - embed(c, xp, NoiseSchedule::off()).matrix());
    const double bound = continuity_bound({layers, ell, n, 1.0, circuit_spread(c), l1, 0.0});
    o.require(measured <= bound + 1e-12, "trial " + std::to_string(t) + " exceeds the bound");
    worst_ratio = std::max(worst_ratio, measured / bound);
  }
  double worst_sat = 0.0;
  for (int n : {1, 2, 3}) {
    const auto c = build_saturation_circuit(n);
    const DataPoint zero(static_cast<std::size_t>(n), 0.0), dt(static_cast<std::size_t>(n), 1e-4 / n);
    const double dist = linalg::operator_norm(unitary_of(c, zero) - unitary_of(c, dt));
    worst_sat = std::max(worst_sat, std::abs(dist / 1e-4 - 1.0));
  }
  o.require(worst_sat <= 1e-3, "saturation off by " + std::to_string(worst_sat));
  o.detail << "max measured/bound " << worst_ratio << ", saturation rel err " << worst_sat;
}

// 6. Contraction to the maximally mixed state and the noisy bounds.
void noise(Outcome& o) {
  auto g = testutil::rng(1006);
  const double ps[] = {0.8, 0.9, 0.99};
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 4, d = 1 + t % 2, layers = 1 + t % 5, ell = t % 3;
    const double p = ps[t % 3];
    const auto c = testutil::random_circuit(n, d, layers, ell, g);
    const auto x = testutil::random_point(d, g), xp = testutil::random_point(d, g, 0.2);
    const NoiseSchedule sched(p, true);
    const auto traj = embed_trajectory(c, x, sched);
    const ComplexMatrix omega = linalg::identity(c.dim()) / static_cast<double>(c.dim());
    for (std::size_t s = 0; s < traj.size(); ++s)
      o.require(trace_norm(traj[s].matrix() - omega) <= std::pow(p, static_cast<double>(s)) * std::sqrt(2.0 * n) + 1e-12,
                "contraction fails at trial " + std::to_string(t));
    double l1 = 0.0;
    for (int i = 0; i < d; ++i) l1 += std::abs(x[i] - xp[i]);
    const double measured = trace_norm(traj.back().matrix() - embed(c, xp, sched).matrix());
    const BoundInputs in{layers, ell, n, p, circuit_spread(c), l1, 0.0};
    o.require(measured <= continuity_bound(in) + 1e-12 && measured <= noise_only_bound(in) + 1e-12 &&
                  measured <= noisy_continuity_bound(in) + 1e-12,
              "bound violated at trial " + std::to_string(t));
  }
  o.detail << "30 circuits";
}

// 7. Floors never exceed the measured single-shot errors.
void chain(Outcome& o) {
  auto g = testutil::rng(1007);
  const double tol = kSlack + kDefaultSolverTol;
  int agnostic_checked = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t r = 2 + t % 2;
    std::vector<std::vector<double>> centers;
    for (std::size_t k = 0; k < r; ++k) centers.push_back(testutil::random_point(2, g, 1.5));
    const auto ds = gen_blobs(centers, std::vector<double>(r, 0.3), std::vector<std::size_t>(r, 5), 100 + t);
    Classifier clf(testutil::random_circuit(2, 2, 2, 1, g), NoiseSchedule(0.95, true), testutil::random_povm(4, r, g));
    const double delta = bayes_delta(clf, ds);
    const auto stats = class_average_states(clf, ds, LabelSource::assigned);
    const auto t6 = bayes_floor(stats);
    o.require(t6.value <= delta + tol, "theorem 6 floor above delta");
    if (stats.labels.size() >= 2) {
      const auto pw = pairwise_bayes_floor(stats);
      o.require(std::max(pw.prior_weighted, pw.min_max) <= t6.value + tol, "pairwise floor above theorem 6 floor");
    }
    const auto ac = assign_candidates(clf, ds.points());
    std::size_t present = 0;
    for (const auto& s : ac.by_label) present += s.empty() ? 0 : 1;
    if (present < 2) continue;
    ++agnostic_checked;
    const double dbar = agnostic_delta(clf, ds.points());
    const auto t7 = theorem7_floor(clf, ds.points());
    const double apw = agnostic_pairwise_floor(clf, ds.points());
    o.require(apw <= t7.value + tol, "agnostic pairwise floor above theorem 7 floor");
    o.require(t7.value <= dbar + tol, "theorem 7 floor above delta-bar");
  }
  o.detail << "20 problems, " << agnostic_checked << " with two or more assigned labels";
}

// 8. Majority-vote amplification.
void boosting(Outcome& o) {
  for (double gap : {0.1, 0.2, 0.4}) {
    const std::vector<double> probs{(1 + gap) / 2, (1 - gap) / 2};
    for (std::uint64_t m : {11u, 51u, 101u}) {
      const auto mc = monte_carlo_majority(probs, m, 10000, 2024);
      const double bound = boost_bound(m, gap, 2);
      const double sb = std::min(bound, 1.0);
      const double sigma = std::sqrt(std::max(sb * (1 - sb), 1e-12) / 10000.0);
      o.require(mc.failure_rate <= bound + 3 * sigma, "Monte Carlo above bound");
    }
  }
  std::uint64_t brute = 1;
  while (2.0 * std::exp(-0.5 * static_cast<double>(brute) * 0.04) > 0.01) ++brute;
  const auto shots = shots_needed(0.01, 0.2, 2);
  o.require(shots && *shots == 265 && brute == 265, "shots_needed mismatch");
  o.detail << "9 profiles within bound, shots_needed=" << (shots ? *shots : 0) << " brute=" << brute;
}

// 9. Byte-identical reports across repeated runs.
void determinism(Outcome& o) {
  const auto blobs = (scratch() / "blobs.csv").string();
  cli_run({"gen-data", "--centers", "0.2,0.3;1.1,0.9", "--spreads", "0.15,0.2", "--counts", "10,10", "--seed", "5",
           "--output", blobs});
  const std::vector<std::vector<std::string>> cmds{
      {"discriminate", "--input", (kSamples / "trine.json").string()},
      {"analyze", "--input", (kSamples / "classifier_2d.json").string(), "--dataset", blobs, "--seed", "1"},
      {"depth-plan", "--input", blobs},
      {"sweep-bounds", "--params", (kSamples / "depth_sweep.json").string()},
      {"boost", "--seed", "7"},
      {"regions", "--input", (kSamples / "classifier_2d.json").string()},
      {"gen-data", "--centers", "0,0;1,1", "--spreads", "0.3,0.3", "--counts", "8,8", "--seed", "11"}};
  for (const auto& cmd : cmds) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = cmd;
      const auto out = scratch() / ("det_" + cmd[0] + std::to_string(rep));
      args.insert(args.end(), {"--output", out.string()});
      o.require(cli_run(args) == 0, cmd[0] + " failed");
      if (rep == 0) first = slurp(out);
      else o.require(first == slurp(out), cmd[0] + " differs between runs");
    }
  }
  o.detail << cmds.size() << " commands";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 depth bound curves", reference_point},     {"2 binary optimum equals closed form", helstrom},
      {"3 commuting-state oracle", classical}, {"4 bound sandwich", sandwich},
      {"5 noiseless continuity", continuity},  {"6 noisy contraction and bounds", noise},
      {"7 single-shot floor chain", chain},    {"8 majority-vote boosting", boosting},
      {"9 deterministic reports", determinism}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    failed += o.pass ? 0 : 1;
  }
  fs::remove_all(scratch());
  return failed == 0 ? 0 : 1;
}
