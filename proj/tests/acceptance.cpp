// Acceptance run: one PASS/FAIL line per criterion.
//
// A criterion can fail as a known deviation (listed in the README). Those lines still read
// FAIL; the exit status is non-zero only for failures that are not known deviations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "movest/error.hpp"
#include "movest/estimators.hpp"
#include "movest/experiment.hpp"
#include "movest/generation.hpp"
#include "movest/io.hpp"
#include "movest/mov_oracle.hpp"
#include "oracles.hpp"

using namespace movest;

namespace {

struct Outcome {
  bool pass = false;
  bool known_deviation = false;
  std::string detail;
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

// Sample sizes ------------------------------------------------------------------------------

std::int64_t reference_size(double factor, double eps, double delta, double count) {
  const long double value = static_cast<long double>(factor) / (static_cast<long double>(eps) * eps) *
                            std::log(2.0L * count / static_cast<long double>(delta));
  return static_cast<std::int64_t>(std::ceil(value));
}

Outcome sample_sizes() {
  const Rational eps(1, 10);
  const Rational delta(1, 100);
  struct Row {
    const char* name;
    std::int64_t library;
    std::int64_t reference;
    std::int64_t printed;
  };
  const std::vector<Row> rows{
      {"k-approval", sample_size(RuleKind::KApproval, eps, delta, 5, 1), reference_size(12, 0.1, 0.01, 1), 6358},
      {"scoring", sample_size(RuleKind::Scoring, eps, delta, 5), reference_size(12, 0.1, 0.01, 5), 8290},
      {"approval", sample_size(RuleKind::Approval, eps, delta, 5), reference_size(12, 0.1, 0.01, 5), 8290},
      {"bucklin", sample_size(RuleKind::Bucklin, eps, delta, 5), reference_size(12, 0.1, 0.01, 5), 8290},
      {"maximin", sample_size(RuleKind::Maximin, eps, delta, 5), reference_size(24, 0.1, 0.01, 5), 16580},
      {"copeland", sample_size(RuleKind::Copeland, eps, delta, 5), reference_size(96, 0.1, 0.01, 5), 66318},
  };
  Outcome out;
  out.pass = true;
  bool matches_reference = true;
  bool only_known = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    detail << row.name << "=" << row.library;
    if (row.library != row.reference) {
      matches_reference = false;
      detail << " (reference " << row.reference << ")";
    }
    if (row.library != row.printed) {
      out.pass = false;
      detail << " (expected " << row.printed << ")";
      const std::string name = row.name;
      only_known = only_known && (name == "maximin" || name == "copeland");
    }
    detail << " ";
  }
  out.known_deviation = !out.pass && matches_reference && only_known;
  if (out.known_deviation) {
    detail << "- expected values for maximin/copeland exceed ceil(24/eps^2 ln 1000) = 16579 and "
              "ceil(96/eps^2 ln 1000) = 66315";
  }
  out.detail = detail.str();
  return out;
}

// Sandwich bounds and closed form -----------------------------------------------------------

struct SuiteCase {
  Profile profile;
  Rule rule;
};

std::vector<SuiteCase> sandwich_suite() {
  std::vector<SuiteCase> cases;
  std::mt19937_64 rng(2024);
  const std::vector<std::string> ranked_rules{"borda", "plurality", "kapproval:2", "bucklin",
                                               "maximin", "copeland:0", "copeland:0.5", "copeland:1"};
  for (int i = 0; i < 600; ++i) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 6);
    const Profile ranked = generate({ImpartialCulture{}, n, 3, rng()});
    for (const auto& text : ranked_rules) cases.push_back({ranked, parse_rule(text, 3)});
    cases.push_back({Profile(oracle::random_approval(rng, 3, static_cast<int>(n))), ApprovalRule{}});
  }
  // m = 2: every ranked profile with n <= 6, and every approval profile with n <= 3.
  const std::vector<std::string> two_rules{"plurality", "bucklin", "maximin", "copeland:0.5"};
  for (std::int64_t n = 1; n <= 6; ++n) {
    for (std::int64_t a = 0; a <= n; ++a) {
      std::vector<WeightedBallot<Ranking>> votes;
      if (a > 0) votes.push_back({Ranking({0, 1}), a});
      if (a < n) votes.push_back({Ranking({1, 0}), n - a});
      const Profile p = RankedProfile(2, votes);
      for (const auto& text : two_rules) cases.push_back({p, parse_rule(text, 2)});
    }
  }
  const auto subsets = oracle::all_subsets(2);
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      std::vector<WeightedBallot<ApprovalBallot>> votes;
      for (auto i : idx) votes.push_back({subsets[i], 1});
      cases.push_back({Profile(ApprovalProfile(2, votes)), ApprovalRule{}});
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == subsets.size()) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
  }
  return cases;
}

struct SuiteResults {
  std::map<std::string, std::pair<int, int>> per_rule;  // cases, violations
  int closed_cases = 0;
  int closed_mismatches = 0;
  int bucklin_half_delta_cases = 0;       // tie-free Bucklin instances with finite delta
  int bucklin_half_delta_violations = 0;  // of those, MoV < delta / 2
};

SuiteResults run_suite() {
  SuiteResults out;
  for (const auto& c : sandwich_suite()) {
    const std::int64_t n = std::visit([](const auto& p) { return p.num_voters(); }, c.profile);
    const auto exact = mov_brute_force(c.profile, c.rule, n);
    const auto bounds = mov_bounds(c.profile, c.rule);
    auto& [cases, violations] = out.per_rule[to_string(c.rule)];
    ++cases;
    if (!exact.exact() || !bounds.contains(exact.value)) ++violations;

    const RuleKind kind = kind_of(c.rule);
    if (kind == RuleKind::Bucklin && winner_set(c.profile, c.rule).winners.size() == 1) {
      if (const auto delta = bucklin_delta(std::get<RankedProfile>(c.profile))) {
        ++out.bucklin_half_delta_cases;
        if (2 * exact.value < *delta) ++out.bucklin_half_delta_violations;
      }
    }
    if (kind != RuleKind::KApproval && kind != RuleKind::Approval) continue;
    const int m = std::visit([](const auto& p) { return p.num_candidates(); }, c.profile);
    if (winner_set(c.profile, c.rule).winners.size() != 1) continue;
    if (kind == RuleKind::KApproval && std::get<KApprovalRule>(c.rule).k >= m) continue;
    ++out.closed_cases;
    std::int64_t closed = 0;
    if (kind == RuleKind::KApproval) {
      const int k = std::get<KApprovalRule>(c.rule).k;
      closed = mov_kapproval_closed_form(std::get<RankedProfile>(c.profile), k);
    } else {
      closed = mov_approval_closed_form(std::get<ApprovalProfile>(c.profile));
    }
    if (!exact.exact() || closed != exact.value) ++out.closed_mismatches;
  }
  return out;
}

Outcome sandwich(const SuiteResults& suite) {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  for (const auto& [rule, counts] : suite.per_rule) {
    detail << rule << " " << counts.second << "/" << counts.first << " ";
    out.pass = out.pass && counts.second == 0 && counts.first >= 500;
  }
  detail << "(violations/cases); bucklin lower bound is the majority-threshold margin, delta/2 "
            "would be violated on "
         << suite.bucklin_half_delta_violations << "/" << suite.bucklin_half_delta_cases << " tie-free cases";
  out.detail = detail.str();
  return out;
}

Outcome closed_form(const SuiteResults& suite) {
  Outcome out;
  out.pass = suite.closed_mismatches == 0 && suite.closed_cases > 0;
  out.detail = std::to_string(suite.closed_mismatches) + " mismatches over " +
               std::to_string(suite.closed_cases) + " tie-free k-approval/approval instances";
  return out;
}

// Coverage ----------------------------------------------------------------------------------

double guarantee_c(const Rule& rule, int m) {
  switch (kind_of(rule)) {
    case RuleKind::KApproval:
    case RuleKind::Approval:
      return 0.0;
    case RuleKind::Copeland: {
      const double l = std::ceil(std::log2(static_cast<double>(m)));
      return (2 * l + 1) / (2 * l + 3);
    }
    default:
      return 1.0 / 3.0;
  }
}

Outcome coverage() {
  struct Setup {
    std::string rule;
    GenSpec spec;
    std::int64_t multiplicity;
    OraclePolicy policy;
  };
  const std::vector<Setup> setups{
      {"plurality", {PlantedGap{0, 60}, 2000, 4, 0}, 1, ClosedFormPolicy{}},
      {"kapproval:2", {PlantedGap{0, 60}, 2000, 4, 0}, 1, ClosedFormPolicy{}},
      {"approval", {PlantedGap{0, 60}, 2000, 4, 0}, 1, ClosedFormPolicy{}},
      {"borda", {ImpartialCulture{}, 6, 3, 0}, 10, EnumerationPolicy{}},
      {"bucklin", {ImpartialCulture{}, 6, 3, 0}, 10, EnumerationPolicy{}},
      {"maximin", {ImpartialCulture{}, 6, 3, 0}, 10, EnumerationPolicy{}},
      {"copeland:0.5", {ImpartialCulture{}, 6, 3, 0}, 10, EnumerationPolicy{}},
  };
  const double eps = 0.1;
  const double delta = 0.05;
  Outcome out;
  out.pass = true;
  bool only_bucklin = true;
  std::ostringstream detail;
  for (const auto& s : setups) {
    ExperimentConfig config;
    config.rule = parse_rule(s.rule, s.spec.m);
    config.source = s.spec;
    config.multiplicity = s.multiplicity;
    config.epsilon = Rational(1, 10);
    config.delta = Rational(1, 20);
    config.trials = 200;
    config.seed = 4242;
    config.policy = s.policy;
    const auto result = run_experiment(config);

    const double c = guarantee_c(config.rule, s.spec.m);
    std::int64_t evaluated = 0;
    std::int64_t violations = 0;
    for (const auto& row : result.rows) {
      if (!row.mov_exact) continue;
      ++evaluated;
      const double mov = static_cast<double>(*row.mov_exact);
      const double error = std::abs(to_double(row.estimate) - mov);
      if (error > c * mov + eps * static_cast<double>(row.n) + 1e-9) ++violations;
    }
    const double allowed =
        delta * static_cast<double>(evaluated) + 2 * std::sqrt(delta * (1 - delta) * static_cast<double>(evaluated));
    const bool ok = evaluated >= 200 && static_cast<double>(violations) <= allowed &&
                    violations == result.summary.violations;
    detail << s.rule << " " << violations << "/" << evaluated << (ok ? "" : "!") << " ";
    if (!ok) {
      out.pass = false;
      only_bucklin = only_bucklin && s.rule == "bucklin";
    }
  }
  detail << "(violations/trials, allowed " << fmt("%.1f", delta * 200 + 2 * std::sqrt(delta * (1 - delta) * 200))
         << ")";
  out.known_deviation = !out.pass && only_bucklin;
  if (out.known_deviation) {
    detail << " - bucklin: delta/2 is not a lower bound on MoV, so delta/1.5 overshoots when a "
              "rival sits at the majority line";
  }
  out.detail = detail.str();
  return out;
}

// Concentration -----------------------------------------------------------------------------

Outcome concentration() {
  const int m = 4;
  const std::int64_t n = 2000;
  const std::int64_t ell = sample_size(RuleKind::Scoring, Rational(1, 10), Rational(1, 20), m);
  const auto profile = generate({ImpartialCulture{}, n, m, 17});
  const RankedVoteSource source(profile);
  std::vector<double> truth(m, 0.0);
  for (const auto& v : profile.votes()) truth[v.ballot.order()[0]] += static_cast<double>(v.count);

  const int trials = 400;
  int events = 0;
  for (int t = 0; t < trials; ++t) {
    const auto counts = source.draw_counts(ell, split_seed(99, static_cast<std::uint64_t>(t)));
    std::vector<double> est(m, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      est[profile.votes()[i].ballot.order()[0]] += static_cast<double>(counts[i]);
    }
    bool event = false;
    for (int x = 0; x < m; ++x) {
      event = event || std::abs(est[x] * static_cast<double>(n) / static_cast<double>(ell) - truth[x]) >
                           0.05 * static_cast<double>(n);
    }
    events += event ? 1 : 0;
  }
  const double rate = static_cast<double>(events) / trials;
  const double allowed = 0.05 + 2 * std::sqrt(0.05 * 0.95 / trials);
  Outcome out;
  out.pass = ell == 6091 && rate <= allowed;
  out.detail = "ell=" + std::to_string(ell) + " events " + std::to_string(events) + "/" +
               std::to_string(trials) + " rate " + fmt("%.4f", rate) + " allowed " + fmt("%.4f", allowed);
  return out;
}

// Convexity ---------------------------------------------------------------------------------

Outcome convexity() {
  int checked = 0;
  int failures = 0;
  double worst = -1e300;
  for (int k = 0; k < 10; ++k) {
    const double lambda = std::pow(10.0, -1.0 + k / 3.0);
    for (int i = 1; i <= 50; ++i) {
      for (int j = 1; j <= 50; ++j) {
        // Keeps x + y < lambda / 2.
        const double x = lambda / 4 * i / 51.0;
        const double y = lambda / 4 * j / 51.0 + 1e-9 * lambda;
        if (!(x < y) || !(lambda / (x + y) > 2)) continue;
        const auto f = [lambda](double t) { return std::exp(-lambda / t); };
        const double excess = f(x) + f(y) - f(x + y);
        worst = std::max(worst, excess);
        ++checked;
        if (excess > 1e-12) ++failures;
      }
    }
  }
  Outcome out;
  out.pass = failures == 0 && checked > 0;
  out.detail = std::to_string(checked) + " grid points, " + std::to_string(failures) +
               " above tolerance, max f(x)+f(y)-f(x+y) = " + fmt("%.3g", worst);
  return out;
}

// Distinguisher -----------------------------------------------------------------------------

Outcome distinguisher() {
  DistinguishConfig config;
  config.seed = 7;
  const auto r = run_distinguish(config);
  const double delta = to_double(config.delta);
  const double total = 2.0 * static_cast<double>(r.trials);
  const double allowed = 2 * delta + 2 * std::sqrt(2 * delta * (1 - 2 * delta) / total);
  Outcome out;
  out.pass = r.trials == 500 && r.error_rate() <= allowed;
  out.detail = "ell=" + std::to_string(r.ell) + " errors X " + std::to_string(r.x_errors) + "/" +
               std::to_string(r.trials) + " Y " + std::to_string(r.y_errors) + "/" + std::to_string(r.trials) +
               " rate " + fmt("%.4f", r.error_rate()) + " allowed " + fmt("%.4f", allowed) +
               " (lower bound " + fmt("%.4g", r.lower_bound) + " samples)";
  return out;
}

// Determinism -------------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "movest_acceptance";
  std::filesystem::create_directories(dir);
  const auto election = (dir / "e.txt").string();
  std::ofstream(election) << "m 4\n5: a>b>c>d\n3: b>c>a>d\n4: c>a>d>b\n2: d>b>a>c\n";

  using Args = std::vector<std::string>;
  const std::vector<std::pair<Args, std::string>> commands{
      {{"winner", "--rule", "copeland:0.5", "--input", election}, ""},
      {{"mov", "--rule", "maximin", "--input", election, "--budget", "3"}, ""},
      {{"mov", "--rule", "bucklin", "--input", election, "--mode", "bounds"}, ""},
      {{"mov", "--rule", "borda", "--input", election, "--mode", "estimate", "--seed", "5"}, ""},
      {{"mov", "--rule", "copeland:0.5", "--input", election, "--mode", "estimate", "--seed", "5"}, ""},
      {{"samplesize", "--rule", "maximin", "--m", "5"}, ""},
      {{"lowerbound", "--c", "0.2"}, ""},
      {{"generate", "--model", "ic", "--n", "500", "--m", "5", "--seed", "3", "--output"}, "gen.txt"},
      {{"generate", "--model", "ic", "--n", "200", "--m", "4", "--seed", "3", "--approval"}, ""},
      {{"experiment", "--rule", "plurality", "--model", "planted:a:40", "--n", "400", "--m", "3", "--trials",
        "20", "--seed", "8", "--output"},
       "exp.csv"},
      {{"experiment", "--rule", "maximin", "--input", election, "--trials", "10", "--seed", "8",
        "--policy", "bruteforce:3"},
       ""},
      {{"distinguish", "--trials", "20", "--seed", "4"}, ""},
  };
  int differing = 0;
  std::ostringstream detail;
  for (const auto& [args, file] : commands) {
    std::string outputs[2];
    for (auto& output : outputs) {
      Args full = args;
      if (!file.empty()) full.push_back((dir / file).string());
      std::ostringstream out, err;
      const int code = run_cli(full, out, err);
      output = std::to_string(code) + "\n" + out.str() + err.str();
      if (!file.empty()) output += slurp(dir / file);
    }
    if (outputs[0] != outputs[1] || outputs[0].rfind("0\n", 0) != 0) {
      ++differing;
      detail << "[" << args[0] << " differs or failed] ";
    }
  }

  std::mt19937_64 rng(8);
  int round_trip_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const int m = 1 + static_cast<int>(rng() % 6);
    const int n = 1 + static_cast<int>(rng() % 40);
    const Profile p = i % 2 == 0 ? Profile(oracle::random_ranked(rng, m, n))
                                 : Profile(oracle::random_approval(rng, m, n));
    const std::string text = write_election(p);
    const Profile back = parse_election(text);
    if (write_election(back) != text || text != write_election(canonicalize(p))) ++round_trip_failures;
  }
  std::filesystem::remove_all(dir);

  Outcome out;
  out.pass = differing == 0 && round_trip_failures == 0;
  detail << commands.size() - static_cast<std::size_t>(differing) << "/" << commands.size()
         << " commands byte-identical, round trip failures " << round_trip_failures << "/1000";
  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"sample-size formulas", sample_sizes},
      {"sandwich bounds", nullptr},
      {"k-approval closed form", nullptr},
      {"coverage", coverage},
      {"Chernoff concentration", concentration},
      {"convexity", convexity},
      {"distinguisher", distinguisher},
      {"determinism", determinism},
  };
  std::optional<SuiteResults> suite;
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    Outcome outcome;
    try {
      if (i == 1 || i == 2) {
        if (!suite) suite = run_suite();
        outcome = i == 1 ? sandwich(*suite) : closed_form(*suite);
      } else {
        outcome = run();
      }
    } catch (const std::exception& e) {
      outcome = {false, false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << i + 1 << " " << (outcome.pass ? "PASS" : "FAIL")
              << (!outcome.pass && outcome.known_deviation ? " (known deviation)" : "") << " [" << name
              << "] " << outcome.detail << std::endl;
    if (!outcome.pass && !outcome.known_deviation) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
