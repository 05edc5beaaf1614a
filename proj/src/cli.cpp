#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "movest/error.hpp"
#include "movest/estimators.hpp"
#include "movest/experiment.hpp"
#include "movest/mov_oracle.hpp"

namespace movest {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write '" + path + "'");
}

Profile load_profile(const std::string& path) { return parse_election(read_file(path)); }

std::string names_of(const Profile& profile, std::span<const Candidate> xs) {
  std::string out;
  for (Candidate x : xs) {
    if (!out.empty()) out += ", ";
    out += std::visit([&](const auto& p) { return p.name_of(x); }, profile);
  }
  return out;
}

std::string name_of(const Profile& profile, Candidate x) { return names_of(profile, std::span(&x, 1)); }

std::string approx(const Rational& value) {
  const std::string exact = to_display_string(value);
  if (exact.find('/') == std::string::npos) return exact;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", to_double(value));
  return exact + " (~" + buffer + ")";
}

std::string ballot_text(const Profile& profile, const AnyBallot& ballot) {
  std::string out;
  if (const auto* r = std::get_if<Ranking>(&ballot)) {
    for (int i = 0; i < r->size(); ++i) {
      if (i > 0) out += '>';
      out += name_of(profile, r->at(i));
    }
    return out;
  }
  out = "{" + names_of(profile, std::get<ApprovalBallot>(ballot).approved()) + "}";
  return out;
}

AnyBallot ballot_at(const Profile& profile, std::int64_t index) {
  return std::visit(
      [&](const auto& p) -> AnyBallot {
        for (const auto& v : p.votes()) {
          if (index < v.count) return v.ballot;
          index -= v.count;
        }
        throw InputError("vote index out of range");
      },
      profile);
}

/// Rule kind and k for samplesize: a family name, optionally with its parameter.
std::pair<RuleKind, int> parse_rule_family(const std::string& text, std::optional<int> k) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name == "plurality") return {RuleKind::KApproval, 1};
  if (name == "kapproval") {
    if (colon != std::string::npos) return {RuleKind::KApproval, std::stoi(text.substr(colon + 1))};
    if (!k) throw InputError("kapproval needs --k");
    return {RuleKind::KApproval, *k};
  }
  if (name == "scoring" || name == "borda") return {RuleKind::Scoring, 0};
  if (name == "approval") return {RuleKind::Approval, 0};
  if (name == "bucklin") return {RuleKind::Bucklin, 0};
  if (name == "maximin") return {RuleKind::Maximin, 0};
  if (name == "copeland") return {RuleKind::Copeland, 0};
  throw InputError("unknown rule '" + text + "'");
}

Candidate parse_candidate(const std::string& token, int m) {
  for (Candidate x = 0; x < m; ++x) {
    if (default_candidate_name(x) == token) return x;
  }
  try {
    std::size_t used = 0;
    const int x = std::stoi(token, &used);
    if (used == token.size() && x >= 0 && x < m) return x;
  } catch (const std::exception&) {
  }
  throw InputError("unknown candidate '" + token + "'");
}

/// ic | planted:WINNER:GAP | two:P
GenModel parse_model(const std::string& text, int m) {
  if (text == "ic") return ImpartialCulture{};
  if (text.rfind("planted:", 0) == 0) {
    const auto rest = text.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw InputError("expected planted:WINNER:GAP");
    const Rational gap = parse_rational(rest.substr(colon + 1));
    if (boost::multiprecision::denominator(gap) != 1) throw InputError("gap must be an integer");
    return PlantedGap{parse_candidate(rest.substr(0, colon), m), to_int64(boost::multiprecision::numerator(gap))};
  }
  if (text.rfind("two:", 0) == 0) return TwoCandidate{parse_rational(text.substr(4))};
  throw InputError("unknown model '" + text + "' (ic, planted:W:G, two:P)");
}

OraclePolicy parse_policy(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::int64_t budget = colon == std::string::npos ? 0 : std::stoll(text.substr(colon + 1));
  if (name == "bruteforce") return BruteForcePolicy{budget > 0 ? budget : 3};
  if (name == "enumeration") return EnumerationPolicy{budget};
  if (name == "closedform") return ClosedFormPolicy{};
  if (name == "bounds") return BoundsOnlyPolicy{};
  throw InputError("unknown policy '" + text + "' (bruteforce:B, enumeration[:B], closedform, bounds)");
}

struct Options {
  std::string rule;
  std::string input;
  std::string mode = "exact";
  std::string engine = "bruteforce";
  std::optional<std::int64_t> budget;
  std::int64_t work_limit = kDefaultWorkLimit;
  std::string epsilon = "0.1";
  std::string delta = "0.05";
  std::uint64_t seed = 0;
  std::optional<std::int64_t> samples;
  std::optional<int> m;
  std::optional<int> k;
  std::string c = "0";
  std::string model = "ic";
  std::int64_t n = 100;
  bool approval = false;
  std::string output;
  std::int64_t trials = 200;
  std::int64_t multiplicity = 1;
  std::string policy;
  unsigned threads = 0;
};

int cmd_winner(const Options& o, std::ostream& out) {
  const Profile profile = load_profile(o.input);
  const Rule rule = parse_rule(o.rule, num_candidates(profile));
  const WinnerResult result = winner_set(profile, rule);
  out << "winners: " << names_of(profile, result.winners) << ";";
  for (Candidate x = 0; x < static_cast<Candidate>(result.scores.size()); ++x) {
    out << " s(" << name_of(profile, x) << ")=" << to_display_string(result.scores[x]);
  }
  out << "\n";
  return 0;
}

int cmd_mov(const Options& o, std::ostream& out) {
  const Profile profile = load_profile(o.input);
  const int m = num_candidates(profile);
  const std::int64_t n = num_voters(profile);
  const Rule rule = parse_rule(o.rule, m);
  validate_rule(rule, m);
  if (o.mode == "exact") {
    const std::int64_t budget = o.budget.value_or(n);
    ExactMovResult result;
    if (o.engine == "bruteforce") {
      result = mov_brute_force(profile, rule, budget, o.work_limit);
    } else if (o.engine == "enumeration") {
      result = mov_target_search(profile, rule, budget, o.work_limit);
    } else {
      throw InputError("unknown engine '" + o.engine + "' (bruteforce, enumeration)");
    }
    if (!result.exact()) {
      out << "MoV > " << result.budget << " (exceeds budget)\n";
      return 3;
    }
    out << "MoV = " << result.value << "\n";
    for (const auto& r : result.witness) {
      out << "  vote " << r.vote_index << ": " << ballot_text(profile, ballot_at(profile, r.vote_index))
          << " -> " << ballot_text(profile, r.ballot) << "\n";
    }
    const WinnerResult before = winner_set(profile, rule);
    const WinnerResult after = winner_set(apply_witness(profile, result.witness), rule);
    out << "winners: " << names_of(profile, before.winners) << " -> " << names_of(profile, after.winners)
        << "\n";
    return 0;
  }
  if (o.mode == "bounds") {
    const MovBounds b = mov_bounds(profile, rule);
    const std::string upper = b.upper ? to_display_string(*b.upper) + "]" : std::string("∞)");
    const std::string upper_int = b.upper ? floor_of(*b.upper).str() + "]" : std::string("∞)");
    out << "MoV ∈ [" << to_display_string(b.lower) << ", " << upper << "\n";
    out << "integer: [" << ceil_of(b.lower).str() << ", " << upper_int << "\n";
    out << "source: " << b.source << "\n";
    return 0;
  }
  if (o.mode == "estimate") {
    EstimateOptions options{parse_rational(o.epsilon), parse_rational(o.delta), o.seed, o.samples};
    const MovEstimate est = estimate(make_vote_source(profile), rule, options);
    out << "M̄ = " << approx(est.m_bar) << "\n";
    out << "ℓ = " << est.ell << "\n";
    out << "seed = " << est.seed << "\n";
    out << "estimated winner: " << name_of(profile, est.w_bar) << ", runner-up: " << name_of(profile, est.z_bar)
        << "\n";
    if (est.sentinel) out << "note: no feasible (level, candidate) pair in the sample; M̄ set to n\n";
    out << "guarantee: P[|M̄−MoV| ≤ c·MoV + εn] ≥ 1−δ with c = " << to_display_string(est.c)
        << ", ε = " << approx(est.guarantee_epsilon) << ", δ = " << to_display_string(est.delta)
        << ", n = " << n << "\n";
    return 0;
  }
  throw InputError("unknown mode '" + o.mode + "' (exact, bounds, estimate)");
}

int cmd_samplesize(const Options& o, std::ostream& out) {
  const auto [kind, k] = parse_rule_family(o.rule, o.k);
  if (kind != RuleKind::KApproval && !o.m) throw InputError("--m is required for this rule");
  out << sample_size(kind, parse_rational(o.epsilon), parse_rational(o.delta), o.m.value_or(0), k) << "\n";
  return 0;
}

int cmd_lowerbound(const Options& o, std::ostream& out) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g",
                lower_bound_samples(parse_rational(o.c), parse_rational(o.epsilon), parse_rational(o.delta)));
  out << buffer << "\n";
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out) {
  const int m = o.m.value_or(3);
  const GenSpec spec{parse_model(o.model, m), o.n, m, o.seed};
  const Profile profile = o.approval ? Profile(generate_approval(spec)) : Profile(generate(spec));
  const std::string text = write_election(profile);
  if (o.output.empty()) {
    out << text;
  } else {
    write_file(o.output, text);
  }
  return 0;
}

int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  int m = 0;
  if (!o.input.empty()) {
    Profile profile = load_profile(o.input);
    m = num_candidates(profile);
    config.source = std::move(profile);
  } else {
    m = o.m.value_or(3);
    config.source = GenSpec{parse_model(o.model, m), o.n, m, 0};
  }
  config.rule = parse_rule(o.rule, m);
  validate_rule(config.rule, m);
  config.multiplicity = o.multiplicity;
  config.epsilon = parse_rational(o.epsilon);
  config.delta = parse_rational(o.delta);
  config.trials = o.trials;
  config.seed = o.seed;
  config.samples = o.samples;
  config.work_limit = o.work_limit;
  config.threads = o.threads;
  const RuleKind kind = kind_of(config.rule);
  if (!o.policy.empty()) {
    config.policy = parse_policy(o.policy);
  } else if (kind == RuleKind::KApproval || kind == RuleKind::Approval) {
    config.policy = ClosedFormPolicy{};
  } else {
    config.policy = BoundsOnlyPolicy{};
  }
  const ExperimentResult result = run_experiment(config);
  const std::string csv = write_experiment_csv(result.rows);
  if (o.output.empty()) {
    out << csv;
    err << format_summary(result.summary) << "\n";
  } else {
    write_file(o.output, csv);
    out << format_summary(result.summary) << "\n";
  }
  return 0;
}

int cmd_distinguish(const Options& o, std::ostream& out) {
  DistinguishConfig config;
  config.epsilon = parse_rational(o.epsilon);
  config.delta = parse_rational(o.delta);
  config.c = parse_rational(o.c);
  config.n = o.n;
  config.trials = o.trials;
  config.seed = o.seed;
  config.samples = o.samples;
  const DistinguishResult r = run_distinguish(config);
  char rate[64];
  std::snprintf(rate, sizeof rate, "%.6g", r.error_rate());
  char bound[64];
  std::snprintf(bound, sizeof bound, "%.6g", r.lower_bound);
  out << "n = " << r.n << ", ℓ = " << r.ell << "\n";
  out << "X: " << r.x_split.a_votes << " votes a>b (fraction " << approx(r.x_split.realized_fraction)
      << ", requested " << approx(r.x_split.requested_fraction) << "); Y: " << r.n / 2 << " votes a>b\n";
  out << "threshold: classify X when M̄ > " << approx(r.threshold) << "\n";
  out << "errors: X " << r.x_errors << "/" << r.trials << ", Y " << r.y_errors << "/" << r.trials << "\n";
  out << "error rate = " << rate << " (2δ = " << to_display_string(2 * config.delta) << ")\n";
  out << "lower bound on samples = " << bound << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Election winners, margins of victory and sampling estimates", "movtool"};
  app.require_subcommand(1);

  auto* winner = app.add_subcommand("winner", "Print the winner set and scores");
  winner->add_option("--rule", o.rule, "plurality, borda, veto, approval, bucklin, maximin, kapproval:K, copeland:A, scoring:A1,...")->required();
  winner->add_option("--input", o.input, "Election file")->required();

  auto* mov = app.add_subcommand("mov", "Exact margin of victory, bounds or a sampling estimate");
  mov->add_option("--rule", o.rule)->required();
  mov->add_option("--input", o.input)->required();
  mov->add_option("--mode", o.mode, "exact | bounds | estimate")->capture_default_str();
  mov->add_option("--engine", o.engine, "bruteforce | enumeration (exact mode)")->capture_default_str();
  mov->add_option("--budget", o.budget, "Largest number of changed votes searched (default n)");
  mov->add_option("--work-limit", o.work_limit)->capture_default_str();
  mov->add_option("--epsilon", o.epsilon)->capture_default_str();
  mov->add_option("--delta", o.delta)->capture_default_str();
  mov->add_option("--seed", o.seed)->capture_default_str();
  mov->add_option("--samples", o.samples, "Override the sample size");

  auto* samplesize = app.add_subcommand("samplesize", "Votes sampled by the rule's estimator");
  samplesize->add_option("--rule", o.rule)->required();
  samplesize->add_option("--epsilon", o.epsilon)->capture_default_str();
  samplesize->add_option("--delta", o.delta)->capture_default_str();
  samplesize->add_option("--m", o.m);
  samplesize->add_option("--k", o.k);

  auto* lowerbound = app.add_subcommand("lowerbound", "Sample lower bound for (c, eps, delta) estimation");
  lowerbound->add_option("--c", o.c)->capture_default_str();
  lowerbound->add_option("--epsilon", o.epsilon)->capture_default_str();
  lowerbound->add_option("--delta", o.delta)->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Write a synthetic election file");
  generate->add_option("--model", o.model, "ic | planted:W:G | two:P")->capture_default_str();
  generate->add_option("--n", o.n)->capture_default_str();
  generate->add_option("--m", o.m);
  generate->add_option("--seed", o.seed)->capture_default_str();
  generate->add_flag("--approval", o.approval, "Top-k prefixes as approval ballots");
  generate->add_option("--output", o.output);

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo coverage experiment (CSV)");
  experiment->add_option("--rule", o.rule)->required();
  auto* exp_input = experiment->add_option("--input", o.input, "Fixed election file");
  experiment->add_option("--model", o.model, "ic | planted:W:G | two:P")->excludes(exp_input)->capture_default_str();
  experiment->add_option("--n", o.n)->capture_default_str();
  experiment->add_option("--m", o.m);
  experiment->add_option("--multiplicity", o.multiplicity)->capture_default_str();
  experiment->add_option("--epsilon", o.epsilon)->capture_default_str();
  experiment->add_option("--delta", o.delta)->capture_default_str();
  experiment->add_option("--trials", o.trials)->capture_default_str();
  experiment->add_option("--seed", o.seed)->capture_default_str();
  experiment->add_option("--policy", o.policy, "bruteforce:B | enumeration[:B] | closedform | bounds");
  experiment->add_option("--samples", o.samples);
  experiment->add_option("--work-limit", o.work_limit)->capture_default_str();
  experiment->add_option("--threads", o.threads, "0 = all cores")->capture_default_str();
  experiment->add_option("--output", o.output, "CSV path (default stdout; summary then goes to stderr)");

  auto* distinguish = app.add_subcommand("distinguish", "Two-candidate X/Y distinguisher");
  distinguish->add_option("--epsilon", o.epsilon)->default_str("0.05");
  distinguish->add_option("--delta", o.delta)->capture_default_str();
  distinguish->add_option("--c", o.c)->capture_default_str();
  distinguish->add_option("--n", o.n)->default_str("10000");
  distinguish->add_option("--trials", o.trials)->default_str("500");
  distinguish->add_option("--seed", o.seed)->capture_default_str();
  distinguish->add_option("--samples", o.samples);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    // Subcommand-specific defaults that differ from the shared ones.
    if (!args.empty() && args.front() == "distinguish") {
      o.epsilon = "0.05";
      o.n = 10'000;
      o.trials = 500;
    }
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (winner->parsed()) return cmd_winner(o, out);
    if (mov->parsed()) return cmd_mov(o, out);
    if (samplesize->parsed()) return cmd_samplesize(o, out);
    if (lowerbound->parsed()) return cmd_lowerbound(o, out);
    if (generate->parsed()) return cmd_generate(o, out);
    if (experiment->parsed()) return cmd_experiment(o, out, err);
    if (distinguish->parsed()) return cmd_distinguish(o, out);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace movest
