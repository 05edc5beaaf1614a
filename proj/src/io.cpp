#include "movest/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "movest/error.hpp"

namespace movest {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_nonnegative(std::string_view s) {
  std::int64_t value = 0;
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) return std::nullopt;
  return value;
}

/// Splits "keyword rest" at the first run of blanks.
bool starts_with_keyword(std::string_view line, std::string_view keyword, std::string_view& rest) {
  if (line.size() <= keyword.size() || line.substr(0, keyword.size()) != keyword) return false;
  const char next = line[keyword.size()];
  if (next != ' ' && next != '\t') return false;
  rest = trim(line.substr(keyword.size()));
  return true;
}

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char ch : name) {
    if (ch == ',' || ch == '>' || ch == '{' || ch == '}' || ch == ':' || ch == '#' || ch == ' ' ||
        ch == '\t') {
      return false;
    }
  }
  return true;
}

class Parser {
 public:
  Profile run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = text.find('\n', start);
      const auto raw = text.substr(start, end == std::string_view::npos ? end : end - start);
      ++line_no;
      handle(trim(raw), line_no);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    if (!m_) throw ParseError(line_no, "missing 'm <int>' header");
    if (!kind_) throw ParseError(line_no, "no ballot lines");
    if (*kind_ == Kind::Ranked) return RankedProfile(*m_, std::move(ranked_), std::move(names_));
    return ApprovalProfile(*m_, std::move(approval_), std::move(names_));
  }

 private:
  enum class Kind { Ranked, Approval };

  void handle(std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() == '#') return;
    std::string_view rest;
    if (!m_) {
      if (!starts_with_keyword(line, "m", rest)) throw ParseError(line_no, "expected 'm <int>' header");
      const auto m = parse_nonnegative(rest);
      if (!m || *m < 1 || *m > 1'000'000) throw ParseError(line_no, "invalid candidate count");
      m_ = static_cast<int>(*m);
      return;
    }
    if (starts_with_keyword(line, "candidates", rest)) {
      if (kind_ || !names_.empty()) throw ParseError(line_no, "candidates header must precede ballots");
      read_names(rest, line_no);
      return;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'COUNT: ballot'");
    const auto count = parse_nonnegative(trim(line.substr(0, colon)));
    if (!count || *count < 1) throw ParseError(line_no, "ballot count must be a positive integer");
    const auto body = trim(line.substr(colon + 1));
    const Kind kind = !body.empty() && body.front() == '{' ? Kind::Approval : Kind::Ranked;
    if (kind_ && *kind_ != kind) throw ParseError(line_no, "file mixes ranked and approval ballots");
    kind_ = kind;
    if (kind == Kind::Ranked) {
      read_ranking(body, *count, line_no);
    } else {
      read_approval(body, *count, line_no);
    }
  }

  void read_names(std::string_view list, std::size_t line_no) {
    for (auto token : split(list, ',')) {
      if (!valid_name(token)) throw ParseError(line_no, "invalid candidate name '" + std::string(token) + "'");
      if (!lookup_.emplace(std::string(token), static_cast<Candidate>(names_.size())).second) {
        throw ParseError(line_no, "duplicate candidate name '" + std::string(token) + "'");
      }
      names_.emplace_back(token);
    }
    if (static_cast<int>(names_.size()) != *m_) {
      throw ParseError(line_no, "expected " + std::to_string(*m_) + " candidate names, got " +
                                    std::to_string(names_.size()));
    }
  }

  Candidate resolve(std::string_view token, std::size_t line_no) {
    if (names_.empty() && lookup_.empty()) {
      for (Candidate x = 0; x < *m_; ++x) lookup_.emplace(default_candidate_name(x), x);
    }
    if (const auto it = lookup_.find(std::string(token)); it != lookup_.end()) return it->second;
    if (const auto index = parse_nonnegative(token); index && *index < *m_) {
      return static_cast<Candidate>(*index);
    }
    throw ParseError(line_no, "unknown candidate '" + std::string(token) + "'");
  }

  void read_ranking(std::string_view body, std::int64_t count, std::size_t line_no) {
    std::vector<Candidate> order;
    std::vector<bool> seen(static_cast<std::size_t>(*m_), false);
    for (auto token : split(body, '>')) {
      const Candidate x = resolve(token, line_no);
      if (seen[x]) throw ParseError(line_no, "duplicate candidate '" + std::string(token) + "'");
      seen[x] = true;
      order.push_back(x);
    }
    if (static_cast<int>(order.size()) != *m_) {
      throw ParseError(line_no, "ranking lists " + std::to_string(order.size()) + " of " +
                                    std::to_string(*m_) + " candidates");
    }
    ranked_.push_back({Ranking(std::move(order)), count});
  }

  void read_approval(std::string_view body, std::int64_t count, std::size_t line_no) {
    if (body.back() != '}') throw ParseError(line_no, "unterminated approval set");
    const auto inner = trim(body.substr(1, body.size() - 2));
    std::vector<Candidate> approved;
    std::set<Candidate> seen;
    if (!inner.empty()) {
      for (auto token : split(inner, ',')) {
        const Candidate x = resolve(token, line_no);
        if (!seen.insert(x).second) throw ParseError(line_no, "duplicate candidate '" + std::string(token) + "'");
        approved.push_back(x);
      }
    }
    approval_.push_back({ApprovalBallot(std::move(approved), *m_), count});
  }

  std::optional<int> m_;
  std::optional<Kind> kind_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Candidate> lookup_;
  std::vector<WeightedBallot<Ranking>> ranked_;
  std::vector<WeightedBallot<ApprovalBallot>> approval_;
};

template <class ProfileT>
ProfileT merged(const ProfileT& profile) {
  using Ballot = std::decay_t<decltype(profile.votes()[0].ballot)>;
  std::map<Ballot, std::int64_t> tally;
  for (const auto& v : profile.votes()) tally[v.ballot] += v.count;
  std::vector<WeightedBallot<Ballot>> votes;
  for (const auto& [ballot, count] : tally) votes.push_back({ballot, count});
  return ProfileT(profile.num_candidates(), std::move(votes), profile.names());
}

template <class ProfileT, class WriteBallot>
std::string write_profile(const ProfileT& profile, WriteBallot&& write_ballot) {
  const ProfileT canonical = merged(profile);
  std::string out = "m " + std::to_string(canonical.num_candidates()) + "\n";
  if (canonical.has_names()) {
    out += "candidates ";
    for (Candidate x = 0; x < canonical.num_candidates(); ++x) {
      if (x > 0) out += ',';
      out += canonical.name_of(x);
    }
    out += '\n';
  }
  for (const auto& v : canonical.votes()) {
    out += std::to_string(v.count) + ": ";
    write_ballot(canonical, v.ballot, out);
    out += '\n';
  }
  return out;
}

}  // namespace

Profile parse_election(std::string_view text) { return Parser().run(text); }

Profile canonicalize(const Profile& profile) {
  return std::visit([](const auto& p) -> Profile { return merged(p); }, profile);
}

std::string write_election(const Profile& profile) {
  if (const auto* ranked = std::get_if<RankedProfile>(&profile)) {
    return write_profile(*ranked, [](const RankedProfile& p, const Ranking& r, std::string& out) {
      for (int i = 0; i < r.size(); ++i) {
        if (i > 0) out += '>';
        out += p.name_of(r.at(i));
      }
    });
  }
  return write_profile(std::get<ApprovalProfile>(profile),
                       [](const ApprovalProfile& p, const ApprovalBallot& b, std::string& out) {
                         out += '{';
                         bool first = true;
                         for (Candidate x : b.approved()) {
                           if (!first) out += ',';
                           first = false;
                           out += p.name_of(x);
                         }
                         out += '}';
                       });
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_decimal(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%#.12g", value);
  return buffer;
}

std::string write_experiment_csv(std::span<const ExperimentRow> rows) {
  std::string out(kExperimentCsvHeader);
  out += '\n';
  for (const auto& row : rows) {
    const std::string fields[] = {
        std::to_string(row.trial),
        std::to_string(row.seed),
        csv_field(row.rule),
        std::to_string(row.n),
        std::to_string(row.m),
        to_display_string(row.epsilon),
        to_display_string(row.delta),
        std::to_string(row.ell),
        row.mov_exact ? std::to_string(*row.mov_exact) : std::string(),
        format_decimal(to_double(row.mov_lower)),
        row.mov_upper ? format_decimal(to_double(*row.mov_upper)) : std::string("inf"),
        format_decimal(to_double(row.estimate)),
        format_decimal(to_double(row.abs_error)),
        row.within_guarantee ? "true" : "false",
    };
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      if (i > 0) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace movest
