#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "movest/error.hpp"
#include "oracles.hpp"

using namespace movest;
using testing_helpers::q;
using testing_helpers::ranked;

namespace {

std::vector<Rational> as_rationals(const std::vector<std::int64_t>& values) {
  return {values.begin(), values.end()};
}

}  // namespace

TEST(ScoreVectorTest, NormalizeExamples) {
  EXPECT_EQ(normalize_score_vector(q({2, 1, 0})).alphas()[0], 2);
  const auto borda = normalize_score_vector(q({2, 1, 0}));
  EXPECT_EQ(std::vector<Rational>(borda.alphas().begin(), borda.alphas().end()), q({2, 1, 0}));
  const auto two_approval = normalize_score_vector(q({5, 5, 3, 3}));
  EXPECT_EQ(std::vector<Rational>(two_approval.alphas().begin(), two_approval.alphas().end()), q({1, 1, 0, 0}));
  const auto shifted = normalize_score_vector(q({7, 4, 1}));
  EXPECT_EQ(std::vector<Rational>(shifted.alphas().begin(), shifted.alphas().end()), q({2, 1, 0}));
  EXPECT_TRUE(shifted.is_normalized());
}

TEST(ScoreVectorTest, RejectsConstantAndIncreasing) {
  EXPECT_THROW(normalize_score_vector(q({3, 3, 3})), InvalidScoreVector);
  EXPECT_THROW(ScoreVector(q({0, 1})), InvalidScoreVector);
}

TEST(ScoreVectorTest, NormalizedFormHasUnitStepAfterwardsZero) {
  const auto v = normalize_score_vector(q({Rational(9, 2), 3, Rational(5, 2), 1}));
  // Shift by 1 -> (7/2, 2, 3/2, 0); last positive entry 3/2.
  EXPECT_EQ(std::vector<Rational>(v.alphas().begin(), v.alphas().end()),
            q({Rational(7, 3), Rational(4, 3), 1, 0}));
  EXPECT_TRUE(v.is_normalized());
}

TEST(TallyTest, PositionalScores) {
  EXPECT_EQ(positional_scores(ranked("m 3\n1: a>b>c\n1: b>a>c"), borda_vector(3)), q({3, 3, 0}));
  EXPECT_EQ(positional_scores(ranked("m 2\n4: a>b"), k_approval_vector(2, 1)), q({4, 0}));
  EXPECT_EQ(positional_scores(ranked("m 3\n3: a>b>c\n2: b>c>a"), k_approval_vector(3, 1)), q({3, 2, 0}));
  EXPECT_THROW(positional_scores(ranked("m 2\n1: a>b"), borda_vector(3)), DimensionError);
}

TEST(TallyTest, ApprovalScores) {
  using testing_helpers::approval;
  EXPECT_EQ(approval_scores(approval("m 3\n2: {a}\n1: {b}")), (std::vector<std::int64_t>{2, 1, 0}));
  EXPECT_EQ(approval_scores(approval("m 3\n5: {}")), (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_EQ(approval_scores(approval("m 3\n2: {a,b}\n1: {b,c}")), (std::vector<std::int64_t>{2, 3, 1}));
}

TEST(TallyTest, TopKCounts) {
  const auto top = top_k_counts(ranked("m 3\n1: a>b>c\n1: a>c>b\n1: b>a>c"));
  EXPECT_EQ(top(0, 0), 2);
  EXPECT_EQ(top(0, 1), 1);
  EXPECT_EQ(top(0, 2), 0);
  EXPECT_EQ(top(1, 0), 3);
  EXPECT_EQ(top(1, 1), 2);
  EXPECT_EQ(top(1, 2), 1);
  for (Candidate x = 0; x < 3; ++x) EXPECT_EQ(top(2, x), 3);

  const auto single = top_k_counts(ranked("m 2\n1: a>b"));
  EXPECT_EQ(single(0, 0), 1);
  EXPECT_EQ(single(0, 1), 0);
  EXPECT_EQ(single(1, 0), 1);
  EXPECT_EQ(single(1, 1), 1);
}

TEST(TallyTest, PairwiseMatrix) {
  const auto d = pairwise_matrix(ranked("m 3\n3: a>b>c\n2: b>c>a"));
  EXPECT_EQ(d(0, 1), 1);
  EXPECT_EQ(d(0, 2), 1);
  EXPECT_EQ(d(1, 2), 5);
  EXPECT_EQ(d(2, 1), -5);
  const auto single = pairwise_matrix(ranked("m 3\n1: a>b>c"));
  EXPECT_EQ(single(0, 1), 1);
  EXPECT_EQ(single(0, 2), 1);
  EXPECT_EQ(single(1, 2), 1);
  EXPECT_EQ(pairwise_matrix(ranked("m 2\n1: a>b\n1: b>a"))(0, 1), 0);
}

TEST(PairwiseMatrixTest, RejectsNonAntisymmetric) {
  Matrix<std::int64_t> bad(2, 2, 0);
  bad(0, 1) = 1;
  bad(1, 0) = 1;
  EXPECT_THROW(PairwiseMatrix{bad}, InputError);
}

TEST(WinnerTest, SpecExamples) {
  const auto maximin = winner_set(ranked("m 3\n3: a>b>c\n2: b>c>a"), MaximinRule{});
  EXPECT_EQ(maximin.scores, q({1, -1, -5}));
  EXPECT_EQ(maximin.winners, std::vector<Candidate>{0});

  const auto copeland = winner_set(ranked("m 3\n2: a>b>c\n1: b>c>a"), CopelandRule{Rational(1, 2)});
  EXPECT_EQ(copeland.scores, q({2, 1, 0}));
  EXPECT_EQ(copeland.winners, std::vector<Candidate>{0});

  const auto bucklin = winner_set(ranked("m 3\n1: a>b>c\n1: a>c>b\n1: b>a>c"), BucklinRule{});
  EXPECT_EQ(bucklin.scores[0], 1);
  EXPECT_EQ(bucklin.winners, std::vector<Candidate>{0});
}

TEST(WinnerTest, BucklinThresholdIsStrict) {
  // n = 2 with a top once: 1 is not a strict majority, so both reach it at level 2.
  const auto result = winner_set(ranked("m 2\n1: a>b\n1: b>a"), BucklinRule{});
  EXPECT_EQ(result.scores, q({2, 2}));
  EXPECT_EQ(result.winners, (std::vector<Candidate>{0, 1}));
}

TEST(WinnerTest, ProfileRuleMismatch) {
  EXPECT_THROW(winner_set(ranked("m 2\n1: a>b"), ApprovalRule{}), InputError);
  EXPECT_THROW(winner_set(testing_helpers::approval("m 2\n1: {a}"), MaximinRule{}), InputError);
  EXPECT_THROW(winner_set(ranked("m 2\n1: a>b"), KApprovalRule{2}), InputError);
}

TEST(RuleTest, ParseAndPrint) {
  EXPECT_EQ(to_string(parse_rule("plurality", 3)), "kapproval:1");
  EXPECT_EQ(to_string(parse_rule("veto", 4)), "kapproval:3");
  EXPECT_EQ(to_string(parse_rule("copeland:0.5", 3)), "copeland:1/2");
  EXPECT_EQ(to_string(parse_rule("copeland", 3)), "copeland:1/2");
  EXPECT_EQ(to_string(parse_rule("borda", 3)), "scoring:2,1,0");
  EXPECT_EQ(to_string(parse_rule("scoring:3,1/2,0", 3)), "scoring:3,1/2,0");
  EXPECT_THROW(parse_rule("schulze", 3), InputError);
  EXPECT_THROW(parse_rule("copeland:2", 3), InputError);
}

class RandomProfiles : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240611};
};

TEST_F(RandomProfiles, WinnersMatchDefinitionOracle) {
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 3;
    const int n = 1 + static_cast<int>(rng() % 7);
    const auto profile = oracle::random_ranked(rng, m, n);
    const auto votes = profile.expanded();
    std::vector<Rule> rules{ScoringRule{borda_vector(m)}, KApprovalRule{1}, KApprovalRule{m - 1},
                            BucklinRule{}, MaximinRule{}, CopelandRule{Rational(1, 2)},
                            CopelandRule{0}, CopelandRule{1}};
    for (const auto& rule : rules) {
      const auto got = winner_set(profile, rule).winners;
      const auto want = oracle::winners(votes, m, rule);
      EXPECT_EQ(std::set<Candidate>(got.begin(), got.end()), want) << to_string(rule);
    }
  }
}

TEST_F(RandomProfiles, AffineInvariance) {
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + trial % 2;
    const auto profile = oracle::random_ranked(rng, m, 1 + static_cast<int>(rng() % 9));
    std::vector<Rational> raw;
    Rational value = 0;
    for (int i = 0; i < m; ++i) {
      raw.insert(raw.begin(), value);
      value += Rational(static_cast<std::int64_t>(rng() % 3), 1 + static_cast<std::int64_t>(rng() % 2));
    }
    if (raw.front() == raw.back()) raw.front() += 1;
    const Rational lambda(1 + static_cast<std::int64_t>(rng() % 5), 1 + static_cast<std::int64_t>(rng() % 3));
    const Rational mu(static_cast<std::int64_t>(rng() % 11) - 5, 2);
    std::vector<Rational> moved;
    for (const auto& a : raw) moved.push_back(lambda * a + mu);
    EXPECT_EQ(winner_set(profile, ScoringRule{ScoreVector(raw)}).winners,
              winner_set(profile, ScoringRule{ScoreVector(moved)}).winners);
    EXPECT_EQ(winner_set(profile, ScoringRule{ScoreVector(raw)}).winners,
              winner_set(profile, ScoringRule{normalize_score_vector(raw)}).winners);
  }
}

TEST_F(RandomProfiles, KApprovalEqualsZeroOneScoring) {
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 4;
    const auto profile = oracle::random_ranked(rng, m, 1 + static_cast<int>(rng() % 9));
    for (int k = 1; k < m; ++k) {
      EXPECT_EQ(winner_set(profile, KApprovalRule{k}).winners,
                winner_set(profile, ScoringRule{k_approval_vector(m, k)}).winners);
    }
  }
}

TEST_F(RandomProfiles, RelabelingEquivariance) {
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3;
    const auto profile = oracle::random_ranked(rng, m, 1 + static_cast<int>(rng() % 7));
    std::vector<Candidate> perm{0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<WeightedBallot<Ranking>> relabeled;
    for (const auto& v : profile.votes()) {
      std::vector<Candidate> order;
      for (Candidate x : v.ballot.order()) order.push_back(perm[x]);
      relabeled.push_back({Ranking(order), v.count});
    }
    const RankedProfile image(m, relabeled);
    for (const Rule& rule : std::vector<Rule>{ScoringRule{borda_vector(m)}, KApprovalRule{1}, BucklinRule{},
                                              MaximinRule{}, CopelandRule{Rational(1, 2)}}) {
      const auto before = winner_set(profile, rule);
      const auto after = winner_set(image, rule);
      std::set<Candidate> mapped;
      for (Candidate x : before.winners) mapped.insert(perm[x]);
      EXPECT_EQ(mapped, std::set<Candidate>(after.winners.begin(), after.winners.end()));
      for (Candidate x = 0; x < m; ++x) EXPECT_EQ(before.scores[x], after.scores[perm[x]]);
    }
  }
}

TEST_F(RandomProfiles, CopelandAndMaximinProperties) {
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 4;
    const auto profile = oracle::random_ranked(rng, m, 1 + static_cast<int>(rng() % 8));
    const auto d = pairwise_matrix(profile);
    const auto copeland = copeland_scores(d, Rational(1, 2));
    Rational total = 0;
    for (const auto& s : copeland) {
      EXPECT_GE(s, 0);
      EXPECT_LE(s, m - 1);
      total += s;
    }
    EXPECT_EQ(total, Rational(m * (m - 1), 2));

    const auto maximin = winner_set(profile, MaximinRule{});
    const auto raw = as_rationals(maximin_scores(d));
    EXPECT_EQ(raw, maximin.scores);
    std::optional<Candidate> condorcet;
    for (Candidate x = 0; x < m; ++x) {
      bool beats_all = true;
      for (Candidate y = 0; y < m; ++y) beats_all = beats_all && (x == y || d(x, y) > 0);
      if (beats_all) condorcet = x;
    }
    const bool positive = maximin.scores[maximin.winners.front()] > 0;
    EXPECT_EQ(positive, condorcet.has_value());
    if (condorcet) EXPECT_EQ(maximin.winners, std::vector<Candidate>{*condorcet});
    for (Candidate x = 0; x < m; ++x) {
      for (Candidate y = 0; y < m; ++y) {
        EXPECT_EQ(d(x, y), -d(y, x));
        if (x != y) EXPECT_EQ((d(x, y) - profile.num_voters()) % 2, 0);
      }
    }
  }
}

TEST(ProfileTest, Invariants) {
  EXPECT_THROW(Ranking({0, 0, 1}), InputError);
  EXPECT_THROW(Ranking({0, 2}), InputError);
  EXPECT_THROW(ApprovalBallot({3}, 3), InputError);
  EXPECT_THROW(RankedProfile(3, {}), InputError);
  EXPECT_THROW(RankedProfile(3, {{Ranking({0, 1}), 1}}), InputError);
  EXPECT_THROW(RankedProfile(2, {{Ranking({0, 1}), 0}}), InputError);
  const ApprovalBallot full({2, 0, 1}, 3);
  EXPECT_EQ(std::vector<Candidate>(full.approved().begin(), full.approved().end()), (std::vector<Candidate>{0, 1, 2}));
  EXPECT_EQ(default_candidate_name(0), "a");
  EXPECT_EQ(default_candidate_name(25), "z");
  EXPECT_EQ(default_candidate_name(26), "c26");
}

TEST(TopTwoTest, LowestIndexBreaksTies) {
  EXPECT_EQ(top_two(q({1, 3, 3, 0})), std::make_pair(1, 2));
  EXPECT_EQ(top_two(q({5, 1, 5})), std::make_pair(0, 2));
  EXPECT_EQ(top_two(q({4, 2, 2})), std::make_pair(0, 1));
}
