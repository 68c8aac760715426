#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pira/eval/metrics.hpp"
#include "pira/util/rng.hpp"
#include "test_support.hpp"

using namespace pira;
using namespace pira::eval;
using pira::testing::make_intent;
using pira::testing::make_profile;

namespace {

// Independent oracle: maximum one-to-one assignment size by exhaustive
// recursion. Only used on matrices up to 6x6.
std::size_t brute_force_max_assignment(const std::vector<std::vector<bool>>& adj,
                                       std::size_t row = 0,
                                       std::vector<char>* used = nullptr) {
    std::vector<char> local;
    if (!used) {
        local.assign(adj.empty() ? 0 : adj[0].size(), 0);
        used = &local;
    }
    if (row == adj.size()) return 0;
    std::size_t best = brute_force_max_assignment(adj, row + 1, used);  // skip this row
    for (std::size_t col = 0; col < adj[row].size(); ++col) {
        if (!adj[row][col] || (*used)[col]) continue;
        (*used)[col] = 1;
        best = std::max(best, 1 + brute_force_max_assignment(adj, row + 1, used));
        (*used)[col] = 0;
    }
    return best;
}

// Judge whose equivalence relation is an explicit matrix; intents are named
// p<i> / r<j>.
class MatrixJudge : public Judge {
public:
    explicit MatrixJudge(std::vector<std::vector<bool>> matrix)
        : matrix_(std::move(matrix)) {}

    JudgeVerdict judge_pair(const Intent& predicted, const Intent& reference,
                            const UserProfile&) override {
        JudgeVerdict v;
        v.predicted = predicted;
        v.reference = reference;
        const std::size_t i = std::stoul(predicted.text.substr(1));
        const std::size_t j = std::stoul(reference.text.substr(1));
        v.equivalent = matrix_[i][j];
        return v;
    }
    std::string name() const override { return "matrix"; }

private:
    std::vector<std::vector<bool>> matrix_;
};

std::vector<Intent> indexed_intents(char prefix, std::size_t n) {
    std::vector<Intent> intents;
    for (std::size_t i = 0; i < n; ++i)
        intents.push_back(make_intent(std::string(1, prefix) + std::to_string(i)));
    return intents;
}

const UserProfile kProfile = make_profile("p", {{"budget", "low"}});

}  // namespace

TEST_CASE("normalize_intent_text collapses case, whitespace and punctuation") {
    CHECK(normalize_intent_text("Book a table!") == "book a table");
    CHECK(normalize_intent_text("  Book   a\ttable ") == "book a table");
    CHECK(normalize_intent_text("BOOK, A; TABLE.") == "book a table");
    CHECK(normalize_intent_text("") == "");
    CHECK(normalize_intent_text("7 PM") == "7 pm");
}

TEST_CASE("deterministic judge: identity and normalized variants are equivalent") {
    DeterministicJudge judge;
    const auto same = judge.judge_pair(make_intent("Book a table at Grnd Restaurant"),
                                       make_intent("Book a table at Grnd Restaurant"),
                                       kProfile);
    CHECK(same.equivalent);
    CHECK(same.profile_satisfied);

    const auto variant = judge.judge_pair(make_intent("book a table at grnd restaurant!"),
                                          make_intent("Book a table at Grnd Restaurant"),
                                          kProfile);
    CHECK(variant.equivalent);

    const auto different = judge.judge_pair(make_intent("Order ground coffee"),
                                            make_intent("Book a table"), kProfile);
    CHECK_FALSE(different.equivalent);
}

TEST_CASE("deterministic judge: conflicting slot values block equivalence") {
    DeterministicJudge judge;
    const Intent a = make_intent("Book a table", {{"time", "7 PM"}});
    const Intent b = make_intent("Book a table", {{"time", "9 PM"}});
    const Intent c = make_intent("Book a table", {{"venue", "Grnd Restaurant"}});
    CHECK_FALSE(judge.judge_pair(a, b, kProfile).equivalent);
    // Disjoint slot keys are compatible; one side lacking slots entirely is
    // how engine predictions arrive.
    CHECK(judge.judge_pair(a, c, kProfile).equivalent);
    CHECK(judge.judge_pair(make_intent("Book a table"), a, kProfile).equivalent);
}

TEST_CASE("profile constraint rules fail predictions closed") {
    DeterministicJudge judge({{"budget", "low", {"buy a luxury", "premium"}}});
    const auto verdict = judge.judge_pair(
        make_intent("Schedule a viewing to buy a luxury apartment in Oakwood"),
        make_intent("Schedule a viewing to buy a luxury apartment in Oakwood"), kProfile);
    CHECK_FALSE(verdict.profile_satisfied);
    CHECK_FALSE(verdict.equivalent);  // equivalent=true requires profile_satisfied

    // Same texts, but a profile the rule does not bind.
    const auto rich = make_profile("rich", {{"budget", "high"}});
    const auto ok = judge.judge_pair(
        make_intent("Schedule a viewing to buy a luxury apartment in Oakwood"),
        make_intent("Schedule a viewing to buy a luxury apartment in Oakwood"), rich);
    CHECK(ok.equivalent);
}

TEST_CASE("fixture judge resolves semantic paraphrases from its fixture file") {
    const auto dir = pira::testing::scratch_dir("eval_fixture");
    pira::testing::write_file(dir / "fixtures.json", R"({
      "fixtures": [
        {
          "predicted": "reserve Grnd Restaurant, 19:00",
          "reference": "book a table at Grnd Restaurant at 7 PM",
          "expected": {"equivalent": true, "profile_satisfied": true}
        },
        {
          "predicted": "buy a luxury apartment downtown",
          "reference": "rent a budget studio downtown",
          "expected": {"equivalent": false, "profile_satisfied": false}
        }
      ]
    })");

    FixtureJudge judge(dir / "fixtures.json");
    const auto paraphrase =
        judge.judge_pair(make_intent("reserve Grnd Restaurant, 19:00"),
                         make_intent("book a table at Grnd Restaurant at 7 PM"), kProfile);
    CHECK(paraphrase.equivalent);

    const auto violating =
        judge.judge_pair(make_intent("buy a luxury apartment downtown"),
                         make_intent("rent a budget studio downtown"), kProfile);
    CHECK_FALSE(violating.equivalent);
    CHECK_FALSE(violating.profile_satisfied);

    // Unlisted pairs fall back to the deterministic rule.
    CHECK(judge.judge_pair(make_intent("Order oat milk"), make_intent("order oat milk."),
                           kProfile)
              .equivalent);
}

TEST_CASE("shipped judge fixtures and constraint rules load and apply") {
    const std::filesystem::path data_dir = PIRA_TEST_DATA_DIR;
    const auto rules = load_constraint_rules(data_dir / "constraint_rules.json");
    FixtureJudge judge(data_dir / "judge_fixtures.json", rules);

    // Paraphrase pairs resolve through the fixture table.
    CHECK(judge.judge_pair(make_intent("reserve Grnd Restaurant, 19:00"),
                           make_intent("book a table at Grnd Restaurant at 7 PM"),
                           kProfile)
              .equivalent);
    CHECK_FALSE(judge.judge_pair(make_intent("book a table at Cielo Azul at 7 PM"),
                                 make_intent("book a table at Grnd Restaurant at 7 PM"),
                                 kProfile)
                    .equivalent);

    // Constraint rules still bind the fallback path: kProfile has budget=low.
    const auto v = judge.judge_pair(make_intent("book the premium suite"),
                                    make_intent("book the premium suite"), kProfile);
    CHECK_FALSE(v.profile_satisfied);
    CHECK_FALSE(v.equivalent);
}

TEST_CASE("remote judge fails closed on garbage and transport errors") {
    backend::RemoteConfig config;
    config.model = "judge-model";
    config.max_retries = 0;

    SUBCASE("well-formed verdict is honored") {
        RemoteJudge judge(config, [](const std::string&, const backend::HttpHeaders&,
                                     const std::string&) {
            return backend::HttpResponse{
                200,
                R"({"choices":[{"message":{"content":)"
                R"("{\"equivalent\": true, \"profile_satisfied\": true, \"rationale\": \"same booking\"}"}}]})",
                false, ""};
        });
        const auto v = judge.judge_pair(make_intent("a"), make_intent("b"), kProfile);
        CHECK(v.equivalent);
    }
    SUBCASE("equivalent without profile_satisfied is not a match") {
        RemoteJudge judge(config, [](const std::string&, const backend::HttpHeaders&,
                                     const std::string&) {
            return backend::HttpResponse{
                200,
                R"({"choices":[{"message":{"content":)"
                R"("{\"equivalent\": true, \"profile_satisfied\": false}"}}]})",
                false, ""};
        });
        const auto v = judge.judge_pair(make_intent("a"), make_intent("b"), kProfile);
        CHECK_FALSE(v.equivalent);
        CHECK_FALSE(v.profile_satisfied);
    }
    SUBCASE("unparseable output is not equivalent") {
        RemoteJudge judge(config, [](const std::string&, const backend::HttpHeaders&,
                                     const std::string&) {
            return backend::HttpResponse{
                200, R"({"choices":[{"message":{"content":"hard to say"}}]})", false, ""};
        });
        const auto v = judge.judge_pair(make_intent("a"), make_intent("b"), kProfile);
        CHECK_FALSE(v.equivalent);
        CHECK(v.rationale == "judge output unparseable");
    }
    SUBCASE("transport failure is recorded and not equivalent") {
        RemoteJudge judge(config, [](const std::string&, const backend::HttpHeaders&,
                                     const std::string&) {
            return backend::HttpResponse{0, "", true, "refused"};
        });
        const auto v = judge.judge_pair(make_intent("a"), make_intent("b"), kProfile);
        CHECK_FALSE(v.equivalent);
        CHECK(v.rationale.find("transport failure") != std::string::npos);
    }
}

TEST_CASE("remote judge rubric includes the profile context") {
    const auto prompt = RemoteJudge::rubric_prompt(make_intent("a"), make_intent("b"),
                                                   make_profile("u", {{"budget", "low"}}));
    CHECK(prompt.find("budget: low") != std::string::npos);
    CHECK(prompt.find("Predicted intent: a") != std::string::npos);
    CHECK(prompt.find("Reference intent: b") != std::string::npos);
}

TEST_CASE("match_sets arithmetic on a half-matching 2x2") {
    MatrixJudge judge({{true, false}, {false, false}});
    const auto report = match_sets(indexed_intents('p', 2), indexed_intents('r', 2),
                                   kProfile, judge);
    CHECK(report.precision == doctest::Approx(0.5));
    CHECK(report.recall == doctest::Approx(0.5));
    CHECK(report.f1 == doctest::Approx(0.5));
    CHECK(report.tp_pairs.size() == 1);
    CHECK(report.fp.size() == 1);
    CHECK(report.fn.size() == 1);
}

TEST_CASE("match_sets is perfect on identical sets") {
    DeterministicJudge judge;
    const std::vector<Intent> set = {make_intent("Book a table"),
                                     make_intent("Order oat milk")};
    const auto report = match_sets(set, set, kProfile, judge);
    CHECK(report.f1 == doctest::Approx(1.0));
    CHECK(report.fp.empty());
    CHECK(report.fn.empty());
}

TEST_CASE("match_sets needs maximum matching, not greedy") {
    // Row-first greedy would pair p0-r0 and strand p1 (only r0 available),
    // scoring 1 of 2. The maximum matching pairs p0-r1, p1-r0.
    MatrixJudge judge({{true, true}, {true, false}});
    const auto report = match_sets(indexed_intents('p', 2), indexed_intents('r', 2),
                                   kProfile, judge);
    CHECK(report.tp_pairs.size() == 2);
    CHECK(report.f1 == doctest::Approx(1.0));
}

TEST_CASE("match_sets conventions for empty sides") {
    DeterministicJudge judge;
    const std::vector<Intent> some = {make_intent("Book a table")};

    const auto miss = match_sets({}, some, kProfile, judge);
    CHECK_FALSE(miss.negative_pair);
    CHECK(miss.precision == 0.0);
    CHECK(miss.recall == 0.0);
    CHECK(miss.f1 == 0.0);
    CHECK(miss.fn.size() == 1);

    const auto hallucinated = match_sets(some, {}, kProfile, judge);
    CHECK(hallucinated.negative_pair);
    CHECK(hallucinated.hallucination_count == 1);

    const auto both_empty = match_sets({}, {}, kProfile, judge);
    CHECK(both_empty.negative_pair);
    CHECK(both_empty.hallucination_count == 0);
}

TEST_CASE("matching equals the brute-force oracle on random matrices up to 6x6") {
    SeededRng rng(424242);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 1 + rng.below(6);
        const std::size_t cols = 1 + rng.below(6);
        std::vector<std::vector<bool>> adj(rows, std::vector<bool>(cols, false));
        const double density = rng.uniform01();
        for (auto& row : adj)
            for (std::size_t c = 0; c < cols; ++c) row[c] = rng.bernoulli(density);

        CHECK(max_bipartite_match(adj) == brute_force_max_assignment(adj));
    }
}

TEST_CASE("f1 is symmetric under swapping predicted and reference") {
    SeededRng rng(77);
    DeterministicJudge judge;
    const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "epsilon"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Intent> a, b;
        const std::size_t na = rng.below(5);
        const std::size_t nb = 1 + rng.below(4);
        for (std::size_t i = 0; i < na; ++i) a.push_back(make_intent(rng.pick(pool)));
        for (std::size_t i = 0; i < nb; ++i) b.push_back(make_intent(rng.pick(pool)));
        if (a.empty()) continue;  // both directions must be positive pairs

        const auto ab = match_sets(a, b, kProfile, judge);
        const auto ba = match_sets(b, a, kProfile, judge);
        CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-12));
        CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
        CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
    }
}

TEST_CASE("consensus keeps majority intents and drops singletons") {
    DeterministicJudge judge;
    const std::vector<std::vector<Intent>> annotations = {
        {make_intent("Book a table at Grnd Restaurant")},
        {make_intent("book a table at grnd restaurant")},
        {make_intent("Plan a trip to Kyoto")},
    };
    const auto consensus = aggregate_annotations(annotations, kProfile, judge);
    REQUIRE(consensus.size() == 1);
    CHECK(normalize_intent_text(consensus[0].text) == "book a table at grnd restaurant");
}

TEST_CASE("consensus of three mutually distinct annotations is empty") {
    DeterministicJudge judge;
    const std::vector<std::vector<Intent>> annotations = {
        {make_intent("One thing")}, {make_intent("Another thing")},
        {make_intent("A third thing")}};
    CHECK(aggregate_annotations(annotations, kProfile, judge).empty());
}

TEST_CASE("consensus representative is the lexicographically first member") {
    DeterministicJudge judge;
    const std::vector<std::vector<Intent>> annotations = {
        {make_intent("book a table.")}, {make_intent("BOOK A TABLE")},
        {make_intent("Book a Table")}};
    const auto consensus = aggregate_annotations(annotations, kProfile, judge);
    REQUIRE(consensus.size() == 1);
    CHECK(consensus[0].text == "BOOK A TABLE");  // ASCII uppercase sorts first
}

TEST_CASE("consensus is idempotent for identical annotations") {
    DeterministicJudge judge;
    const std::vector<Intent> list = {make_intent("Order oat milk"),
                                      make_intent("Summarize notes")};
    const auto consensus = aggregate_annotations({list, list, list}, kProfile, judge);
    REQUIRE(consensus.size() == list.size());
    for (const auto& intent : list) {
        bool found = false;
        for (const auto& kept : consensus)
            found |= judge.judge_pair(kept, intent, kProfile).equivalent;
        CHECK(found);
    }
}

TEST_CASE("consensus requires exactly three annotation lists") {
    DeterministicJudge judge;
    CHECK_THROWS_AS(aggregate_annotations({{}, {}}, kProfile, judge),
                    std::invalid_argument);
}

namespace {

MatchReport positive_report(double f1_value, double precision = 0, double recall = 0) {
    MatchReport r;
    r.f1 = f1_value;
    r.precision = precision;
    r.recall = recall;
    return r;
}

MatchReport negative_report(int hallucinations) {
    MatchReport r;
    r.negative_pair = true;
    r.hallucination_count = hallucinations;
    return r;
}

}  // namespace

TEST_CASE("f1_avg is the arithmetic mean over positive pairs") {
    CHECK(*f1_avg({positive_report(1.0), positive_report(0.0)}) == doctest::Approx(0.5));
    CHECK(*f1_avg({positive_report(1.0), positive_report(1.0)}) == doctest::Approx(1.0));

    // Five-report fixture; expected value recomputed independently:
    // (1.0 + 0.5 + 0.8 + 2/3 + 0.0) / 5 = 0.59333333333333333...
    const std::vector<MatchReport> five = {positive_report(1.0), positive_report(0.5),
                                           positive_report(0.8),
                                           positive_report(2.0 / 3.0),
                                           positive_report(0.0)};
    CHECK(*f1_avg(five) == doctest::Approx(0.5933333333333333).epsilon(1e-12));

    CHECK_FALSE(f1_avg({negative_report(2)}).has_value());
    CHECK_FALSE(f1_avg({}).has_value());
}

TEST_CASE("fps is the mean hallucination count over negative pairs") {
    CHECK(*fps({negative_report(0), negative_report(2), negative_report(4)}) ==
          doctest::Approx(2.0));
    CHECK(*fps({negative_report(0), negative_report(0)}) == doctest::Approx(0.0));
    CHECK_FALSE(fps({positive_report(1.0)}).has_value());
}

TEST_CASE("fps_norm matches the closed form") {
    CHECK(fps_norm(0.0) == 1.0);  // exact
    CHECK(fps_norm(std::exp(1.0) - 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    // 1 / (1 + ln 3), evaluated independently at high precision.
    CHECK(fps_norm(2.0) == doctest::Approx(0.4765053580405044).epsilon(1e-12));
    CHECK_THROWS_AS(fps_norm(-0.1), std::invalid_argument);
}

TEST_CASE("fps_norm is strictly decreasing") {
    double previous = fps_norm(0.0);
    for (double value : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
        const double current = fps_norm(value);
        CHECK(current < previous);
        previous = current;
    }
}

TEST_CASE("s_final reproduces the published score arithmetic") {
    CHECK(std::abs(s_final(0.9389, 0.9623) - 0.9035) <= 0.0005);
    CHECK(std::abs(s_final(0.5571, 0.5036) - 0.2805) <= 0.0005);
    CHECK(s_final(0.7312, 1.0) == doctest::Approx(0.7312));
    CHECK_THROWS_AS(s_final(1.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(s_final(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("s_final never exceeds either factor") {
    SeededRng rng(5150);
    for (int i = 0; i < 500; ++i) {
        const double f1_value = rng.uniform01();
        const double fps_value = rng.uniform01() * 10.0;
        const double norm = fps_norm(fps_value);
        const double s = s_final(f1_value, norm);
        CHECK(s <= std::min(f1_value, norm) + 1e-15);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("round_half_up behaves at the boundary") {
    CHECK(round_half_up(28.055, 2) == doctest::Approx(28.06));
    CHECK(round_half_up(90.344999, 2) == doctest::Approx(90.34));
    CHECK(round_half_up(90.345, 2) == doctest::Approx(90.35));
    CHECK(round_half_up(12.3449, 2) == doctest::Approx(12.34));
}

TEST_CASE("aggregate_run folds pairs into the metric set") {
    std::vector<MatchReport> pairs = {positive_report(1.0, 1.0, 1.0),
                                      positive_report(0.5, 0.5, 0.5),
                                      negative_report(0), negative_report(3)};
    const RunReport report = aggregate_run("demo", pairs, 1, 2, 0);
    CHECK(report.positive_pairs == 2);
    CHECK(report.negative_pairs == 2);
    CHECK(report.failed_runs == 1);
    CHECK(report.skipped_pairs == 2);
    CHECK(*report.f1_avg == doctest::Approx(0.75));
    CHECK(*report.precision_avg == doctest::Approx(0.75));
    CHECK(*report.fps == doctest::Approx(1.5));
    CHECK(*report.fps_norm == doctest::Approx(fps_norm(1.5)));
    CHECK(*report.s_final == doctest::Approx(0.75 * fps_norm(1.5)));
}

TEST_CASE("run report JSON round-trips") {
    std::vector<MatchReport> pairs = {positive_report(0.5, 0.5, 0.5), negative_report(2)};
    pairs[0].trajectory_id = "t0";
    pairs[0].profile_id = "p0";
    pairs[0].tp_pairs = {{make_intent("a"), make_intent("b")}};
    pairs[0].fp = {make_intent("c")};
    pairs[0].fn = {make_intent("d", {{"k", "v"}})};
    const RunReport report = aggregate_run("roundtrip", pairs, 0, 0, 1);

    const auto doc = report.to_json();
    const RunReport loaded = RunReport::from_json(doc);
    CHECK(loaded.to_json().dump() == doc.dump());
}

TEST_CASE("report table renders percentages half-up and sorts by final score") {
    RunReport human;
    human.label = "human-reference";
    human.positive_pairs = 1;
    human.precision_avg = 0.9876;
    human.recall_avg = 0.8967;
    human.f1_avg = 0.9389;
    human.fps = 0.039;  // arbitrary; fps_norm below is what the table shows
    human.fps_norm = 0.9623;
    human.s_final = s_final(0.9389, 0.9623);

    RunReport weak;
    weak.label = "weak";
    weak.f1_avg = 0.5571;
    weak.fps_norm = 0.5036;
    weak.s_final = s_final(0.5571, 0.5036);

    RunReport no_negatives;
    no_negatives.label = "no-negatives";
    no_negatives.f1_avg = 0.912345;
    // fps/fps_norm/s_final absent: dataset had no negative pairs.

    const std::string table = render_report_table({weak, human, no_negatives});
    CHECK(table.find("90.35") != std::string::npos);   // the published product
    CHECK(table.find("28.06") != std::string::npos);   // 0.28055556 rendered half-up
    CHECK(table.find("93.89") != std::string::npos);
    CHECK(table.find("96.23") != std::string::npos);

    // Sorted by S_final descending; absent scores sink to the bottom.
    const auto human_pos = table.find("human-reference");
    const auto weak_pos = table.find("weak");
    const auto absent_pos = table.find("no-negatives");
    CHECK(human_pos < weak_pos);
    CHECK(weak_pos < absent_pos);

    // Absent FPS renders as "-", never as 0.
    const auto absent_row = table.substr(absent_pos);
    CHECK(absent_row.find("-") != std::string::npos);
    CHECK(absent_row.find("0.00") == std::string::npos);
}
