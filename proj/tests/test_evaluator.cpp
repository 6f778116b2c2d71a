#include "taxmine/evaluator.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "taxmine/errors.hpp"

using namespace taxmine;

namespace {

HyponymGraph toy_graph() {
  std::istringstream in(
      "dog\tcanine\n"
      "canine\tmammal\n"
      "mammal\tanimal\n"
      "cat\tfeline\n"
      "feline\tmammal\n"
      "poodle\tdog\n");
  return HyponymGraph::load(in);
}

std::vector<HyponymyRelation> pool(PatternKind kind, const std::string& prefix, int n,
                                   double weight = 1.0) {
  std::vector<HyponymyRelation> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({prefix + "hyper" + std::to_string(i), prefix + "hypo" + std::to_string(i),
                   weight, kind, 1});
  }
  return out;
}

SampleItem judged_item(bool extracted, const char* j1, const char* j2) {
  SampleItem item;
  item.kind = PatternKind::Trivial;
  item.hypernym = "a";
  item.hyponym = "b";
  item.extracted = extracted;
  item.judge1 = j1;
  item.judge2 = j2;
  return item;
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("graph loads with stemming, dedup and self-loop dropping") {
  std::istringstream in(
      "dog\tcanine\n"
      "dog\tcanine\n"
      "ponies\tpony\n"
      "malformed line without tab\n"
      "luxury_cars\tcars\n");
  HyponymGraph::LoadStats stats;
  HyponymGraph g = HyponymGraph::load(in, &stats);
  CHECK(stats.malformed == 1);
  CHECK(stats.self_loops_dropped == 1);  // both sides stem to "poni"
  CHECK(stats.edges == 3);
  CHECK(g.has_vertex("dog"));
  CHECK(g.has_vertex("canin"));       // stemmed endpoint
  CHECK(g.has_vertex("luxuri car"));  // underscore became a space, then stemmed
  CHECK(!g.has_vertex("ponies"));
  CHECK(g.arc_count() == 2);  // duplicate arc collapsed
}

TEST_CASE("verify follows multi-hop directed paths") {
  HyponymGraph g = toy_graph();
  CHECK(verify("mammal", "dog", g) == VerifyResult::Confirmed);   // two hops
  CHECK(verify("animal", "poodle", g) == VerifyResult::Confirmed);  // three hops
  CHECK(verify("dog", "mammal", g) == VerifyResult::NotFound);    // direction matters
  CHECK(verify("celebrities", "angelina jolie", g) == VerifyResult::NotFound);  // absent
  CHECK(verify("mammal", "dogs", g) == VerifyResult::Confirmed);  // stems meet
}

TEST_CASE("verify respects the depth cap") {
  HyponymGraph g = toy_graph();
  CHECK(verify("animal", "poodle", g, 3) == VerifyResult::Confirmed);
  CHECK(verify("animal", "poodle", g, 2) == VerifyResult::NotFound);
}

TEST_CASE("verify is antisymmetric on acyclic graphs") {
  std::mt19937_64 rng(91);
  HyponymGraph g;
  int n = 40;
  for (int i = 0; i < 200; ++i) {
    int a = static_cast<int>(rng() % static_cast<uint64_t>(n));
    int b = static_cast<int>(rng() % static_cast<uint64_t>(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    g.add_edge("vx" + std::to_string(a), "vx" + std::to_string(b));  // arcs go low -> high
  }
  for (int i = 0; i < 500; ++i) {
    std::string p = "vx" + std::to_string(rng() % static_cast<uint64_t>(n));
    std::string q = "vx" + std::to_string(rng() % static_cast<uint64_t>(n));
    if (p == q) continue;
    if (verify(p, q, g) == VerifyResult::Confirmed) {
      CHECK(verify(q, p, g) == VerifyResult::NotFound);
    }
  }
}

TEST_CASE("sampling is stratified, seeded and capped by pool size") {
  auto extracted = pool(PatternKind::Trivial, "t", 40);
  auto more = pool(PatternKind::WithReformulation, "r", 40);
  auto disjoint = pool(PatternKind::Disjoint, "d", 8);
  extracted.insert(extracted.end(), more.begin(), more.end());
  extracted.insert(extracted.end(), disjoint.begin(), disjoint.end());
  auto discarded = pool(PatternKind::Trivial, "xt", 40);
  auto more_discarded = pool(PatternKind::WithReformulation, "xr", 40);
  auto disc_disjoint = pool(PatternKind::Disjoint, "xd", 40);
  discarded.insert(discarded.end(), more_discarded.begin(), more_discarded.end());
  discarded.insert(discarded.end(), disc_disjoint.begin(), disc_disjoint.end());

  SampleStats stats;
  auto sample = sample_for_judges(extracted, discarded, 20, 7, nullptr, &stats);
  // 20 per kind per pool, except the 8-item disjoint E pool
  CHECK(sample.size() == 20 * 5 + 8);
  CHECK(stats.truncated_pools == 1);

  std::map<std::pair<int, bool>, int> strata;
  for (const auto& item : sample) ++strata[{static_cast<int>(item.kind), item.extracted}];
  CHECK(strata[{static_cast<int>(PatternKind::Trivial), true}] == 20);
  CHECK(strata[{static_cast<int>(PatternKind::Disjoint), true}] == 8);
  CHECK(strata[{static_cast<int>(PatternKind::Disjoint), false}] == 20);

  auto again = sample_for_judges(extracted, discarded, 20, 7, nullptr);
  std::ostringstream a, b;
  write_sample_tsv(a, sample);
  write_sample_tsv(b, again);
  CHECK(a.str() == b.str());  // fixed seed, identical sample

  auto reseeded = sample_for_judges(extracted, discarded, 20, 8, nullptr);
  std::ostringstream c;
  write_sample_tsv(c, reseeded);
  CHECK(a.str() != c.str());
}

TEST_CASE("graph-confirmed sample rows are pre-verdicted") {
  std::vector<HyponymyRelation> extracted{
      {"mammal", "dog", 2.0, PatternKind::Trivial, 1},
      {"zorp", "blek", 1.0, PatternKind::Trivial, 1},
  };
  HyponymGraph g = toy_graph();
  SampleStats stats;
  auto sample = sample_for_judges(extracted, {}, 10, 3, &g, &stats);
  REQUIRE(sample.size() == 2);
  CHECK(stats.preconfirmed == 1);
  for (const auto& item : sample) {
    if (item.hypernym == "mammal") {
      CHECK(item.verdict == Verdict::WordnetConfirmed);
      CHECK(item.judge1 == "wordnet");
    } else {
      CHECK(item.verdict == Verdict::Pending);
    }
  }
}

TEST_CASE("sample tsv round-trip preserves verdict presets") {
  std::vector<HyponymyRelation> extracted{{"mammal", "dog", 2.0, PatternKind::Trivial, 1}};
  HyponymGraph g = toy_graph();
  auto sample = sample_for_judges(extracted, {}, 5, 3, &g);
  std::ostringstream out;
  write_sample_tsv(out, sample);
  std::istringstream in(out.str());
  auto loaded = load_sample_tsv(in);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].verdict == Verdict::WordnetConfirmed);
  CHECK(loaded[0].kind == PatternKind::Trivial);
  CHECK(loaded[0].extracted);
}

TEST_CASE("judge resolution truth table") {
  auto resolve_one = [](const char* j1, const char* j2) {
    std::vector<SampleItem> sample{judged_item(true, j1, j2)};
    resolve_verdicts(sample);
    return sample[0].verdict;
  };
  CHECK(resolve_one("hyponymy", "hyponymy") == Verdict::JudgeConfirmed);
  CHECK(resolve_one("co-hyponym", "co-hyponym") == Verdict::CoHyponym);
  CHECK(resolve_one("other", "other") == Verdict::OtherRelation);
  CHECK(resolve_one("unrelated", "unrelated") == Verdict::Unrelated);
  // one judge says hyponymy: the denying judge's category wins
  CHECK(resolve_one("hyponymy", "co-hyponym") == Verdict::CoHyponym);
  CHECK(resolve_one("co-hyponym", "hyponymy") == Verdict::CoHyponym);
  CHECK(resolve_one("hyponymy", "other") == Verdict::OtherRelation);
  CHECK(resolve_one("hyponymy", "unrelated") == Verdict::Unrelated);
  // two denials that disagree: unrelated
  CHECK(resolve_one("co-hyponym", "other") == Verdict::Unrelated);
  CHECK(resolve_one("other", "co-hyponym") == Verdict::Unrelated);
  CHECK(resolve_one("co-hyponym", "unrelated") == Verdict::Unrelated);
  CHECK(resolve_one("other", "unrelated") == Verdict::Unrelated);
}

TEST_CASE("missing judge entries stay pending and are counted") {
  std::vector<SampleItem> sample{judged_item(true, "hyponymy", ""),
                                 judged_item(true, "hyponymy", "hyponymy")};
  CHECK(resolve_verdicts(sample) == 1);
  CHECK(sample[0].verdict == Verdict::Pending);
  CHECK(sample[1].verdict == Verdict::JudgeConfirmed);
  CHECK_THROWS_AS(compute_metrics(sample), DataError);

  std::vector<SampleItem> typo{judged_item(true, "hyponymyy", "other")};
  CHECK_THROWS_AS(resolve_verdicts(typo), DataError);
}

TEST_CASE("metric arithmetic reproduces the published micro rows") {
  MetricSet trivial = metrics_from_counts(357, 143, 81);
  CHECK(*trivial.precision == doctest::Approx(0.714).epsilon(0.001));
  CHECK(*trivial.recall == doctest::Approx(0.815).epsilon(0.001));
  CHECK(*trivial.f1 == doctest::Approx(0.761).epsilon(0.001));
  CHECK(*trivial.f05 == doctest::Approx(0.732).epsilon(0.001));

  MetricSet disjoint = metrics_from_counts(452, 48, 85);
  CHECK(*disjoint.precision == doctest::Approx(0.904).epsilon(0.001));
  CHECK(*disjoint.recall == doctest::Approx(0.842).epsilon(0.001));
}

TEST_CASE("macro weighting reproduces the published aggregate") {
  std::map<PatternKind, MetricSet> micro{
      {PatternKind::Trivial, metrics_from_counts(357, 143, 81)},
      {PatternKind::WithReformulation, metrics_from_counts(381, 119, 14)},
      {PatternKind::Disjoint, metrics_from_counts(452, 48, 85)},
  };
  std::map<PatternKind, uint64_t> n{
      {PatternKind::Trivial, 245997},
      {PatternKind::WithReformulation, 117321},
      {PatternKind::Disjoint, 4177},
  };
  auto macro = macro_weighted(micro, n);
  REQUIRE(macro);
  CHECK(*macro->precision == doctest::Approx(0.731).epsilon(0.001));
  CHECK(*macro->recall == doctest::Approx(0.863).epsilon(0.001));
  CHECK(*macro->f1 == doctest::Approx(0.791).epsilon(0.001));
  CHECK(*macro->f05 == doctest::Approx(0.754).epsilon(0.001));
}

TEST_CASE("compute_metrics classifies pools into the confusion matrix") {
  std::vector<SampleItem> sample;
  auto add = [&](bool extracted, Verdict v) {
    SampleItem item = judged_item(extracted, "", "");
    item.verdict = v;
    sample.push_back(item);
  };
  add(true, Verdict::WordnetConfirmed);  // TP
  add(true, Verdict::JudgeConfirmed);    // TP
  add(true, Verdict::CoHyponym);         // FP
  add(false, Verdict::JudgeConfirmed);   // FN
  add(false, Verdict::Unrelated);        // TN
  Metrics m = compute_metrics(sample);
  CHECK(m.total.tp == 2);
  CHECK(m.total.fp == 1);
  CHECK(m.total.fn == 1);
  CHECK(m.total.tn == 1);
  CHECK(*m.micro_total.precision == doctest::Approx(2.0 / 3.0));
  CHECK(*m.micro_total.recall == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("precision is flagged undefined rather than silently zero") {
  std::vector<SampleItem> sample;
  SampleItem item = judged_item(false, "", "");
  item.verdict = Verdict::Unrelated;
  sample.push_back(item);  // only a TN: TP+FP = 0
  Metrics m = compute_metrics(sample);
  CHECK(!m.micro_total.precision.has_value());
  std::string json = metrics_to_json(m);
  CHECK(json.find("\"precision\": null") != std::string::npos);
}

TEST_CASE("f1 is the harmonic mean and f_beta tends to precision") {
  std::mt19937_64 rng(92);
  for (int i = 0; i < 300; ++i) {
    double p = (1 + rng() % 1000) / 1000.0;
    double r = (1 + rng() % 1000) / 1000.0;
    CHECK(f_beta(p, r, 1.0) == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
    CHECK(f_beta(p, r, 0.01) == doctest::Approx(p).epsilon(1e-3));
  }
}

}  // TEST_SUITE
