#include <doctest.h>

#include <cmath>
#include <random>

#include "bntrim/agreement.hpp"
#include "bntrim/baselines.hpp"
#include "bntrim/errors.hpp"
#include "support/fixtures.hpp"

using namespace bntrim;
using bntrim::testing::gbn4;
using bntrim::testing::gbn4_classifier;
using bntrim::testing::quiz;
using bntrim::testing::quiz_classifier;

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

const InstanceRow& row_with(const InstanceTable& t, std::vector<int> values) {
  for (const auto& r : t.rows)
    if (r.values == values) return r;
  FAIL("row not found");
  return t.rows.front();
}

Classifier trimmed(const Classifier& clf, std::vector<std::string> features, double t) {
  return {clf.class_var, clf.positive_value, std::move(features), t};
}

std::vector<std::string> complement(const Classifier& clf, const std::vector<std::string>& kept) {
  std::vector<std::string> out;
  for (const auto& f : clf.features)
    if (std::find(kept.begin(), kept.end(), f) == kept.end()) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("instance table for quiz Q3") {
  const auto t = build_instance_table(quiz(), quiz_classifier(), {"Q3"});
  REQUIRE(t.rows.size() == 2);
  const auto& plus = row_with(t, {0});
  const auto& minus = row_with(t, {1});
  CHECK(plus.mar == doctest::Approx(0.22));
  CHECK(plus.cpr == doctest::Approx(0.1818).epsilon(1e-3));
  CHECK(plus.pos == doctest::Approx(0.4091).epsilon(1e-3));
  CHECK(minus.mar == doctest::Approx(0.78));
  CHECK(minus.cpr == doctest::Approx(0.0769).epsilon(1e-3));
  CHECK(minus.pos == doctest::Approx(0.2285).epsilon(1e-3));
  CHECK(t.rows.front().cpr <= t.rows.back().cpr);
}

TEST_CASE("gbn4 table for F1 F2") {
  const auto t = build_instance_table(gbn4(), gbn4_classifier(), {"F1", "F2"});
  REQUIRE(t.rows.size() == 4);
  const std::vector<std::vector<int>> by_cpr{{1, 1}, {0, 1}, {0, 0}, {1, 0}};
  const std::vector<double> cpr{0.0, 0.5, 0.324 / 0.468, 0.75};
  const std::vector<double> pos_mar{0.0, 0.3024, 0.1944, 0.036};
  const std::vector<double> neg_mar{0.02, 0.1296, 0.2736, 0.044};
  for (std::size_t i = 0; i < by_cpr.size(); ++i) {
    const auto& r = t.rows[i];
    CHECK(r.values == by_cpr[i]);
    CHECK(r.cpr == doctest::Approx(cpr[i]).epsilon(1e-12));
    CHECK(r.pos * r.mar == doctest::Approx(pos_mar[i]).epsilon(1e-12));
    CHECK((1.0 - r.pos) * r.mar == doctest::Approx(neg_mar[i]).epsilon(1e-12));
  }
  CHECK(round2(t.rows[3].pos * t.rows[3].mar) == doctest::Approx(0.04));
  CHECK(round2(t.rows[1].pos * t.rows[1].mar) == doctest::Approx(0.30));
}

TEST_CASE("full feature set gives indicator POS") {
  const auto t = build_instance_table(gbn4(), gbn4_classifier(), {"F1", "F2", "F3"});
  for (const auto& r : t.rows) CHECK((r.pos == 0.0 || r.pos == 1.0));
  CHECK(mpa(gbn4(), gbn4_classifier(), {"F1", "F2", "F3"}) == doctest::Approx(1.0));
}

TEST_CASE("eca of quiz trimmings") {
  const auto q = quiz();
  const auto a = quiz_classifier();
  CHECK(eca(q, a, trimmed(a, {"Q1", "Q3"}, 0.10)) == doctest::Approx(0.9082).epsilon(1e-9));
  CHECK(eca(q, a, trimmed(a, {"Q3"}, 0.15)) == doctest::Approx(0.6918).epsilon(1e-9));
  CHECK(eca(q, a, a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eca(q, a, trimmed(a, {"C"}, 0.1)), ModelError);
  CHECK_THROWS_AS(eca(q, a, Classifier{"Q1", 0, {"Q2"}, 0.1}), ModelError);
}

TEST_CASE("same-decision probability") {
  const auto q = quiz();
  const auto a = quiz_classifier();
  CHECK(sdp(q, a, {"Q1", "Q2"}, Assignment(q, {{"Q3", "+"}})) ==
        doctest::Approx(0.4091).epsilon(1e-3));
  CHECK(sdp(q, a, {}, Assignment(q, {{"Q3", "+"}})) == doctest::Approx(1.0));
  CHECK(sdp(q, quiz_classifier(0.0), {"Q1", "Q2"}, Assignment(q, {{"Q3", "-"}})) ==
        doctest::Approx(1.0));
}

TEST_CASE("two-threshold expected sdp") {
  const auto q = quiz();
  const auto a = quiz_classifier();
  CHECK(esdp_two_threshold(q, a, 0.07, {}, {"Q1", "Q2", "Q3"}) == doctest::Approx(1.0));
  CHECK(esdp_two_threshold(q, a, 0.15, {"Q1", "Q2"}, {"Q3"}) == doctest::Approx(0.6918).epsilon(1e-9));
  CHECK(esdp_two_threshold(q, a, 0.10, {"Q2"}, {"Q1", "Q3"}) == doctest::Approx(0.9082).epsilon(1e-9));
}

TEST_CASE("mpa values") {
  CHECK(mpa(quiz(), quiz_classifier(), {"Q3"}) == doctest::Approx(0.7318).epsilon(1e-9));
  CHECK(mpa(quiz(), quiz_classifier(), {}) == doctest::Approx(0.7318).epsilon(1e-9));
  CHECK(mpa(quiz(), quiz_classifier(), {"Q1", "Q2", "Q3"}) == doctest::Approx(1.0));
}

TEST_CASE("compute maa on the fixtures") {
  const auto g = maa(gbn4(), gbn4_classifier(), {"F1", "F2"});
  CHECK(std::abs(g.score - 0.5528) < 1e-9);
  CHECK(g.interval.lo == 0.0);
  CHECK(g.interval.hi == doctest::Approx(0.5));
  CHECK(g.interval.contains(g.interval.representative));

  const auto q13 = maa(quiz(), quiz_classifier(), {"Q1", "Q3"});
  CHECK(q13.score == doctest::Approx(0.9082).epsilon(1e-9));
  CHECK(q13.interval.lo == doctest::Approx(0.0308).epsilon(1e-2));
  CHECK(q13.interval.hi == doctest::Approx(0.2));

  const auto q12 = maa(quiz(), quiz_classifier(), {"Q1", "Q2"});
  CHECK(q12.score == doctest::Approx(0.9748).epsilon(1e-9));
  CHECK(q12.interval.lo == doctest::Approx(1.0 / 13.0));
  CHECK(q12.interval.hi == doctest::Approx(1.0 / 3.0));

  const auto q23 = maa(quiz(), quiz_classifier(), {"Q2", "Q3"});
  CHECK(q23.score == doctest::Approx(0.7318).epsilon(1e-9));
  CHECK(q23.interval.all_negative());
  CHECK(q23.interval.contains(q23.interval.representative));
}

TEST_CASE("single row with an even split") {
  InstanceTable t;
  t.rows.push_back(InstanceRow::from(1.0, 0.3, 0.5));
  CHECK(compute_maa(t).score == doctest::Approx(0.5));
  CHECK(table_mpa(t) == doctest::Approx(0.5));
}

TEST_CASE("empty table") {
  InstanceTable t;
  CHECK_THROWS_AS(compute_maa(t), ModelError);
}

TEST_CASE("every point of the returned interval attains the score") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    const auto inst = bntrim::testing::random_instance(rng, i % 2 == 0, 6);
    const AgreementContext ctx(inst.net, inst.clf);
    const FeatureMask m = static_cast<FeatureMask>(rng() & ctx.full_mask());
    const auto table = ctx.instance_table(m);
    const auto r = compute_maa(table);
    const double lo = std::isinf(r.interval.lo) ? 0.0 : r.interval.lo;
    const double hi = r.interval.all_negative() ? 1.0 + 1e-6 : r.interval.hi;
    for (double w : {0.001, 0.25, 0.5, 0.75, 1.0}) {
      const double t = lo + w * (hi - lo);
      if (!r.interval.contains(t)) continue;
      CHECK(table_eca(table, t) == doctest::Approx(r.score).epsilon(1e-12));
    }
    CHECK(table_eca(table, r.interval.representative) == doctest::Approx(r.score).epsilon(1e-12));
  }
}

TEST_CASE("identities against the enumeration oracles on random models") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 80; ++i) {
    const auto inst = bntrim::testing::random_instance(rng, i % 2 == 0, 6);
    const AgreementContext ctx(inst.net, inst.clf);
    const auto kept = bntrim::testing::random_subset(rng, inst.clf);
    const double t = bntrim::uniform01(rng);
    const auto beta = trimmed(inst.clf, kept, t);
    const double e = ctx.eca(ctx.mask_of(kept), t);
    CHECK(e == doctest::Approx(eca_bruteforce(inst.net, inst.clf, beta)).epsilon(1e-12));
    CHECK(e == doctest::Approx(eca(inst.net, inst.clf, beta)).epsilon(1e-12));
    CHECK(e == doctest::Approx(esdp_two_threshold(inst.net, inst.clf, t, complement(inst.clf, kept), kept))
                   .epsilon(1e-12));
    const auto r = ctx.maa(ctx.mask_of(kept));
    CHECK(r.score == doctest::Approx(maa_bruteforce(inst.net, inst.clf, kept).score).epsilon(1e-12));
    CHECK(r.score <= ctx.mpa(ctx.mask_of(kept)) + 1e-9);
  }
}

TEST_CASE("mpa through sdp") {
  // MPA = sum over f' of Pr(f') * max(SDP(f'), 1 - SDP(f')) with X the trimmed features.
  const auto q = quiz();
  const auto a = quiz_classifier();
  double total = 0.0;
  for (const char* v : {"+", "-"}) {
    const Assignment e(q, {{"Q3", v}});
    const double s = sdp(q, a, {"Q1", "Q2"}, e);
    const auto mass = class_mass(q, a, e);
    const double dec_pos = posterior_class(q, a, e) >= a.threshold ? s : 1.0 - s;
    total += mass.total() * std::max(dec_pos, 1.0 - dec_pos);
  }
  CHECK(total == doctest::Approx(mpa(q, a, {"Q3"})).epsilon(1e-12));
}

TEST_CASE("context guards and lookups") {
  const AgreementContext ctx(quiz(), quiz_classifier());
  CHECK(ctx.full_mask() == 7u);
  CHECK(ctx.mask_of({"Q1", "Q3"}) == 5u);
  CHECK(ctx.names_of(5u) == std::vector<std::string>{"Q1", "Q3"});
  CHECK_THROWS_AS(ctx.mask_of({"C"}), ModelError);
  CHECK(ctx.positive_rate() == doctest::Approx(0.2682).epsilon(1e-9));

  std::vector<Variable> vars{{"C", {"+", "-"}}};
  std::vector<Cpt> cpts{{"C", {}, {{0.5, 0.5}}}};
  Classifier big{"C", 0, {}, 0.5};
  for (int i = 0; i < 21; ++i) {
    const std::string n = "F" + std::to_string(i);
    vars.push_back({n, {"a", "b"}});
    cpts.push_back({n, {"C"}, {{0.5, 0.5}, {0.5, 0.5}}});
    big.features.push_back(n);
  }
  const BayesianNetwork wide(vars, cpts);
  CHECK_THROWS_AS(AgreementContext(wide, big), EnumerationGuardError);
}
