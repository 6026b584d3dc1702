#include "barsample/score.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "barsample/error.hpp"
#include "fixtures.hpp"

namespace barsample {
namespace {

using test::mei;
using test::one_staff_measure;

const std::string kNote = R"(<note pname="c" oct="4" dur="4"/>)";

std::string numbered_measures(MeasureNumber first, MeasureNumber count) {
  std::string body;
  for (MeasureNumber n = first; n < first + count; ++n) body += one_staff_measure(n, kNote);
  return body;
}

TEST(ParseScoreTest, NinetySevenMeasuresKeepTheirNumbers) {
  for (const MeasureNumber first : {0, 1}) {
    const auto score = parse_score(mei(numbered_measures(first, 97)), Whitelist::defaults());
    ASSERT_EQ(score.measures().size(), 97u);
    EXPECT_EQ(score.measures().front().number, first);
    EXPECT_EQ(score.measures().back().number, first + 96);
  }
}

TEST(ParseScoreTest, EmptyDocumentHasNoMeasures) {
  const auto score = parse_score(mei(""), Whitelist::defaults());
  EXPECT_TRUE(score.measures().empty());
  EXPECT_EQ(measure_census(score).total, 0);
}

TEST(ParseScoreTest, MeasureNumberErrors) {
  EXPECT_THROW(parse_score(mei(one_staff_measure(5, kNote) + one_staff_measure(5, kNote)), Whitelist::defaults()),
               DuplicateMeasureError);
  EXPECT_THROW(parse_score(mei(R"(<measure n="12a"/>)"), Whitelist::defaults()), AttributeError);
  EXPECT_THROW(parse_score(mei(R"(<measure n="-1"/>)"), Whitelist::defaults()), AttributeError);
  EXPECT_THROW(parse_score(mei(R"(<measure/>)"), Whitelist::defaults()), AttributeError);
  EXPECT_THROW(parse_score("<mei><measure n=\"1\"></mei>", Whitelist::defaults()), ParseError);
}

TEST(ParseScoreTest, OnlyWhitelistedKindsAreElements) {
  const auto doc = mei(one_staff_measure(1, R"(<beam><note/><chord><note/><note><accid/></note></chord></beam><space/><clef/>)"));
  const auto score = parse_score(doc, Whitelist::defaults());
  std::vector<std::string> kinds;
  for (const auto& e : score.measures()[0].elements()) kinds.push_back(e.kind);
  EXPECT_EQ(kinds, (std::vector<std::string>{"beam", "note", "chord", "note", "note", "accid"}));

  const auto notes_only = parse_score(doc, Whitelist::from_text("# just notes\nnote\n\n"));
  EXPECT_EQ(measure_census(notes_only).total, 3);
}

TEST(ParseScoreTest, ElementsAreStavesConcatenatedAndControlEventsJoinTheirStaff) {
  const auto doc = mei(R"(<measure n="1">
    <staff n="2"><layer><rest/></layer></staff>
    <staff n="1"><layer><note xml:id="a"/><note xml:id="b"/></layer></staff>
    <slur staff="1" startid="#a" endid="#b"/>
    <dynam staff="2 1" tstamp="1"/>
    <tempo tstamp="1">Allegro</tempo>
  </measure>)");
  const auto m = parse_score(doc, Whitelist::defaults()).measures().at(0);
  ASSERT_EQ(m.staves.size(), 3u);
  EXPECT_EQ(m.staves[0].number, 0);  // tempo names no staff
  EXPECT_EQ(m.staves[1].number, 1);
  EXPECT_EQ(m.staves[2].number, 2);
  EXPECT_EQ(m.staves[1].elements.size(), 3u);  // two notes and the slur
  EXPECT_EQ(m.staves[2].elements.back().kind, "dynam");

  std::vector<NotationElement> concatenated;
  for (const auto& s : m.staves) concatenated.insert(concatenated.end(), s.elements.begin(), s.elements.end());
  EXPECT_EQ(m.elements(), concatenated);
}

TEST(ParseScoreTest, AnchorsAreIndependentOfXmlIds) {
  auto make = [](const std::string& prefix) {
    return mei("<measure n=\"4\"><staff n=\"1\"><layer><note xml:id=\"" + prefix + "1\"/><note xml:id=\"" + prefix +
               "2\"/><note xml:id=\"" + prefix + "3\"/></layer></staff><slur staff=\"1\" startid=\"#" + prefix +
               "1\" endid=\"#" + prefix + "3\"/></measure>");
  };
  const auto a = parse_score(make("x"), Whitelist::defaults());
  const auto b = parse_score(make("y"), Whitelist::defaults());
  EXPECT_EQ(a.measures()[0].elements(), b.measures()[0].elements());
  const auto slur = a.measures()[0].elements().back();
  EXPECT_EQ(slur.attributes.at("startid"), "m4.s1.0");
  EXPECT_EQ(slur.attributes.at("endid"), "m4.s1.2");
  EXPECT_EQ(slur.attributes.count("xml:id"), 0u);
}

TEST(ParseScoreTest, SpannerOutsideMeasureCountsTowardItsStart) {
  const auto doc = mei(one_staff_measure(1, R"(<note xml:id="n1"/>)") + one_staff_measure(2, R"(<note xml:id="n2"/>)") +
                       R"(<slur startid="#n2" endid="#n1"/><slur startid="#nowhere"/>)");
  const auto c = measure_census(parse_score(doc, Whitelist::defaults()));
  EXPECT_EQ(c.counts.at(1), 1);
  EXPECT_EQ(c.counts.at(2), 2);
  EXPECT_EQ(c.total, 3);
}

TEST(ParseScoreTest, BeamPositionsAreDerived) {
  const auto doc = mei(one_staff_measure(1, R"(<beam><note/><rest/><chord><note/></chord></beam><note/>)"));
  const auto els = parse_score(doc, Whitelist::defaults()).measures()[0].elements();
  ASSERT_EQ(els.size(), 6u);
  EXPECT_EQ(els[1].attributes.at("beam-pos"), "i");
  EXPECT_EQ(els[2].attributes.at("beam-pos"), "m");
  EXPECT_EQ(els[3].attributes.at("beam-pos"), "t");
  EXPECT_EQ(els[4].attributes.count("beam-pos"), 0u);  // note inside the chord
  EXPECT_EQ(els[5].attributes.count("beam-pos"), 0u);
}

// Per-kind counts of the first-print encoding of Op. 33 No. 3.
TEST(CensusTest, ElementKindFixtureTotals1311) {
  const std::vector<std::pair<std::string, int>> kinds = {
      {"beam", 221}, {"note", 850}, {"rest", 23}, {"artic", 30}, {"dynam", 50}, {"slur", 51},
      {"chord", 17}, {"accid", 54}, {"tie", 15}};
  std::vector<std::string> layers(60);
  std::size_t slot = 0;
  for (const auto& [kind, count] : kinds)
    for (int i = 0; i < count; ++i) layers[slot++ % layers.size()] += "<" + kind + "/>";
  std::string body;
  for (std::size_t i = 0; i < layers.size(); ++i) body += one_staff_measure(static_cast<MeasureNumber>(i + 1), layers[i]);

  const auto score = parse_score(mei(body), Whitelist::defaults());
  EXPECT_EQ(measure_census(score).total, 1311);
  const auto by_kind = kind_census(score);
  EXPECT_EQ(by_kind.at("note"), 850);
  EXPECT_EQ(by_kind.at("beam"), 221);
  EXPECT_EQ(by_kind.at("slur"), 51);
  EXPECT_EQ(by_kind.at("accid"), 54);
}

TEST(CensusTest, EmptyMeasuresCountZero) {
  const auto c = measure_census(parse_score(mei(R"(<measure n="1"/><measure n="2"><staff n="1"/></measure>)"),
                                            Whitelist::defaults()));
  EXPECT_EQ(c.counts.size(), 2u);
  EXPECT_EQ(c.counts.at(1), 0);
  EXPECT_EQ(c.counts.at(2), 0);
  EXPECT_EQ(c.total, 0);
}

class ExtractTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::string body;
    std::mt19937 rng(7);
    for (MeasureNumber n = 1; n <= 100; ++n) {
      std::string layer;
      const int k = static_cast<int>(rng() % 6);
      for (int i = 0; i < k; ++i) layer += "<note xml:id=\"m" + std::to_string(n) + "n" + std::to_string(i) + "\"/>";
      body += one_staff_measure(n, layer);
      if (n == 30) body += R"(<scoreDef key.sig="3s"/>)";
      if (k > 0) body += "<dynam startid=\"#m" + std::to_string(n) + "n0\"/>";
    }
    score_ = std::make_unique<Score>(parse_score(mei(body), Whitelist::defaults(), "bda"));
  }
  std::unique_ptr<Score> score_;
};

TEST_F(ExtractTest, AllMeasuresIsIdentityModuloSerialization) {
  const auto all = score_->measure_numbers();
  const auto sub = extract_sample_document(*score_, all);
  const auto reparsed = parse_score(emit(sub), Whitelist::defaults());
  EXPECT_EQ(measure_census(reparsed).counts, measure_census(*score_).counts);
  EXPECT_EQ(emit(sub), emit(*score_));
}

TEST_F(ExtractTest, TwoMeasureSelectionIsSelfContained) {
  const std::vector<MeasureNumber> sel{25, 26};
  const auto sub = extract_sample_document(*score_, sel);
  EXPECT_EQ(sub.measure_numbers(), sel);
  const auto text = emit(sub);
  EXPECT_NE(text.find("staffDef"), std::string::npos);
  EXPECT_NE(text.find("key.sig=\"2f\""), std::string::npos);
  EXPECT_NE(text.find("key.sig=\"3s\""), std::string::npos);  // mid-piece change kept
  EXPECT_EQ(parse_score(text, Whitelist::defaults()).measure_numbers(), sel);
}

TEST_F(ExtractTest, UnknownMeasureIsSelectionError) {
  const std::vector<MeasureNumber> sel{25, 101};
  EXPECT_THROW(extract_sample_document(*score_, sel), SelectionError);
}

TEST_F(ExtractTest, CensusOfExtractIsRestrictionOfFullCensus) {
  const auto full = measure_census(*score_);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto numbers = score_->measure_numbers();
    std::shuffle(numbers.begin(), numbers.end(), rng);
    numbers.resize(1 + rng() % 20);
    std::sort(numbers.begin(), numbers.end());
    const auto sub = parse_score(emit(extract_sample_document(*score_, numbers)), Whitelist::defaults());
    const auto c = measure_census(sub);
    std::int64_t expected_total = 0;
    for (const auto n : numbers) {
      EXPECT_EQ(c.counts.at(n), full.counts.at(n)) << "measure " << n;
      expected_total += full.counts.at(n);
    }
    EXPECT_EQ(c.counts.size(), numbers.size());
    EXPECT_EQ(c.total, expected_total);
  }
}

TEST(AlignmentTest, Partitions) {
  const auto a = parse_score(mei(numbered_measures(1, 85)), Whitelist::defaults());
  const auto b = parse_score(mei(numbered_measures(1, 86)), Whitelist::defaults());
  const auto same = validate_alignment(a, a);
  EXPECT_EQ(same.shared.size(), 85u);
  EXPECT_TRUE(same.comparable());

  const auto extra = validate_alignment(b, a);
  EXPECT_EQ(extra.only_left, std::vector<MeasureNumber>{86});
  EXPECT_TRUE(extra.only_right.empty());
  EXPECT_FALSE(extra.comparable());

  const auto c = parse_score(mei(numbered_measures(200, 3)), Whitelist::defaults());
  const auto disjoint = validate_alignment(a, c);
  EXPECT_TRUE(disjoint.shared.empty());
  EXPECT_EQ(disjoint.only_left.size(), 85u);
  EXPECT_EQ(disjoint.only_right.size(), 3u);
}

}  // namespace
}  // namespace barsample
