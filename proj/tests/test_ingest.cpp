#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "mvsg/error.hpp"
#include "mvsg/ingest.hpp"

using namespace mvsg;
using mvsg::testing::parse_csv;

TEST(Ingest, ParsesMultiValueCells) {
  auto t = parse_csv("id,email,ip\no1,a@x.com,1.2.3.4|5.6.7.8\no2,b@x.com,1.2.3.4\no3,c@x.com,9.9.9.9\n");
  EXPECT_EQ(t.num_entities(), 3u);
  EXPECT_EQ(t.num_attributes(), 2u);
  EXPECT_EQ(t.attributes()[1], "ip");
  EXPECT_EQ(t.cell(0, 1).size(), 2u);
  EXPECT_EQ(t.cell(1, 1).size(), 1u);
}

TEST(Ingest, DuplicateIdRejected) {
  EXPECT_THROW(parse_csv("id,email\norg1,a\norg1,b\n"), InputError);
  try {
    parse_csv("id,email\norg1,a\norg1,b\n");
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Ingest, EmptyCellIsEmptySet) {
  auto t = parse_csv("id,email,ip\no1,,1.1.1.1\n");
  EXPECT_EQ(t.num_entities(), 1u);
  EXPECT_TRUE(t.cell(0, 0).empty());
}

TEST(Ingest, TrimsAndDedupsTokens) {
  auto t = parse_csv("id,ip\no1, a | b |a \n");
  ASSERT_EQ(t.cell(0, 0).size(), 2u);
  EXPECT_EQ(t.cell(0, 0)[0], "a");
  EXPECT_EQ(t.cell(0, 0)[1], "b");
}

TEST(Ingest, CaseSensitiveByDefault) {
  auto t = parse_csv("id,f\no1,Test|test\n");
  EXPECT_EQ(t.cell(0, 0).size(), 2u);
  LoadOptions lower;
  lower.lowercase = true;
  auto l = parse_csv("id,f\no1,Test|test\n", lower);
  EXPECT_EQ(l.cell(0, 0).size(), 1u);
}

TEST(Ingest, QuotedFieldsAndCustomDelimiters) {
  LoadOptions opts;
  opts.id_column = "org";
  opts.field_delimiter = ';';
  opts.value_delimiter = "/";
  auto t = parse_csv("name;org\n\"x;y/z\";o1\n", opts);
  ASSERT_EQ(t.num_attributes(), 1u);
  EXPECT_EQ(t.entity_ids()[0], "o1");
  ASSERT_EQ(t.cell(0, 0).size(), 2u);
  EXPECT_EQ(t.cell(0, 0)[0], "x;y");
}

TEST(Ingest, StructuralErrors) {
  EXPECT_THROW(parse_csv(""), InputError);
  EXPECT_THROW(parse_csv("name,ip\na,b\n"), InputError);       // no id column
  EXPECT_THROW(parse_csv("id,ip\no1,a,b\n"), InputError);       // field count
  EXPECT_THROW(parse_csv("id,ip,ip\no1,a,b\n"), InputError);    // duplicate attribute
  EXPECT_THROW(parse_csv("id,ip\no1,\"open\n"), InputError);    // unterminated quote
  EXPECT_THROW(load_attribute_table_file("/nonexistent/file.csv"), InputError);
}

TEST(Ingest, EntitiesWithNoValuesRetained) {
  auto t = parse_csv("id,a,b\no1,,\no2,x,\n\n");
  EXPECT_EQ(t.num_entities(), 2u);
}

TEST(Ingest, WriteRoundTrip) {
  auto t = parse_csv("id,email,ip\no1,a,1|2\no2,,3\n");
  std::ostringstream out;
  write_attribute_table(out, t);
  EXPECT_EQ(parse_csv(out.str()), t);
}

TEST(Stopwords, RemovesBlacklistedTokensPerAttribute) {
  auto t = parse_csv(
      "id,file,other\n"
      "u1,Test,Test\nu2,Test|a.jpg,x\nu3,Test,x\nu4,Test,x\nu5,Test,x\nu6,b.jpg,x\n");
  Blacklist bl{{"file", {"Test"}}};
  auto s = apply_stopwords(t, bl);
  for (std::size_t e = 0; e < 5; ++e) {
    for (const auto& tok : s.cell(e, 0)) EXPECT_NE(tok, "Test");
  }
  EXPECT_EQ(s.cell(1, 0).size(), 1u);
  EXPECT_EQ(s.cell(0, 1), t.cell(0, 1));  // scoped to "file"
  EXPECT_EQ(apply_stopwords(s, bl), s);   // idempotent
}

TEST(Stopwords, EmptyOrMisScopedBlacklistIsIdentity) {
  auto t = parse_csv("id,a,b\n1,x,y\n2,x,y\n");
  EXPECT_EQ(apply_stopwords(t, {}), t);
  EXPECT_EQ(apply_stopwords(t, Blacklist{{"b", {"x"}}}), t);
}

TEST(Stopwords, FileFormat) {
  std::istringstream in("# comment\n[file]\nTest\n\n[ip]\n0.0.0.0\n");
  auto bl = load_stopwords(in);
  ASSERT_EQ(bl.size(), 2u);
  EXPECT_TRUE(bl["file"].count("Test"));
  std::istringstream bad("Test\n");
  EXPECT_THROW(load_stopwords(bad), InputError);
}

TEST(Ief, WorkedValues) {
  EXPECT_NEAR(ief_weight(100, 1), std::pow(100.0 / std::log(2.0), 2), 1e-9);
  EXPECT_NEAR(ief_weight(100, 1), 20813.7, 0.1);
  EXPECT_NEAR(ief_weight(100, 100), 469.50, 0.01);  // (100 / ln 101)^2
}

TEST(Ief, StrictlyDecreasingInFrequency) {
  for (std::size_t k = 1; k < 500; ++k) EXPECT_GT(ief_weight(500, k), ief_weight(500, k + 1));
}

TEST(Ief, ComputedAfterStopwordsAndDeterministic) {
  auto t = parse_csv("id,f\n1,Test|a\n2,Test|a\n3,Test\n");
  auto s = apply_stopwords(t, Blacklist{{"f", {"Test"}}});
  auto ief = compute_ief(s);
  EXPECT_EQ(ief.weight(0, "Test"), 0.0);
  EXPECT_EQ(ief.weight(0, "unseen"), 0.0);
  EXPECT_DOUBLE_EQ(ief.weight(0, "a"), ief_weight(3, 2));
  EXPECT_EQ(compute_ief(s), ief);
  EXPECT_THROW(compute_ief(AttributeTable({}, {"f"})), PreconditionError);
}
