#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "lglda/corpus.hpp"
#include "support/toy.hpp"

using namespace lglda;

namespace {

Corpus from_text(const std::string& text, std::size_t min_tokens = kDefaultMinTokens,
                 IngestStats* stats = nullptr) {
  std::istringstream in(text);
  return ingest(in, min_tokens, stats);
}

std::string canonical(const Corpus& c) {
  std::ostringstream out;
  write_canonical(out, c);
  return out.str();
}

}  // namespace

TEST_CASE("short documents are dropped") {
  IngestStats stats;
  const auto c = from_text("a\td1\tx y z w v\na\td2\tx y\nb\td3\tx y z q\n", 3, &stats);
  CHECK(c.num_documents() == 2);
  CHECK(stats.lines == 3);
  CHECK(stats.dropped_short == 1);
  CHECK(c.num_tokens() == 9);
}

TEST_CASE("minimal corpus") {
  const auto c = from_text("locA\td1\tw w w");
  CHECK(c.num_locations() == 1);
  CHECK(c.num_words() == 1);
  REQUIRE(c.num_documents() == 1);
  CHECK(c.documents[0].tokens == std::vector<WordId>{0, 0, 0});
}

TEST_CASE("a location whose documents are all filtered disappears") {
  const auto c = from_text("a\td1\tx y z\nb\td2\tx\nc\td3\tu v w\n");
  CHECK(c.location_names == std::vector<std::string>{"a", "c"});
  std::set<LocationId> used;
  for (const auto& d : c.documents) used.insert(d.location);
  CHECK(used == std::set<LocationId>{0, 1});
  // The dropped document's word does not survive on its own.
  CHECK(c.vocabulary.words() == std::vector<std::string>{"u", "v", "w", "x", "y", "z"});
}

TEST_CASE("vocabulary is exactly the surviving tokens, with dense ids") {
  const auto c = from_text("a\td1\tb a c a\nb\td2\tonly\na\td0\tc c d\n");
  CHECK(c.vocabulary.words() == std::vector<std::string>{"a", "b", "c", "d"});
  for (std::size_t i = 0; i < c.vocabulary.size(); ++i)
    CHECK(c.vocabulary.find(c.vocabulary.word(static_cast<WordId>(i))) == static_cast<WordId>(i));
  CHECK_FALSE(c.vocabulary.find("only").has_value());
  for (const auto& d : c.documents)
    for (WordId w : d.tokens) CHECK(static_cast<std::size_t>(w) < c.num_words());
}

TEST_CASE("canonical form re-ingests to the same corpus") {
  const auto c = from_text("zz\tq\tb a c\n\naa\tr\tc c c c\naa\tp\ta b b\n");
  CHECK(c.documents[0].doc_id == "p");
  CHECK(c.documents[1].doc_id == "r");
  const auto text = canonical(c);
  CHECK(from_text(text) == c);
  CHECK(canonical(from_text(text)) == text);
}

TEST_CASE("malformed lines report their line number") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      from_text(text);
    } catch (const CorpusError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("a\td\tx y z\nno tabs here\n") == 2);
  CHECK(line_of("a\td\tx  y z\n") == 1);
  CHECK(line_of("a\td\tx y z\n\n\ta\tx y z\n") == 3);
  CHECK(line_of("a\td\tx y z\na\te\tx y z\textra\n") == 2);
  CHECK_THROWS_AS(from_text("a\td\tx y\n"), CorpusError);
  CHECK_THROWS_AS(from_text(""), CorpusError);
  CHECK_THROWS_AS(ingest(std::string("/nonexistent/corpus.txt")), CorpusError);
}

TEST_CASE("reading against a fixed vocabulary") {
  const auto base = from_text("a\td1\tx y z\nb\td2\tx x y\n");
  std::istringstream ok("b\te1\ty y z\n");
  const auto c = ingest_with_vocabulary(ok, base.vocabulary, base.location_names, 1);
  CHECK(c.vocabulary == base.vocabulary);
  CHECK(c.documents[0].location == 1);

  std::istringstream oov("a\te2\tx new z\n");
  CHECK_THROWS_AS(ingest_with_vocabulary(oov, base.vocabulary, base.location_names, 1), CorpusError);
  std::istringstream oov2("a\te2\tx new z\n");
  std::size_t skipped = 0;
  const auto kept = ingest_with_vocabulary(oov2, base.vocabulary, base.location_names, 1, &skipped);
  CHECK(skipped == 1);
  CHECK(kept.documents[0].tokens.size() == 2);

  std::istringstream badloc("c\te3\tx y z\n");
  CHECK_THROWS_AS(ingest_with_vocabulary(badloc, base.vocabulary, base.location_names, 1), CorpusError);
  std::istringstream empty("");
  CHECK(ingest_with_vocabulary(empty, base.vocabulary, base.location_names, 1).num_documents() == 0);
}

TEST_CASE("split") {
  std::vector<toy::Doc> docs;
  for (int d = 0; d < 10; ++d) docs.push_back({d % 2, {0, 1, 2}});
  const auto c = toy::corpus(3, 2, docs);

  SUBCASE("zero fraction holds nothing out") {
    const auto [train, held] = split(c, 0.0, 1);
    CHECK(train == c);
    CHECK(held.num_documents() == 0);
  }
  SUBCASE("fraction 0.2 of 10 documents") {
    const auto [train, held] = split(c, 0.2, 7);
    CHECK(held.num_documents() == 2);
    CHECK(train.num_documents() == 8);
    std::set<LocationId> locs;
    for (const auto& d : train.documents) locs.insert(d.location);
    CHECK(locs.size() == 2);
    CHECK(train.vocabulary == c.vocabulary);
    CHECK(held.vocabulary == c.vocabulary);
    CHECK(held.location_names == c.location_names);
    const auto again = split(c, 0.2, 7);
    CHECK(again.first == train);
    CHECK(again.second == held);
  }
  SUBCASE("every location keeps a training document") {
    const auto [train, held] = split(c, 0.8, 3);
    CHECK(held.num_documents() == 8);
    std::set<LocationId> locs;
    for (const auto& d : train.documents) locs.insert(d.location);
    CHECK(locs.size() == 2);
  }
  SUBCASE("too large a fraction is an error") {
    CHECK_THROWS_AS(split(c, 0.9, 1), CorpusError);
    CHECK_THROWS_AS(split(c, 1.0, 1), CorpusError);
  }
}

TEST_CASE("token count equals the sum over surviving lines") {
  const auto c = from_text("a\t1\tx y z\na\t2\tx\nb\t3\tp q r s t\n", 2);
  CHECK(c.num_tokens() == 8);
}
