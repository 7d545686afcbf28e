#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "lglda/serialize.hpp"
#include "support/toy.hpp"

using namespace lglda;

namespace {

template <class T>
io::StoredModel round_trip(const T& est) {
  std::ostringstream out;
  io::write_model(out, est);
  std::istringstream in(out.str());
  return io::read_model(in);
}

}  // namespace

TEST_CASE("lglda estimates round-trip bit-exactly") {
  const auto c = toy::random_corpus(25, 3, 20, 3, 9, 6);
  for (auto pm : {PhiMode::shared, PhiMode::split}) {
    Hyperparameters hp;
    hp.num_topics = 4;
    hp.iterations = 10;
    hp.phi = pm;
    hp.lambda = 1.0 / 3.0;
    hp.seed = 0xfedcba9876543210ULL;
    hp.global_counts = GlobalCountsMode::per_location;
    hp.document_factor = DocumentFactor::document;
    const auto est = train(c, hp).estimate;
    const auto back = round_trip(est);
    REQUIRE(std::holds_alternative<ModelEstimate>(back));
    CHECK(std::get<ModelEstimate>(back) == est);
  }
}

TEST_CASE("baseline estimates round-trip with their kind") {
  const auto c = toy::random_corpus(25, 3, 20, 3, 9, 7);
  Hyperparameters hp;
  hp.num_topics = 3;
  hp.iterations = 10;
  const auto lda = baselines::train_lda(c, hp);
  const auto km = baselines::train_tfidf_kmeans(c, 3, 2);
  CHECK(std::get<baselines::BaselineEstimate>(round_trip(lda)) == lda);
  CHECK(std::get<baselines::BaselineEstimate>(round_trip(km)) == km);
}

TEST_CASE("corrupt artifacts are rejected") {
  const auto c = toy::random_corpus(10, 2, 6, 3, 5, 1);
  Hyperparameters hp;
  hp.num_topics = 2;
  hp.iterations = 3;
  std::ostringstream out;
  io::write_model(out, train(c, hp).estimate);
  const std::string good = out.str();

  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_model(in);
  };
  CHECK_NOTHROW(read(good));

  auto tampered = good;
  tampered.replace(tampered.find("\"w0\""), 4, "\"zz\"");
  CHECK_THROWS_AS(read(tampered), io::FormatError);

  auto version = good;
  version.replace(version.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS_AS(read(version), io::FormatError);

  CHECK_THROWS_AS(read("{\"format\": \"other\"}"), io::FormatError);
  CHECK_THROWS_AS(read("not json"), io::FormatError);
  CHECK_THROWS_AS(io::read_model_file("/nonexistent/model.json"), io::FormatError);
}

TEST_CASE("hash rendering") {
  CHECK(io::hash_hex(0) == "0000000000000000");
  CHECK(io::hash_hex(0xabcULL) == "0000000000000abc");
}
