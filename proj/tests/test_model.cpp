#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lglda/baselines.hpp"
#include "lglda/model.hpp"
#include "support/enumeration.hpp"
#include "support/toy.hpp"

using namespace lglda;

namespace {

std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

long long family_sum(const Matrix<int>& m) {
  long long s = 0;
  for (int v : m.data()) s += v;
  return s;
}

bool non_negative(const Matrix<int>& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](int v) { return v >= 0; });
}

Hyperparameters small_hp(int K = 2) {
  Hyperparameters hp;
  hp.num_topics = K;
  hp.iterations = 10;
  return hp;
}

// Random (z, e) per token.
LgldaState random_state(const Corpus& c, const Hyperparameters& hp, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> z(c.num_tokens());
  std::vector<Locality> e(c.num_tokens());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = static_cast<int>(rng.below(static_cast<std::size_t>(hp.num_topics)));
    e[i] = rng.bernoulli(0.5) ? Locality::local : Locality::global;
  }
  return LgldaState(c, hp, z, e);
}

}  // namespace

TEST_CASE("hyperparameter defaults and validation") {
  Hyperparameters hp;
  CHECK(hp.num_topics == 20);
  CHECK(hp.alpha_local == 0.1);
  CHECK(hp.alpha_global == 0.1);
  CHECK(hp.beta == 0.1);
  CHECK(hp.gamma_local == 0.5);
  CHECK(hp.gamma_global == 0.5);
  CHECK(hp.lambda == 0.6);
  CHECK(hp.iterations == 500);
  CHECK(hp.global_counts == GlobalCountsMode::corpus_wide);
  CHECK(hp.phi == PhiMode::shared);
  CHECK(hp.document_factor == DocumentFactor::topic);
  CHECK_NOTHROW(hp.validate());

  auto bad = hp;
  bad.num_topics = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CHECK(hp.weight(Locality::local) == doctest::Approx(0.375));
  CHECK(hp.weight(Locality::global) == doctest::Approx(0.625));
}

TEST_CASE("mode names round-trip") {
  for (auto m : {GlobalCountsMode::corpus_wide, GlobalCountsMode::per_location})
    CHECK(parse_global_counts_mode(to_string(m)) == m);
  for (auto m : {PhiMode::shared, PhiMode::split}) CHECK(parse_phi_mode(to_string(m)) == m);
  for (auto m : {DocumentFactor::topic, DocumentFactor::document, DocumentFactor::none})
    CHECK(parse_document_factor(to_string(m)) == m);
  CHECK_THROWS(parse_phi_mode("dual"));
}

TEST_CASE("init on a single token puts one count in each family") {
  const auto c = toy::corpus(1, 1, {{0, {0}}});
  const auto s = init(c, small_hp());
  CHECK(family_sum(s.doc_counts()) == 1);
  CHECK(family_sum(s.loc_counts()) + family_sum(s.glob_counts()) == 1);
  CHECK(family_sum(s.word_counts()[0]) == 1);
  CHECK(s.counts_consistent());
}

TEST_CASE("init is deterministic and conserves tokens") {
  const auto c = toy::random_corpus(30, 3, 20, 1, 12, 5);
  const auto hp = small_hp(4);
  const auto a = init(c, hp);
  const auto b = init(c, hp);
  CHECK(a == b);
  CHECK(family_sum(a.doc_counts()) == static_cast<long long>(c.num_tokens()));
  auto other = hp;
  other.seed = 2;
  CHECK_FALSE(init(c, other) == a);
}

TEST_CASE("conditional on a lone token: uniform at lambda 1, 3:1 at lambda 3") {
  const auto c = toy::corpus(1, 1, {{0, {0}}});
  auto hp = small_hp(3);
  hp.lambda = 1.0;
  auto s = init(c, hp);
  s.remove(0);
  for (double p : normalized(gibbs_conditional(s, 0))) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  hp.lambda = 3.0;
  auto s3 = init(c, hp);
  s3.remove(0);
  const auto w = gibbs_conditional(s3, 0);
  for (int k = 0; k < 3; ++k) CHECK(w[static_cast<std::size_t>(k)] / w[3 + static_cast<std::size_t>(k)] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("conditional equals the ratio of exact joints in every mode") {
  const auto c = toy::corpus(3, 2, {{0, {0, 1, 2, 0}}, {1, {1, 1, 2}}, {0, {2, 0}}});
  for (auto df : {DocumentFactor::topic, DocumentFactor::document, DocumentFactor::none})
    for (auto gc : {GlobalCountsMode::corpus_wide, GlobalCountsMode::per_location})
      for (auto pm : {PhiMode::shared, PhiMode::split}) {
        auto hp = small_hp(3);
        hp.document_factor = df;
        hp.global_counts = gc;
        hp.phi = pm;
        hp.lambda = 1.7;
        hp.gamma_local = 0.3;
        hp.alpha_global = 0.4;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          auto s = random_state(c, hp, seed);
          const std::size_t token = seed % c.num_tokens();
          auto z = s.topics();
          auto e = s.localities();
          s.remove(token);
          const auto cond = normalized(gibbs_conditional(s, token));

          std::vector<double> joint(6);
          for (std::size_t j = 0; j < 6; ++j) {
            e[token] = j < 3 ? Locality::local : Locality::global;
            z[token] = static_cast<int>(j % 3);
            joint[j] = oracle::lglda_log_joint(c, hp, e, z);
          }
          const double mx = *std::max_element(joint.begin(), joint.end());
          for (auto& v : joint) v = std::exp(v - mx);
          joint = normalized(joint);
          for (std::size_t j = 0; j < 6; ++j) CHECK(cond[j] == doctest::Approx(joint[j]).epsilon(1e-10));
        }
      }
}

TEST_CASE("single-token chain reproduces the analytic conditional") {
  const auto c = toy::corpus(1, 1, {{0, {0}}});
  auto hp = small_hp(2);
  hp.lambda = 3.0;
  auto s = init(c, hp);
  s.remove(0);
  const auto expected = normalized(gibbs_conditional(s, 0));
  s.assign(0, Locality::local, 0);

  std::vector<double> freq(4, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    sweep(s);
    freq[index(s.locality(0)) * 2 + static_cast<std::size_t>(s.topic(0))] += 1.0 / n;
  }
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(freq[j] - expected[j]) < 0.02 * expected[j]);
}

TEST_CASE("chain matches the enumeration posterior in per-location split mode") {
  const auto c = toy::corpus(2, 2, {{0, {0, 1}}, {1, {1, 1}}});
  auto hp = small_hp(2);
  hp.global_counts = GlobalCountsMode::per_location;
  hp.phi = PhiMode::split;
  hp.document_factor = DocumentFactor::document;
  const auto exact = oracle::lglda_posterior(c, hp);
  auto s = init(c, hp);
  for (int i = 0; i < 1000; ++i) sweep(s);
  std::vector<double> freq(exact.size(), 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    sweep(s);
    freq[oracle::lglda_code(s.localities(), s.topics(), 2)] += 1.0 / n;
  }
  CHECK(oracle::total_variation(freq, exact) < 0.05);
}

TEST_CASE("sweeps conserve counts") {
  const auto c = toy::random_corpus(50, 4, 40, 1, 15, 11);
  for (auto gc : {GlobalCountsMode::corpus_wide, GlobalCountsMode::per_location})
    for (auto pm : {PhiMode::shared, PhiMode::split}) {
      auto hp = small_hp(5);
      hp.global_counts = gc;
      hp.phi = pm;
      auto s = init(c, hp);
      const auto T = static_cast<long long>(c.num_tokens());
      for (int it = 0; it < 5; ++it) {
        sweep(s);
        CHECK(family_sum(s.doc_counts()) == T);
        CHECK(family_sum(s.loc_counts()) + family_sum(s.glob_counts()) == T);
        long long words = 0;
        for (const auto& m : s.word_counts()) words += family_sum(m);
        CHECK(words == T);
        CHECK(non_negative(s.doc_counts()));
        CHECK(s.counts_consistent());
        for (std::size_t d = 0; d < c.num_documents(); ++d)
          CHECK(s.doc_locality_total(d, Locality::local) + s.doc_locality_total(d, Locality::global) ==
                static_cast<int>(c.documents[d].tokens.size()));
      }
    }
}

TEST_CASE("permuting topic labels permutes the conditional") {
  const auto c = toy::random_corpus(8, 2, 5, 2, 6, 3);
  const auto hp = small_hp(4);
  const std::vector<int> perm{2, 0, 3, 1};
  auto a = random_state(c, hp, 9);
  std::vector<int> z = a.topics();
  for (auto& k : z) k = perm[static_cast<std::size_t>(k)];
  LgldaState b(c, hp, z, a.localities());
  for (std::size_t i = 0; i < c.num_tokens(); ++i) {
    auto sa = a, sb = b;
    sa.remove(i);
    sb.remove(i);
    const auto ca = gibbs_conditional(sa, i);
    const auto cb = gibbs_conditional(sb, i);
    for (std::size_t e = 0; e < 2; ++e)
      for (std::size_t k = 0; k < 4; ++k)
        CHECK(cb[e * 4 + static_cast<std::size_t>(perm[k])] == doctest::Approx(ca[e * 4 + k]).epsilon(1e-14));
  }
}

TEST_CASE("training is bit-identical under a fixed seed") {
  const auto c = toy::random_corpus(40, 3, 30, 3, 10, 4);
  auto hp = small_hp(4);
  hp.iterations = 20;
  const auto a = train(c, hp);
  const auto b = train(c, hp);
  CHECK(a.state == b.state);
  CHECK(a.estimate == b.estimate);
}

TEST_CASE("estimates are smoothed distributions") {
  const auto c = toy::random_corpus(40, 3, 30, 3, 10, 8);
  for (auto pm : {PhiMode::shared, PhiMode::split}) {
    auto hp = small_hp(4);
    hp.phi = pm;
    hp.iterations = 15;
    hp.average_last = 5;
    const auto est = train(c, hp).estimate;
    auto check_rows = [](const MatrixD& m) {
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        for (double v : row) CHECK(v > 0.0);
      }
    };
    check_rows(est.theta_local);
    check_rows(est.theta_global);
    for (const auto& p : est.phi) check_rows(p);
    CHECK(est.phi.size() == (pm == PhiMode::split ? 2u : 1u));
  }
}

TEST_CASE("location topics from counts") {
  std::vector<WordId> ten(10, 0);
  const auto c = toy::corpus(1, 2, {{0, ten}, {1, {0, 0, 0}}});
  auto hp = small_hp(2);
  std::vector<int> z(13, 0);
  std::vector<Locality> e(13, Locality::local);
  for (std::size_t i = 10; i < 13; ++i) e[i] = Locality::global;
  const auto est = estimate(LgldaState(c, hp, z, e), c);
  const auto row = location_topics(est, 0);
  CHECK(row[0] == doctest::Approx(10.1 / 10.2).epsilon(1e-14));
  CHECK(row[1] == doctest::Approx(0.1 / 10.2).epsilon(1e-14));
  const auto empty = location_topics(est, 1);
  CHECK(empty[0] == doctest::Approx(0.5));
  CHECK(empty[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(location_topics(est, 2), std::out_of_range);
  CHECK_THROWS_AS(location_topics(est, -1), std::out_of_range);
}

TEST_CASE("concatenated distribution") {
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  const auto sym = concat_distribution(u, u, 0.5, 0.5, 1.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(sym[k] == doctest::Approx(sym[4 + k]));
  CHECK(std::accumulate(sym.begin(), sym.end(), 0.0) == doctest::Approx(1.0));

  const auto big = concat_distribution(u, u, 0.5, 0.5, 1e6);
  CHECK(std::accumulate(big.begin() + 4, big.end(), 0.0) < 1e-5);

  const auto mixed = concat_distribution(u, u, 0.5, 0.5, 0.6);
  CHECK(std::accumulate(mixed.begin(), mixed.begin() + 4, 0.0) == doctest::Approx(0.375).epsilon(1e-12));
}

namespace {

ModelEstimate hand_estimate(double lambda) {
  ModelEstimate est;
  est.hyperparameters.num_topics = 2;
  est.hyperparameters.lambda = lambda;
  est.vocabulary = Vocabulary({"a", "b"});
  est.location_names = {"x"};
  est.theta_local = MatrixD(1, 2);
  est.theta_local(0, 0) = 0.8;
  est.theta_local(0, 1) = 0.2;
  est.theta_global = MatrixD(1, 2);
  est.theta_global(0, 0) = 0.3;
  est.theta_global(0, 1) = 0.7;
  MatrixD phi(2, 2);
  phi(0, 0) = 0.9;
  phi(0, 1) = 0.1;
  phi(1, 0) = 0.4;
  phi(1, 1) = 0.6;
  est.phi = {phi};
  return est;
}

}  // namespace

TEST_CASE("locality score of a one-word document by hand") {
  const auto est = hand_estimate(2.0);
  const Document doc{"d", 0, {0}};
  // local: 2/3 * (0.8*0.9 + 0.2*0.4) = 2/3 * 0.80; global: 1/3 * (0.3*0.9 + 0.7*0.4) = 1/3 * 0.55
  CHECK(locality_score(est, doc) == doctest::Approx((2.0 / 3.0 * 0.80) / (1.0 / 3.0 * 0.55)).epsilon(1e-12));
  const auto m = word_locality(est, 0, 0);
  CHECK(m.local + m.global == doctest::Approx(1.0));
}

TEST_CASE("locality score is 1 when local and global mass agree") {
  auto est = hand_estimate(1.0);
  est.theta_global = est.theta_local;
  CHECK(locality_score(est, Document{"d", 0, {0, 1, 1}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fold-in mixture and document probability") {
  const auto est = hand_estimate(0.6);
  const Document doc{"d", 0, {0, 1, 0}};
  const auto m = fold_in_mixture(est, doc);
  CHECK(m.local + m.global == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.local > 0.0);
  CHECK(m.global > 0.0);
  double expected = 0.0;
  for (WordId w : doc.tokens) {
    const double pl = 0.8 * est.phi[0](0, static_cast<std::size_t>(w)) + 0.2 * est.phi[0](1, static_cast<std::size_t>(w));
    const double pg = 0.3 * est.phi[0](0, static_cast<std::size_t>(w)) + 0.7 * est.phi[0](1, static_cast<std::size_t>(w));
    expected += std::log(m.local * pl + m.global * pg);
  }
  CHECK(document_log_probability(est, doc) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("all-local per-location chain without document factor is LocalLDA") {
  const auto c = toy::random_corpus(6, 2, 6, 2, 5, 21);
  auto hp = small_hp(3);
  hp.global_counts = GlobalCountsMode::per_location;
  hp.document_factor = DocumentFactor::none;
  hp.lambda = 2.3;
  Rng rng(4);
  std::vector<int> z(c.num_tokens());
  for (auto& k : z) k = static_cast<int>(rng.below(3));
  LgldaState s(c, hp, z, std::vector<Locality>(z.size(), Locality::local));
  baselines::GroupedLdaState g(c, baselines::location_groups(c), c.num_locations(), 3, hp.alpha_local,
                               hp.beta, z, 1);
  for (std::size_t i = 0; i < c.num_tokens(); ++i) {
    auto si = s;
    auto gi = g;
    si.remove(i);
    gi.remove(i);
    auto full = gibbs_conditional(si, i);
    const auto local = normalized({full.begin(), full.begin() + 3});
    const auto reference = normalized(baselines::grouped_conditional(gi, i));
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(local[k] - reference[k]) < 1e-12);
  }
}

TEST_CASE("a dominant local prior drives the literal conditional to LocalLDA") {
  const auto c = toy::random_corpus(6, 2, 6, 2, 5, 22);
  auto hp = small_hp(3);
  hp.global_counts = GlobalCountsMode::per_location;
  hp.gamma_local = 1e12;
  Rng rng(5);
  std::vector<int> z(c.num_tokens());
  for (auto& k : z) k = static_cast<int>(rng.below(3));
  LgldaState s(c, hp, z, std::vector<Locality>(z.size(), Locality::local));
  baselines::GroupedLdaState g(c, baselines::location_groups(c), c.num_locations(), 3, hp.alpha_local,
                               hp.beta, z, 1);
  for (std::size_t i = 0; i < c.num_tokens(); ++i) {
    auto si = s;
    auto gi = g;
    si.remove(i);
    gi.remove(i);
    const auto full = normalized(gibbs_conditional(si, i));
    const auto reference = normalized(baselines::grouped_conditional(gi, i));
    CHECK(std::accumulate(full.begin() + 3, full.end(), 0.0) < 1e-9);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(full[k] - reference[k]) < 1e-9);
  }
}
