#include "lglda/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lglda/rng.hpp"

namespace lglda::synth {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument(std::string(what) + " does not sum to 1");
}

std::string padded(const char* prefix, std::size_t value, std::size_t count) {
  int width = 1;
  for (std::size_t c = count > 0 ? count - 1 : 0; c >= 10; c /= 10) ++width;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
  return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (num_topics < 1 || num_words < 1 || num_locations < 1 || docs_per_location < 1 ||
      tokens_per_doc < 1)
    throw std::invalid_argument("synthetic spec dimensions must be at least 1");
  const auto K = static_cast<std::size_t>(num_topics);
  if (theta_local.rows() != static_cast<std::size_t>(num_locations) || theta_local.cols() != K)
    throw std::invalid_argument("theta_local has the wrong shape");
  if (theta_global.size() != K) throw std::invalid_argument("theta_global has the wrong length");
  if (phi.rows() != K || phi.cols() != static_cast<std::size_t>(num_words))
    throw std::invalid_argument("phi has the wrong shape");
  if (doc_locality.size() != num_documents())
    throw std::invalid_argument("doc_locality has the wrong length");
  for (std::size_t l = 0; l < theta_local.rows(); ++l) check_distribution(theta_local.row(l), "theta_local row");
  check_distribution(theta_global, "theta_global");
  for (std::size_t k = 0; k < K; ++k) check_distribution(phi.row(k), "phi row");
  for (double r : doc_locality)
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("doc_locality outside [0, 1]");
}

SyntheticSpec default_spec(std::uint64_t seed, int docs_per_location, int tokens_per_doc) {
  SyntheticSpec s;
  s.num_topics = 6;
  s.num_words = 600;
  s.num_locations = 12;
  s.docs_per_location = docs_per_location;
  s.tokens_per_doc = tokens_per_doc;
  s.lambda = 1.0;
  s.seed = seed;

  Rng rng(seed);
  const auto K = static_cast<std::size_t>(s.num_topics);
  const auto L = static_cast<std::size_t>(s.num_locations);
  const auto W = static_cast<std::size_t>(s.num_words);
  const std::size_t local = kDefaultLocalTopics;

  s.theta_local = MatrixD(L, K);
  for (std::size_t l = 0; l < L; ++l) {
    // Every third location is dominated by one of the global topics. Seen only
    // through the corpus-wide mixture, the two global topics would be
    // indistinguishable from a single merged topic.
    const bool global_site = l % 3 == 2;
    const std::size_t primary = global_site ? local + (l / 3) % 2 : l % local;
    const std::size_t secondary = global_site ? l % local : (l + 1 + l / local) % local;
    const double weight = 0.6 + 0.3 * rng.uniform();
    s.theta_local(l, primary) = weight;
    s.theta_local(l, secondary) = 1.0 - weight;
  }

  s.theta_global.assign(K, 0.0);
  const double split = 0.4 + 0.2 * rng.uniform();
  s.theta_global[local] = split;
  s.theta_global[local + 1] = 1.0 - split;

  s.phi = MatrixD(K, W);
  for (std::size_t k = 0; k < K; ++k) {
    const auto row = rng.dirichlet(W, 0.05);
    std::copy(row.begin(), row.end(), s.phi.row(k).begin());
  }

  s.doc_locality.resize(s.num_documents());
  for (auto& r : s.doc_locality) {
    const double a = rng.gamma(0.5);
    const double b = rng.gamma(0.5);
    r = a + b > 0.0 ? a / (a + b) : 0.5;
  }
  s.validate();
  return s;
}

Generated generate(const SyntheticSpec& spec) {
  spec.validate();
  const auto W = static_cast<std::size_t>(spec.num_words);
  const auto L = static_cast<std::size_t>(spec.num_locations);
  const auto per_loc = static_cast<std::size_t>(spec.docs_per_location);

  Generated out;
  std::vector<std::string> words(W);
  for (std::size_t w = 0; w < W; ++w) words[w] = padded("w", w, W);
  out.corpus.vocabulary = Vocabulary(std::move(words));
  for (std::size_t l = 0; l < L; ++l) out.corpus.location_names.push_back(padded("loc", l, L));

  for (std::size_t d = 0; d < spec.num_documents(); ++d) {
    Rng rng(derive_seed(spec.seed, d));
    const std::size_t l = d / per_loc;
    Document doc{padded("d", d, spec.num_documents()), static_cast<LocationId>(l), {}};
    for (int t = 0; t < spec.tokens_per_doc; ++t) {
      const bool is_local = rng.bernoulli(spec.doc_locality[d]);
      const auto theta = is_local ? spec.theta_local.row(l) : std::span<const double>(spec.theta_global);
      const std::size_t z = rng.categorical(theta);
      const std::size_t w = rng.categorical(spec.phi.row(z));
      doc.tokens.push_back(static_cast<WordId>(w));
      out.truth.push_back({d, static_cast<std::size_t>(t), static_cast<int>(z),
                           is_local ? Locality::local : Locality::global});
    }
    out.corpus.documents.push_back(std::move(doc));
  }
  return out;
}

void write_truth(std::ostream& out, const std::vector<TokenTruth>& truth) {
  for (const auto& t : truth) {
    out << t.doc_index << '\t' << t.token_index << '\t' << t.topic << '\t'
        << (t.locality == Locality::local ? "local" : "global") << '\n';
  }
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

Alignment align_topics(const MatrixD& estimate, const MatrixD& truth) {
  const std::size_t R = truth.rows();
  const std::size_t E = estimate.rows();
  if (E < R) throw std::invalid_argument("fewer estimated topics than true topics");
  if (estimate.cols() != truth.cols()) throw std::invalid_argument("topic rows differ in length");
  MatrixD sim(R, E);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t e = 0; e < E; ++e) sim(r, e) = cosine(truth.row(r), estimate.row(e));

  Alignment a;
  a.truth_to_estimate.assign(R, E);
  a.cosines.assign(R, 0.0);
  std::vector<bool> used_truth(R, false), used_est(E, false);
  for (std::size_t step = 0; step < R; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t br = 0, be = 0;
    for (std::size_t r = 0; r < R; ++r) {
      if (used_truth[r]) continue;
      for (std::size_t e = 0; e < E; ++e) {
        if (!used_est[e] && sim(r, e) > best) {
          best = sim(r, e);
          br = r;
          be = e;
        }
      }
    }
    used_truth[br] = used_est[be] = true;
    a.truth_to_estimate[br] = be;
    a.cosines[br] = best;
  }
  double sum = 0.0;
  for (double c : a.cosines) sum += c;
  a.mean_cosine = R ? sum / static_cast<double>(R) : 0.0;
  return a;
}

}  // namespace lglda::synth
