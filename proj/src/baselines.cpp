#include "lglda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace lglda::baselines {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::lda: return "lda";
    case Kind::local_lda: return "local_lda";
    case Kind::tfidf_kmeans: return "tfidf_kmeans";
  }
  return "?";
}

Kind parse_kind(const std::string& s) {
  if (s == "lda") return Kind::lda;
  if (s == "local_lda") return Kind::local_lda;
  if (s == "tfidf_kmeans") return Kind::tfidf_kmeans;
  throw std::invalid_argument("unknown baseline kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Grouped LDA

GroupedLdaState::GroupedLdaState(const Corpus& corpus, std::vector<std::size_t> token_group,
                                 std::size_t num_groups, int num_topics, double alpha,
                                 double beta, std::vector<int> topics, std::uint64_t seed)
    : num_topics_(num_topics),
      alpha_(alpha),
      beta_(beta),
      token_group_(std::move(token_group)),
      topic_(std::move(topics)),
      group_(num_groups, static_cast<std::size_t>(num_topics)),
      group_total_(num_groups, 0),
      word_(corpus.num_words(), static_cast<std::size_t>(num_topics)),
      topic_total_(static_cast<std::size_t>(num_topics), 0),
      rng_(seed) {
  if (num_topics < 2) throw std::invalid_argument("number of topics must be at least 2");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("priors must be positive");
  for (const auto& d : corpus.documents)
    token_word_.insert(token_word_.end(), d.tokens.begin(), d.tokens.end());
  if (token_group_.size() != token_word_.size() || topic_.size() != token_word_.size())
    throw std::invalid_argument("group or topic vector does not match the corpus token count");
  for (std::size_t i = 0; i < token_word_.size(); ++i) {
    if (token_group_[i] >= num_groups) throw std::invalid_argument("group index out of range");
    if (topic_[i] < 0 || topic_[i] >= num_topics)
      throw std::invalid_argument("topic assignment out of range");
    apply(i, +1);
  }
}

void GroupedLdaState::apply(std::size_t i, int delta) {
  const auto k = static_cast<std::size_t>(topic_[i]);
  const std::size_t g = token_group_[i];
  group_(g, k) += delta;
  group_total_[g] += delta;
  word_(static_cast<std::size_t>(token_word_[i]), k) += delta;
  topic_total_[k] += delta;
}

void GroupedLdaState::remove(std::size_t token) { apply(token, -1); }

void GroupedLdaState::assign(std::size_t token, int k) {
  topic_[token] = k;
  apply(token, +1);
}

std::vector<std::size_t> document_groups(const Corpus& corpus) {
  std::vector<std::size_t> out;
  out.reserve(corpus.num_tokens());
  for (std::size_t d = 0; d < corpus.num_documents(); ++d)
    out.insert(out.end(), corpus.documents[d].tokens.size(), d);
  return out;
}

std::vector<std::size_t> location_groups(const Corpus& corpus) {
  std::vector<std::size_t> out;
  out.reserve(corpus.num_tokens());
  for (const auto& d : corpus.documents)
    out.insert(out.end(), d.tokens.size(), static_cast<std::size_t>(d.location));
  return out;
}

GroupedLdaState init_grouped(const Corpus& corpus, std::vector<std::size_t> token_group,
                             std::size_t num_groups, const Hyperparameters& hp) {
  hp.validate();
  Rng rng(hp.seed);
  std::vector<int> z(corpus.num_tokens());
  for (auto& k : z) k = static_cast<int>(rng.below(static_cast<std::size_t>(hp.num_topics)));
  GroupedLdaState state(corpus, std::move(token_group), num_groups, hp.num_topics,
                        hp.alpha_local, hp.beta, std::move(z), hp.seed);
  state.rng() = rng;
  return state;
}

void grouped_conditional(const GroupedLdaState& s, std::size_t token, std::span<double> out) {
  const std::size_t K = s.num_topics();
  const std::size_t g = s.group(token);
  const WordId w = s.word(token);
  const double group_denom = s.group_total(g) + static_cast<double>(K) * s.alpha();
  const double wbeta = static_cast<double>(s.num_words()) * s.beta();
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = (s.group_count(g, k) + s.alpha()) / group_denom *
             ((s.word_count(w, k) + s.beta()) / (s.topic_total(k) + wbeta));
  }
}

std::vector<double> grouped_conditional(const GroupedLdaState& state, std::size_t token) {
  std::vector<double> out(state.num_topics());
  grouped_conditional(state, token, out);
  return out;
}

void grouped_sweep(GroupedLdaState& state) {
  std::vector<double> weights(state.num_topics());
  for (std::size_t i = 0; i < state.num_tokens(); ++i) {
    state.remove(i);
    grouped_conditional(state, i, weights);
    state.assign(i, static_cast<int>(state.rng().categorical(weights)));
  }
}

MatrixD group_topics(const GroupedLdaState& s) {
  const std::size_t K = s.num_topics();
  MatrixD out(s.num_groups(), K);
  for (std::size_t g = 0; g < s.num_groups(); ++g) {
    const double denom = s.group_total(g) + static_cast<double>(K) * s.alpha();
    for (std::size_t k = 0; k < K; ++k) out(g, k) = (s.group_count(g, k) + s.alpha()) / denom;
  }
  return out;
}

MatrixD topic_words(const GroupedLdaState& s) {
  const std::size_t K = s.num_topics();
  const std::size_t W = s.num_words();
  MatrixD out(K, W);
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = s.topic_total(k) + static_cast<double>(W) * s.beta();
    for (std::size_t w = 0; w < W; ++w)
      out(k, w) = (s.word_count(static_cast<WordId>(w), k) + s.beta()) / denom;
  }
  return out;
}

namespace {

BaselineEstimate make_estimate(Kind kind, const Corpus& corpus, const Hyperparameters& hp) {
  BaselineEstimate est;
  est.kind = kind;
  est.hyperparameters = hp;
  est.vocabulary = corpus.vocabulary;
  est.location_names = corpus.location_names;
  return est;
}

}  // namespace

BaselineEstimate train_lda(const Corpus& corpus, const Hyperparameters& hp) {
  auto state = init_grouped(corpus, document_groups(corpus), corpus.num_documents(), hp);
  for (int it = 0; it < hp.iterations; ++it) grouped_sweep(state);

  auto est = make_estimate(Kind::lda, corpus, hp);
  const MatrixD doc_topics = group_topics(state);
  const std::size_t K = state.num_topics();
  est.location_topics = MatrixD(corpus.num_locations(), K);
  std::vector<std::size_t> docs_at(corpus.num_locations(), 0);
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto l = static_cast<std::size_t>(corpus.documents[d].location);
    ++docs_at[l];
    for (std::size_t k = 0; k < K; ++k) est.location_topics(l, k) += doc_topics(d, k);
  }
  for (std::size_t l = 0; l < corpus.num_locations(); ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      // A location with no documents (possible after a split) gets the uniform prior.
      est.location_topics(l, k) = docs_at[l] ? est.location_topics(l, k) / docs_at[l]
                                             : 1.0 / static_cast<double>(K);
    }
  }
  est.topic_words = topic_words(state);
  return est;
}

BaselineEstimate train_local_lda(const Corpus& corpus, const Hyperparameters& hp) {
  auto state = init_grouped(corpus, location_groups(corpus), corpus.num_locations(), hp);
  for (int it = 0; it < hp.iterations; ++it) grouped_sweep(state);
  auto est = make_estimate(Kind::local_lda, corpus, hp);
  est.location_topics = group_topics(state);
  est.topic_words = topic_words(state);
  return est;
}

// ---------------------------------------------------------------------------
// TF-IDF + k-means

std::vector<SparseVector> location_tfidf(const Corpus& corpus) {
  const std::size_t W = corpus.num_words();
  const double D = static_cast<double>(corpus.num_documents());
  std::vector<std::size_t> df(W, 0);
  std::vector<std::size_t> last_seen(W, std::numeric_limits<std::size_t>::max());
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    for (WordId w : corpus.documents[d].tokens) {
      auto& seen = last_seen[static_cast<std::size_t>(w)];
      if (seen != d) {
        seen = d;
        ++df[static_cast<std::size_t>(w)];
      }
    }
  }
  std::vector<double> idf(W, 0.0);
  for (std::size_t w = 0; w < W; ++w)
    if (df[w] > 0) idf[w] = std::log(D / static_cast<double>(df[w]));

  // Summing raw-count tf-idf over documents equals location count times idf.
  std::vector<SparseVector> out(corpus.num_locations());
  std::vector<std::vector<std::size_t>> counts(corpus.num_locations());
  for (const auto& doc : corpus.documents) {
    auto& c = counts[static_cast<std::size_t>(doc.location)];
    if (c.empty()) c.assign(W, 0);
    for (WordId w : doc.tokens) ++c[static_cast<std::size_t>(w)];
  }
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l].empty()) continue;
    for (std::size_t w = 0; w < W; ++w) {
      const double v = static_cast<double>(counts[l][w]) * idf[w];
      if (v != 0.0) out[l].emplace_back(static_cast<WordId>(w), v);
    }
  }
  return out;
}

namespace {

double squared_norm(const SparseVector& x) {
  double s = 0.0;
  for (const auto& [w, v] : x) s += v * v;
  return s;
}

double squared_distance(const SparseVector& x, double x_norm, std::span<const double> center,
                        double center_norm) {
  double dot = 0.0;
  for (const auto& [w, v] : x) dot += v * center[static_cast<std::size_t>(w)];
  return std::max(0.0, x_norm - 2.0 * dot + center_norm);
}

double dense_norm(std::span<const double> c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s;
}

void set_center(MatrixD& centers, std::size_t j, const SparseVector& x) {
  auto row = centers.row(j);
  std::fill(row.begin(), row.end(), 0.0);
  for (const auto& [w, v] : x) row[static_cast<std::size_t>(w)] = v;
}

}  // namespace

KMeansResult kmeans(const std::vector<SparseVector>& points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, int max_iterations) {
  const std::size_t n = points.size();
  if (k == 0) throw std::invalid_argument("k-means needs at least one cluster");
  {
    std::set<SparseVector> distinct(points.begin(), points.end());
    if (distinct.size() < k) {
      throw std::invalid_argument("only " + std::to_string(distinct.size()) +
                                  " distinct points for " + std::to_string(k) + " clusters");
    }
  }

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = squared_norm(points[i]);

  Rng rng(seed);
  KMeansResult res;
  res.centers = MatrixD(k, dim);
  std::vector<double> center_norms(k, 0.0);

  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.below(n);
  set_center(res.centers, 0, points[first]);
  center_norms[0] = norms[first];
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], norms[i],
                                                         res.centers.row(j - 1),
                                                         center_norms[j - 1]));
    }
    const std::size_t pick = rng.categorical(nearest);
    set_center(res.centers, j, points[pick]);
    center_norms[j] = norms[pick];
  }

  res.assignment.assign(n, k);  // k marks "unassigned"
  std::vector<double> dist(n, 0.0);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = squared_distance(points[i], norms[i], res.centers.row(j), center_norms[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (res.assignment[i] != best) changed = true;
      res.assignment[i] = best;
      dist[i] = best_d;
    }

    std::vector<std::size_t> sizes(k, 0);
    for (auto a : res.assignment) ++sizes[a];
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[res.assignment[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      --sizes[res.assignment[far]];
      res.assignment[far] = j;
      sizes[j] = 1;
      dist[far] = 0.0;
      changed = true;
    }

    std::fill(res.centers.data().begin(), res.centers.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = res.centers.row(res.assignment[i]);
      for (const auto& [w, v] : points[i]) row[static_cast<std::size_t>(w)] += v;
    }
    for (std::size_t j = 0; j < k; ++j) {
      auto row = res.centers.row(j);
      for (double& v : row) v /= static_cast<double>(sizes[j]);
      center_norms[j] = dense_norm(row);
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = res.assignment[i];
      objective += squared_distance(points[i], norms[i], res.centers.row(a), center_norms[a]);
    }
    res.objective.push_back(objective);
    if (!changed) break;
  }
  return res;
}

BaselineEstimate train_tfidf_kmeans(const Corpus& corpus, std::size_t k_clusters,
                                    std::uint64_t seed) {
  const std::size_t W = corpus.num_words();
  if (k_clusters > corpus.num_locations())
    throw std::invalid_argument("more clusters than locations");
  const auto vectors = location_tfidf(corpus);
  const auto km = kmeans(vectors, W, k_clusters, seed);

  BaselineEstimate est;
  est.kind = Kind::tfidf_kmeans;
  est.hyperparameters.num_topics = static_cast<int>(k_clusters);
  est.hyperparameters.seed = seed;
  est.vocabulary = corpus.vocabulary;
  est.location_names = corpus.location_names;
  est.location_topics = MatrixD(corpus.num_locations(), k_clusters);
  for (std::size_t l = 0; l < corpus.num_locations(); ++l)
    est.location_topics(l, km.assignment[l]) = 1.0;

  est.topic_words = MatrixD(k_clusters, W);
  for (std::size_t j = 0; j < k_clusters; ++j) {
    double sum = 0.0;
    for (std::size_t w = 0; w < W; ++w) {
      const double v = std::max(0.0, km.centers(j, w));
      est.topic_words(j, w) = v;
      sum += v;
    }
    for (std::size_t w = 0; w < W; ++w)
      est.topic_words(j, w) = sum > 0.0 ? est.topic_words(j, w) / sum : 1.0 / static_cast<double>(W);
  }
  return est;
}

}  // namespace lglda::baselines
