#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lglda/corpus.hpp"
#include "lglda/matrix.hpp"
#include "lglda/model.hpp"
#include "lglda/rng.hpp"

namespace lglda::baselines {

enum class Kind { lda, local_lda, tfidf_kmeans };

std::string to_string(Kind kind);
Kind parse_kind(const std::string& s);

// Output shared by all comparison methods: one topic distribution per
// location and one word distribution per topic.
struct BaselineEstimate {
  Kind kind = Kind::lda;
  Hyperparameters hyperparameters;
  Vocabulary vocabulary;
  std::vector<std::string> location_names;
  MatrixD location_topics;  // L x K
  MatrixD topic_words;      // K x W

  bool operator==(const BaselineEstimate&) const = default;
};

// Collapsed Gibbs LDA where each token's topic mixture belongs to a group.
// Grouping by document gives standard LDA; grouping by location gives
// LocalLDA.
class GroupedLdaState {
 public:
  GroupedLdaState(const Corpus& corpus, std::vector<std::size_t> token_group,
                  std::size_t num_groups, int num_topics, double alpha, double beta,
                  std::vector<int> topics, std::uint64_t seed);

  std::size_t num_tokens() const { return token_word_.size(); }
  std::size_t num_topics() const { return static_cast<std::size_t>(num_topics_); }
  std::size_t num_words() const { return word_.rows(); }
  std::size_t num_groups() const { return group_.rows(); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  WordId word(std::size_t token) const { return token_word_[token]; }
  std::size_t group(std::size_t token) const { return token_group_[token]; }
  int topic(std::size_t token) const { return topic_[token]; }
  const std::vector<int>& topics() const { return topic_; }

  int group_count(std::size_t g, std::size_t k) const { return group_(g, k); }
  int group_total(std::size_t g) const { return group_total_[g]; }
  int word_count(WordId w, std::size_t k) const { return word_(static_cast<std::size_t>(w), k); }
  int topic_total(std::size_t k) const { return topic_total_[k]; }

  const Matrix<int>& group_counts() const { return group_; }
  const Matrix<int>& word_counts() const { return word_; }

  void remove(std::size_t token);
  void assign(std::size_t token, int k);
  Rng& rng() { return rng_; }

 private:
  void apply(std::size_t token, int delta);

  int num_topics_;
  double alpha_;
  double beta_;
  std::vector<WordId> token_word_;
  std::vector<std::size_t> token_group_;
  std::vector<int> topic_;
  Matrix<int> group_;
  std::vector<int> group_total_;
  Matrix<int> word_;
  std::vector<int> topic_total_;
  Rng rng_;
};

// Group index per token: the document index, or the document's location.
std::vector<std::size_t> document_groups(const Corpus& corpus);
std::vector<std::size_t> location_groups(const Corpus& corpus);

// Random initial topics, then the state.
GroupedLdaState init_grouped(const Corpus& corpus, std::vector<std::size_t> token_group,
                             std::size_t num_groups, const Hyperparameters& hp);

// Unnormalized conditional over K topics for a removed token:
// (n_gk + alpha) / (n_g + K alpha) * (n_wk + beta) / (n_k + W beta).
void grouped_conditional(const GroupedLdaState& state, std::size_t token, std::span<double> out);
std::vector<double> grouped_conditional(const GroupedLdaState& state, std::size_t token);

void grouped_sweep(GroupedLdaState& state);

// Smoothed (n_gk + alpha) / (n_g + K alpha) per group.
MatrixD group_topics(const GroupedLdaState& state);
// Smoothed (n_wk + beta) / (n_k + W beta), K x W.
MatrixD topic_words(const GroupedLdaState& state);

// LDA over documents (alpha = hp.alpha_local); location topics are the mean
// of the smoothed per-document distributions at each location.
BaselineEstimate train_lda(const Corpus& corpus, const Hyperparameters& hp);

// Topics drawn directly from per-location distributions.
BaselineEstimate train_local_lda(const Corpus& corpus, const Hyperparameters& hp);

// --- TF-IDF + k-means -------------------------------------------------------

using SparseVector = std::vector<std::pair<WordId, double>>;

// Per-document tf-idf with raw counts and idf = ln(D / df), summed per
// location. Entries with zero weight are dropped; sorted by word id.
std::vector<SparseVector> location_tfidf(const Corpus& corpus);

struct KMeansResult {
  MatrixD centers;                  // k x dim
  std::vector<std::size_t> assignment;
  std::vector<double> objective;    // within-cluster sum of squares after each Lloyd iteration
};

// Lloyd's algorithm with k-means++ seeding and Euclidean distance. Empty
// clusters are reseeded from the point farthest from its center. Throws
// std::invalid_argument when there are fewer distinct points than k.
KMeansResult kmeans(const std::vector<SparseVector>& points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, int max_iterations = 100);

BaselineEstimate train_tfidf_kmeans(const Corpus& corpus, std::size_t k_clusters,
                                    std::uint64_t seed);

}  // namespace lglda::baselines
