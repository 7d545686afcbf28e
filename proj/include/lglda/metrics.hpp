#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lglda/baselines.hpp"
#include "lglda/corpus.hpp"
#include "lglda/matrix.hpp"
#include "lglda/model.hpp"

namespace lglda::metrics {

// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(std::span<const double> p);

// Mean entropy of the per-location topic distributions (rows).
double topic_entropy(const MatrixD& location_topics);

// Mean entropy over topics of the column-normalized location distribution.
// Throws std::domain_error for a topic with zero total mass.
double location_entropy(const MatrixD& location_topics);

double kl_divergence(std::span<const double> p, std::span<const double> q);
// (KL(p||q) + KL(q||p)) / 2
double symmetric_kl(std::span<const double> p, std::span<const double> q);
// Mean symmetric KL over unordered topic pairs. Throws for fewer than 2 topics.
double mean_pairwise_kl(const MatrixD& topic_words);

using RankedWords = std::vector<std::pair<WordId, double>>;
// Highest-weight words per topic, ties broken by ascending word id. n is
// truncated to the vocabulary size.
std::vector<RankedWords> top_words(const MatrixD& topic_words, std::size_t n);

struct PerplexityResult {
  double perplexity = 0.0;
  std::size_t tokens = 0;  // tokens scored
  std::size_t oov = 0;     // tokens skipped as out of vocabulary
};

// exp(-sum_d log p(w_d) / sum_d N_d) given a per-token probability callback.
// Tokens with ids outside [0, num_words) are skipped and tallied.
PerplexityResult perplexity(const Corpus& eval, std::size_t num_words,
                            const std::function<double(const Document&)>& doc_log_prob);

// Document mixture of local and global blocks fitted per document.
PerplexityResult perplexity(const ModelEstimate& est, const Corpus& eval);
// p(w|d) = sum_k location_topics[l][k] * topic_words[k][w].
PerplexityResult perplexity(const baselines::BaselineEstimate& est, const Corpus& eval);

struct MetricsReport {
  double perplexity = 0.0;
  double topic_entropy = 0.0;
  double location_entropy = 0.0;
  double mean_pairwise_kl = 0.0;
  std::size_t eval_tokens = 0;
  std::size_t oov = 0;
  std::vector<RankedWords> top_words;
};

MetricsReport evaluate(const ModelEstimate& est, const Corpus& eval, std::size_t top_n = 10);
// Perplexity and KL are NaN for tfidf_kmeans, which is not a probabilistic model.
MetricsReport evaluate(const baselines::BaselineEstimate& est, const Corpus& eval,
                       std::size_t top_n = 10);

// Fixed-precision number formatting shared by every report writer.
std::string format_number(double v);

// Flat `key=value` lines.
std::string key_values(const MetricsReport& report);

std::string csv_header();
std::string csv_row(const std::string& model, double lambda, int num_topics,
                    const MetricsReport& report, std::uint64_t seed, int iterations);

// TSV of `topic rank word weight` rows.
std::string top_words_table(const std::vector<RankedWords>& top, const Vocabulary& vocabulary);

}  // namespace lglda::metrics
