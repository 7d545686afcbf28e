#include "lglda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lglda::metrics {

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double topic_entropy(const MatrixD& location_topics) {
  if (location_topics.rows() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t l = 0; l < location_topics.rows(); ++l) sum += entropy(location_topics.row(l));
  return sum / static_cast<double>(location_topics.rows());
}

double location_entropy(const MatrixD& location_topics) {
  const std::size_t L = location_topics.rows();
  const std::size_t K = location_topics.cols();
  if (K == 0) return 0.0;
  std::vector<double> column(L);
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double mass = 0.0;
    for (std::size_t l = 0; l < L; ++l) mass += location_topics(l, k);
    if (!(mass > 0.0))
      throw std::domain_error("topic " + std::to_string(k) + " has no mass at any location");
    for (std::size_t l = 0; l < L; ++l) column[l] = location_topics(l, k) / mass;
    sum += entropy(column);
  }
  return sum / static_cast<double>(K);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  return kl;
}

double symmetric_kl(std::span<const double> p, std::span<const double> q) {
  return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

double mean_pairwise_kl(const MatrixD& topic_words) {
  const std::size_t K = topic_words.rows();
  if (K < 2) throw std::invalid_argument("pairwise KL needs at least two topics");
  double sum = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) sum += symmetric_kl(topic_words.row(i), topic_words.row(j));
  return sum / (static_cast<double>(K) * static_cast<double>(K - 1) / 2.0);
}

std::vector<RankedWords> top_words(const MatrixD& topic_words, std::size_t n) {
  const std::size_t W = topic_words.cols();
  n = std::min(n, W);
  std::vector<RankedWords> out(topic_words.rows());
  std::vector<WordId> ids(W);
  for (std::size_t k = 0; k < topic_words.rows(); ++k) {
    const auto row = topic_words.row(k);
    std::iota(ids.begin(), ids.end(), 0);
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](WordId a, WordId b) {
                        const double wa = row[static_cast<std::size_t>(a)];
                        const double wb = row[static_cast<std::size_t>(b)];
                        return wa != wb ? wa > wb : a < b;
                      });
    for (std::size_t r = 0; r < n; ++r) out[k].emplace_back(ids[r], row[static_cast<std::size_t>(ids[r])]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perplexity

PerplexityResult perplexity(const Corpus& eval, std::size_t num_words,
                            const std::function<double(const Document&)>& doc_log_prob) {
  PerplexityResult res;
  double log_sum = 0.0;
  Document in_vocab;
  for (const auto& doc : eval.documents) {
    in_vocab.doc_id = doc.doc_id;
    in_vocab.location = doc.location;
    in_vocab.tokens.clear();
    for (WordId w : doc.tokens) {
      if (w >= 0 && static_cast<std::size_t>(w) < num_words)
        in_vocab.tokens.push_back(w);
      else
        ++res.oov;
    }
    if (in_vocab.tokens.empty()) continue;
    log_sum += doc_log_prob(in_vocab);
    res.tokens += in_vocab.tokens.size();
  }
  if (res.tokens == 0) throw std::invalid_argument("evaluation corpus has no scorable tokens");
  res.perplexity = std::exp(-log_sum / static_cast<double>(res.tokens));
  return res;
}

PerplexityResult perplexity(const ModelEstimate& est, const Corpus& eval) {
  return perplexity(eval, est.num_words(),
                    [&](const Document& d) { return document_log_probability(est, d); });
}

PerplexityResult perplexity(const baselines::BaselineEstimate& est, const Corpus& eval) {
  const auto& theta = est.location_topics;
  const auto& phi = est.topic_words;
  return perplexity(eval, phi.cols(), [&](const Document& d) {
    const auto row = theta.row(static_cast<std::size_t>(d.location));
    double logp = 0.0;
    for (WordId w : d.tokens) {
      double p = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) p += row[k] * phi(k, static_cast<std::size_t>(w));
      logp += std::log(p);
    }
    return logp;
  });
}

MetricsReport evaluate(const ModelEstimate& est, const Corpus& eval, std::size_t top_n) {
  MetricsReport r;
  const auto ppl = perplexity(est, eval);
  r.perplexity = ppl.perplexity;
  r.eval_tokens = ppl.tokens;
  r.oov = ppl.oov;
  r.topic_entropy = topic_entropy(est.theta_local);
  r.location_entropy = location_entropy(est.theta_local);
  r.mean_pairwise_kl = mean_pairwise_kl(est.phi_for(Locality::local));
  r.top_words = top_words(est.phi_for(Locality::local), top_n);
  return r;
}

MetricsReport evaluate(const baselines::BaselineEstimate& est, const Corpus& eval,
                       std::size_t top_n) {
  MetricsReport r;
  r.topic_entropy = topic_entropy(est.location_topics);
  r.location_entropy = location_entropy(est.location_topics);
  r.top_words = top_words(est.topic_words, top_n);
  if (est.kind == baselines::Kind::tfidf_kmeans) {
    r.perplexity = std::numeric_limits<double>::quiet_NaN();
    r.mean_pairwise_kl = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const auto ppl = perplexity(est, eval);
  r.perplexity = ppl.perplexity;
  r.eval_tokens = ppl.tokens;
  r.oov = ppl.oov;
  r.mean_pairwise_kl = mean_pairwise_kl(est.topic_words);
  return r;
}

// ---------------------------------------------------------------------------
// Report formatting

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string key_values(const MetricsReport& r) {
  std::ostringstream out;
  out << "perplexity=" << format_number(r.perplexity) << '\n'
      << "topic_entropy=" << format_number(r.topic_entropy) << '\n'
      << "location_entropy=" << format_number(r.location_entropy) << '\n'
      << "mean_pairwise_kl=" << format_number(r.mean_pairwise_kl) << '\n'
      << "eval_tokens=" << r.eval_tokens << '\n'
      << "oov_tokens=" << r.oov << '\n';
  return out.str();
}

std::string csv_header() {
  return "model,lambda,K,perplexity,topic_entropy,location_entropy,mean_pairwise_kl,seed,iterations";
}

std::string csv_row(const std::string& model, double lambda, int num_topics,
                    const MetricsReport& r, std::uint64_t seed, int iterations) {
  std::ostringstream out;
  out << model << ',' << format_number(lambda) << ',' << num_topics << ','
      << format_number(r.perplexity) << ',' << format_number(r.topic_entropy) << ','
      << format_number(r.location_entropy) << ',' << format_number(r.mean_pairwise_kl) << ','
      << seed << ',' << iterations;
  return out.str();
}

std::string top_words_table(const std::vector<RankedWords>& top, const Vocabulary& vocabulary) {
  std::ostringstream out;
  out << "topic\trank\tword\tweight\n";
  for (std::size_t k = 0; k < top.size(); ++k)
    for (std::size_t r = 0; r < top[k].size(); ++r)
      out << k << '\t' << r + 1 << '\t' << vocabulary.word(top[k][r].first) << '\t'
          << format_number(top[k][r].second) << '\n';
  return out.str();
}

}  // namespace lglda::metrics
