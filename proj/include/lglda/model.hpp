#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lglda/corpus.hpp"
#include "lglda/matrix.hpp"
#include "lglda/rng.hpp"

namespace lglda {

enum class Locality : std::uint8_t { local = 0, global = 1 };

inline constexpr std::size_t index(Locality e) { return static_cast<std::size_t>(e); }

// Scope of the global-topic counts: one corpus-wide distribution, or one per
// location (the literal reading of the sampling conditional).
enum class GlobalCountsMode { corpus_wide, per_location };

// Whether local and global tokens share one topic-word matrix or keep two.
enum class PhiMode { shared, split };

// Per-document locality factor of the conditional:
//   topic:    (n_d[e][k] + gamma_e) / (n_d[.][k] + gamma_l + gamma_g)
//   document: (n_d[e][.] + gamma_e) / (n_d[.][.] + gamma_l + gamma_g)
//   none:     1
enum class DocumentFactor { topic, document, none };

std::string to_string(GlobalCountsMode mode);
std::string to_string(PhiMode mode);
std::string to_string(DocumentFactor mode);
GlobalCountsMode parse_global_counts_mode(const std::string& s);
PhiMode parse_phi_mode(const std::string& s);
DocumentFactor parse_document_factor(const std::string& s);

struct Hyperparameters {
  int num_topics = 20;
  double alpha_local = 0.1;
  double alpha_global = 0.1;
  double beta = 0.1;
  double gamma_local = 0.5;
  double gamma_global = 0.5;
  // Local-global weight ratio; local block weighted lambda/(lambda+1).
  double lambda = 0.6;
  int iterations = 500;
  std::uint64_t seed = 1;
  GlobalCountsMode global_counts = GlobalCountsMode::corpus_wide;
  PhiMode phi = PhiMode::shared;
  DocumentFactor document_factor = DocumentFactor::topic;
  // Average the estimates of the last N sweeps; 0 uses the final sweep only.
  int average_last = 0;

  // Throws std::invalid_argument on non-positive priors, K < 2, lambda <= 0,
  // iterations < 1, or average_last outside [0, iterations].
  void validate() const;

  double weight(Locality e) const {
    return e == Locality::local ? lambda / (lambda + 1.0) : 1.0 / (lambda + 1.0);
  }
  double alpha(Locality e) const { return e == Locality::local ? alpha_local : alpha_global; }
  double gamma(Locality e) const { return e == Locality::local ? gamma_local : gamma_global; }

  bool operator==(const Hyperparameters&) const = default;
};

// Complete sampler state: per-token assignments plus every count matrix the
// collapsed conditional reads. Counts always match the assignments of the
// tokens that are currently assigned.
class LgldaState {
 public:
  LgldaState(const Corpus& corpus, const Hyperparameters& hp, std::vector<int> topics,
             std::vector<Locality> localities);

  const Hyperparameters& hyperparameters() const { return hp_; }
  std::size_t num_tokens() const { return token_word_.size(); }
  std::size_t num_topics() const { return static_cast<std::size_t>(hp_.num_topics); }
  std::size_t num_words() const { return num_words_; }
  std::size_t num_documents() const { return doc_location_.size(); }
  std::size_t num_locations() const { return num_locations_; }
  std::size_t num_global_slots() const { return glob_total_.size(); }
  std::size_t num_phi_slots() const { return word_.size(); }

  WordId word(std::size_t token) const { return token_word_[token]; }
  std::size_t document(std::size_t token) const { return token_doc_[token]; }
  LocationId location(std::size_t token) const { return doc_location_[token_doc_[token]]; }
  int topic(std::size_t token) const { return topic_[token]; }
  Locality locality(std::size_t token) const { return locality_[token]; }
  const std::vector<int>& topics() const { return topic_; }
  const std::vector<Locality>& localities() const { return locality_; }

  std::size_t global_slot(LocationId l) const {
    return hp_.global_counts == GlobalCountsMode::per_location ? static_cast<std::size_t>(l) : 0;
  }
  std::size_t phi_slot(Locality e) const { return hp_.phi == PhiMode::split ? index(e) : 0; }

  int doc_count(std::size_t d, Locality e, std::size_t k) const {
    return doc_(d * 2 + index(e), k);
  }
  // Tokens of document d with locality e, over all topics.
  int doc_locality_total(std::size_t d, Locality e) const { return doc_total_[d * 2 + index(e)]; }
  int loc_count(LocationId l, std::size_t k) const { return loc_(static_cast<std::size_t>(l), k); }
  int loc_total(LocationId l) const { return loc_total_[static_cast<std::size_t>(l)]; }
  int glob_count(std::size_t slot, std::size_t k) const { return glob_(slot, k); }
  int glob_total(std::size_t slot) const { return glob_total_[slot]; }
  int word_count(std::size_t phi_slot, WordId w, std::size_t k) const {
    return word_[phi_slot](static_cast<std::size_t>(w), k);
  }
  int topic_total(std::size_t phi_slot, std::size_t k) const { return topic_total_[phi_slot][k]; }

  // Raw count families, for invariant checks.
  const Matrix<int>& doc_counts() const { return doc_; }
  const Matrix<int>& loc_counts() const { return loc_; }
  const Matrix<int>& glob_counts() const { return glob_; }
  const std::vector<Matrix<int>>& word_counts() const { return word_; }

  // Decrements the token's current assignment from all counts.
  void remove(std::size_t token);
  // Sets the token's assignment and increments all counts.
  void assign(std::size_t token, Locality e, int k);

  Rng& rng() { return rng_; }

  // Recomputes every count from the assignments and compares.
  bool counts_consistent() const;

  bool operator==(const LgldaState& other) const;

 private:
  void apply(std::size_t token, int delta);

  Hyperparameters hp_;
  std::size_t num_words_ = 0;
  std::size_t num_locations_ = 0;
  std::vector<WordId> token_word_;
  std::vector<std::uint32_t> token_doc_;
  std::vector<LocationId> doc_location_;
  std::vector<int> topic_;
  std::vector<Locality> locality_;

  Matrix<int> doc_;   // (2 * D) x K, row 2d + locality
  std::vector<int> doc_total_;  // 2 * D
  Matrix<int> loc_;   // L x K, local tokens
  std::vector<int> loc_total_;
  Matrix<int> glob_;  // slots x K, global tokens
  std::vector<int> glob_total_;
  std::vector<Matrix<int>> word_;  // per phi slot, W x K
  std::vector<std::vector<int>> topic_total_;

  Rng rng_;
};

// Point estimates of the trained distributions.
struct ModelEstimate {
  Hyperparameters hyperparameters;
  Vocabulary vocabulary;
  std::vector<std::string> location_names;
  MatrixD theta_local;               // L x K
  MatrixD theta_global;              // 1 x K (corpus-wide) or L x K (per-location)
  std::vector<MatrixD> phi;          // one K x W matrix (shared) or two (local, global)

  double lambda() const { return hyperparameters.lambda; }
  std::size_t num_topics() const { return theta_local.cols(); }
  std::size_t num_locations() const { return theta_local.rows(); }
  std::size_t num_words() const { return phi.empty() ? 0 : phi.front().cols(); }

  std::span<const double> global_row(LocationId l) const {
    return theta_global.row(theta_global.rows() == 1 ? 0 : static_cast<std::size_t>(l));
  }
  const MatrixD& phi_for(Locality e) const { return phi.size() == 1 ? phi[0] : phi[index(e)]; }

  bool operator==(const ModelEstimate&) const = default;
};

// Uniformly random (topic, locality) per token, drawn from hp.seed.
LgldaState init(const Corpus& corpus, const Hyperparameters& hp);

// Unnormalized conditional over (locality, topic) for a token whose current
// assignment has already been removed. Layout: index(e) * K + k, local first.
void gibbs_conditional(const LgldaState& state, std::size_t token, std::span<double> out);
std::vector<double> gibbs_conditional(const LgldaState& state, std::size_t token);

// Resamples every token once, in document order.
void sweep(LgldaState& state);

ModelEstimate estimate(const LgldaState& state, const Corpus& corpus);

struct TrainResult {
  LgldaState state;
  ModelEstimate estimate;
};

// Called after every sweep with the 1-based sweep number.
using SweepCallback = std::function<void(int sweep, const LgldaState&)>;

TrainResult train(const Corpus& corpus, const Hyperparameters& hp,
                  const SweepCallback& on_sweep = {});

// Local topic distribution of a location. Throws std::out_of_range.
std::span<const double> location_topics(const ModelEstimate& est, LocationId location);

// Concatenated 2K distribution: local block lambda/(lambda+1) * theta_l[k] *
// p(e=l|w), global block 1/(lambda+1) * theta_g[k] * p(e=g|w), normalized.
std::vector<double> concat_distribution(std::span<const double> theta_local_row,
                                        std::span<const double> theta_global,
                                        double evidence_local, double evidence_global,
                                        double lambda);

// Local and global generation mass of one word at a location, normalized to
// sum to one over both localities.
struct LocalityMarginal {
  double local = 0.0;
  double global = 0.0;
};
LocalityMarginal word_locality(const ModelEstimate& est, LocationId location, WordId w);

// Ratio of summed local to summed global word marginals over the document.
double locality_score(const ModelEstimate& est, const Document& doc);

// Per-document locality mixture weights: the lambda-weighted document
// locality rate, fitted to the document's words with theta and phi fixed.
struct DocumentMixture {
  double local = 0.0;
  double global = 0.0;
};
DocumentMixture fold_in_mixture(const ModelEstimate& est, const Document& doc);

// log p(w_d) under the fitted document mixture.
double document_log_probability(const ModelEstimate& est, const Document& doc);

}  // namespace lglda
