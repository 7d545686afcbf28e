#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lglda/corpus.hpp"
#include "lglda/matrix.hpp"
#include "lglda/model.hpp"

namespace lglda::synth {

// Ground-truth parameters of a corpus drawn from the local-global generative
// story.
struct SyntheticSpec {
  int num_topics = 0;
  int num_words = 0;
  int num_locations = 0;
  int docs_per_location = 0;
  int tokens_per_doc = 0;
  // Recorded alongside the parameters; generation uses doc_locality directly.
  double lambda = 1.0;
  std::uint64_t seed = 0;
  MatrixD theta_local;                // L x K
  std::vector<double> theta_global;   // K
  MatrixD phi;                        // K x W
  std::vector<double> doc_locality;   // per document, P(token is local)

  std::size_t num_documents() const {
    return static_cast<std::size_t>(num_locations) * static_cast<std::size_t>(docs_per_location);
  }

  // Throws std::invalid_argument on bad dimensions or non-distribution rows.
  void validate() const;

  bool operator==(const SyntheticSpec&) const = default;
};

struct TokenTruth {
  std::size_t doc_index = 0;
  std::size_t token_index = 0;
  int topic = 0;
  Locality locality = Locality::local;
};

struct Generated {
  Corpus corpus;
  std::vector<TokenTruth> truth;
};

// Six topics over 600 words at 12 locations (by default 80 documents of 12
// tokens each).
// Topics 0-3 are local: each location mixes a primary and a secondary local
// topic. Topics 4-5 are global and shared by every location. Topic-word rows
// are Dirichlet(0.05); document locality rates are Beta(0.5, 0.5), whose mean
// is the default gamma_l / (gamma_l + gamma_g).
SyntheticSpec default_spec(std::uint64_t seed, int docs_per_location = 80, int tokens_per_doc = 12);

inline constexpr int kDefaultLocalTopics = 4;

// Per token: e ~ Bernoulli(doc_locality[d]); z from theta_local[l] if local,
// else theta_global; w ~ phi[z]. Each document draws from its own stream
// derived from (seed, document index). The corpus keeps the full W-word
// vocabulary and is in canonical order.
Generated generate(const SyntheticSpec& spec);

// One line per token: doc_index TAB token_index TAB z TAB e (e is "local" or
// "global").
void write_truth(std::ostream& out, const std::vector<TokenTruth>& truth);

double cosine(std::span<const double> a, std::span<const double> b);

struct Alignment {
  std::vector<std::size_t> truth_to_estimate;  // truth row -> matched estimate row
  std::vector<double> cosines;                 // per truth row
  double mean_cosine = 0.0;
};

// Greedy matching on cosine similarity: repeatedly pair the most similar
// unmatched (truth, estimate) rows. Requires estimate rows >= truth rows.
Alignment align_topics(const MatrixD& estimate, const MatrixD& truth);

}  // namespace lglda::synth
