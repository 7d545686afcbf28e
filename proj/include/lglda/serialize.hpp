#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "lglda/baselines.hpp"
#include "lglda/model.hpp"
#include "lglda/synthgen.hpp"

namespace lglda::io {

// Model artifacts are JSON documents:
//
//   {
//     "format": "lglda-estimate",
//     "version": 1,
//     "kind": "lglda" | "lda" | "local_lda" | "tfidf_kmeans",
//     "hyperparameters": { "num_topics": ..., "alpha_local": ..., ... },
//     "vocabulary_hash": "<16 hex digits, FNV-1a of the vocabulary>",
//     "vocabulary": [word, ...],            // index = word id
//     "locations": [name, ...],             // index = location id
//     // kind == "lglda":
//     "theta_local": matrix, "theta_global": matrix, "phi": [matrix, ...]
//     // baselines:
//     "location_topics": matrix, "topic_words": matrix
//   }
//
// A matrix is {"rows": r, "cols": c, "data": [row-major values]}. Numbers are
// written in shortest round-trip form, so reading an artifact back yields
// bit-identical values.
inline constexpr const char* kFormatName = "lglda-estimate";
inline constexpr int kFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using StoredModel = std::variant<ModelEstimate, baselines::BaselineEstimate>;

void write_model(std::ostream& out, const ModelEstimate& est);
void write_model(std::ostream& out, const baselines::BaselineEstimate& est);
void write_model_file(const std::string& path, const StoredModel& model);

// Throws FormatError on unknown format/version, shape errors, or a vocabulary
// hash that does not match the stored vocabulary.
StoredModel read_model(std::istream& in);
StoredModel read_model_file(const std::string& path);

std::string hash_hex(std::uint64_t hash);

// Ground-truth parameters of a synthetic corpus as JSON (matrices in the same
// {rows, cols, data} form).
void write_spec(std::ostream& out, const synth::SyntheticSpec& spec);

}  // namespace lglda::io
