#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lglda {

using WordId = std::int32_t;
using LocationId = std::int32_t;

class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  // 1-based line number of the offending input line, 0 when not line-specific.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Words must be unique; ids follow the given order.
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::optional<WordId> find(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

  // FNV-1a over the newline-joined word list; identifies a vocabulary in
  // serialized models.
  std::uint64_t hash() const;

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Document {
  std::string doc_id;
  LocationId location = 0;
  std::vector<WordId> tokens;

  bool operator==(const Document&) const = default;
};

// A location-tagged corpus. Ingested corpora are canonical: location ids in
// lexicographic name order, vocabulary ids in lexicographic word order,
// documents ordered by (location, doc_id).
struct Corpus {
  Vocabulary vocabulary;
  std::vector<Document> documents;
  std::vector<std::string> location_names;

  std::size_t num_locations() const { return location_names.size(); }
  std::size_t num_words() const { return vocabulary.size(); }
  std::size_t num_documents() const { return documents.size(); }
  std::size_t num_tokens() const;

  bool operator==(const Corpus&) const = default;
};

// One parsed input line, before vocabulary/location indexing.
struct RawDocument {
  std::string location;
  std::string doc_id;
  std::vector<std::string> tokens;
};

struct IngestStats {
  std::size_t lines = 0;
  std::size_t dropped_short = 0;
};

inline constexpr std::size_t kDefaultMinTokens = 3;

std::vector<RawDocument> read_raw(std::istream& in);

// Builds a canonical corpus from raw documents, dropping those with fewer
// than `min_tokens` tokens. Throws CorpusError when nothing survives.
Corpus build_corpus(std::vector<RawDocument> raw, std::size_t min_tokens,
                    IngestStats* stats = nullptr);

Corpus ingest(std::istream& in, std::size_t min_tokens = kDefaultMinTokens,
              IngestStats* stats = nullptr);
Corpus ingest(const std::string& path, std::size_t min_tokens = kDefaultMinTokens,
              IngestStats* stats = nullptr);

// Reads documents against a fixed vocabulary and location table (e.g. those
// of a trained model). Unknown locations are an error. Unknown tokens are an
// error unless `oov_count` is given, in which case they are dropped and
// tallied. An empty result is allowed.
Corpus ingest_with_vocabulary(std::istream& in, const Vocabulary& vocabulary,
                              const std::vector<std::string>& location_names,
                              std::size_t min_tokens, std::size_t* oov_count = nullptr);
Corpus ingest_with_vocabulary(const std::string& path, const Vocabulary& vocabulary,
                              const std::vector<std::string>& location_names,
                              std::size_t min_tokens, std::size_t* oov_count = nullptr);

// Canonical writer: locations sorted by name, then documents by doc_id.
void write_canonical(std::ostream& out, const Corpus& corpus);

// Document-level held-out split. Both halves keep the full vocabulary and
// location table; every location keeps at least one training document.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double held_out_fraction,
                                std::uint64_t seed);

}  // namespace lglda
