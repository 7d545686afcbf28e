#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lglda/corpus.hpp"
#include "lglda/metrics.hpp"
#include "lglda/model.hpp"
#include "lglda/serialize.hpp"

// Command implementations behind the `lglda` executable. Argument parsing and
// config files live in the executable; everything here takes plain values and
// writes its outputs into a directory.
namespace lglda::cli {

// Model names accepted by --model and --models.
inline constexpr const char* kModelNames[] = {"lglda", "lda", "local_lda", "tfidf_kmeans"};

// Thrown for bad command arguments; maps to a usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string corpus;
  std::size_t min_tokens = kDefaultMinTokens;
  // Fraction of documents held out for evaluation; 0 evaluates on the
  // training corpus.
  double held_out = 0.0;
};

// Training and evaluation corpora after the optional split.
struct Datasets {
  Corpus train;
  Corpus eval;
  IngestStats stats;
};

Datasets load(const DataOptions& data, std::uint64_t seed);

struct ModelRun {
  std::string model;
  io::StoredModel stored;
  metrics::MetricsReport report;
};

// Trains `model` (one of kModelNames) and evaluates it on `eval`. The k-means
// baseline uses hp.num_topics clusters and hp.seed.
ModelRun run_model(const std::string& model, const Corpus& train, const Corpus& eval,
                   const Hyperparameters& hp, std::size_t top_n);

// One CSV row; lambda is NaN for models that do not use it.
std::string csv_row(const ModelRun& run, const Hyperparameters& hp);
std::string error_row(const std::string& model, const Hyperparameters& hp);

// Writes `text` to `path`, creating parent directories. Throws on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& text);

struct IngestSummary {
  std::size_t lines = 0;
  std::size_t dropped_short = 0;
  std::size_t documents = 0;
  std::size_t locations = 0;
  std::size_t words = 0;
  std::size_t tokens = 0;
};
IngestSummary ingest_check(const std::string& corpus, std::size_t min_tokens);
std::string to_key_values(const IngestSummary& s);

// model.json, metrics.csv, metrics.txt, topwords.tsv
void train(const DataOptions& data, const std::string& model, const Hyperparameters& hp,
           std::size_t top_n, const std::filesystem::path& out);

struct CompareResult {
  std::vector<std::string> failures;  // "model: message"
};
// compare.csv with one row per model, in request order. A model that throws
// produces an error row and an entry in `failures`.
CompareResult compare(const DataOptions& data, const std::vector<std::string>& models,
                      const Hyperparameters& hp, std::size_t jobs,
                      const std::filesystem::path& out);

// Ten log-spaced values from 0.1 to 20.
std::vector<double> default_lambda_grid();

// sweep.csv sorted by lambda. Run i trains with seed derive_seed(hp.seed, i),
// where i indexes the grid sorted ascending. If a run fails, the rows of the
// runs that finished are still written and the first failure is rethrown.
void sweep_lambda(const DataOptions& data, std::vector<double> grid, const Hyperparameters& hp,
                  std::size_t jobs, const std::filesystem::path& out);

// locality.tsv: `doc_id location score`, descending by score. The corpus is
// read against the model vocabulary; any token outside it is an error.
void locality(const std::string& model_path, const std::string& corpus, std::size_t min_tokens,
              const std::filesystem::path& out);

// topwords.tsv for a stored model.
void topwords(const std::string& model_path, std::size_t top_n, const std::filesystem::path& out);

struct GenerateOptions {
  std::uint64_t seed = 1;
  int docs_per_location = 80;
  int tokens_per_doc = 12;
  // Overrides every document's locality rate when set.
  std::optional<double> locality_rate;
};
// corpus.txt, truth.tsv, spec.json
void generate(const GenerateOptions& options, const std::filesystem::path& out);

}  // namespace lglda::cli
