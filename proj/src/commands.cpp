#include "lglda/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "lglda/baselines.hpp"
#include "lglda/rng.hpp"
#include "lglda/synthgen.hpp"

namespace lglda::cli {

namespace fs = std::filesystem;

namespace {

bool known_model(const std::string& model) {
  return std::find(std::begin(kModelNames), std::end(kModelNames), model) != std::end(kModelNames);
}

// Calls task(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// captured per index; the caller inspects them.
std::vector<std::exception_ptr> run_parallel(std::size_t n, std::size_t jobs,
                                             const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  return errors;
}

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

std::string csv_text(const std::vector<std::string>& rows) {
  std::string text = metrics::csv_header() + '\n';
  for (const auto& r : rows) text += r + '\n';
  return text;
}

}  // namespace

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Datasets load(const DataOptions& data, std::uint64_t seed) {
  if (data.min_tokens < 1) throw UsageError("--min-tokens must be at least 1");
  if (!(data.held_out >= 0.0 && data.held_out < 1.0))
    throw UsageError("--held-out must lie in [0, 1)");
  Datasets ds;
  Corpus corpus = ingest(data.corpus, data.min_tokens, &ds.stats);
  if (data.held_out > 0.0) {
    auto [train, eval] = split(corpus, data.held_out, seed);
    ds.train = std::move(train);
    ds.eval = std::move(eval);
  } else {
    ds.eval = corpus;
    ds.train = std::move(corpus);
  }
  return ds;
}

ModelRun run_model(const std::string& model, const Corpus& train, const Corpus& eval,
                   const Hyperparameters& hp, std::size_t top_n) {
  hp.validate();
  ModelRun run{model, {}, {}};
  if (model == "lglda") {
    auto res = lglda::train(train, hp);
    run.report = metrics::evaluate(res.estimate, eval, top_n);
    run.stored = std::move(res.estimate);
    return run;
  }
  if (!known_model(model)) throw UsageError("unknown model '" + model + "'");
  baselines::BaselineEstimate est;
  switch (baselines::parse_kind(model)) {
    case baselines::Kind::lda: est = baselines::train_lda(train, hp); break;
    case baselines::Kind::local_lda: est = baselines::train_local_lda(train, hp); break;
    case baselines::Kind::tfidf_kmeans:
      est = baselines::train_tfidf_kmeans(train, static_cast<std::size_t>(hp.num_topics), hp.seed);
      est.hyperparameters = hp;
      break;
  }
  run.report = metrics::evaluate(est, eval, top_n);
  run.stored = std::move(est);
  return run;
}

std::string csv_row(const ModelRun& run, const Hyperparameters& hp) {
  const double lambda =
      run.model == "lglda" ? hp.lambda : std::numeric_limits<double>::quiet_NaN();
  return metrics::csv_row(run.model, lambda, hp.num_topics, run.report, hp.seed, hp.iterations);
}

std::string error_row(const std::string& model, const Hyperparameters& hp) {
  metrics::MetricsReport nan_report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  nan_report.perplexity = nan_report.topic_entropy = nan_report.location_entropy =
      nan_report.mean_pairwise_kl = nan;
  return metrics::csv_row(model, model == "lglda" ? hp.lambda : nan, hp.num_topics, nan_report,
                          hp.seed, hp.iterations);
}

IngestSummary ingest_check(const std::string& corpus, std::size_t min_tokens) {
  if (min_tokens < 1) throw UsageError("--min-tokens must be at least 1");
  IngestStats stats;
  const Corpus c = ingest(corpus, min_tokens, &stats);
  return {stats.lines, stats.dropped_short, c.num_documents(), c.num_locations(), c.num_words(),
          c.num_tokens()};
}

std::string to_key_values(const IngestSummary& s) {
  std::ostringstream out;
  out << "lines=" << s.lines << '\n'
      << "dropped_short=" << s.dropped_short << '\n'
      << "documents=" << s.documents << '\n'
      << "locations=" << s.locations << '\n'
      << "words=" << s.words << '\n'
      << "tokens=" << s.tokens << '\n';
  return out.str();
}

void train(const DataOptions& data, const std::string& model, const Hyperparameters& hp,
           std::size_t top_n, const fs::path& out) {
  if (!known_model(model)) throw UsageError("unknown model '" + model + "'");
  const Datasets ds = load(data, hp.seed);
  const ModelRun run = run_model(model, ds.train, ds.eval, hp, top_n);
  const Vocabulary& vocab = ds.train.vocabulary;

  fs::create_directories(out);
  io::write_model_file((out / "model.json").string(), run.stored);
  write_file(out / "metrics.csv", csv_text({csv_row(run, hp)}));
  write_file(out / "metrics.txt", "model=" + model + '\n' + metrics::key_values(run.report));
  write_file(out / "topwords.tsv", metrics::top_words_table(run.report.top_words, vocab));
}

CompareResult compare(const DataOptions& data, const std::vector<std::string>& models,
                      const Hyperparameters& hp, std::size_t jobs, const fs::path& out) {
  if (models.empty()) throw UsageError("no models requested");
  for (const auto& m : models)
    if (!known_model(m)) throw UsageError("unknown model '" + m + "'");
  const Datasets ds = load(data, hp.seed);

  std::vector<std::string> rows(models.size());
  const auto errors = run_parallel(models.size(), jobs, [&](std::size_t i) {
    rows[i] = csv_row(run_model(models[i], ds.train, ds.eval, hp, 10), hp);
  });
  CompareResult result;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!errors[i]) continue;
    rows[i] = error_row(models[i], hp);
    result.failures.push_back(models[i] + ": " + message_of(errors[i]));
  }
  write_file(out / "compare.csv", csv_text(rows));
  return result;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(10);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = 0.1 * std::pow(200.0, static_cast<double>(i) / 9.0);
  return grid;
}

void sweep_lambda(const DataOptions& data, std::vector<double> grid, const Hyperparameters& hp,
                  std::size_t jobs, const fs::path& out) {
  if (grid.empty()) throw UsageError("lambda grid is empty");
  for (double v : grid)
    if (!(v > 0.0)) throw UsageError("lambda grid values must be positive");
  std::sort(grid.begin(), grid.end());
  const Datasets ds = load(data, hp.seed);

  std::vector<std::string> rows(grid.size());
  const auto errors = run_parallel(grid.size(), jobs, [&](std::size_t i) {
    Hyperparameters run_hp = hp;
    run_hp.lambda = grid[i];
    run_hp.seed = derive_seed(hp.seed, i);
    rows[i] = csv_row(run_model("lglda", ds.train, ds.eval, run_hp, 10), run_hp);
  });
  std::vector<std::string> done;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!errors[i]) done.push_back(rows[i]);
  write_file(out / "sweep.csv", csv_text(done));
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void locality(const std::string& model_path, const std::string& corpus, std::size_t min_tokens,
              const fs::path& out) {
  if (min_tokens < 1) throw UsageError("--min-tokens must be at least 1");
  const auto stored = io::read_model_file(model_path);
  const auto* est = std::get_if<ModelEstimate>(&stored);
  if (!est) throw UsageError("locality scores need an lglda model");
  const Corpus c = ingest_with_vocabulary(corpus, est->vocabulary, est->location_names, min_tokens);

  struct Row {
    double score;
    const Document* doc;
  };
  std::vector<Row> rows;
  rows.reserve(c.num_documents());
  for (const auto& d : c.documents) rows.push_back({locality_score(*est, d), &d});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.score > b.score; });

  std::string text = "doc_id\tlocation\tscore\n";
  for (const auto& r : rows)
    text += r.doc->doc_id + '\t' + c.location_names[static_cast<std::size_t>(r.doc->location)] +
            '\t' + metrics::format_number(r.score) + '\n';
  write_file(out / "locality.tsv", text);
}

void topwords(const std::string& model_path, std::size_t top_n, const fs::path& out) {
  const auto stored = io::read_model_file(model_path);
  std::string text;
  if (const auto* est = std::get_if<ModelEstimate>(&stored)) {
    text = metrics::top_words_table(metrics::top_words(est->phi_for(Locality::local), top_n),
                                    est->vocabulary);
  } else {
    const auto& b = std::get<baselines::BaselineEstimate>(stored);
    text = metrics::top_words_table(metrics::top_words(b.topic_words, top_n), b.vocabulary);
  }
  write_file(out / "topwords.tsv", text);
}

void generate(const GenerateOptions& options, const fs::path& out) {
  if (options.docs_per_location < 1 || options.tokens_per_doc < 1)
    throw UsageError("--docs-per-location and --tokens-per-doc must be at least 1");
  auto spec = synth::default_spec(options.seed, options.docs_per_location, options.tokens_per_doc);
  if (options.locality_rate) {
    const double r = *options.locality_rate;
    if (!(r >= 0.0 && r <= 1.0)) throw UsageError("--locality-rate must lie in [0, 1]");
    std::fill(spec.doc_locality.begin(), spec.doc_locality.end(), r);
  }
  const auto gen = synth::generate(spec);

  std::ostringstream corpus, truth, spec_json;
  write_canonical(corpus, gen.corpus);
  synth::write_truth(truth, gen.truth);
  io::write_spec(spec_json, spec);
  write_file(out / "corpus.txt", corpus.str());
  write_file(out / "truth.tsv", truth.str());
  write_file(out / "spec.json", spec_json.str());
}

}  // namespace lglda::cli
