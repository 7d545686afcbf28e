#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lglda/commands.hpp"

namespace {

namespace cli = lglda::cli;

constexpr int kExitFailure = 1;
constexpr int kExitPartial = 3;

// Flag values for Hyperparameters; enum fields are kept as their names.
struct HyperparameterFlags {
  lglda::Hyperparameters hp;
  std::string global_counts = "corpus-wide";
  std::string phi_mode = "shared";
  std::string document_factor = "topic";

  lglda::Hyperparameters resolve() const {
    lglda::Hyperparameters out = hp;
    out.global_counts = lglda::parse_global_counts_mode(global_counts);
    out.phi = lglda::parse_phi_mode(phi_mode);
    out.document_factor = lglda::parse_document_factor(document_factor);
    out.validate();
    return out;
  }
};

void add_hyperparameters(CLI::App* sub, HyperparameterFlags& f) {
  auto& hp = f.hp;
  sub->add_option("-K,--topics", hp.num_topics, "Number of topics")->check(CLI::Range(2, 1 << 20));
  sub->add_option("--alpha-local", hp.alpha_local, "Dirichlet prior on local topic mixtures");
  sub->add_option("--alpha-global", hp.alpha_global, "Dirichlet prior on the global topic mixture");
  sub->add_option("--beta", hp.beta, "Dirichlet prior on topic-word distributions");
  sub->add_option("--gamma-local", hp.gamma_local, "Beta prior weight on local assignments");
  sub->add_option("--gamma-global", hp.gamma_global, "Beta prior weight on global assignments");
  sub->add_option("--lambda", hp.lambda, "Local-global weight ratio");
  sub->add_option("--iterations", hp.iterations, "Gibbs sweeps");
  sub->add_option("--seed", hp.seed, "Random seed");
  sub->add_option("--global-counts", f.global_counts, "Scope of global topic counts")
      ->check(CLI::IsMember({"corpus-wide", "per-location"}));
  sub->add_option("--phi-mode", f.phi_mode, "Topic-word matrices: shared or split by locality")
      ->check(CLI::IsMember({"shared", "split"}));
  sub->add_option("--document-factor", f.document_factor,
                  "Per-document locality factor: topic, document, or none")
      ->check(CLI::IsMember({"topic", "document", "none"}));
  sub->add_option("--average-last", hp.average_last, "Average estimates over the last N sweeps");
}

void add_data(CLI::App* sub, cli::DataOptions& data) {
  sub->add_option("corpus", data.corpus, "Corpus file (location<TAB>doc_id<TAB>tokens)")->required();
  sub->add_option("--min-tokens", data.min_tokens, "Drop documents with fewer tokens");
  sub->add_option("--held-out", data.held_out, "Fraction of documents held out for evaluation");
}

void add_out(CLI::App* sub, std::string& out) {
  sub->add_option("-o,--out", out, "Output directory")->envname("LGLDA_OUTPUT_DIR");
}

// Comma-joined shortest round-trip forms, so replayed configs keep every bit.
std::string exact_list(const std::vector<double>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + "]";
}

// TOML for the command that ran. With defaults included CLI11 also emits
// dotted keys for every other subcommand; those lines are dropped.
std::string resolved_config(const CLI::App& app) {
  std::vector<std::string> skip;
  for (const CLI::App* sub : app.get_subcommands({}))
    if (!sub->parsed()) skip.push_back(sub->get_name() + ".");
  std::istringstream in(app.config_to_str(true, false));
  std::string out, line;
  while (std::getline(in, line)) {
    const bool other = std::any_of(skip.begin(), skip.end(),
                                   [&](const std::string& p) { return line.starts_with(p); });
    if (!other) out += line + '\n';
  }
  return out;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->configurable();
  sub->option_defaults()->always_capture_default();
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-global topic models for location-tagged corpora"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Replay a resolved config.toml");
  app.require_subcommand(1);

  std::string out = "lglda-out";
  cli::DataOptions data;
  HyperparameterFlags flags;
  std::string model = "lglda";
  std::vector<std::string> models{"lglda", "local_lda", "lda"};
  std::vector<double> grid = cli::default_lambda_grid();
  std::size_t jobs = 1;
  std::size_t top_n = 10;
  std::string model_path;
  cli::GenerateOptions gen;
  double locality_rate = -1.0;

  auto* ingest_check = add_command(app, "ingest-check", "Validate a corpus and report its size");
  add_data(ingest_check, data);
  add_out(ingest_check, out);

  auto* train = add_command(app, "train", "Train one model and write its artifacts");
  add_data(train, data);
  add_hyperparameters(train, flags);
  train->add_option("--model", model, "Model to train")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(cli::kModelNames), std::end(cli::kModelNames))));
  train->add_option("--top", top_n, "Top words per topic");
  add_out(train, out);

  auto* compare = add_command(app, "compare", "Train several models with shared settings");
  add_data(compare, data);
  add_hyperparameters(compare, flags);
  compare->add_option("--models", models, "Models to compare")->delimiter(',');
  compare->add_option("-j,--jobs", jobs, "Parallel training runs");
  add_out(compare, out);

  auto* sweep = add_command(app, "sweep-lambda", "Train across a grid of lambda values");
  add_data(sweep, data);
  add_hyperparameters(sweep, flags);
  sweep->add_option("--grid", grid, "Lambda values")->delimiter(',')->default_str(exact_list(grid));
  sweep->add_option("-j,--jobs", jobs, "Parallel training runs");
  add_out(sweep, out);

  auto* locality = add_command(app, "locality", "Rank documents by locality score");
  locality->add_option("model", model_path, "Trained lglda model.json")->required();
  locality->add_option("corpus", data.corpus, "Corpus file")->required();
  locality->add_option("--min-tokens", data.min_tokens, "Drop documents with fewer tokens");
  add_out(locality, out);

  auto* topwords = add_command(app, "topwords", "Top words per topic of a trained model");
  topwords->add_option("model", model_path, "Trained model.json")->required();
  topwords->add_option("--top", top_n, "Top words per topic");
  add_out(topwords, out);

  auto* generate = add_command(app, "generate", "Write a synthetic corpus with ground truth");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--docs-per-location", gen.docs_per_location, "Documents per location");
  generate->add_option("--tokens-per-doc", gen.tokens_per_doc, "Tokens per document");
  generate->add_option("--locality-rate", locality_rate,
                       "Fixed probability that a token is local; negative draws one per document");
  add_out(generate, out);

  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path out_dir = out;
  int status = 0;
  try {
    if (ingest_check->parsed()) {
      const auto text = cli::to_key_values(cli::ingest_check(data.corpus, data.min_tokens));
      std::cout << text;
      cli::write_file(out_dir / "ingest.txt", text);
    } else if (train->parsed()) {
      cli::train(data, model, flags.resolve(), top_n, out_dir);
    } else if (compare->parsed()) {
      const auto result = cli::compare(data, models, flags.resolve(), jobs, out_dir);
      for (const auto& f : result.failures) std::cerr << "error: " << f << '\n';
      if (!result.failures.empty()) status = kExitPartial;
    } else if (sweep->parsed()) {
      cli::sweep_lambda(data, grid, flags.resolve(), jobs, out_dir);
    } else if (locality->parsed()) {
      cli::locality(model_path, data.corpus, data.min_tokens, out_dir);
    } else if (topwords->parsed()) {
      cli::topwords(model_path, top_n, out_dir);
    } else if (generate->parsed()) {
      if (locality_rate >= 0.0) gen.locality_rate = locality_rate;
      cli::generate(gen, out_dir);
    }
    cli::write_file(out_dir / "config.toml", resolved_config(app));
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(CLI::ExitCodes::ValidationError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return status;
}
