#include "lglda/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace lglda::io {

using nlohmann::json;

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

json to_json(const MatrixD& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

MatrixD matrix_from(const json& j, const char* name) {
  if (!j.is_object()) throw FormatError(std::string("missing matrix '") + name + "'");
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw FormatError(std::string("matrix '") + name + "' has the wrong size");
  MatrixD m(rows, cols);
  m.data() = std::move(data);
  return m;
}

json to_json(const Hyperparameters& hp) {
  return json{{"num_topics", hp.num_topics},
              {"alpha_local", hp.alpha_local},
              {"alpha_global", hp.alpha_global},
              {"beta", hp.beta},
              {"gamma_local", hp.gamma_local},
              {"gamma_global", hp.gamma_global},
              {"lambda", hp.lambda},
              {"iterations", hp.iterations},
              {"seed", hp.seed},
              {"global_counts", to_string(hp.global_counts)},
              {"phi_mode", to_string(hp.phi)},
              {"document_factor", to_string(hp.document_factor)},
              {"average_last", hp.average_last}};
}

Hyperparameters hyperparameters_from(const json& j) {
  Hyperparameters hp;
  hp.num_topics = j.at("num_topics").get<int>();
  hp.alpha_local = j.at("alpha_local").get<double>();
  hp.alpha_global = j.at("alpha_global").get<double>();
  hp.beta = j.at("beta").get<double>();
  hp.gamma_local = j.at("gamma_local").get<double>();
  hp.gamma_global = j.at("gamma_global").get<double>();
  hp.lambda = j.at("lambda").get<double>();
  hp.iterations = j.at("iterations").get<int>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  hp.global_counts = parse_global_counts_mode(j.at("global_counts").get<std::string>());
  hp.phi = parse_phi_mode(j.at("phi_mode").get<std::string>());
  hp.document_factor = parse_document_factor(j.at("document_factor").get<std::string>());
  hp.average_last = j.at("average_last").get<int>();
  return hp;
}

json header(const std::string& kind, const Hyperparameters& hp, const Vocabulary& vocab,
            const std::vector<std::string>& locations) {
  return json{{"format", kFormatName},
              {"version", kFormatVersion},
              {"kind", kind},
              {"hyperparameters", to_json(hp)},
              {"vocabulary_hash", hash_hex(vocab.hash())},
              {"vocabulary", vocab.words()},
              {"locations", locations}};
}

}  // namespace

void write_spec(std::ostream& out, const synth::SyntheticSpec& spec) {
  json j{{"num_topics", spec.num_topics},
         {"num_words", spec.num_words},
         {"num_locations", spec.num_locations},
         {"docs_per_location", spec.docs_per_location},
         {"tokens_per_doc", spec.tokens_per_doc},
         {"lambda", spec.lambda},
         {"seed", spec.seed},
         {"theta_local", to_json(spec.theta_local)},
         {"theta_global", spec.theta_global},
         {"phi", to_json(spec.phi)},
         {"doc_locality", spec.doc_locality}};
  out << j.dump(1) << '\n';
}

void write_model(std::ostream& out, const ModelEstimate& est) {
  json j = header("lglda", est.hyperparameters, est.vocabulary, est.location_names);
  j["theta_local"] = to_json(est.theta_local);
  j["theta_global"] = to_json(est.theta_global);
  j["phi"] = json::array();
  for (const auto& p : est.phi) j["phi"].push_back(to_json(p));
  out << j.dump(1) << '\n';
}

void write_model(std::ostream& out, const baselines::BaselineEstimate& est) {
  json j = header(baselines::to_string(est.kind), est.hyperparameters, est.vocabulary,
                  est.location_names);
  j["location_topics"] = to_json(est.location_topics);
  j["topic_words"] = to_json(est.topic_words);
  out << j.dump(1) << '\n';
}

void write_model_file(const std::string& path, const StoredModel& model) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model file '" + path + "'");
  std::visit([&](const auto& m) { write_model(out, m); }, model);
  if (!out) throw FormatError("failed writing model file '" + path + "'");
}

StoredModel read_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model artifact is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatName) throw FormatError("not an lglda model artifact");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      throw FormatError("unsupported model artifact version " + std::to_string(version));

    Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    if (hash_hex(vocab.hash()) != j.at("vocabulary_hash").get<std::string>())
      throw FormatError("vocabulary hash mismatch in model artifact");
    auto locations = j.at("locations").get<std::vector<std::string>>();
    auto hp = hyperparameters_from(j.at("hyperparameters"));
    const auto kind = j.at("kind").get<std::string>();

    if (kind == "lglda") {
      ModelEstimate est;
      est.hyperparameters = hp;
      est.vocabulary = std::move(vocab);
      est.location_names = std::move(locations);
      est.theta_local = matrix_from(j.at("theta_local"), "theta_local");
      est.theta_global = matrix_from(j.at("theta_global"), "theta_global");
      for (const auto& p : j.at("phi")) est.phi.push_back(matrix_from(p, "phi"));
      if (est.phi.empty() || est.phi.size() > 2) throw FormatError("phi must hold one or two matrices");
      if (est.theta_local.rows() != est.location_names.size() ||
          est.phi.front().cols() != est.vocabulary.size())
        throw FormatError("estimate shape does not match vocabulary or locations");
      return est;
    }
    baselines::BaselineEstimate est;
    est.kind = baselines::parse_kind(kind);
    est.hyperparameters = hp;
    est.vocabulary = std::move(vocab);
    est.location_names = std::move(locations);
    est.location_topics = matrix_from(j.at("location_topics"), "location_topics");
    est.topic_words = matrix_from(j.at("topic_words"), "topic_words");
    if (est.location_topics.rows() != est.location_names.size() ||
        est.topic_words.cols() != est.vocabulary.size())
      throw FormatError("estimate shape does not match vocabulary or locations");
    return est;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  } catch (const CorpusError& e) {
    throw FormatError(std::string("malformed model artifact: ") + e.what());
  }
}

StoredModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file '" + path + "'");
  return read_model(in);
}

}  // namespace lglda::io
