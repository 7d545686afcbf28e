#include "lglda/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "lglda/rng.hpp"

namespace lglda {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], static_cast<WordId>(i));
    if (!inserted) throw CorpusError("duplicate vocabulary word '" + words_[i] + "'");
  }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& w : words_) {
    for (unsigned char c : w) mix(c);
    mix('\n');
  }
  return h;
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.tokens.size();
  return n;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file '" + path + "'");
  return in;
}

// Splits on a single separator character, keeping empty fields.
std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<RawDocument> read_raw(std::istream& in) {
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    auto fields = split_fields(line, '\t');
    if (fields.size() != 3) {
      throw CorpusError("expected 3 tab-separated fields, found " +
                            std::to_string(fields.size()),
                        lineno);
    }
    if (fields[0].empty()) throw CorpusError("empty location name", lineno);
    if (fields[1].empty()) throw CorpusError("empty document id", lineno);
    RawDocument doc{std::string(fields[0]), std::string(fields[1]), {}};
    for (auto tok : split_fields(fields[2], ' ')) {
      if (tok.empty()) throw CorpusError("empty token (tokens are single-space separated)", lineno);
      if (std::any_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }))
        throw CorpusError("token contains whitespace", lineno);
      doc.tokens.emplace_back(tok);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

Corpus build_corpus(std::vector<RawDocument> raw, std::size_t min_tokens, IngestStats* stats) {
  if (min_tokens < 1) throw CorpusError("min_tokens must be at least 1");
  IngestStats local_stats;
  local_stats.lines = raw.size();
  std::erase_if(raw, [&](const RawDocument& d) {
    bool drop = d.tokens.size() < min_tokens;
    if (drop) ++local_stats.dropped_short;
    return drop;
  });
  if (stats) *stats = local_stats;
  if (raw.empty()) throw CorpusError("corpus is empty after filtering");

  std::set<std::string> locations;
  std::set<std::string> words;
  for (const auto& d : raw) {
    locations.insert(d.location);
    words.insert(d.tokens.begin(), d.tokens.end());
  }

  Corpus corpus;
  corpus.vocabulary = Vocabulary(std::vector<std::string>(words.begin(), words.end()));
  corpus.location_names.assign(locations.begin(), locations.end());
  std::map<std::string, LocationId> loc_index;
  for (std::size_t i = 0; i < corpus.location_names.size(); ++i)
    loc_index.emplace(corpus.location_names[i], static_cast<LocationId>(i));

  std::stable_sort(raw.begin(), raw.end(), [](const RawDocument& a, const RawDocument& b) {
    if (a.location != b.location) return a.location < b.location;
    return a.doc_id < b.doc_id;
  });
  corpus.documents.reserve(raw.size());
  for (auto& d : raw) {
    Document doc{std::move(d.doc_id), loc_index.at(d.location), {}};
    doc.tokens.reserve(d.tokens.size());
    for (const auto& t : d.tokens) doc.tokens.push_back(*corpus.vocabulary.find(t));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus ingest(std::istream& in, std::size_t min_tokens, IngestStats* stats) {
  return build_corpus(read_raw(in), min_tokens, stats);
}

Corpus ingest(const std::string& path, std::size_t min_tokens, IngestStats* stats) {
  auto in = open_input(path);
  return ingest(in, min_tokens, stats);
}

Corpus ingest_with_vocabulary(std::istream& in, const Vocabulary& vocabulary,
                              const std::vector<std::string>& location_names,
                              std::size_t min_tokens, std::size_t* oov_count) {
  if (min_tokens < 1) throw CorpusError("min_tokens must be at least 1");
  std::map<std::string, LocationId> loc_index;
  for (std::size_t i = 0; i < location_names.size(); ++i)
    loc_index.emplace(location_names[i], static_cast<LocationId>(i));

  Corpus corpus;
  corpus.vocabulary = vocabulary;
  corpus.location_names = location_names;
  if (oov_count) *oov_count = 0;

  for (auto& d : read_raw(in)) {
    auto loc = loc_index.find(d.location);
    if (loc == loc_index.end()) throw CorpusError("unknown location '" + d.location + "'");
    Document doc{std::move(d.doc_id), loc->second, {}};
    for (const auto& t : d.tokens) {
      if (auto id = vocabulary.find(t)) {
        doc.tokens.push_back(*id);
      } else if (oov_count) {
        ++*oov_count;
      } else {
        throw CorpusError("token '" + t + "' is not in the model vocabulary");
      }
    }
    if (doc.tokens.size() >= min_tokens) corpus.documents.push_back(std::move(doc));
  }
  std::stable_sort(corpus.documents.begin(), corpus.documents.end(),
                   [](const Document& a, const Document& b) {
                     if (a.location != b.location) return a.location < b.location;
                     return a.doc_id < b.doc_id;
                   });
  return corpus;
}

Corpus ingest_with_vocabulary(const std::string& path, const Vocabulary& vocabulary,
                              const std::vector<std::string>& location_names,
                              std::size_t min_tokens, std::size_t* oov_count) {
  auto in = open_input(path);
  return ingest_with_vocabulary(in, vocabulary, location_names, min_tokens, oov_count);
}

void write_canonical(std::ostream& out, const Corpus& corpus) {
  std::vector<std::size_t> order(corpus.documents.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = corpus.documents[a];
    const auto& db = corpus.documents[b];
    const auto& la = corpus.location_names[static_cast<std::size_t>(da.location)];
    const auto& lb = corpus.location_names[static_cast<std::size_t>(db.location)];
    if (la != lb) return la < lb;
    return da.doc_id < db.doc_id;
  });
  for (std::size_t i : order) {
    const auto& d = corpus.documents[i];
    out << corpus.location_names[static_cast<std::size_t>(d.location)] << '\t' << d.doc_id << '\t';
    for (std::size_t t = 0; t < d.tokens.size(); ++t) {
      if (t) out << ' ';
      out << corpus.vocabulary.word(d.tokens[t]);
    }
    out << '\n';
  }
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double held_out_fraction,
                                std::uint64_t seed) {
  if (!(held_out_fraction >= 0.0 && held_out_fraction < 1.0))
    throw CorpusError("held-out fraction must lie in [0, 1)");
  const std::size_t n_docs = corpus.documents.size();
  const auto n_held = static_cast<std::size_t>(
      std::llround(held_out_fraction * static_cast<double>(n_docs)));

  std::vector<std::size_t> remaining(corpus.num_locations(), 0);
  for (const auto& d : corpus.documents) ++remaining[static_cast<std::size_t>(d.location)];
  std::size_t occupied = 0;
  for (auto r : remaining) occupied += r > 0;
  if (n_held > n_docs - occupied) {
    throw CorpusError("held-out fraction " + std::to_string(held_out_fraction) +
                      " would leave a location without training documents");
  }

  std::vector<std::size_t> order(n_docs);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<bool> held(n_docs, false);
  std::size_t taken = 0;
  for (std::size_t i : order) {
    if (taken == n_held) break;
    auto loc = static_cast<std::size_t>(corpus.documents[i].location);
    if (remaining[loc] > 1) {
      --remaining[loc];
      held[i] = true;
      ++taken;
    }
  }

  Corpus train{corpus.vocabulary, {}, corpus.location_names};
  Corpus test{corpus.vocabulary, {}, corpus.location_names};
  for (std::size_t i = 0; i < n_docs; ++i)
    (held[i] ? test : train).documents.push_back(corpus.documents[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace lglda
