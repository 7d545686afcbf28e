#pragma once

#include <string>
#include <vector>

#include "lglda/corpus.hpp"
#include "lglda/rng.hpp"

namespace toy {

// docs[i] = {location, tokens}; words are named w0..w{W-1}.
struct Doc {
  lglda::LocationId location;
  std::vector<lglda::WordId> tokens;
};

inline lglda::Corpus corpus(std::size_t W, std::size_t L, const std::vector<Doc>& docs) {
  lglda::Corpus c;
  std::vector<std::string> words;
  for (std::size_t w = 0; w < W; ++w) words.push_back("w" + std::to_string(w));
  c.vocabulary = lglda::Vocabulary(words);
  for (std::size_t l = 0; l < L; ++l) c.location_names.push_back("loc" + std::to_string(l));
  for (std::size_t d = 0; d < docs.size(); ++d)
    c.documents.push_back({"d" + std::to_string(d), docs[d].location, docs[d].tokens});
  return c;
}

// Random corpus with every location occupied.
inline lglda::Corpus random_corpus(std::size_t W, std::size_t L, std::size_t D, std::size_t min_len,
                                   std::size_t max_len, std::uint64_t seed) {
  lglda::Rng rng(seed);
  std::vector<Doc> docs;
  for (std::size_t d = 0; d < D; ++d) {
    Doc doc{static_cast<lglda::LocationId>(d < L ? d : rng.below(L)), {}};
    const std::size_t n = min_len + rng.below(max_len - min_len + 1);
    for (std::size_t t = 0; t < n; ++t) doc.tokens.push_back(static_cast<lglda::WordId>(rng.below(W)));
    docs.push_back(doc);
  }
  return corpus(W, L, docs);
}

}  // namespace toy
