#include "lglda/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace lglda {

std::string to_string(GlobalCountsMode mode) {
  return mode == GlobalCountsMode::corpus_wide ? "corpus-wide" : "per-location";
}

std::string to_string(PhiMode mode) { return mode == PhiMode::shared ? "shared" : "split"; }

std::string to_string(DocumentFactor mode) {
  switch (mode) {
    case DocumentFactor::topic: return "topic";
    case DocumentFactor::document: return "document";
    case DocumentFactor::none: return "none";
  }
  return "?";
}

DocumentFactor parse_document_factor(const std::string& s) {
  if (s == "topic") return DocumentFactor::topic;
  if (s == "document") return DocumentFactor::document;
  if (s == "none") return DocumentFactor::none;
  throw std::invalid_argument("unknown document factor '" + s + "'");
}

GlobalCountsMode parse_global_counts_mode(const std::string& s) {
  if (s == "corpus-wide") return GlobalCountsMode::corpus_wide;
  if (s == "per-location") return GlobalCountsMode::per_location;
  throw std::invalid_argument("unknown global counts mode '" + s + "'");
}

PhiMode parse_phi_mode(const std::string& s) {
  if (s == "shared") return PhiMode::shared;
  if (s == "split") return PhiMode::split;
  throw std::invalid_argument("unknown phi mode '" + s + "'");
}

void Hyperparameters::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
  };
  if (num_topics < 2) throw std::invalid_argument("number of topics must be at least 2");
  positive(alpha_local, "alpha_local");
  positive(alpha_global, "alpha_global");
  positive(beta, "beta");
  positive(gamma_local, "gamma_local");
  positive(gamma_global, "gamma_global");
  positive(lambda, "lambda");
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (average_last < 0 || average_last > iterations)
    throw std::invalid_argument("average_last must lie in [0, iterations]");
}

// ---------------------------------------------------------------------------
// LgldaState

LgldaState::LgldaState(const Corpus& corpus, const Hyperparameters& hp, std::vector<int> topics,
                       std::vector<Locality> localities)
    : hp_(hp),
      num_words_(corpus.num_words()),
      num_locations_(corpus.num_locations()),
      topic_(std::move(topics)),
      locality_(std::move(localities)),
      rng_(hp.seed) {
  hp_.validate();
  const auto K = static_cast<std::size_t>(hp_.num_topics);
  const std::size_t T = corpus.num_tokens();
  if (topic_.size() != T || locality_.size() != T)
    throw std::invalid_argument("assignment vectors do not match the corpus token count");

  token_word_.reserve(T);
  token_doc_.reserve(T);
  doc_location_.reserve(corpus.num_documents());
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.documents[d];
    doc_location_.push_back(doc.location);
    for (WordId w : doc.tokens) {
      token_word_.push_back(w);
      token_doc_.push_back(static_cast<std::uint32_t>(d));
    }
  }

  const std::size_t slots =
      hp_.global_counts == GlobalCountsMode::per_location ? num_locations_ : 1;
  const std::size_t phi_slots = hp_.phi == PhiMode::split ? 2 : 1;
  doc_ = Matrix<int>(2 * corpus.num_documents(), K);
  doc_total_.assign(2 * corpus.num_documents(), 0);
  loc_ = Matrix<int>(num_locations_, K);
  loc_total_.assign(num_locations_, 0);
  glob_ = Matrix<int>(slots, K);
  glob_total_.assign(slots, 0);
  word_.assign(phi_slots, Matrix<int>(num_words_, K));
  topic_total_.assign(phi_slots, std::vector<int>(K, 0));

  for (std::size_t i = 0; i < T; ++i) {
    if (topic_[i] < 0 || static_cast<std::size_t>(topic_[i]) >= K)
      throw std::invalid_argument("topic assignment out of range");
    apply(i, +1);
  }
}

void LgldaState::apply(std::size_t i, int delta) {
  const auto k = static_cast<std::size_t>(topic_[i]);
  const Locality e = locality_[i];
  const std::size_t d = token_doc_[i];
  const auto l = static_cast<std::size_t>(doc_location_[d]);
  const auto w = static_cast<std::size_t>(token_word_[i]);

  doc_(2 * d + index(e), k) += delta;
  doc_total_[2 * d + index(e)] += delta;
  if (e == Locality::local) {
    loc_(l, k) += delta;
    loc_total_[l] += delta;
  } else {
    const std::size_t g = global_slot(static_cast<LocationId>(l));
    glob_(g, k) += delta;
    glob_total_[g] += delta;
  }
  const std::size_t p = phi_slot(e);
  word_[p](w, k) += delta;
  topic_total_[p][k] += delta;
}

void LgldaState::remove(std::size_t token) { apply(token, -1); }

void LgldaState::assign(std::size_t token, Locality e, int k) {
  topic_[token] = k;
  locality_[token] = e;
  apply(token, +1);
}

bool LgldaState::counts_consistent() const {
  LgldaState fresh = *this;
  auto zero = [](Matrix<int>& m) { std::fill(m.data().begin(), m.data().end(), 0); };
  zero(fresh.doc_);
  std::fill(fresh.doc_total_.begin(), fresh.doc_total_.end(), 0);
  zero(fresh.loc_);
  zero(fresh.glob_);
  for (auto& m : fresh.word_) zero(m);
  std::fill(fresh.loc_total_.begin(), fresh.loc_total_.end(), 0);
  std::fill(fresh.glob_total_.begin(), fresh.glob_total_.end(), 0);
  for (auto& t : fresh.topic_total_) std::fill(t.begin(), t.end(), 0);
  for (std::size_t i = 0; i < num_tokens(); ++i) fresh.apply(i, +1);
  return fresh == *this && fresh.doc_total_ == doc_total_ && fresh.loc_total_ == loc_total_ &&
         fresh.glob_total_ == glob_total_;
}

bool LgldaState::operator==(const LgldaState& o) const {
  return hp_ == o.hp_ && topic_ == o.topic_ && locality_ == o.locality_ && doc_ == o.doc_ &&
         loc_ == o.loc_ && glob_ == o.glob_ && word_ == o.word_ && topic_total_ == o.topic_total_;
}

// ---------------------------------------------------------------------------
// Sampling

LgldaState init(const Corpus& corpus, const Hyperparameters& hp) {
  hp.validate();
  if (corpus.num_tokens() == 0) throw std::invalid_argument("cannot initialize on an empty corpus");
  const std::size_t T = corpus.num_tokens();
  Rng rng(hp.seed);
  std::vector<int> z(T);
  std::vector<Locality> e(T);
  for (std::size_t i = 0; i < T; ++i) {
    e[i] = rng.bernoulli(0.5) ? Locality::local : Locality::global;
    z[i] = static_cast<int>(rng.below(static_cast<std::size_t>(hp.num_topics)));
  }
  LgldaState state(corpus, hp, std::move(z), std::move(e));
  // Continue the stream used for initialization so the chain does not replay it.
  state.rng() = rng;
  return state;
}

void gibbs_conditional(const LgldaState& s, std::size_t token, std::span<double> out) {
  const auto& hp = s.hyperparameters();
  const std::size_t K = s.num_topics();
  const double Kd = static_cast<double>(K);
  const double W = static_cast<double>(s.num_words());
  const std::size_t d = s.document(token);
  const LocationId l = s.location(token);
  const WordId w = s.word(token);
  const double gamma_sum = hp.gamma_local + hp.gamma_global;

  for (Locality e : {Locality::local, Locality::global}) {
    const double lam = hp.weight(e);
    const double gamma = hp.gamma(e);
    const double alpha = hp.alpha(e);
    const std::size_t p = s.phi_slot(e);
    double topic_denom;
    std::size_t g = 0;
    if (e == Locality::local) {
      topic_denom = s.loc_total(l) + Kd * alpha;
    } else {
      g = s.global_slot(l);
      topic_denom = s.glob_total(g) + Kd * alpha;
    }
    double doc_factor = 1.0;
    if (hp.document_factor == DocumentFactor::document) {
      const double both =
          s.doc_locality_total(d, Locality::local) + s.doc_locality_total(d, Locality::global);
      doc_factor = (s.doc_locality_total(d, e) + gamma) / (both + gamma_sum);
    }
    double* row = out.data() + index(e) * K;
    for (std::size_t k = 0; k < K; ++k) {
      if (hp.document_factor == DocumentFactor::topic) {
        const double both = s.doc_count(d, Locality::local, k) + s.doc_count(d, Locality::global, k);
        doc_factor = (s.doc_count(d, e, k) + gamma) / (both + gamma_sum);
      }
      const double topic_count = e == Locality::local ? s.loc_count(l, k) : s.glob_count(g, k);
      const double topic_factor = (topic_count + alpha) / topic_denom;
      const double word_factor =
          (s.word_count(p, w, k) + hp.beta) / (s.topic_total(p, k) + W * hp.beta);
      row[k] = lam * doc_factor * topic_factor * word_factor;
    }
  }
}

std::vector<double> gibbs_conditional(const LgldaState& state, std::size_t token) {
  std::vector<double> out(2 * state.num_topics());
  gibbs_conditional(state, token, out);
  return out;
}

void sweep(LgldaState& state) {
  const std::size_t K = state.num_topics();
  std::vector<double> weights(2 * K);
  for (std::size_t i = 0; i < state.num_tokens(); ++i) {
    state.remove(i);
    gibbs_conditional(state, i, weights);
    const std::size_t pick = state.rng().categorical(weights);
    state.assign(i, pick < K ? Locality::local : Locality::global, static_cast<int>(pick % K));
  }
}

ModelEstimate estimate(const LgldaState& s, const Corpus& corpus) {
  const auto& hp = s.hyperparameters();
  const std::size_t K = s.num_topics();
  const double Kd = static_cast<double>(K);
  const std::size_t W = s.num_words();

  ModelEstimate est;
  est.hyperparameters = hp;
  est.vocabulary = corpus.vocabulary;
  est.location_names = corpus.location_names;

  est.theta_local = MatrixD(s.num_locations(), K);
  for (std::size_t l = 0; l < s.num_locations(); ++l) {
    const auto loc = static_cast<LocationId>(l);
    const double denom = s.loc_total(loc) + Kd * hp.alpha_local;
    for (std::size_t k = 0; k < K; ++k)
      est.theta_local(l, k) = (s.loc_count(loc, k) + hp.alpha_local) / denom;
  }

  est.theta_global = MatrixD(s.num_global_slots(), K);
  for (std::size_t g = 0; g < s.num_global_slots(); ++g) {
    const double denom = s.glob_total(g) + Kd * hp.alpha_global;
    for (std::size_t k = 0; k < K; ++k)
      est.theta_global(g, k) = (s.glob_count(g, k) + hp.alpha_global) / denom;
  }

  est.phi.assign(s.num_phi_slots(), MatrixD(K, W));
  for (std::size_t p = 0; p < s.num_phi_slots(); ++p) {
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = s.topic_total(p, k) + static_cast<double>(W) * hp.beta;
      for (std::size_t w = 0; w < W; ++w)
        est.phi[p](k, w) = (s.word_count(p, static_cast<WordId>(w), k) + hp.beta) / denom;
    }
  }
  return est;
}

namespace {

void accumulate(MatrixD& into, const MatrixD& add) {
  for (std::size_t i = 0; i < into.data().size(); ++i) into.data()[i] += add.data()[i];
}

void scale(MatrixD& m, double factor) {
  for (auto& x : m.data()) x *= factor;
}

}  // namespace

TrainResult train(const Corpus& corpus, const Hyperparameters& hp, const SweepCallback& on_sweep) {
  LgldaState state = init(corpus, hp);
  std::optional<ModelEstimate> averaged;
  for (int it = 1; it <= hp.iterations; ++it) {
    sweep(state);
    if (on_sweep) on_sweep(it, state);
    if (hp.average_last > 0 && it > hp.iterations - hp.average_last) {
      ModelEstimate current = estimate(state, corpus);
      if (!averaged) {
        averaged = std::move(current);
      } else {
        accumulate(averaged->theta_local, current.theta_local);
        accumulate(averaged->theta_global, current.theta_global);
        for (std::size_t p = 0; p < averaged->phi.size(); ++p)
          accumulate(averaged->phi[p], current.phi[p]);
      }
    }
  }
  if (averaged && hp.average_last > 1) {
    const double f = 1.0 / hp.average_last;
    scale(averaged->theta_local, f);
    scale(averaged->theta_global, f);
    for (auto& p : averaged->phi) scale(p, f);
  }
  ModelEstimate est = averaged ? std::move(*averaged) : estimate(state, corpus);
  return {std::move(state), std::move(est)};
}

// ---------------------------------------------------------------------------
// Estimates

std::span<const double> location_topics(const ModelEstimate& est, LocationId location) {
  if (location < 0 || static_cast<std::size_t>(location) >= est.num_locations())
    throw std::out_of_range("unknown location id " + std::to_string(location));
  return est.theta_local.row(static_cast<std::size_t>(location));
}

std::vector<double> concat_distribution(std::span<const double> theta_local_row,
                                        std::span<const double> theta_global,
                                        double evidence_local, double evidence_global,
                                        double lambda) {
  if (theta_local_row.size() != theta_global.size())
    throw std::invalid_argument("local and global topic rows differ in length");
  const std::size_t K = theta_local_row.size();
  const double wl = lambda / (lambda + 1.0) * evidence_local;
  const double wg = 1.0 / (lambda + 1.0) * evidence_global;
  std::vector<double> out(2 * K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = wl * theta_local_row[k];
    out[K + k] = wg * theta_global[k];
    total += out[k] + out[K + k];
  }
  for (auto& x : out) x /= total;
  return out;
}

namespace {

// Sum_k theta[k] * phi[k][w].
double mixture_word_probability(std::span<const double> theta, const MatrixD& phi, WordId w) {
  double p = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) p += theta[k] * phi(k, static_cast<std::size_t>(w));
  return p;
}

}  // namespace

LocalityMarginal word_locality(const ModelEstimate& est, LocationId location, WordId w) {
  const auto& hp = est.hyperparameters;
  const double local = hp.weight(Locality::local) *
                       mixture_word_probability(location_topics(est, location),
                                                est.phi_for(Locality::local), w);
  const double global = hp.weight(Locality::global) *
                        mixture_word_probability(est.global_row(location),
                                                 est.phi_for(Locality::global), w);
  const double total = local + global;
  return {local / total, global / total};
}

double locality_score(const ModelEstimate& est, const Document& doc) {
  double local = 0.0;
  double global = 0.0;
  for (WordId w : doc.tokens) {
    const auto m = word_locality(est, doc.location, w);
    local += m.local;
    global += m.global;
  }
  if (!(global > 0.0)) throw std::domain_error("document has no global generation mass");
  return local / global;
}

DocumentMixture fold_in_mixture(const ModelEstimate& est, const Document& doc) {
  const auto& hp = est.hyperparameters;
  const std::size_t n = doc.tokens.size();
  std::vector<double> p_local(n), p_global(n);
  const auto theta_l = location_topics(est, doc.location);
  const auto theta_g = est.global_row(doc.location);
  for (std::size_t i = 0; i < n; ++i) {
    p_local[i] = mixture_word_probability(theta_l, est.phi_for(Locality::local), doc.tokens[i]);
    p_global[i] = mixture_word_probability(theta_g, est.phi_for(Locality::global), doc.tokens[i]);
  }

  const double gamma_sum = hp.gamma_local + hp.gamma_global;
  const double lam_l = hp.weight(Locality::local);
  const double lam_g = hp.weight(Locality::global);
  double rate = hp.gamma_local / gamma_sum;
  double mix_local = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    mix_local = lam_l * rate / (lam_l * rate + lam_g * (1.0 - rate));
    double responsibility = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = mix_local * p_local[i];
      responsibility += a / (a + (1.0 - mix_local) * p_global[i]);
    }
    const double next = (hp.gamma_local + responsibility) / (static_cast<double>(n) + gamma_sum);
    const bool done = std::abs(next - rate) < 1e-13;
    rate = next;
    if (done) break;
  }
  mix_local = lam_l * rate / (lam_l * rate + lam_g * (1.0 - rate));
  return {mix_local, 1.0 - mix_local};
}

double document_log_probability(const ModelEstimate& est, const Document& doc) {
  const auto mix = fold_in_mixture(est, doc);
  const auto theta_l = location_topics(est, doc.location);
  const auto theta_g = est.global_row(doc.location);
  double logp = 0.0;
  for (WordId w : doc.tokens) {
    const double p = mix.local * mixture_word_probability(theta_l, est.phi_for(Locality::local), w) +
                     mix.global * mixture_word_probability(theta_g, est.phi_for(Locality::global), w);
    logp += std::log(p);
  }
  return logp;
}

}  // namespace lglda
