#pragma once

#include <cstdint>
#include <vector>

#include "prunekit/corpus.hpp"
#include "prunekit/sparse.hpp"

namespace prunekit::fixture {

/// Bag-of-words documents: each token is a stopword, a class topic word or
/// a Zipf-distributed background word.
struct SyntheticSpec {
  std::size_t n_docs = 1000;
  std::size_t n_classes = 4;
  std::vector<double> class_weights;  // empty: balanced
  std::size_t doc_length = 40;
  std::size_t topic_words = 40;       // per class
  double topic_share = 0.3;
  std::size_t background_words = 2000;
  double zipf_exponent = 1.0;
  double stopword_share = 0.1;
  // Share of documents that are near-copies of an earlier same-class
  // document (quoted replies, reposts), each token resampled with
  // probability duplicate_edit.
  double duplicate_share = 0.0;
  double duplicate_edit = 0.2;
  std::uint64_t seed = 1;
};

LabeledCorpus make_corpus(const SyntheticSpec& spec);

/// Letters-only pseudo word, distinct for distinct (prefix, index).
std::string pseudo_word(char prefix, std::size_t index);

/// Random L2-normalized sparse rows with values drawn from a small set, so
/// similarity ties are common. Labels uniform over n_classes.
CorpusMatrix random_matrix(std::size_t n, std::size_t n_features, std::size_t n_classes,
                           double density, std::uint64_t seed);

/// Vocabulary + TF-IDF over the whole corpus with the built-in stopwords.
CorpusMatrix vectorize(const LabeledCorpus& corpus);

}  // namespace prunekit::fixture
