#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prunekit::fixture {

namespace {

// Inverse-CDF draw from cumulative weights.
std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform01() * cdf.back();
  return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

const char* const kStop[] = {"the", "and", "of", "to", "is", "in", "it", "that"};

}  // namespace

std::string pseudo_word(char prefix, std::size_t index) {
  std::string w(1, prefix);
  w += 'q';
  do {
    w += static_cast<char>('a' + index % 26);
    index /= 26;
  } while (index);
  return w;
}

LabeledCorpus make_corpus(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  std::vector<double> weights = spec.class_weights;
  if (weights.empty()) weights.assign(spec.n_classes, 1.0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  // Exact class counts: floor of the share, remainder to the largest fractions.
  std::vector<std::size_t> counts(spec.n_classes);
  std::vector<std::pair<double, std::size_t>> frac;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    const double want = weights[c] / total * static_cast<double>(spec.n_docs);
    counts[c] = static_cast<std::size_t>(want);
    assigned += counts[c];
    frac.emplace_back(-(want - static_cast<double>(counts[c])), c);
  }
  std::sort(frac.begin(), frac.end());
  for (std::size_t i = 0; assigned < spec.n_docs; ++i, ++assigned) ++counts[frac[i].second];

  std::vector<ClassId> labels;
  for (std::size_t c = 0; c < spec.n_classes; ++c) labels.insert(labels.end(), counts[c], c);
  rng.shuffle(labels);

  std::vector<double> zipf(spec.background_words);
  double acc = 0.0;
  for (std::size_t i = 0; i < zipf.size(); ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf_exponent);
    zipf[i] = acc;
  }

  LabeledCorpus corpus;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    corpus.class_names.push_back("class" + std::to_string(c));
  }
  auto fresh_token = [&](ClassId y) {
    const double u = rng.uniform01();
    if (u < spec.stopword_share) return std::string(kStop[rng.below(std::size(kStop))]);
    if (u < spec.stopword_share + spec.topic_share) {
      return pseudo_word(static_cast<char>('a' + y % 26), 1000 * (y / 26) + rng.below(spec.topic_words));
    }
    return pseudo_word('z', draw(zipf, rng));
  };

  std::vector<std::vector<std::vector<std::string>>> by_class(spec.n_classes);
  for (ClassId y : labels) {
    std::vector<std::string> tokens;
    auto& earlier = by_class[y];
    if (!earlier.empty() && rng.uniform01() < spec.duplicate_share) {
      tokens = earlier[rng.below(earlier.size())];
      for (auto& t : tokens) {
        if (rng.uniform01() < spec.duplicate_edit) t = fresh_token(y);
      }
    } else {
      for (std::size_t t = 0; t < spec.doc_length; ++t) tokens.push_back(fresh_token(y));
    }
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    earlier.push_back(std::move(tokens));
    corpus.texts.push_back(std::move(text));
    corpus.labels.push_back(y);
  }
  return corpus;
}

CorpusMatrix random_matrix(std::size_t n, std::size_t n_features, std::size_t n_classes,
                           double density, std::uint64_t seed) {
  Rng rng(seed);
  CorpusMatrix m;
  m.n_features = n_features;
  m.n_classes = n_classes;
  for (std::size_t i = 0; i < n; ++i) {
    SparseVector row;
    for (FeatureId f = 0; f < n_features; ++f) {
      if (rng.uniform01() < density) {
        row.indices.push_back(f);
        row.values.push_back(static_cast<double>(1 + rng.below(3)));
      }
    }
    // Occasionally an empty row.
    if (rng.uniform01() < 0.03) {
      row.indices.clear();
      row.values.clear();
    }
    const double norm = row.norm();
    for (double& v : row.values) v /= norm;
    m.rows.push_back(std::move(row));
    m.labels.push_back(static_cast<ClassId>(rng.below(n_classes)));
  }
  return m;
}

CorpusMatrix vectorize(const LabeledCorpus& corpus) {
  const auto vocab = build_vocabulary(corpus, default_stopwords());
  return vectorize_tfidf(corpus, vocab);
}

}  // namespace prunekit::fixture
