#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prunekit/common.hpp"
#include "prunekit/sparse.hpp"

namespace prunekit {

/// Raw labeled documents. Document ids are the positions 0..N-1.
struct LabeledCorpus {
  std::vector<std::string> texts;
  std::vector<ClassId> labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return texts.size(); }
  std::size_t n_classes() const { return class_names.size(); }
  void validate() const;
  /// Documents `ids` in order, re-indexed from 0; keeps the full class list.
  LabeledCorpus subset(std::span<const InstanceId> ids) const;
};

struct Vocabulary {
  std::vector<std::string> terms;  // indexed by feature id, lexicographic
  std::vector<std::size_t> doc_freq;
  std::size_t n_docs = 0;

  std::size_t size() const { return terms.size(); }
  std::optional<FeatureId> find(std::string_view term) const;
  double idf(FeatureId f) const;

 private:
  friend Vocabulary build_vocabulary(const LabeledCorpus&, const std::set<std::string, std::less<>>&,
                                     std::size_t);
  friend Vocabulary read_vocabulary_json(std::istream&);
  void reindex();
  std::unordered_map<std::string, FeatureId> lookup_;
};

using StopwordSet = std::set<std::string, std::less<>>;

/// Lowercased runs of alphanumeric characters. ASCII letters are lowercased;
/// non-ASCII letters are kept verbatim as word characters, while Unicode
/// punctuation and symbol blocks separate tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Excludes stopwords and terms seen in fewer than `min_df` documents.
/// Throws Error("vocabulary empty") when nothing survives.
Vocabulary build_vocabulary(const LabeledCorpus& corpus, const StopwordSet& stopwords,
                            std::size_t min_df = 2);

struct VectorizeReport {
  std::vector<InstanceId> empty_rows;  // documents with no in-vocabulary term
};

/// tf = raw count, idf = ln(N/df) + 1 with N and df from the vocabulary's
/// fit corpus; non-empty rows are L2-normalized. Empty rows are kept.
CorpusMatrix vectorize_tfidf(const LabeledCorpus& corpus, const Vocabulary& vocab,
                             VectorizeReport* report = nullptr);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::uint32_t> assignment;  // fold id per instance
  std::uint64_t seed = 0;

  std::vector<InstanceId> test_ids(std::size_t fold) const;
  std::vector<InstanceId> train_ids(std::size_t fold) const;
};

/// Per-class counts across folds differ by at most one, and fold sizes
/// overall are balanced. Throws if any present class has fewer than k members.
FoldPlan stratified_kfold(std::span<const ClassId> labels, std::size_t k, std::uint64_t seed);

enum class CorpusFormat { tsv, jsonl };

CorpusFormat parse_format(std::string_view name);

/// TSV: "label<TAB>text" per line. JSONL: objects with "label" and "text".
/// Labels become dense ids in order of first appearance.
LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
LabeledCorpus read_corpus(std::istream& in, CorpusFormat format);
void write_corpus(const LabeledCorpus& corpus, std::ostream& out, CorpusFormat format);

/// Built-in English list (about 300 words).
const StopwordSet& default_stopwords();
/// One word per line; blank lines and '#' comments ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// [{"term":..., "id":..., "df":...}, ...] wrapped with n_docs.
void write_vocabulary_json(const Vocabulary& vocab, std::ostream& out);
Vocabulary read_vocabulary_json(std::istream& in);

/// Binary matrix layout, little-endian:
///   "PKIT1" | n_rows u64 | n_features u64 | n_classes u64
///   per row: label u32 | nnz u32 | indices u32[nnz] | values f64[nnz]
void write_matrix(const CorpusMatrix& matrix, std::ostream& out);
CorpusMatrix read_matrix(std::istream& in);

struct CorpusStats {
  std::size_t size = 0;
  std::size_t dimensionality = 0;
  std::size_t n_classes = 0;
  double density = 0.0;          // mean distinct in-vocabulary terms per document
  double imbalance_ratio = 0.0;  // largest class / smallest non-empty class
  std::string skewness;          // Balanced | Imbalanced | Extremely Imbalanced
  std::size_t empty_rows = 0;
};

CorpusStats corpus_stats(const CorpusMatrix& matrix, std::size_t empty_rows = 0);

}  // namespace prunekit
