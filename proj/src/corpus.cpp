#include "prunekit/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace prunekit {

namespace detail {
extern const char* const kDefaultStopwordsText;
}

namespace {

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Non-ASCII code points that separate words: Latin-1 punctuation and
// symbols, general punctuation, CJK punctuation, fullwidth ASCII
// punctuation, BOM and the replacement character.
bool is_separator_codepoint(char32_t cp) {
  if (cp < 0xC0) return true;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2000 && cp <= 0x2BFF) return true;
  if (cp >= 0x3000 && cp <= 0x303F) return true;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return true;
  if (cp >= 0xFF1A && cp <= 0xFF20) return true;
  if (cp == 0xFEFF || cp == 0xFFFD) return true;
  return false;
}

// Decodes one UTF-8 sequence starting at text[i]; returns its length.
// Malformed bytes decode to U+FFFD with length 1.
std::size_t decode_utf8(std::string_view text, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    cp = 0xFFFD;
    return 1;
  }
  if (i + len > text.size()) {
    cp = 0xFFFD;
    return 1;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      cp = 0xFFFD;
      return 1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

StopwordSet parse_stopwords(std::istream& in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    for (auto& token : tokenize(line)) words.insert(std::move(token));
  }
  return words;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error("matrix file truncated");
  return value;
}

constexpr char kMatrixMagic[5] = {'P', 'K', 'I', 'T', '1'};

}  // namespace

void LabeledCorpus::validate() const {
  if (texts.size() != labels.size()) throw Error("corpus: text/label count mismatch");
  for (ClassId y : labels) {
    if (y >= class_names.size()) throw Error("corpus: label outside class list");
  }
}

LabeledCorpus LabeledCorpus::subset(std::span<const InstanceId> ids) const {
  LabeledCorpus out;
  out.class_names = class_names;
  out.texts.reserve(ids.size());
  out.labels.reserve(ids.size());
  for (InstanceId id : ids) {
    out.texts.push_back(texts.at(id));
    out.labels.push_back(labels.at(id));
  }
  return out;
}

std::optional<FeatureId> Vocabulary::find(std::string_view term) const {
  const auto it = lookup_.find(std::string(term));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(FeatureId f) const {
  return std::log(static_cast<double>(n_docs) / static_cast<double>(doc_freq.at(f))) + 1.0;
}

void Vocabulary::reindex() {
  lookup_.clear();
  lookup_.reserve(terms.size());
  for (FeatureId f = 0; f < terms.size(); ++f) lookup_.emplace(terms[f], f);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (is_ascii_alnum(c)) {
        current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      ++i;
      continue;
    }
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, i, cp);
    if (is_separator_codepoint(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.append(text.substr(i, len));
    }
    i += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary build_vocabulary(const LabeledCorpus& corpus, const StopwordSet& stopwords,
                            std::size_t min_df) {
  if (min_df < 1) throw Error("min_df must be at least 1");

  std::vector<std::vector<std::string>> doc_terms(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t d) {
    auto tokens = tokenize(corpus.texts[d]);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    doc_terms[d] = std::move(tokens);
  });

  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& terms : doc_terms) {
    for (const auto& t : terms) {
      if (!stopwords.contains(t)) ++df[t];
    }
  }

  Vocabulary vocab;
  vocab.n_docs = corpus.size();
  for (auto& [term, count] : df) {
    if (count < min_df) continue;
    vocab.terms.push_back(term);
    vocab.doc_freq.push_back(count);
  }
  if (vocab.terms.empty()) throw Error("vocabulary empty");
  vocab.reindex();
  return vocab;
}

CorpusMatrix vectorize_tfidf(const LabeledCorpus& corpus, const Vocabulary& vocab,
                             VectorizeReport* report) {
  CorpusMatrix matrix;
  matrix.n_features = vocab.size();
  matrix.n_classes = corpus.n_classes();
  matrix.labels = corpus.labels;
  matrix.rows.resize(corpus.size());

  std::vector<double> idf(vocab.size());
  for (FeatureId f = 0; f < vocab.size(); ++f) idf[f] = vocab.idf(f);

  parallel_for(corpus.size(), [&](std::size_t d) {
    std::vector<FeatureId> hits;
    for (const auto& token : tokenize(corpus.texts[d])) {
      if (auto f = vocab.find(token)) hits.push_back(*f);
    }
    std::sort(hits.begin(), hits.end());
    SparseVector row;
    for (std::size_t i = 0; i < hits.size();) {
      std::size_t j = i;
      while (j < hits.size() && hits[j] == hits[i]) ++j;
      row.indices.push_back(hits[i]);
      row.values.push_back(static_cast<double>(j - i) * idf[hits[i]]);
      i = j;
    }
    const double norm = row.norm();
    if (norm > 0.0) {
      for (double& v : row.values) v /= norm;
    }
    matrix.rows[d] = std::move(row);
  });

  if (report) {
    report->empty_rows.clear();
    for (InstanceId d = 0; d < matrix.size(); ++d) {
      if (matrix.rows[d].empty()) report->empty_rows.push_back(d);
    }
  }
  return matrix;
}

std::vector<InstanceId> FoldPlan::test_ids(std::size_t fold) const {
  std::vector<InstanceId> ids;
  for (InstanceId i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) ids.push_back(i);
  }
  return ids;
}

std::vector<InstanceId> FoldPlan::train_ids(std::size_t fold) const {
  std::vector<InstanceId> ids;
  for (InstanceId i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) ids.push_back(i);
  }
  return ids;
}

FoldPlan stratified_kfold(std::span<const ClassId> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error("k must be at least 2");
  std::map<ClassId, std::vector<InstanceId>> members;
  for (InstanceId i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, ids] : members) {
    if (ids.size() < k) throw Error("class too small for k folds");
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(labels.size(), 0);
  // Round-robin within each class; the start offset carries over between
  // classes so that overall fold sizes stay balanced too.
  std::size_t offset = 0;
  for (auto& [label, ids] : members) {
    Rng rng(derive_seed(seed, label));
    rng.shuffle(ids);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      plan.assignment[ids[j]] = static_cast<std::uint32_t>((offset + j) % k);
    }
    offset = (offset + ids.size()) % k;
  }
  return plan;
}

CorpusFormat parse_format(std::string_view name) {
  if (name == "tsv") return CorpusFormat::tsv;
  if (name == "jsonl") return CorpusFormat::jsonl;
  throw Error("unknown corpus format '" + std::string(name) + "' (expected tsv or jsonl)");
}

LabeledCorpus read_corpus(std::istream& in, CorpusFormat format) {
  LabeledCorpus corpus;
  std::unordered_map<std::string, ClassId> label_ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = label_ids.emplace(name, static_cast<ClassId>(corpus.class_names.size()));
    if (inserted) corpus.class_names.push_back(name);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string label, text;
    if (format == CorpusFormat::tsv) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("expected 'label<TAB>text'", line_no);
      label = line.substr(0, tab);
      text = line.substr(tab + 1);
    } else {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
      }
      if (!obj.is_object()) throw ParseError("expected a JSON object", line_no);
      if (!obj.contains("text") || !obj["text"].is_string()) {
        throw ParseError("missing string field \"text\"", line_no);
      }
      if (!obj.contains("label")) throw ParseError("missing field \"label\"", line_no);
      const auto& l = obj["label"];
      if (l.is_string()) {
        label = l.get<std::string>();
      } else if (l.is_number_integer()) {
        label = std::to_string(l.get<long long>());
      } else {
        throw ParseError("field \"label\" must be a string or integer", line_no);
      }
      text = obj["text"].get<std::string>();
    }
    if (label.empty()) throw ParseError("empty label", line_no);
    corpus.labels.push_back(intern(label));
    corpus.texts.push_back(std::move(text));
  }
  if (corpus.texts.empty()) throw ParseError("corpus is empty", 0);
  return corpus;
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  try {
    return read_corpus(in, format);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_corpus(const LabeledCorpus& corpus, std::ostream& out, CorpusFormat format) {
  corpus.validate();
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& label = corpus.class_names[corpus.labels[d]];
    const auto& text = corpus.texts[d];
    if (format == CorpusFormat::tsv) {
      if (label.find_first_of("\t\n") != std::string::npos ||
          text.find_first_of("\n") != std::string::npos) {
        throw Error("document " + std::to_string(d) + " cannot be represented in TSV");
      }
      out << label << '\t' << text << '\n';
    } else {
      out << nlohmann::json{{"label", label}, {"text", text}}.dump() << '\n';
    }
  }
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = [] {
    std::istringstream in(detail::kDefaultStopwordsText);
    return parse_stopwords(in);
  }();
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file " + path.string());
  return parse_stopwords(in);
}

void write_vocabulary_json(const Vocabulary& vocab, std::ostream& out) {
  nlohmann::json terms = nlohmann::json::array();
  for (FeatureId f = 0; f < vocab.size(); ++f) {
    terms.push_back({{"term", vocab.terms[f]}, {"id", f}, {"df", vocab.doc_freq[f]}});
  }
  out << nlohmann::json{{"n_docs", vocab.n_docs}, {"terms", terms}}.dump(1) << '\n';
}

Vocabulary read_vocabulary_json(std::istream& in) {
  const auto doc = nlohmann::json::parse(in);
  Vocabulary vocab;
  vocab.n_docs = doc.at("n_docs").get<std::size_t>();
  for (const auto& entry : doc.at("terms")) {
    if (entry.at("id").get<std::size_t>() != vocab.terms.size()) {
      throw Error("vocabulary ids must be dense and ordered");
    }
    vocab.terms.push_back(entry.at("term").get<std::string>());
    vocab.doc_freq.push_back(entry.at("df").get<std::size_t>());
  }
  vocab.reindex();
  return vocab;
}

void write_matrix(const CorpusMatrix& matrix, std::ostream& out) {
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  put_le<std::uint64_t>(out, matrix.size());
  put_le<std::uint64_t>(out, matrix.n_features);
  put_le<std::uint64_t>(out, matrix.n_classes);
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    const auto& row = matrix.rows[r];
    put_le<std::uint32_t>(out, matrix.labels[r]);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(row.nnz()));
    for (FeatureId f : row.indices) put_le<std::uint32_t>(out, f);
    for (double v : row.values) put_le<double>(out, v);
  }
}

CorpusMatrix read_matrix(std::istream& in) {
  char magic[sizeof kMatrixMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw Error("not a PKIT1 matrix file");
  }
  CorpusMatrix m;
  const auto n_rows = get_le<std::uint64_t>(in);
  m.n_features = get_le<std::uint64_t>(in);
  m.n_classes = get_le<std::uint64_t>(in);
  m.rows.resize(n_rows);
  m.labels.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    m.labels[r] = get_le<std::uint32_t>(in);
    const auto nnz = get_le<std::uint32_t>(in);
    auto& row = m.rows[r];
    row.indices.resize(nnz);
    row.values.resize(nnz);
    for (auto& f : row.indices) f = get_le<std::uint32_t>(in);
    for (auto& v : row.values) v = get_le<double>(in);
  }
  m.validate();
  return m;
}

CorpusStats corpus_stats(const CorpusMatrix& matrix, std::size_t empty_rows) {
  CorpusStats stats;
  stats.size = matrix.size();
  stats.dimensionality = matrix.n_features;
  stats.n_classes = matrix.n_classes;
  stats.empty_rows = empty_rows;
  std::size_t nnz = 0;
  for (const auto& row : matrix.rows) nnz += row.nnz();
  stats.density = matrix.size() ? static_cast<double>(nnz) / static_cast<double>(matrix.size()) : 0.0;

  std::vector<std::size_t> counts(matrix.n_classes, 0);
  for (ClassId y : matrix.labels) ++counts[y];
  std::size_t largest = 0, smallest = 0;
  for (std::size_t c : counts) {
    if (!c) continue;
    largest = std::max(largest, c);
    smallest = smallest ? std::min(smallest, c) : c;
  }
  stats.imbalance_ratio = smallest ? static_cast<double>(largest) / static_cast<double>(smallest) : 0.0;
  if (stats.imbalance_ratio <= 2.0) {
    stats.skewness = "Balanced";
  } else if (stats.imbalance_ratio <= 20.0) {
    stats.skewness = "Imbalanced";
  } else {
    stats.skewness = "Extremely Imbalanced";
  }
  return stats;
}

}  // namespace prunekit
