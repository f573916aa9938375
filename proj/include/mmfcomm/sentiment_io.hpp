#pragma once

// Corpus file: "N vocab_size", then N lines "label idx1 ... idxk".
// Classifier file: "d", then d weights and the bias, whitespace-separated.

#include <istream>
#include <ostream>
#include <string>

#include "mmfcomm/sentiment.hpp"
#include "mmfcomm/text.hpp"

namespace mmfcomm::sentiment {

inline void write_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  out << corpus.samples.size() << ' ' << corpus.vocab_size << '\n';
  for (const auto& s : corpus.samples) {
    out << s.label;
    for (int t : s.tokens) out << ' ' << t;
    out << '\n';
  }
}

inline LabeledCorpus read_corpus(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw ParseError("corpus file: empty input");
  const auto head = text::split_ws(line);
  if (head.size() != 2) throw ParseError("corpus file: header must be 'N vocab_size'");
  const auto n = text::parse_int<std::size_t>(head[0], "corpus N");
  LabeledCorpus corpus;
  corpus.vocab_size = text::parse_int<int>(head[1], "corpus vocab_size");
  corpus.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!text::next_line(in, line)) throw ParseError("corpus file: expected " + std::to_string(n) + " samples");
    const auto fields = text::split_ws(line);
    if (fields.size() < 2) throw ParseError("corpus file: sample " + std::to_string(i + 1) + " has no tokens");
    Sample s;
    s.label = text::parse_int<int>(fields[0], "corpus label");
    for (std::size_t j = 1; j < fields.size(); ++j) s.tokens.push_back(text::parse_int<int>(fields[j], "corpus token"));
    corpus.samples.push_back(std::move(s));
  }
  try {
    corpus.validate();
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("corpus file: ") + e.what());
  }
  return corpus;
}

inline void write_classifier(std::ostream& out, const LinearClassifier& clf) {
  out << clf.weights.size() << '\n';
  for (std::size_t j = 0; j < clf.weights.size(); ++j) out << (j ? " " : "") << text::format_real(clf.weights[j]);
  out << ' ' << text::format_real(clf.bias) << '\n';
}

inline LinearClassifier read_classifier(std::istream& in) {
  std::string line, body;
  if (!text::next_line(in, line)) throw ParseError("classifier file: empty input");
  const auto d = text::parse_int<std::size_t>(line, "classifier d");
  while (text::next_line(in, line)) body += line + ' ';
  const auto fields = text::split_ws(body);
  if (fields.size() != d + 1) throw ParseError("classifier file: expected d + 1 reals");
  LinearClassifier clf;
  for (std::size_t j = 0; j < d; ++j) clf.weights.push_back(text::parse_real(fields[j], "classifier weight"));
  clf.bias = text::parse_real(fields[d], "classifier bias");
  return clf;
}

}  // namespace mmfcomm::sentiment
