#pragma once

// Embedding file: first line "V d", then V lines "token x1 ... xd".
// Permutation file: one original index per line.

#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "mmfcomm/semantic.hpp"
#include "mmfcomm/text.hpp"

namespace mmfcomm::semantic {

inline EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw ParseError("embedding file: empty input");
  const auto head = text::split_ws(line);
  if (head.size() != 2) throw ParseError("embedding file: header must be 'V d'");
  const auto vocab = text::parse_int<std::size_t>(head[0], "embedding V");
  const auto dim = text::parse_int<std::size_t>(head[1], "embedding d");
  if (vocab < 2 || dim < 1) throw ParseError("embedding file: need V >= 2 and d >= 1");

  std::vector<std::string> tokens;
  std::vector<double> data;
  tokens.reserve(vocab);
  data.reserve(vocab * dim);
  std::set<std::string, std::less<>> seen;
  for (std::size_t t = 0; t < vocab; ++t) {
    if (!text::next_line(in, line)) throw ParseError("embedding file: expected " + std::to_string(vocab) + " rows");
    const auto fields = text::split_ws(line);
    if (fields.size() != dim + 1) {
      throw ParseError("embedding file: row " + std::to_string(t + 1) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(dim + 1));
    }
    std::string token(fields[0]);
    if (!seen.insert(token).second) throw ParseError("embedding file: duplicate token '" + token + "'");
    tokens.push_back(std::move(token));
    for (std::size_t j = 1; j <= dim; ++j) data.push_back(text::parse_real(fields[j], "embedding value"));
  }
  try {
    return EmbeddingTable(std::move(tokens), dim, std::move(data));
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("embedding file: ") + e.what());
  }
}

inline void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t t = 0; t < table.size(); ++t) {
    out << table.tokens()[t];
    for (double v : table.vector(t)) out << ' ' << text::format_real(v);
    out << '\n';
  }
}

inline void write_permutation(std::ostream& out, const IndexPermutation& perm) {
  for (int t : perm.order) out << t << '\n';
}

inline IndexPermutation read_permutation(std::istream& in) {
  IndexPermutation perm;
  std::string line;
  while (text::next_line(in, line)) {
    const auto s = text::trim(line);
    if (s.empty()) continue;
    perm.order.push_back(text::parse_int<int>(s, "permutation index"));
  }
  try {
    perm.validate(perm.order.size());
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("permutation file: ") + e.what());
  }
  return perm;
}

}  // namespace mmfcomm::semantic
