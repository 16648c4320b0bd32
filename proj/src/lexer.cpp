#include "lexer.hpp"

#include <cctype>

namespace cpswp::detail {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const std::size_t l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\'')) {
        ++j;
      }
      out.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      auto digits = [&] {
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      };
      digits();
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        digits();
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          digits();
        }
      }
      out.push_back({TokenKind::Number, std::string(text.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    static const char* const two_char[] = {"->", "=>", "&&", "||"};
    bool matched = false;
    for (const char* s : two_char) {
      if (text.substr(i, 2) == s) {
        out.push_back({TokenKind::Symbol, s, l, cl});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string_view singles = "(),.:[]|*+=\\<>{}!";
    if (singles.find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({TokenKind::End, "", line, col});
  return out;
}

}  // namespace cpswp::detail
