#pragma once

// Tokenizer shared by the domain, instance and program readers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/error.hpp"

namespace bfgp::detail {

enum class Tok : std::uint8_t { ident, integer, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

// Identifiers may contain '-' when it is followed by a letter, so
// `vector-add` is one token while `x - 1` is three.
std::vector<Token> tokenize(std::string_view text, std::size_t line_number);

class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, std::size_t line, std::size_t end_column)
      : tokens_(std::move(tokens)), line_(line), end_column_(end_column) {}

  const Token& peek(std::size_t ahead = 0) const;
  bool at_end() const { return peek().kind == Tok::end; }
  bool accept(std::string_view punct);
  void expect(std::string_view punct);
  std::string expect_ident(const char* what);
  std::int64_t expect_integer(const char* what);
  [[noreturn]] void fail(const std::string& message) const;
  Token next();

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t end_column_;
  Token end_token_;
};

TokenStream stream_for(std::string_view text, std::size_t line_number);

// Splits text into lines, dropping '#' comments and trailing whitespace.
struct SourceLine {
  std::size_t number = 0;
  std::string text;
};
std::vector<SourceLine> source_lines(std::string_view text);

}  // namespace bfgp::detail
