#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace bfgp::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::size_t line_number) {
  static constexpr std::string_view two_char[] = {":=", "!=", "<=", ">="};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.line = line_number;
    t.column = i + 1;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (ident_char(text[j]) || (text[j] == '-' && j + 1 < text.size() && ident_start(text[j + 1]))))
        ++j;
      t.kind = Tok::ident;
      t.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Tok::integer;
      t.text = std::string(text.substr(i, j - i));
      i = j;
    } else {
      t.kind = Tok::punct;
      t.text = std::string(1, c);
      for (auto p : two_char)
        if (text.substr(i, 2) == p) t.text = std::string(p);
      if (std::string_view("(),:;&|!=<>+-.").find(c) == std::string_view::npos)
        throw SyntaxError(line_number, i + 1, std::string("unexpected character '") + c + "'");
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  if (pos_ + ahead < tokens_.size()) return tokens_[pos_ + ahead];
  return end_token_;
}

Token TokenStream::next() {
  if (pos_ < tokens_.size()) return tokens_[pos_++];
  return end_token_;
}

bool TokenStream::accept(std::string_view punct) {
  const auto& t = peek();
  if (t.kind == Tok::punct && t.text == punct) {
    ++pos_;
    return true;
  }
  return false;
}

void TokenStream::expect(std::string_view punct) {
  if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
}

std::string TokenStream::expect_ident(const char* what) {
  if (peek().kind != Tok::ident) fail(std::string("expected ") + what);
  return next().text;
}

std::int64_t TokenStream::expect_integer(const char* what) {
  bool negative = false;
  if (peek().kind == Tok::punct && peek().text == "-" && peek(1).kind == Tok::integer) {
    negative = true;
    ++pos_;
  }
  if (peek().kind != Tok::integer) fail(std::string("expected ") + what);
  const auto t = next();
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc()) throw SyntaxError(t.line, t.column, "integer out of range");
  return negative ? -v : v;
}

void TokenStream::fail(const std::string& message) const {
  const auto& t = peek();
  if (t.kind == Tok::end) throw SyntaxError(line_, end_column_, message + " at end of line");
  throw SyntaxError(t.line, t.column, message + ", found '" + t.text + "'");
}

TokenStream stream_for(std::string_view text, std::size_t line_number) {
  return TokenStream(tokenize(text, line_number), line_number, text.size() + 1);
}

std::vector<SourceLine> source_lines(std::string_view text) {
  std::vector<SourceLine> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    ++number;
    std::string line(text.substr(start, stop - start));
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (!blank) out.push_back({number, std::move(line)});
    if (stop == text.size()) break;
    start = stop + 1;
  }
  return out;
}

}  // namespace bfgp::detail
