#include "bfgp/program.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <sstream>

#include "bfgp/error.hpp"
#include "lexer.hpp"

namespace bfgp {

const char* to_string(Feature f) {
  switch (f) {
    case Feature::negative: return "!Yz&!Yc";
    case Feature::zero: return "Yz&!Yc";
    case Feature::positive: return "!Yz&Yc";
    case Feature::unreachable: return "Yz&Yc";
  }
  return "?";
}

bool goto_target_valid(std::size_t line, std::size_t target, std::size_t n) {
  return target < n && target != line && target != line + 1;
}

std::size_t transition_index(std::size_t line, std::size_t target) { return target < line ? target : target - 2; }

std::size_t transition_target(std::size_t line, std::size_t index) { return index < line ? index : index + 2; }

Program::Program(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "a program needs at least one line");
  lines_.assign(n, Line::undefined());
  lines_.back() = Line::end();
}

Program::Program(std::vector<Line> lines, std::size_t instruction_count) : lines_(std::move(lines)) {
  const std::size_t n = lines_.size();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "a program needs at least one line");
  if (lines_.back() != Line::end()) throw Error(ErrorKind::invalid_argument, "the last line must be end");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Line l = lines_[i];
    switch (l.kind()) {
      case Line::Kind::end: throw Error(ErrorKind::invalid_argument, "end only allowed on the last line");
      case Line::Kind::action:
        if (l.instruction() >= instruction_count)
          throw Error(ErrorKind::invalid_argument, "instruction index out of range on line " + std::to_string(i));
        break;
      case Line::Kind::jump:
        if (!goto_target_valid(i, l.target(), n))
          throw Error(ErrorKind::invalid_argument, "invalid goto target on line " + std::to_string(i));
        break;
      case Line::Kind::undefined: break;
    }
  }
}

bool Program::is_complete() const {
  for (auto l : lines_)
    if (l.is_undefined()) return false;
  return true;
}

void Program::check_line_free(std::size_t i) const {
  if (i + 1 >= lines_.size()) throw Error(ErrorKind::invalid_argument, "line " + std::to_string(i) + " cannot be programmed");
  if (!lines_[i].is_undefined())
    throw Error(ErrorKind::line_already_programmed, "line " + std::to_string(i) + " is already programmed");
}

Program Program::with_action(std::size_t i, InstructionId id) const {
  check_line_free(i);
  Program p = *this;
  p.lines_[i] = Line::action(id);
  return p;
}

Program Program::with_goto(std::size_t i, std::size_t target, Feature f) const {
  check_line_free(i);
  if (!goto_target_valid(i, target, lines_.size()))
    throw Error(ErrorKind::invalid_argument, "invalid goto target " + std::to_string(target));
  Program p = *this;
  p.lines_[i] = Line::jump(static_cast<std::uint32_t>(target), f);
  return p;
}

std::size_t Program::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto l : lines_) {
    h ^= l.code();
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

Program program_line_action(const Program& program, std::size_t i, InstructionId id) {
  return program.with_action(i, id);
}

Program program_line_goto(const Program& program, std::size_t i, std::size_t target, Feature f) {
  return program.with_goto(i, target, f);
}

void BitVector::set(std::size_t i, bool v) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (v)
    words_[i / 64] |= mask;
  else
    words_[i / 64] &= ~mask;
}

std::size_t BitVector::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t BitVector::count(std::size_t begin, std::size_t end) const {
  std::size_t c = 0;
  for (std::size_t i = begin; i < end; ++i) c += get(i);
  return c;
}

std::string BitVector::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t nibbles = (size_ + 3) / 4;
  std::string s(nibbles, '0');
  for (std::size_t k = 0; k < nibbles; ++k) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      std::size_t i = 4 * k + b;
      if (i < size_ && get(i)) v |= 1u << b;
    }
    s[nibbles - 1 - k] = digits[v];
  }
  return s;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t size) {
  BitVector bv(size);
  const std::size_t nibbles = hex.size();
  for (std::size_t k = 0; k < nibbles; ++k) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[nibbles - 1 - k])));
    unsigned v;
    if (c >= '0' && c <= '9')
      v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v = static_cast<unsigned>(c - 'a' + 10);
    else
      throw Error(ErrorKind::malformed_encoding, "invalid hex digit");
    for (std::size_t b = 0; b < 4; ++b) {
      if (!((v >> b) & 1u)) continue;
      std::size_t i = 4 * k + b;
      if (i >= size) throw Error(ErrorKind::malformed_encoding, "hex string longer than the encoding");
      bv.set(i);
    }
  }
  return bv;
}

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::invalid_argument, "bit vectors differ in length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.get(i) != b.get(i);
  return d;
}

std::size_t encoding_length(std::size_t n, std::size_t instruction_count) {
  if (n < 2) return 0;
  return (n - 1) * (instruction_count + (n - 2) + 4);
}

BitVector encode(const Program& program, std::size_t instruction_count) {
  const std::size_t n = program.size();
  BitVector bits(encoding_length(n, instruction_count));
  if (n < 2) return bits;
  const std::size_t t_base = (n - 1) * instruction_count;
  const std::size_t f_base = t_base + (n - 1) * (n - 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Line l = program.line(i);
    if (l.kind() == Line::Kind::action) {
      if (l.instruction() >= instruction_count) throw Error(ErrorKind::invalid_argument, "instruction out of range");
      bits.set(i * instruction_count + l.instruction());
    } else if (l.kind() == Line::Kind::jump) {
      bits.set(t_base + i * (n - 2) + transition_index(i, l.target()));
      bits.set(f_base + i * 4 + static_cast<std::size_t>(l.feature()));
    }
  }
  return bits;
}

Program decode(const BitVector& bits, std::size_t n, std::size_t instruction_count) {
  if (n == 0) throw Error(ErrorKind::malformed_encoding, "zero lines");
  if (bits.size() != encoding_length(n, instruction_count))
    throw Error(ErrorKind::malformed_encoding, "encoding length does not match the line count");
  std::vector<Line> lines(n, Line::undefined());
  lines.back() = Line::end();
  const std::size_t t_base = (n - 1) * instruction_count;
  const std::size_t f_base = t_base + (n - 1) * (n - 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t action = instruction_count, target = n, feature = 4;
    std::size_t set_bits = 0;
    for (std::size_t a = 0; a < instruction_count; ++a)
      if (bits.get(i * instruction_count + a)) action = a, ++set_bits;
    std::size_t t_bits = 0, f_bits = 0;
    for (std::size_t t = 0; t + 2 < n; ++t)
      if (bits.get(t_base + i * (n - 2) + t)) target = transition_target(i, t), ++t_bits;
    for (std::size_t f = 0; f < 4; ++f)
      if (bits.get(f_base + i * 4 + f)) feature = f, ++f_bits;
    const std::string where = " on line " + std::to_string(i);
    if (set_bits > 1) throw Error(ErrorKind::malformed_encoding, "several actions" + where);
    if (t_bits > 1 || f_bits > 1) throw Error(ErrorKind::malformed_encoding, "several transitions" + where);
    if (t_bits != f_bits) throw Error(ErrorKind::malformed_encoding, "transition without feature" + where);
    if (set_bits && t_bits) throw Error(ErrorKind::malformed_encoding, "action and goto" + where);
    if (set_bits)
      lines[i] = Line::action(static_cast<InstructionId>(action));
    else if (t_bits)
      lines[i] = Line::jump(static_cast<std::uint32_t>(target), static_cast<Feature>(feature));
  }
  return Program(std::move(lines), instruction_count);
}

Program decode(const BitVector& bits, std::size_t n, const ExtendedDomain& domain) {
  return decode(bits, n, domain.instruction_count());
}

std::string print_line(Line line, const ExtendedDomain& domain) {
  switch (line.kind()) {
    case Line::Kind::undefined: return "--";
    case Line::Kind::end: return "end";
    case Line::Kind::action: return domain.instruction_name(line.instruction());
    case Line::Kind::jump:
      return "goto(" + std::to_string(line.target()) + ",!(" + to_string(line.feature()) + "))";
  }
  return {};
}

std::string print_program(const Program& program, const ExtendedDomain& domain) {
  std::ostringstream out;
  for (std::size_t i = 0; i < program.size(); ++i) out << i << ". " << print_line(program.line(i), domain) << "\n";
  return out.str();
}

namespace {

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

std::optional<Line> parse_goto(const std::string& s, std::size_t line_no, std::size_t column) {
  if (s.rfind("goto(", 0) != 0) return std::nullopt;
  auto comma = s.find(',');
  if (comma == std::string::npos) throw SyntaxError(line_no, column, "goto needs a target and a condition");
  std::uint32_t target = 0;
  auto digits = s.substr(5, comma - 5);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), target);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    throw SyntaxError(line_no, column + 5, "goto target must be a line number");
  auto cond = s.substr(comma + 1);
  if (cond.size() < 5 || cond.rfind("!(", 0) != 0 || cond.substr(cond.size() - 2) != "))")
    throw SyntaxError(line_no, column + comma + 1, "goto condition must be !(<flags>)");
  auto flags = cond.substr(2, cond.size() - 4);
  for (int f = 0; f < 4; ++f)
    if (flags == to_string(static_cast<Feature>(f))) return Line::jump(target, static_cast<Feature>(f));
  throw SyntaxError(line_no, column + comma + 3, "unknown flag condition '" + flags + "'");
}

}  // namespace

Program parse_program(std::string_view text, const ExtendedDomain& domain) {
  std::vector<Line> lines;
  std::vector<std::size_t> source_of;
  for (const auto& src : detail::source_lines(text)) {
    source_of.push_back(src.number);
    const std::string& s = src.text;
    std::size_t pos = s.find_first_not_of(" \t");
    std::size_t digits_end = pos;
    while (digits_end < s.size() && std::isdigit(static_cast<unsigned char>(s[digits_end]))) ++digits_end;
    if (digits_end == pos) throw SyntaxError(src.number, pos + 1, "expected a line number");
    std::size_t idx = 0;
    std::from_chars(s.data() + pos, s.data() + digits_end, idx);
    if (idx != lines.size())
      throw SyntaxError(src.number, pos + 1, "expected line number " + std::to_string(lines.size()));
    if (digits_end >= s.size() || s[digits_end] != '.') throw SyntaxError(src.number, digits_end + 1, "expected '.'");
    std::size_t body_col = s.find_first_not_of(" \t", digits_end + 1);
    if (body_col == std::string::npos) throw SyntaxError(src.number, s.size() + 1, "missing instruction");
    const std::string body = strip_spaces(std::string_view(s).substr(body_col));
    const std::size_t column = body_col + 1;
    if (body == "end") {
      lines.push_back(Line::end());
    } else if (body == "--") {
      lines.push_back(Line::undefined());
    } else if (auto g = parse_goto(body, src.number, column)) {
      lines.push_back(*g);
    } else if (auto id = domain.find_instruction(body)) {
      lines.push_back(Line::action(*id));
    } else {
      throw Error(ErrorKind::unknown_instruction,
                  std::to_string(src.number) + ":" + std::to_string(column) + ": unknown instruction '" + body + "'");
    }
  }
  if (lines.empty()) throw SyntaxError(1, 1, "empty program");
  if (lines.back() != Line::end()) throw SyntaxError(source_of.back(), 1, "the last line must be end");
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (lines[i] == Line::end()) throw SyntaxError(source_of[i], 1, "end only allowed on the last line");
    if (lines[i].kind() == Line::Kind::jump && !goto_target_valid(i, lines[i].target(), lines.size()))
      throw SyntaxError(source_of[i], 1, "invalid goto target " + std::to_string(lines[i].target()));
  }
  return Program(std::move(lines), domain.instruction_count());
}

}  // namespace bfgp
