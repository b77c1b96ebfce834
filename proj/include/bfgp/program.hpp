#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/model.hpp"

namespace bfgp {

// Joint flag value; the numeric value is the feature-vector offset.
enum class Feature : std::uint8_t {
  negative = 0,     // !Yz&!Yc
  zero = 1,         // Yz&!Yc
  positive = 2,     // !Yz&Yc
  unreachable = 3,  // Yz&Yc, never produced, so a goto on it always jumps
};

inline Feature feature_of(bool zero, bool carry) {
  return static_cast<Feature>((zero ? 1 : 0) | (carry ? 2 : 0));
}
const char* to_string(Feature f);

class Line {
 public:
  enum class Kind : std::uint8_t { undefined, end, action, jump };

  constexpr Line() = default;
  static constexpr Line undefined() { return Line(0); }
  static constexpr Line end() { return Line(1); }
  static constexpr Line action(InstructionId id) { return Line(2 + id); }
  static constexpr Line jump(std::uint32_t target, Feature f) {
    return Line(kJumpBit | (target << 2) | static_cast<std::uint32_t>(f));
  }
  static constexpr Line from_code(std::uint32_t code) { return Line(code); }

  constexpr Kind kind() const {
    if (code_ & kJumpBit) return Kind::jump;
    if (code_ >= 2) return Kind::action;
    return code_ == 1 ? Kind::end : Kind::undefined;
  }
  constexpr bool is_undefined() const { return code_ == 0; }
  constexpr InstructionId instruction() const { return code_ - 2; }
  constexpr std::uint32_t target() const { return (code_ & ~kJumpBit) >> 2; }
  constexpr Feature feature() const { return static_cast<Feature>(code_ & 3u); }
  constexpr std::uint32_t code() const { return code_; }

  friend constexpr bool operator==(Line, Line) = default;

 private:
  static constexpr std::uint32_t kJumpBit = 0x8000'0000u;
  constexpr explicit Line(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

// A planning program over n lines; the last line is always `end` and no other
// line is. Lines other than the last may be undefined (partial program).
class Program {
 public:
  Program() : Program(1) {}
  explicit Program(std::size_t n);
  Program(std::vector<Line> lines, std::size_t instruction_count);

  std::size_t size() const { return lines_.size(); }
  Line line(std::size_t i) const { return lines_[i]; }
  std::span<const Line> lines() const { return lines_; }
  bool is_complete() const;

  // Copies with one undefined line programmed.
  Program with_action(std::size_t i, InstructionId id) const;
  Program with_goto(std::size_t i, std::size_t target, Feature f) const;

  std::size_t hash() const;
  friend bool operator==(const Program&, const Program&) = default;

 private:
  void check_line_free(std::size_t i) const;
  std::vector<Line> lines_;
};

struct ProgramHash {
  std::size_t operator()(const Program& p) const { return p.hash(); }
};

bool goto_target_valid(std::size_t line, std::size_t target, std::size_t n);
// Position of a goto target within the n-2 admissible destinations of a line.
std::size_t transition_index(std::size_t line, std::size_t target);
std::size_t transition_target(std::size_t line, std::size_t index);

Program program_line_action(const Program& program, std::size_t i, InstructionId id);
Program program_line_goto(const Program& program, std::size_t i, std::size_t target, Feature f);

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true);
  std::size_t count() const;
  std::size_t count(std::size_t begin, std::size_t end) const;
  // Hex digits, most significant bit first; bit 0 is the last digit's LSB.
  std::string to_hex() const;
  static BitVector from_hex(std::string_view hex, std::size_t size);

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const BitVector& a, const BitVector& b);

// Layout: action vector (line-major, |A| bits per line), transition vector
// (n-2 bits per line), feature vector (4 bits per line), the last line omitted.
std::size_t encoding_length(std::size_t n, std::size_t instruction_count);
BitVector encode(const Program& program, std::size_t instruction_count);
Program decode(const BitVector& bits, std::size_t n, std::size_t instruction_count);
Program decode(const BitVector& bits, std::size_t n, const ExtendedDomain& domain);

// Text form: one `<idx>. <instr>` per line; gotos as `goto(t,!(<flags>))`,
// undefined lines as `--`.
std::string print_line(Line line, const ExtendedDomain& domain);
std::string print_program(const Program& program, const ExtendedDomain& domain);
Program parse_program(std::string_view text, const ExtendedDomain& domain);

}  // namespace bfgp
