#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/model.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

enum class InstanceSet : std::uint8_t { synthesis, validation };

InstanceSet parse_instance_set(std::string_view text);

struct BuiltinDomain {
  std::string name;
  Domain domain;
  std::size_t synthesis_lines = 0;        // program size used for synthesis
  std::size_t synthesis_count = 0;        // default instance counts
  std::size_t validation_count = 0;
};

std::vector<std::string> builtin_domain_names();
BuiltinDomain builtin_domain(std::string_view name);
std::string builtin_domain_text(std::string_view name);
// Extended with the domain's default pointers.
ExtendedDomain builtin_extended_domain(std::string_view name);

// Deterministic for a given (name, set, count, seed). A count of nullopt uses
// the set's default size; larger counts continue the size schedule.
std::vector<Instance> generate_instances(std::string_view name, InstanceSet set, std::optional<std::size_t> count,
                                         std::uint64_t seed);

// Reference programs, in program text form, for every builtin domain.
std::string corpus_program_text(std::string_view name);
Program corpus_program(std::string_view name, const ExtendedDomain& domain);

}  // namespace bfgp
