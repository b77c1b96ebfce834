#pragma once

#include <span>
#include <string>
#include <string_view>

#include "bfgp/model.hpp"

namespace bfgp {

Domain parse_domain(std::string_view text);
std::string print_domain(const Domain& domain);

// Goal terms may address objects through the given pointers (e.g. `vector(b)=3`).
Instance parse_instance(std::string_view text, const Domain& domain, std::span<const Pointer> pointers = {});
std::string print_instance(const Instance& instance, const Domain& domain, std::span<const Pointer> pointers = {});

// Pointers named `name:type,...`; a bare count `k` is allowed for one-type domains
// and `type:k` declares k pointers of a type, named from the domain defaults first.
std::vector<Pointer> parse_pointer_declaration(std::string_view text, const Domain& domain);
std::vector<Pointer> default_pointers(const Domain& domain);

}  // namespace bfgp
