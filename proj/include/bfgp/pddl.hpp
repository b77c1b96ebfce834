#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/model.hpp"

namespace bfgp::pddl {

struct AtomSchema {
  std::string predicate;
  std::vector<std::string> args;  // variables (with '?') or object names
  friend bool operator==(const AtomSchema&, const AtomSchema&) = default;
};

struct TypedName {
  std::string name;
  std::string type;
};

struct Predicate {
  std::string name;
  std::vector<TypedName> parameters;
};

struct Operator {
  std::string name;
  std::vector<TypedName> parameters;
  std::vector<AtomSchema> preconditions;
  std::vector<AtomSchema> deletes;
  std::vector<AtomSchema> adds;
};

struct DomainModel {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<std::string> types;  // flat; "object" when untyped
  std::vector<Predicate> predicates;
  std::vector<Operator> operators;
};

struct ProblemModel {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;  // declaration order
  std::vector<AtomSchema> init;
  std::vector<AtomSchema> goal;
};

struct StripsModel {
  DomainModel domain;
  std::vector<ProblemModel> problems;
};

DomainModel parse_domain(std::string_view text);
ProblemModel parse_problem(std::string_view text, const DomainModel& domain);
StripsModel parse_pddl(std::string_view domain_text, std::string_view problem_text);

struct Translation {
  Domain domain;
  std::vector<Pointer> pointers;
  std::vector<Instance> instances;
};

// Pointers default to the largest per-type arity over predicates and
// operators, named <type><k>. An explicit declaration must cover every operator.
Translation translate(const StripsModel& model, std::optional<std::vector<Pointer>> pointers = std::nullopt);

}  // namespace bfgp::pddl
