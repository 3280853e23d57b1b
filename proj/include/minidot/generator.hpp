#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "minidot/judgment.hpp"
#include "minidot/syntax.hpp"

namespace minidot {

enum class GenMode { Exhaustive, Random };

struct GenConfig {
  Level level = Level::DSub;
  int max_ast_size = 5;
  int max_fuel = 20;
  std::uint64_t seed = 1;
  GenMode mode = GenMode::Exhaustive;
  std::size_t random_count = 1000;  // random mode only
  Mutations mutations{};
};

struct GenTerm {
  Tm term;
  Ty type;  // inferred in the empty context
};

// Scope: one char per enclosing binder, innermost last. 't' binds a term
// variable, 'y' an F<: type variable.
using Scope = std::string;

// Every gated, locally closed type/term of exactly the given size.
std::vector<Ty> enumerate_types(Level level, const Scope& scope, int size);
std::vector<Tm> enumerate_terms(Level level, const Scope& scope, int size);

// Closed terms up to cfg.max_ast_size that typecheck, in size order.
std::vector<GenTerm> generate(const GenConfig& cfg);

// Random closed term, not necessarily well typed.
Tm random_term(Level level, std::mt19937_64& rng, int max_size);
// Replaces the scope's bound indices by `names` (oldest binder first).
Ty instantiate_scope(const Ty& t, const std::vector<VarRef>& names);

Ty random_type(Level level, const Scope& scope, std::mt19937_64& rng, int max_size);

}  // namespace minidot
