#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "minidot/syntax.hpp"

namespace minidot {

enum class Verdict { Proved, Refuted, Unknown };

std::string_view verdict_name(Verdict v);

// Switches used by the mutation suite. Every field defaults to the faithful
// behaviour; turning one off removes the corresponding guard.
struct Mutations {
  bool good_bounds = true;
  bool unpack_empty_j = true;
  bool ctx_restrict = true;
};

enum class JudgmentForm {
  Sub,         // ctx |- lhs <: rhs
  VarHas,      // ctx |- var : rhs
  Type,        // ctx |- term : rhs
  GoodBounds,  // ctx |- rhs has good bounds
  DynSub,      // J |- (h1, lhs) <: (h2, rhs)
  ValueType,   // H |- value : rhs
};

struct TraceNode;
using TracePtr = std::shared_ptr<const TraceNode>;

struct TraceNode {
  std::string rule;
  JudgmentForm form = JudgmentForm::Sub;
  TypingCtx ctx;
  Ty lhs;
  Ty rhs;
  Tm term;
  VarRef var;
  // Runtime judgments: size of J and opaque environment identities.
  std::size_t j_size = 0;
  const void* h1 = nullptr;
  const void* h2 = nullptr;
  std::vector<TracePtr> children;
};

struct Judgment {
  Verdict verdict = Verdict::Unknown;
  std::size_t fuel_used = 0;
  TracePtr trace;
  Ty type;  // typecheck only
  std::string reason;

  bool proved() const { return verdict == Verdict::Proved; }
  bool refuted() const { return verdict == Verdict::Refuted; }
  bool unknown() const { return verdict == Verdict::Unknown; }
};

struct CheckOptions {
  std::size_t fuel = 1000;
  bool trace = false;
  Mutations mutations;
};

// Ill-formed input (dangling names, gate violations at checker entry).
class IllFormed : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Global rule-application budget shared by a whole check.
class Budget {
 public:
  explicit Budget(std::size_t fuel) : left_(fuel) {}
  bool take() {
    if (left_ == 0) {
      exhausted_ = true;
      return false;
    }
    --left_;
    ++used_;
    return true;
  }
  std::size_t used() const { return used_; }
  bool exhausted() const { return exhausted_; }

  // One rule application: takes a unit of fuel and bounds recursion depth,
  // so deep searches end as Unknown instead of exhausting the stack.
  class Frame {
   public:
    explicit Frame(Budget& b) : b_(b), ok_(b.take()) {
      if (++b_.depth_ > b_.max_depth_) {
        ok_ = false;
        b_.exhausted_ = true;
      }
    }
    ~Frame() { --b_.depth_; }
    Frame(const Frame&) = delete;
    Frame& operator=(const Frame&) = delete;
    bool ok() const { return ok_; }

   private:
    Budget& b_;
    bool ok_;
  };

  static constexpr std::size_t kMaxDepth = 400;

 private:
  std::size_t left_;
  std::size_t used_ = 0;
  std::size_t depth_ = 0;
  std::size_t max_depth_ = kMaxDepth;
  bool exhausted_ = false;
};

// Re-validates a derivation node by node against the rule schemas.
// Returns false (and a message) on the first node that does not instantiate
// its rule.
bool replay_trace(const TracePtr& trace, std::string* why = nullptr);

std::string format_trace(const TracePtr& trace, Level level);

}  // namespace minidot
