#pragma once

#include <optional>
#include <vector>

#include "minidot/evaluator.hpp"
#include "minidot/judgment.hpp"
#include "minidot/syntax.hpp"

namespace minidot {

enum class Precision { Imprecise, PreciseLookup, Invertible };

std::string_view precision_name(Precision p);
std::optional<Precision> parse_precision(std::string_view s);

// J: comparison variables bound to hypothetical environment/type pairs.
struct AbsBinding {
  VarRef name;
  RtEnv env;
  Ty type;
};

class AbsEnv {
 public:
  AbsEnv extend(VarRef name, RtEnv env, Ty type) const;
  const AbsBinding* lookup(const VarRef& name) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<AbsBinding>& entries() const { return entries_; }

 private:
  std::vector<AbsBinding> entries_;
};

using StoreTyping = std::vector<StoreTypingEntry>;

Judgment dyn_subtype(Level level, const StoreTyping& st, const AbsEnv& j, const RtEnv& h1, const Ty& t1,
                     const RtEnv& h2, const Ty& t2, Precision mode = Precision::Imprecise,
                     const CheckOptions& opts = {});

Judgment value_type(Level level, const StoreTyping& st, const RtEnv& h, const ValuePtr& v, const Ty& t,
                    const CheckOptions& opts = {});

// Γ ⊨ H J: term bindings of Γ are matched by name against H, comparison
// bindings against J.
Judgment consistent_env(Level level, const TypingCtx& g, const RtEnv& h, const AbsEnv& j, const StoreTyping& st,
                        const CheckOptions& opts = {});

// Requires Γ ⊢ S <: U; returns the verdict of J ⊢ (H,S) <: (H,U).
// Throws IllFormed when the static premise does not hold.
Judgment static_implies_dynamic_probe(Level level, const TypingCtx& g, const Ty& s, const Ty& u, const RtEnv& h,
                                      const AbsEnv& j, const StoreTyping& st, const CheckOptions& opts = {});

// Replaces the hypothetical binding z <: <H,T> by concrete F<: bindings
// Y1 = <H,T> in H1 and Y2 = <H,T> in H2 and re-runs the comparison.
struct SubstProbe {
  Verdict before = Verdict::Unknown;
  Verdict after = Verdict::Unknown;
  bool violated() const { return before == Verdict::Proved && after == Verdict::Refuted; }
};

SubstProbe subst_hypothetical(Level level, const StoreTyping& st, const AbsEnv& j, const VarRef& z, const RtEnv& hz,
                              const Ty& tz, const RtEnv& h1, const Ty& t1, const RtEnv& h2, const Ty& t2,
                              const CheckOptions& opts = {});

}  // namespace minidot
