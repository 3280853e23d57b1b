#include "minidot/generator.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include "minidot/static_checker.hpp"

namespace minidot {

namespace {

struct Features {
  bool fsub = false, dot = false;
  bool bot = false, andor = false, fld = false, bindself = false, ref = false;
  bool rec = false, fix = false;
};

Features features(Level level) {
  Features f;
  auto at_least = [&](Level m) { return static_cast<int>(level) >= static_cast<int>(m); };
  if (level == Level::FSub) {
    f.fsub = true;
    return f;
  }
  if (level == Level::DOT) {
    f.dot = f.bot = f.andor = f.fld = f.bindself = true;
    return f;
  }
  f.bot = at_least(Level::DSubBot);
  f.andor = at_least(Level::DSubBotAndOr);
  f.fld = f.rec = at_least(Level::DSubBotAndOrRec);
  f.bindself = f.fix = at_least(Level::DSubBotAndOrRecFix);
  f.ref = at_least(Level::DSubBotAndOrRecFixMut);
  return f;
}

const Label& dot_type_label() {
  static const Label l = type_label("A");
  return l;
}
const Label& field_label() {
  static const Label l = value_label("l");
  return l;
}
const Label& meth_label() {
  static const Label l = method_label("m");
  return l;
}

const Label& sel_label(Level level) { return level == Level::DOT ? dot_type_label() : the_type_label(); }

class Enumerator {
 public:
  explicit Enumerator(Level level) : level_(level), f_(features(level)) {}

  const std::vector<Ty>& types(const Scope& sc, int n) {
    auto key = std::make_pair(sc, n);
    if (auto it = ty_memo_.find(key); it != ty_memo_.end()) return it->second;
    std::vector<Ty> out = build_types(sc, n);
    return ty_memo_.emplace(key, std::move(out)).first->second;
  }

  const std::vector<Tm>& terms(const Scope& sc, int n) {
    auto key = std::make_pair(sc, n);
    if (auto it = tm_memo_.find(key); it != tm_memo_.end()) return it->second;
    std::vector<Tm> out = build_terms(sc, n);
    return tm_memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  Level level_;
  Features f_;
  std::map<std::pair<Scope, int>, std::vector<Ty>> ty_memo_;
  std::map<std::pair<Scope, int>, std::vector<Tm>> tm_memo_;

  std::vector<Ty> build_types(const Scope& sc, int n) {
    std::vector<Ty> out;
    if (n <= 0) return out;
    if (n == 1) {
      out.push_back(Ty::top());
      if (f_.bot) out.push_back(Ty::bot());
      for (std::size_t i = 0; i < sc.size(); ++i) {
        const char k = sc[sc.size() - 1 - i];
        const VarRef v = VarRef::bound_at(static_cast<int>(i));
        if (k == 't' && !f_.fsub) out.push_back(Ty::sel(v, sel_label(level_)));
        if (k == 'y' && f_.fsub) out.push_back(Ty::fvar(v));
      }
      return out;
    }
    const Scope inner = sc + 't';
    if (f_.ref)
      for (const auto& t : types(sc, n - 1)) out.push_back(Ty::ref(t));
    if (f_.bindself)
      for (const auto& t : types(inner, n - 1)) out.push_back(Ty::bind_self(t));
    if (f_.fld)
      for (const auto& t : types(sc, n - 1)) out.push_back(Ty::fld(field_label(), t));
    for (int k = 1; k + 1 < n; ++k) {
      const int r = n - 1 - k;
      if (f_.andor)
        for (const auto& a : types(sc, k))
          for (const auto& b : types(sc, r)) {
            out.push_back(Ty::and_(a, b));
            out.push_back(Ty::or_(a, b));
          }
      if (f_.fsub) {
        for (const auto& a : types(sc, k)) {
          for (const auto& b : types(sc + 'y', r)) out.push_back(Ty::all_sub(a, b));
          for (const auto& b : types(sc, r)) out.push_back(Ty::arrow(a, b));
        }
      } else if (f_.dot) {
        for (const auto& a : types(sc, k)) {
          for (const auto& b : types(sc, r)) out.push_back(Ty::type_mem(dot_type_label(), a, b));
          for (const auto& b : types(inner, r)) out.push_back(Ty::method(meth_label(), a, b));
        }
      } else {
        for (const auto& a : types(sc, k))
          for (const auto& b : types(inner, r)) out.push_back(Ty::dep_fun(a, b));
        // Type tags; DSub only admits {Type<:T} and {Type=T}.
        if (level_ == Level::DSub) {
          if (k == 1)
            for (const auto& b : types(sc, r)) out.push_back(Ty::type_tag(Ty::bot(), b));
          if (k == r)
            for (const auto& a : types(sc, k)) out.push_back(Ty::type_tag(a, a));
        } else {
          for (const auto& a : types(sc, k))
            for (const auto& b : types(sc, r)) out.push_back(Ty::type_tag(a, b));
        }
      }
    }
    return out;
  }

  // Object bodies: at most one declaration per label, in the order A, l, m.
  void decl_lists(const Scope& self_sc, int n, std::vector<std::vector<Decl>>& out) {
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<int> which;
      for (int b = 0; b < 3; ++b)
        if (mask & (1 << b)) which.push_back(b);
      fill_decls(self_sc, which, 0, n, {}, out);
    }
  }

  void fill_decls(const Scope& sc, const std::vector<int>& which, std::size_t idx, int n, std::vector<Decl> acc,
                  std::vector<std::vector<Decl>>& out) {
    if (idx == which.size()) {
      if (n == 0) out.push_back(std::move(acc));
      return;
    }
    const int kind = which[idx];
    for (int k = 1; k <= n; ++k) {
      const int rest = n - k;
      if (kind == 0) {
        for (const auto& t : types(sc, k - 1)) {
          auto next = acc;
          next.push_back(Decl::type_init(dot_type_label(), t));
          fill_decls(sc, which, idx + 1, rest, std::move(next), out);
        }
      } else if (kind == 1) {
        for (const auto& t : terms(sc, k - 1)) {
          auto next = acc;
          next.push_back(Decl::field_init(field_label(), t));
          fill_decls(sc, which, idx + 1, rest, std::move(next), out);
        }
      } else {
        for (int p = 1; p + 1 < k; ++p)
          for (const auto& pt : types(sc, p))
            for (const auto& body : terms(sc + 't', k - 1 - p)) {
              auto next = acc;
              next.push_back(Decl::method_init(meth_label(), pt, body));
              fill_decls(sc, which, idx + 1, rest, std::move(next), out);
            }
      }
    }
  }

  std::vector<Tm> build_terms(const Scope& sc, int n) {
    std::vector<Tm> out;
    if (n <= 0) return out;
    if (n == 1) {
      for (std::size_t i = 0; i < sc.size(); ++i)
        if (sc[sc.size() - 1 - i] == 't') out.push_back(Tm::var(VarRef::bound_at(static_cast<int>(i))));
      if (f_.rec) out.push_back(Tm::rec({}));
      return out;
    }
    const Scope inner = sc + 't';
    if (f_.dot) {
      for (const auto& t : terms(sc, n - 1)) out.push_back(Tm::sel_field(t, field_label()));
      for (int k = 1; k + 1 < n; ++k)
        for (const auto& a : terms(sc, k))
          for (const auto& b : terms(sc, n - 1 - k)) out.push_back(Tm::invoke(a, meth_label(), b));
      std::vector<std::vector<Decl>> ds;
      decl_lists(inner, n - 2, ds);
      for (auto& d : ds) out.push_back(Tm::obj(std::move(d)));
      return out;
    }
    if (!f_.fsub)
      for (const auto& t : types(sc, n - 1)) out.push_back(Tm::type_val(t));
    if (f_.rec) {
      for (const auto& t : terms(sc, n - 1)) out.push_back(Tm::sel_field(t, field_label()));
      for (const auto& t : terms(sc, n - 2)) out.push_back(Tm::rec({Decl::field_init(field_label(), t)}));
    }
    if (f_.ref) {
      for (const auto& t : terms(sc, n - 1)) {
        out.push_back(Tm::ref_new(t));
        out.push_back(Tm::deref(t));
      }
    }
    for (int k = 1; k + 1 < n; ++k) {
      const int r = n - 1 - k;
      for (const auto& a : types(sc, k))
        for (const auto& b : terms(inner, r)) out.push_back(Tm::lam(a, b));
      for (const auto& a : terms(sc, k))
        for (const auto& b : terms(sc, r)) {
          out.push_back(Tm::app(a, b));
          if (f_.ref) out.push_back(Tm::assign(a, b));
        }
      if (f_.fsub) {
        for (const auto& a : types(sc, k))
          for (const auto& b : terms(sc + 'y', r)) out.push_back(Tm::ty_lam(a, b));
        for (const auto& a : terms(sc, k))
          for (const auto& b : types(sc, r)) out.push_back(Tm::ty_app(a, b));
      }
      if (f_.fix)
        for (const auto& a : types(inner, k))
          for (const auto& b : terms(inner, r)) out.push_back(Tm::fix(a, b));
    }
    return out;
  }
};

std::mutex& enum_mutex() {
  static std::mutex m;
  return m;
}

Enumerator& enumerator(Level level) {
  static std::map<Level, Enumerator> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, Enumerator(level)).first;
  return it->second;
}

}  // namespace

std::vector<Ty> enumerate_types(Level level, const Scope& scope, int size) {
  std::lock_guard<std::mutex> lock(enum_mutex());
  std::vector<Ty> out;
  for (const auto& t : enumerator(level).types(scope, size))
    if (gate_type(level, t)) out.push_back(t);
  return out;
}

std::vector<Tm> enumerate_terms(Level level, const Scope& scope, int size) {
  std::lock_guard<std::mutex> lock(enum_mutex());
  std::vector<Tm> out;
  for (const auto& t : enumerator(level).terms(scope, size))
    if (gate_term(level, t)) out.push_back(t);
  return out;
}

std::vector<GenTerm> generate(const GenConfig& cfg) {
  std::vector<GenTerm> out;
  CheckOptions co;
  co.fuel = 4000;
  co.mutations = cfg.mutations;
  auto consider = [&](const Tm& t) {
    try {
      Judgment j = typecheck(cfg.level, TypingCtx(), t, co);
      if (j.proved()) out.push_back({t, j.type});
    } catch (const IllFormed&) {
    }
  };
  if (cfg.mode == GenMode::Exhaustive) {
    for (int n = 1; n <= cfg.max_ast_size; ++n)
      for (const auto& t : enumerate_terms(cfg.level, "", n)) consider(t);
    return out;
  }
  std::mt19937_64 rng(cfg.seed);
  std::size_t attempts = 0;
  while (out.size() < cfg.random_count && attempts < cfg.random_count * 200) {
    ++attempts;
    consider(random_term(cfg.level, rng, cfg.max_ast_size));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random generation

namespace {

class RandomGen {
 public:
  RandomGen(Level level, std::mt19937_64& rng) : level_(level), f_(features(level)), rng_(rng) {}

  Ty ty(const Scope& sc, int budget) {
    if (budget <= 1 || coin(3)) return ty_leaf(sc);
    const int b = budget - 1;
    std::vector<int> opts;
    if (f_.fsub) opts = {0, 1};
    else if (f_.dot) opts = {2, 3};
    else opts = {4, 5};
    if (f_.andor) opts.insert(opts.end(), {6, 7});
    if (f_.fld) opts.push_back(8);
    if (f_.bindself) opts.push_back(9);
    if (f_.ref) opts.push_back(10);
    switch (opts[pick(opts.size())]) {
      case 0: return Ty::all_sub(ty(sc, b / 2), ty(sc + 'y', b / 2));
      case 1: return Ty::arrow(ty(sc, b / 2), ty(sc, b / 2));
      case 2: return Ty::type_mem(dot_type_label(), ty(sc, b / 2), ty(sc, b / 2));
      case 3: return Ty::method(meth_label(), ty(sc, b / 2), ty(sc + 't', b / 2));
      case 4: return Ty::dep_fun(ty(sc, b / 2), ty(sc + 't', b / 2));
      case 5: {
        Ty hi = ty(sc, b - 1);
        if (level_ == Level::DSub) return coin(2) ? Ty::type_tag(Ty::bot(), hi) : Ty::type_tag(hi, hi);
        return Ty::type_tag(ty(sc, b / 2), hi);
      }
      case 6: return Ty::and_(ty(sc, b / 2), ty(sc, b / 2));
      case 7: return Ty::or_(ty(sc, b / 2), ty(sc, b / 2));
      case 8: return Ty::fld(field_label(), ty(sc, b));
      case 9: return Ty::bind_self(ty(sc + 't', b));
      default: return Ty::ref(ty(sc, b));
    }
  }

  Tm tm(const Scope& sc, int budget) {
    if (budget <= 1 || coin(4)) return tm_leaf(sc, budget);
    const int b = budget - 1;
    if (f_.dot) {
      switch (pick(3)) {
        case 0: return Tm::sel_field(tm(sc, b), field_label());
        case 1: return Tm::invoke(tm(sc, b / 2), meth_label(), tm(sc, b / 2));
        default: return obj(sc, b);
      }
    }
    std::vector<int> opts{0, 1, 2};
    if (f_.fsub) opts.insert(opts.end(), {3, 4});
    if (f_.rec) opts.insert(opts.end(), {5, 6});
    if (f_.fix) opts.push_back(7);
    if (f_.ref) opts.insert(opts.end(), {8, 9, 10});
    switch (opts[pick(opts.size())]) {
      case 0: return Tm::lam(ty(sc, b / 2), tm(sc + 't', b / 2));
      case 1: return Tm::app(tm(sc, b / 2), tm(sc, b / 2));
      case 2: return f_.fsub ? Tm::app(tm(sc, b / 2), tm(sc, b / 2)) : Tm::type_val(ty(sc, b));
      case 3: return Tm::ty_lam(ty(sc, b / 2), tm(sc + 'y', b / 2));
      case 4: return Tm::ty_app(tm(sc, b / 2), ty(sc, b / 2));
      case 5: return Tm::rec({Decl::field_init(field_label(), tm(sc, b))});
      case 6: return Tm::sel_field(tm(sc, b), field_label());
      case 7: return Tm::fix(ty(sc + 't', b / 2), tm(sc + 't', b / 2));
      case 8: return Tm::ref_new(tm(sc, b));
      case 9: return Tm::deref(tm(sc, b));
      default: return Tm::assign(tm(sc, b / 2), tm(sc, b / 2));
    }
  }

 private:
  Level level_;
  Features f_;
  std::mt19937_64& rng_;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(int one_in) { return pick(static_cast<std::size_t>(one_in)) == 0; }

  Ty ty_leaf(const Scope& sc) {
    std::vector<Ty> leaves{Ty::top()};
    if (f_.bot) leaves.push_back(Ty::bot());
    for (std::size_t i = 0; i < sc.size(); ++i) {
      const char k = sc[sc.size() - 1 - i];
      const VarRef v = VarRef::bound_at(static_cast<int>(i));
      if (k == 't' && !f_.fsub) leaves.push_back(Ty::sel(v, sel_label(level_)));
      if (k == 'y' && f_.fsub) leaves.push_back(Ty::fvar(v));
    }
    return leaves[pick(leaves.size())];
  }

  Tm tm_leaf(const Scope& sc, int budget) {
    std::vector<Tm> leaves;
    for (std::size_t i = 0; i < sc.size(); ++i)
      if (sc[sc.size() - 1 - i] == 't') leaves.push_back(Tm::var(VarRef::bound_at(static_cast<int>(i))));
    if (!leaves.empty() && !coin(3)) return leaves[pick(leaves.size())];
    if (f_.dot) return Tm::obj({Decl::type_init(dot_type_label(), ty(sc + 't', std::max(1, budget - 2)))});
    if (f_.fsub) return Tm::lam(Ty::top(), Tm::var(VarRef::bound_at(0)));
    if (f_.rec && coin(3)) return Tm::rec({});
    return Tm::type_val(ty(sc, std::max(1, budget - 1)));
  }

  Tm obj(const Scope& sc, int b) {
    const Scope self = sc + 't';
    std::vector<Decl> ds;
    if (coin(2)) ds.push_back(Decl::type_init(dot_type_label(), ty(self, std::max(1, b / 3))));
    if (coin(2)) ds.push_back(Decl::field_init(field_label(), tm(self, std::max(1, b / 3))));
    if (coin(2))
      ds.push_back(Decl::method_init(meth_label(), ty(self, std::max(1, b / 4)), tm(self + 't', std::max(1, b / 3))));
    return Tm::obj(std::move(ds));
  }
};

}  // namespace

Ty instantiate_scope(const Ty& t, const std::vector<VarRef>& names) {
  return map_leaves(t, [&](const Ty& leaf, int depth) -> std::optional<Ty> {
    const VarRef& v = leaf.var();
    if (!v.bound || v.index < depth) return std::nullopt;
    const std::size_t k = static_cast<std::size_t>(v.index - depth);
    if (k >= names.size()) return std::nullopt;
    const VarRef& name = names[names.size() - 1 - k];
    return leaf.kind() == TyKind::Sel ? Ty::sel(name, leaf.label()) : Ty::fvar(name);
  });
}

Tm random_term(Level level, std::mt19937_64& rng, int max_size) {
  RandomGen g(level, rng);
  const int budget = std::uniform_int_distribution<int>(1, std::max(1, max_size))(rng);
  return g.tm("", budget);
}

Ty random_type(Level level, const Scope& scope, std::mt19937_64& rng, int max_size) {
  RandomGen g(level, rng);
  const int budget = std::uniform_int_distribution<int>(1, std::max(1, max_size))(rng);
  return g.ty(scope, budget);
}

}  // namespace minidot
