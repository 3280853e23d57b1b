#include "minidot/parser.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace minidot {

namespace {

enum class TokKind { Ident, Sym, End };

struct Token {
  TokKind kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize(std::string_view src, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({TokKind::Ident, std::string(src.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view two[] = {"..", ":=", "<:", "->"};
    bool matched = false;
    for (auto t : two) {
      if (src.substr(i, 2) == t) {
        out.push_back({TokKind::Sym, std::string(t), line, col});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one = "(){}[]:;,.=&|!";
    if (one.find(c) != std::string_view::npos) {
      out.push_back({TokKind::Sym, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({TokKind::End, "", line, col});
  return out;
}

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {"Top", "Bot", "rec", "all", "Ref", "fun", "tfun",
                                                       "typeval", "new", "fix", "ref", "let"};
  return k;
}

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

class Parser {
 public:
  Parser(std::vector<Token> toks, Level level, const FreeScope& scope,
         const std::map<std::string, Tm, std::less<>>* defs = nullptr)
      : toks_(std::move(toks)), level_(level), scope_(scope), defs_(defs) {}

  Ty whole_type() {
    const Token start = peek();
    Ty t = type();
    expect_end();
    if (auto o = gate_type_offender(level_, t)) throw GateError(*o, level_, start.line, start.col);
    return t;
  }

  Tm whole_term() {
    const Token start = peek();
    Tm t = term();
    expect_end();
    if (auto o = gate_term_offender(level_, t)) throw GateError(*o, level_, start.line, start.col);
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Level level_;
  const FreeScope& scope_;
  const std::map<std::string, Tm, std::less<>>* defs_;
  std::vector<std::string> binders_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is_sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::Sym && peek(ahead).text == s;
  }
  bool is_word(const char* s) const { return peek().kind == TokKind::Ident && peek().text == s; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == TokKind::End ? " (found end of input)" : " (found '" + t.text + "')"),
                     t.line, t.col);
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != TokKind::End) fail("unexpected trailing input");
  }
  std::string ident() {
    if (peek().kind != TokKind::Ident || keywords().count(peek().text)) fail("expected identifier");
    return next().text;
  }

  struct BinderScope {
    Parser& p;
    BinderScope(Parser& parser, std::string name) : p(parser) { p.binders_.push_back(std::move(name)); }
    ~BinderScope() { p.binders_.pop_back(); }
  };

  std::optional<VarRef> resolve(const std::string& name) const {
    for (std::size_t i = binders_.size(); i-- > 0;)
      if (binders_[i] == name) return VarRef::bound_at(static_cast<int>(binders_.size() - 1 - i));
    if (auto it = scope_.find(name); it != scope_.end()) return it->second;
    return std::nullopt;
  }

  VarRef resolve_or_fail(const std::string& name, const Token& at) const {
    if (auto v = resolve(name)) return *v;
    throw ParseError("unbound variable '" + name + "'", at.line, at.col);
  }

  // ---- types

  Ty type() {
    Ty l = type_and();
    while (is_sym("|")) {
      next();
      l = Ty::or_(l, type_and());
    }
    return l;
  }

  Ty type_and() {
    Ty l = type_arrow();
    while (is_sym("&")) {
      next();
      l = Ty::and_(l, type_arrow());
    }
    return l;
  }

  Ty type_arrow() {
    Ty l = type_atom();
    if (is_sym("->")) {
      next();
      return Ty::arrow(l, type_arrow());
    }
    return l;
  }

  Ty type_atom() {
    const Token t = peek();
    if (t.kind == TokKind::Ident) {
      if (t.text == "Top") return next(), Ty::top();
      if (t.text == "Bot") return next(), Ty::bot();
      if (t.text == "Ref") {
        next();
        return Ty::ref(type_atom());
      }
      if (t.text == "rec") {
        next();
        expect_sym("(");
        std::string z = ident();
        expect_sym(")");
        BinderScope s(*this, z);
        return Ty::bind_self(type());
      }
      if (t.text == "all") {
        next();
        expect_sym("(");
        std::string x = ident();
        const bool sub = is_sym("<:");
        if (!sub && !is_sym(":")) fail("expected ':' or '<:'");
        next();
        Ty param = type();
        expect_sym(")");
        BinderScope s(*this, x);
        Ty body = type();
        return sub ? Ty::all_sub(param, body) : Ty::dep_fun(param, body);
      }
      std::string name = ident();
      if (is_sym(".")) {
        next();
        const Token lt = peek();
        std::string label = ident();
        if (!is_upper(label)) throw ParseError("type selection needs a type label", lt.line, lt.col);
        return Ty::sel(resolve_or_fail(name, t), type_label(label));
      }
      if (is_sym("(")) return method_type(name);
      return Ty::fvar(resolve_or_fail(name, t));
    }
    if (is_sym("(")) {
      next();
      Ty inner = type();
      expect_sym(")");
      return inner;
    }
    if (is_sym("{")) {
      next();
      Ty acc = member();
      while (is_sym(";") || is_sym(",")) {
        next();
        acc = Ty::and_(acc, member());
      }
      expect_sym("}");
      return acc;
    }
    fail("expected a type");
  }

  Ty method_type(const std::string& m) {
    expect_sym("(");
    std::string x = ident();
    expect_sym(":");
    Ty param = type();
    expect_sym(")");
    expect_sym(":");
    BinderScope s(*this, x);
    return Ty::method(method_label(m), param, type());
  }

  Ty mem(const std::string& label, Ty lo, Ty hi) {
    if (level_ != Level::DOT && label == "Type") return Ty::type_tag(std::move(lo), std::move(hi));
    return Ty::type_mem(type_label(label), std::move(lo), std::move(hi));
  }

  Ty member() {
    std::string name = ident();
    if (is_sym("(")) return method_type(name);
    if (is_upper(name)) {
      if (is_sym("=")) {
        next();
        Ty t = type();
        return mem(name, t, t);
      }
      if (is_sym("<:")) {
        next();
        return mem(name, Ty::bot(), type());
      }
      expect_sym(":");
      Ty lo = type();
      expect_sym("..");
      return mem(name, lo, type());
    }
    expect_sym(":");
    return Ty::fld(value_label(name), type());
  }

  // ---- terms

  Tm term() {
    Tm l = app();
    if (is_sym(":=")) {
      next();
      return Tm::assign(l, term());
    }
    return l;
  }

  bool starts_operand() const {
    const Token& t = peek();
    if (t.kind == TokKind::Ident) return t.text != "let";
    if (t.kind != TokKind::Sym) return false;
    return t.text == "(" || t.text == "!" || t.text == "{";
  }

  Tm app() {
    Tm f = prefix();
    for (;;) {
      if (is_sym("[")) {
        next();
        Ty arg = type();
        expect_sym("]");
        f = Tm::ty_app(f, arg);
      } else if (starts_operand()) {
        f = Tm::app(f, prefix());
      } else {
        return f;
      }
    }
  }

  Tm prefix() {
    if (is_sym("!")) {
      next();
      return Tm::deref(prefix());
    }
    if (is_word("ref")) {
      next();
      return Tm::ref_new(prefix());
    }
    return postfix();
  }

  Tm postfix() {
    Tm a = atom();
    while (is_sym(".")) {
      next();
      std::string l = ident();
      if (level_ == Level::DOT && is_sym("(")) {
        next();
        Tm arg = term();
        expect_sym(")");
        a = Tm::invoke(a, method_label(l), arg);
      } else {
        a = Tm::sel_field(a, value_label(l));
      }
    }
    return a;
  }

  Tm atom() {
    const Token t = peek();
    if (is_sym("(")) {
      next();
      Tm inner = term();
      expect_sym(")");
      return inner;
    }
    if (is_sym("{")) {
      next();
      std::vector<Decl> ds;
      while (!is_sym("}")) {
        ds.push_back(field_decl(ident()));
        if (!is_sym(";") && !is_sym(",")) break;
        next();
      }
      expect_sym("}");
      return Tm::rec(std::move(ds));
    }
    if (t.kind != TokKind::Ident) fail("expected a term");
    if (t.text == "fun" || t.text == "tfun") {
      next();
      expect_sym("(");
      std::string x = ident();
      if (t.text == "fun") expect_sym(":");
      else expect_sym("<:");
      Ty annot = type();
      expect_sym(")");
      BinderScope s(*this, x);
      Tm body = term();
      return t.text == "fun" ? Tm::lam(annot, body) : Tm::ty_lam(annot, body);
    }
    if (t.text == "fix") {
      next();
      expect_sym("(");
      std::string x = ident();
      expect_sym(":");
      BinderScope s(*this, x);
      Ty annot = type();
      expect_sym(")");
      return Tm::fix(annot, term());
    }
    if (t.text == "typeval") {
      next();
      return Tm::type_val(type());
    }
    if (t.text == "new") {
      next();
      expect_sym("(");
      std::string x = ident();
      BinderScope s(*this, x);
      Ty annot;
      if (is_sym(":")) {
        next();
        annot = type();
      }
      expect_sym(")");
      expect_sym("{");
      std::vector<Decl> ds;
      while (!is_sym("}")) {
        ds.push_back(object_decl());
        if (!is_sym(";") && !is_sym(",")) break;
        next();
      }
      expect_sym("}");
      std::set<Label> seen;
      for (const auto& d : ds)
        if (!seen.insert(d.label).second)
          throw ParseError("duplicate member label '" + d.label.name + "'", t.line, t.col);
      return Tm::obj(std::move(ds), annot);
    }
    std::string name = ident();
    if (auto v = resolve(name)) return Tm::var(*v);
    if (defs_) {
      if (auto it = defs_->find(name); it != defs_->end()) return it->second;
    }
    throw ParseError("unbound variable '" + name + "'", t.line, t.col);
  }

  Decl field_decl(const std::string& l) {
    Ty annot;
    if (is_sym(":")) {
      next();
      annot = type();
    }
    expect_sym("=");
    return Decl::field_init(value_label(l), term(), annot);
  }

  Decl object_decl() {
    std::string name = ident();
    if (is_upper(name)) {
      expect_sym("=");
      return Decl::type_init(type_label(name), type());
    }
    if (!is_sym("(")) return field_decl(name);
    next();
    std::string y = ident();
    Ty param = Ty::top();
    if (is_sym(":")) {
      next();
      param = type();
    }
    expect_sym(")");
    BinderScope s(*this, y);
    Ty result;
    if (is_sym(":")) {
      next();
      result = type();
    }
    expect_sym("=");
    return Decl::method_init(method_label(name), param, term(), result);
  }
};

}  // namespace

Ty parse_type(std::string_view text, Level level, const FreeScope& scope) {
  return Parser(tokenize(text, 1), level, scope).whole_type();
}

Tm parse_term(std::string_view text, Level level, const FreeScope& scope) {
  return Parser(tokenize(text, 1), level, scope).whole_term();
}

std::vector<ProgramItem> parse_program(std::string_view text, Level level) {
  std::vector<ProgramItem> items;
  std::map<std::string, Tm, std::less<>> defs;
  const FreeScope empty;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = tokenize(line, line_no);
    if (toks.size() == 1) {
      if (end == text.size()) break;
      continue;
    }
    if (toks[0].kind == TokKind::Ident && toks[0].text == "let") {
      if (toks.size() < 4 || toks[1].kind != TokKind::Ident || toks[2].text != "=")
        throw ParseError("expected 'let name = term'", line_no, 1);
      std::string name = toks[1].text;
      std::vector<Token> rest(toks.begin() + 3, toks.end());
      defs[name] = Parser(std::move(rest), level, empty, &defs).whole_term();
    } else {
      items.push_back({line_no, std::string(line), Parser(std::move(toks), level, empty, &defs).whole_term()});
    }
    if (end == text.size()) break;
  }
  return items;
}

}  // namespace minidot
