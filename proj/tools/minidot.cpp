#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "minidot/evaluator.hpp"
#include "minidot/fsub_bridge.hpp"
#include "minidot/harness.hpp"
#include "minidot/parser.hpp"
#include "minidot/printer.hpp"
#include "minidot/runtime_checker.hpp"
#include "minidot/smallstep.hpp"
#include "minidot/static_checker.hpp"

using json = nlohmann::json;
using namespace minidot;

namespace {

constexpr int kPass = 0, kRefuted = 1, kUnknown = 2, kUsage = 3;

struct Common {
  std::string calculus = "dot";
  std::size_t fuel = 1000;
  int size = 5;
  std::uint64_t seed = 1;
  std::string format = "text";
  bool trace = false;
  std::string input;
  std::string expr;
  Level level = Level::DOT;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, Common& c, bool with_input = true) {
  sub->add_option("--calculus", c.calculus, "calculus level")->capture_default_str();
  sub->add_option("--fuel", c.fuel, "fuel budget")->capture_default_str();
  sub->add_option("--size", c.size, "maximum term size")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  sub->add_flag("--trace", c.trace, "print derivations / machine states");
  if (with_input) {
    sub->add_option("input", c.input, "input file ('-' for stdin)");
    sub->add_option("-e,--expr", c.expr, "program text");
  }
}

std::string read_input(const Common& c) {
  if (!c.expr.empty()) return c.expr;
  if (c.input.empty()) throw UsageError("no input: give a file or --expr");
  if (c.input == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(c.input);
  if (!in) throw UsageError("cannot read " + c.input);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Level level_of(const std::string& name) {
  auto l = parse_level(name);
  if (!l) throw UsageError("unknown calculus '" + name + "'");
  return *l;
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Proved: return kPass;
    case Verdict::Refuted: return kRefuted;
    case Verdict::Unknown: return kUnknown;
  }
  return kUsage;
}

// Refuted dominates Unknown dominates Proved.
Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Refuted || b == Verdict::Refuted) return Verdict::Refuted;
  if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
  return Verdict::Proved;
}

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.format == "json") std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

json violation_json(const Violation& v) {
  return {{"subject", v.subject}, {"fuel", v.fuel}, {"result", v.result}, {"check", v.check}};
}

// ---- check

int cmd_check(const Common& c) {
  const auto items = parse_program(read_input(c), c.level);
  CheckOptions co;
  co.fuel = c.fuel;
  co.trace = c.trace;
  Verdict all = Verdict::Proved;
  std::size_t fuel = 0;
  json arr = json::array();
  std::ostringstream os;
  for (const auto& it : items) {
    Judgment j = typecheck(c.level, TypingCtx(), it.term, co);
    all = combine(all, j.verdict);
    fuel += j.fuel_used;
    json e = {{"line", it.line}, {"verdict", verdict_name(j.verdict)}, {"fuel_used", j.fuel_used}};
    os << "line " << it.line << ": " << verdict_name(j.verdict);
    if (j.proved()) {
      e["type"] = print(j.type, c.level);
      os << " : " << print(j.type, c.level);
    } else if (!j.reason.empty()) {
      e["reason"] = j.reason;
      os << " (" << j.reason << ")";
    }
    os << "\n";
    if (c.trace && j.trace) {
      const std::string t = format_trace(j.trace, c.level);
      e["trace"] = t;
      os << t;
    }
    arr.push_back(std::move(e));
  }
  json out = {{"verdict", verdict_name(all)}, {"fuel_used", fuel}, {"violations", json::array()}, {"items", arr}};
  emit(c, out, os.str());
  return verdict_code(all);
}

// ---- eval

int cmd_eval(const Common& c) {
  const auto items = parse_program(read_input(c), c.level);
  int code = kPass;
  std::size_t fuel = 0;
  json arr = json::array();
  std::ostringstream os;
  for (const auto& it : items) {
    Store store;
    EvalResult r = eval(c.level, c.fuel, RtEnv(), store, it.term);
    fuel += r.fuel_used;
    json e = {{"line", it.line}, {"result", result_tag(r)}, {"store_size", store.size()}, {"fuel_used", r.fuel_used}};
    os << "line " << it.line << ": " << result_tag(r);
    if (r.val()) {
      e["value"] = describe(r.value, c.level);
      os << " " << describe(r.value, c.level);
    } else if (r.error_result()) {
      e["error"] = r.error;
      os << " (" << r.error << ")";
      code = kRefuted;
    } else if (code == kPass) {
      code = kUnknown;
    }
    os << "\n  store size " << store.size() << ", fuel used " << r.fuel_used << "\n";
    arr.push_back(std::move(e));
  }
  const char* verdict = code == kPass ? "value" : code == kRefuted ? "error" : "timeout";
  json out = {{"verdict", verdict}, {"fuel_used", fuel}, {"violations", json::array()}, {"items", arr}};
  emit(c, out, os.str());
  return code;
}

// ---- rtcheck
//
// Bundle (JSON):
//   { "H": [ {"name": "x", "term": "...", "type": "..."?} ],
//     "J": [ {"name": "z", "type": "...", "env": <prefix of H>?} ],
//     "lhs": "...", "rhs": "...", "lhs_env": n?, "rhs_env": n?,
//     "precision": "imprecise"? }
// H terms are evaluated in order against one shared store, which supplies
// the store typing.

int cmd_rtcheck(const Common& c, const std::string& precision_flag) {
  const json b = json::parse(read_input(c));
  FreeScope scope;
  RtEnv h;
  Store store;
  std::vector<RtEnv> prefixes{h};
  for (const auto& e : b.value("H", json::array())) {
    const std::string name = e.at("name");
    const Tm t = parse_term(e.at("term").get<std::string>(), c.level, scope);
    Judgment tj = typecheck(c.level, h.static_ctx(), t, CheckOptions{c.fuel, false, {}});
    Ty ty;
    if (e.contains("type")) ty = parse_type(e.at("type").get<std::string>(), c.level, scope);
    else if (tj.proved()) ty = tj.type;
    else throw UsageError("binding " + name + " does not typecheck: " + tj.reason);
    EvalResult r = eval(c.level, c.fuel, h, store, t);
    if (!r.val()) throw UsageError("binding " + name + " did not evaluate to a value");
    const VarRef v = h.fresh_name();
    h = h.extend(v, r.value, ty);
    scope[name] = v;
    prefixes.push_back(h);
  }
  AbsEnv j;
  std::size_t zi = 0;
  for (const auto& e : b.value("J", json::array())) {
    const std::string name = e.at("name");
    const std::size_t k = e.value("env", prefixes.size() - 1);
    if (k >= prefixes.size()) throw UsageError("J binding " + name + " names a missing H prefix");
    const Ty ty = parse_type(e.at("type").get<std::string>(), c.level, scope);
    const VarRef z = VarRef::compare("z" + std::to_string(zi++));
    j = j.extend(z, prefixes[k], ty);
    scope[name] = z;
  }
  auto env_at = [&](const char* key) {
    const std::size_t k = b.value(key, prefixes.size() - 1);
    if (k >= prefixes.size()) throw UsageError(std::string(key) + " names a missing H prefix");
    return prefixes[k];
  };
  const Ty lhs = parse_type(b.at("lhs").get<std::string>(), c.level, scope);
  const Ty rhs = parse_type(b.at("rhs").get<std::string>(), c.level, scope);
  const std::string pname = precision_flag.empty() ? b.value("precision", std::string("imprecise")) : precision_flag;
  const auto mode = parse_precision(pname);
  if (!mode) throw UsageError("unknown precision '" + pname + "'");
  CheckOptions co;
  co.fuel = c.fuel;
  co.trace = c.trace;
  Judgment r = dyn_subtype(c.level, store.typing, j, env_at("lhs_env"), lhs, env_at("rhs_env"), rhs, *mode, co);
  std::ostringstream os;
  os << verdict_name(r.verdict) << " (fuel used " << r.fuel_used << ")";
  if (!r.reason.empty()) os << ": " << r.reason;
  os << "\n";
  json out = {{"verdict", verdict_name(r.verdict)}, {"fuel_used", r.fuel_used}, {"violations", json::array()}};
  if (c.trace && r.trace) {
    out["trace"] = format_trace(r.trace, c.level);
    os << format_trace(r.trace, c.level);
  }
  emit(c, out, os.str());
  return verdict_code(r.verdict);
}

// ---- translate

int cmd_translate(const Common& c, const std::string& from, const std::string& to) {
  if (from != "fsub") throw UsageError("translate: only --from fsub is supported");
  if (to != "dsub" && to != std::string(level_name(kBridgeTarget)))
    throw UsageError("translate: only --to dsub is supported");
  const auto items = parse_program(read_input(c), Level::FSub);
  json arr = json::array();
  std::ostringstream os;
  for (const auto& it : items) {
    const std::string out = print(encode_tm(it.term), kBridgeTarget);
    arr.push_back({{"line", it.line}, {"term", out}});
    os << out << "\n";
  }
  emit(c, {{"verdict", "translated"}, {"fuel_used", 0}, {"violations", json::array()}, {"items", arr}}, os.str());
  return kPass;
}

// ---- step

int cmd_step(const Common& c) {
  const auto items = parse_program(read_input(c), c.level);
  int code = kPass;
  json arr = json::array();
  std::ostringstream os;
  for (const auto& it : items) {
    SmallStepRun run = run_smallstep(it.term, c.fuel, c.trace);
    std::string outcome = run.kind == SmallStepRun::Kind::Value   ? "value"
                          : run.kind == SmallStepRun::Kind::Stuck ? "stuck"
                                                                  : "step limit";
    if (run.kind == SmallStepRun::Kind::Stuck) code = kRefuted;
    else if (run.kind == SmallStepRun::Kind::StepLimit && code == kPass) code = kUnknown;
    json e = {{"line", it.line}, {"outcome", outcome}, {"final", print_state(run.final_state(), c.level)}};
    if (c.trace) {
      e["trace"] = print_trace(run, c.level);
      os << print_trace(run, c.level);
    } else {
      os << print_state(run.final_state(), c.level) << "\nhalt: " << outcome;
      if (!run.why.empty()) os << " (" << run.why << ")";
      os << "\n";
    }
    arr.push_back(std::move(e));
  }
  emit(c, {{"verdict", code == kPass ? "value" : code == kRefuted ? "stuck" : "step limit"},
           {"fuel_used", 0},
           {"violations", json::array()},
           {"items", arr}},
       os.str());
  return code;
}

// ---- soundcheck

int cmd_soundcheck(const Common& c, bool random, std::size_t count, bool serial) {
  GenConfig cfg;
  cfg.level = c.level;
  cfg.max_ast_size = c.size;
  cfg.max_fuel = static_cast<int>(std::min<std::size_t>(c.fuel, 1000));
  cfg.seed = c.seed;
  cfg.mode = random ? GenMode::Random : GenMode::Exhaustive;
  cfg.random_count = count;
  SoundnessReport r = soundness_fuzz(cfg, serial ? Exec::Serial : Exec::Parallel);
  json v = json::array();
  for (const auto& x : r.violations) v.push_back(violation_json(x));
  json out = {{"verdict", r.passed() ? "pass" : "fail"},
              {"fuel_used", cfg.max_fuel},
              {"violations", v},
              {"level", level_name(r.level)},
              {"terms_tested", r.terms_tested},
              {"runs", r.runs},
              {"timeouts", r.timeouts},
              {"values_ok", r.values_ok},
              {"unknown_checks", r.unknown_checks},
              {"monotonicity_violations", r.monotonicity_violations},
              {"store_events_checked", r.store_events_checked}};
  emit(c, out, to_text(r));
  if (!r.passed()) return kRefuted;
  return r.unknown_checks ? kUnknown : kPass;
}

// ---- gallery

int cmd_gallery(const Common& c) {
  const auto results = gallery();
  bool ok = true;
  json arr = json::array();
  std::ostringstream os;
  for (const auto& g : results) {
    ok = ok && g.ok();
    arr.push_back({{"name", g.name},
                   {"expected", verdict_name(g.expected)},
                   {"actual", verdict_name(g.actual)},
                   {"ok", g.ok()},
                   {"detail", g.detail}});
    os << (g.ok() ? "ok   " : "FAIL ") << g.name << ": " << verdict_name(g.actual);
    if (!g.ok()) os << " (expected " << verdict_name(g.expected) << ")";
    if (!g.detail.empty()) os << " - " << g.detail;
    os << "\n";
  }
  json v = json::array();
  for (const auto& g : results)
    if (!g.ok()) v.push_back({{"subject", g.name}, {"fuel", -1}, {"result", verdict_name(g.actual)}, {"check", "gallery"}});
  emit(c, {{"verdict", ok ? "pass" : "fail"}, {"fuel_used", 0}, {"violations", v}, {"items", arr}}, os.str());
  return ok ? kPass : kRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minidot: checkers and evaluators for the D family of calculi"};
  app.require_subcommand(1);
  Common c;

  auto* check = app.add_subcommand("check", "typecheck each program item");
  add_common(check, c);
  auto* ev = app.add_subcommand("eval", "evaluate each program item");
  add_common(ev, c);
  std::string precision;
  auto* rt = app.add_subcommand("rtcheck", "runtime subtyping on a JSON bundle");
  add_common(rt, c);
  rt->add_option("--precision", precision, "imprecise|precise|invertible");
  std::string from = "fsub", to = "dsub";
  auto* tr = app.add_subcommand("translate", "encode F<: programs");
  add_common(tr, c);
  tr->add_option("--from", from)->capture_default_str();
  tr->add_option("--to", to)->capture_default_str();
  auto* st = app.add_subcommand("step", "small-step reduction (--fuel bounds the steps)");
  add_common(st, c);
  bool random = false, serial = false;
  std::size_t count = 1000;
  auto* sc = app.add_subcommand("soundcheck", "generate terms and check soundness");
  add_common(sc, c, false);
  sc->add_flag("--random", random, "random instead of exhaustive generation");
  sc->add_option("--count", count, "number of random terms")->capture_default_str();
  sc->add_flag("--serial", serial, "run the serial reference loop");
  auto* ga = app.add_subcommand("gallery", "run the fixed counterexamples");
  add_common(ga, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  // Defaults that depend on the command.
  if (st->parsed()) {
    if (st->count("--calculus") == 0) c.calculus = "dsub";
    if (st->count("--fuel") == 0) c.fuel = 200;
  }
  if (sc->parsed() && sc->count("--fuel") == 0) c.fuel = 20;

  try {
    c.level = level_of(c.calculus);
    if (check->parsed()) return cmd_check(c);
    if (ev->parsed()) return cmd_eval(c);
    if (rt->parsed()) return cmd_rtcheck(c, precision);
    if (tr->parsed()) return cmd_translate(c, from, to);
    if (st->parsed()) return cmd_step(c);
    if (sc->parsed()) return cmd_soundcheck(c, random, count, serial);
    if (ga->parsed()) return cmd_gallery(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "bad bundle: " << e.what() << "\n";
    return kUsage;
  } catch (const IllFormed& e) {
    std::cerr << "ill-formed input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
