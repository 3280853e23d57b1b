// Serial reference loop vs OpenMP loop for the heavy suites. Reports must
// match byte for byte.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include "minidot/harness.hpp"

using namespace minidot;

namespace {

double seconds(const std::function<std::string()>& f, std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool row(const char* name, const std::function<std::string(Exec)>& kernel) {
  std::string a, b;
  const double ts = seconds([&] { return kernel(Exec::Serial); }, a);
  const double tp = seconds([&] { return kernel(Exec::Parallel); }, b);
  const bool same = a == b;
  std::printf("%-34s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name, ts, tp, ts / (tp > 0 ? tp : 1e-9),
              same ? "identical" : "MISMATCH");
  return same;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  bool ok = true;
  ok &= row("soundness dot size<=6 fuel<=30", [](Exec e) {
    GenConfig c;
    c.level = Level::DOT;
    c.max_ast_size = 6;
    c.max_fuel = 30;
    return to_text(soundness_fuzz(c, e));
  });
  ok &= row("soundness mut size<=5 fuel<=20", [](Exec e) {
    GenConfig c;
    c.level = Level::DSubBotAndOrRecFixMut;
    c.max_ast_size = 5;
    return to_text(soundness_fuzz(c, e));
  });
  ok &= row("totality 2000/level fuel<=30", [](Exec e) { return to_text(totality_suite(2000, 30, 1, e)); });
  ok &= row("pushback dot types<=3", [](Exec e) { return to_text(pushback_suite(Level::DOT, 3, e)); });
  ok &= row("static=>dynamic fix types<=3",
            [](Exec e) { return to_text(static_dynamic_suite(Level::DSubBotAndOrRecFix, 3, e)); });
  ok &= row("substitution probe 1000", [](Exec e) { return to_text(subst_probe_suite(1000, 7, e)); });
  return ok ? 0 : 1;
}
