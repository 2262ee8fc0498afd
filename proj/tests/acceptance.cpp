// Acceptance gate: one line per criterion, exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <string>

#include "corank2/checklist.hpp"

namespace {

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  status = pclose(f);
  return out;
}

void line(int index, const std::string& name, bool passed, double residual, const std::string& detail) {
  char res[32];
  if (std::isfinite(residual)) std::snprintf(res, sizeof res, "%.3e", residual);
  else std::snprintf(res, sizeof res, "n/a");
  std::printf("%s %2d %-26s residual=%-10s %s\n", passed ? "PASS" : "FAIL", index, name.c_str(), res, detail.c_str());
}

}  // namespace

int main() {
  int failed = 0;
  int index = 0;
  for (const auto& item : corank2::run_checklist()) {
    line(++index, item.name, item.passed, item.residual, item.detail);
    failed += !item.passed;
  }

  const std::string cmd = std::string(CORANK2_CLI) + " verify-paper --format json";
  int s1 = 0, s2 = 0;
  std::string a = capture(cmd, s1), b = capture(cmd, s2);
  bool same = !a.empty() && a == b && s1 == s2;
  std::size_t diff = 0;
  while (diff < a.size() && diff < b.size() && a[diff] == b[diff]) ++diff;
  line(++index, "determinism", same, same ? 0.0 : static_cast<double>(diff),
       std::to_string(a.size()) + " bytes, first difference at " + (same ? std::string("none") : std::to_string(diff)));
  failed += !same;

  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed ? 1 : 0;
}
