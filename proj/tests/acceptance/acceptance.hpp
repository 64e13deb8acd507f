#pragma once

// Acceptance criteria P1-P7. Each check returns one verdict and the main
// program prints one line per criterion.

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

namespace exvocab::acceptance {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  std::string id;  // "P1" ...
  Verdict verdict = Verdict::kPass;
  std::string summary;
  std::vector<std::string> details;  // printed indented under the verdict line
  bool soft = false;                 // a soft FAIL does not fail the run
};

Outcome check_p1();  // published matrix, per-word values
Outcome check_p2();  // published matrix, excess census
Outcome check_p3();
Outcome check_p4();
Outcome check_p5();
Outcome check_p6();
Outcome check_p7();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Fixed-precision number for report lines.
inline std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

}  // namespace exvocab::acceptance
