// Copyright 2026 The legone Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEGONE_TESTS_TEST_UTIL_H_
#define LEGONE_TESTS_TEST_UTIL_H_

#include <string>

#include "legone/dsl.h"
#include "legone/pipeline.h"

namespace legone::testing {

inline std::string BenchmarkPath(const std::string& file) {
  return std::string(LEGONE_BENCHMARK_DIR) + "/" + file;
}

inline std::string BenchmarkSource(const std::string& file) {
  return ReadTextFile(BenchmarkPath(file));
}

// Parses and typechecks; fails the calling test on diagnostics.
inline SourceProgram MustParse(const std::string& source) {
  ParseResult r = ParseAndCheck(source);
  if (!r.program) {
    std::string all;
    for (const auto& d : r.diagnostics) all += d.ToString() + "\n";
    throw std::runtime_error("unexpected diagnostics:\n" + all);
  }
  return *r.program;
}

inline constexpr const char* kDmpSource = R"(players 2
def dmp():
  i = Random1()
  j = BestResponse2(i)
  k = BestResponse1(j)
  r1 = UniformMixing1(i, k)
  r2 = UniformMixing2(j, j)
  return r1, r2
end
)";

}  // namespace legone::testing

#endif  // LEGONE_TESTS_TEST_UTIL_H_
