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

#ifndef LEGONE_BLOCKS_H_
#define LEGONE_BLOCKS_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "legone/dsl.h"
#include "legone/logic.h"

namespace legone {

class BlockError : public std::runtime_error {
 public:
  BlockError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

enum class LibraryKind {
  kRandom,
  kBestResponse,
  kZeroSumNE,
  kStationaryPoint,
  kUniformMixing,
  kMix,
  kOptimalMixing,
  kIfThenElse,
};

// A library block name with its player indices decoded, e.g.
// "ZeroSumNE12" -> {kZeroSumNE, 1, 2}.
struct LibraryRef {
  LibraryKind kind;
  int i = 0;
  int j = 0;
  std::string name;
};

std::optional<LibraryRef> ParseLibraryName(std::string_view name);

struct Signature {
  std::vector<BasicType> inputs;
  std::vector<BasicType> outputs;
};

struct SignatureCheck {
  std::optional<Signature> signature;
  std::string code;  // diagnostic code when signature is empty
  std::string message;
};

// Resolves the signature of a library block for an r-player program, given
// the types of the actual arguments (needed for the variadic blocks).
SignatureCheck LibrarySignature(const LibraryRef& ref, int r,
                                const std::vector<BasicType>& arg_types);

// ---------------------------------------------------------------------------
// Encodings. Names are strategy identifiers; bound variables are generated
// internally with a '$' prefix so they never collide with program names.

Formula InherentFormulas(int r);

Formula BestResponseEncoding(int r, int i,
                             const std::vector<std::string>& opponents,
                             const std::string& out);

Formula ZeroSumNEEncoding(int r, int i, int j,
                          const std::vector<std::string>& others,
                          const PayoffExpr& u, const std::string& out_i,
                          const std::string& out_j);

// `rho` names the fresh existential; `with_delta` appends "+ delta" to the
// descent inequality.
Formula StationaryPointEncoding(int r, int i, int j,
                                const std::vector<std::string>& others,
                                const std::string& xi, const std::string& xj,
                                const std::string& yi, const std::string& yj,
                                const std::string& rho, bool with_delta);

Formula UniformMixingEncoding(int r, int i,
                              const std::vector<std::string>& parts,
                              const std::string& out);

// out = lambda * a + (1 - lambda) * b with a constant lambda in [0,1].
Formula MixEncoding(int r, int i, const std::string& a, const std::string& b,
                    const Rational& lambda, const std::string& out);

Formula IfThenElse(const Expr& a, const Expr& b, const Formula& branch1,
                   const Formula& branch2);

// ---------------------------------------------------------------------------
// Optimal mixing.

inline constexpr std::size_t kMaxMixingVertices = 4096;
inline constexpr std::size_t kMaxMixingEdges = 32768;

struct EdgeBoundSpec {
  // vertices[v][k] = index into the strategy list of player k.
  std::vector<std::vector<int>> vertices;
  // Pairs of vertex indices that differ in exactly one player slot, with the
  // varying player recorded.
  struct Edge {
    int from;
    int to;
    int player;
  };
  std::vector<Edge> edges;
};

// Enumerates the mixing polytope's vertices and edges. Throws BlockError
// ("CapacityError") above the caps.
EdgeBoundSpec EnumerateMixingPolytope(const std::vector<int>& counts);

// T_E over symbolic endpoint losses: a = losses at the lambda=0 endpoint,
// b = losses at lambda=1.
Expr EdgeBound(const std::vector<Expr>& a, const std::vector<Expr>& b);

// Numeric counterpart of EdgeBound.
double EdgeBoundValue(const std::vector<double>& a,
                      const std::vector<double>& b);

// L*: the minimum of T_E over all edges, over loss terms at the vertices.
// `strategies[k]` lists the input strategies of player k+1.
Expr OptimalMixingBound(int r,
                        const std::vector<std::vector<std::string>>& strategies);

// Appends OptimalMixing over all constructed strategies and returns its
// outputs. Programs that already return are unchanged. Throws BlockError
// ("NoStrategyForPlayer") when some player has no strategy.
SourceProgram AutoReturn(const SourceProgram& prog);

// JSON manifest (name, signature, encoding) of the library for r players.
std::string BlockManifestJson(int r);

}  // namespace legone

#endif  // LEGONE_BLOCKS_H_
