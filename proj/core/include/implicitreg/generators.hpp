#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "implicitreg/graph.hpp"

namespace implicitreg {

namespace family {

struct Path { NodeId n; };
struct Cycle { NodeId n; };
struct Complete { NodeId n; };
struct Grid { NodeId rows; NodeId cols; };
// Two K_k joined by `bridges` edges (k-1-i) -- (k+i).
struct Dumbbell { NodeId clique_size; NodeId bridges; };
// `count` copies of K_size; the last node of clique i is joined to the first
// node of clique i+1 (mod count).
struct RingOfCliques { NodeId count; NodeId size; };
// Random d-regular connected core on nodes [0, core) plus `whiskers` paths of
// `length` nodes, each hanging off a distinct core node.
struct WhiskeredExpander { NodeId core; NodeId degree; NodeId whiskers; NodeId length; };
struct RandomRegular { NodeId n; NodeId degree; };

}  // namespace family

using GraphFamily = std::variant<family::Path, family::Cycle, family::Complete, family::Grid,
                                 family::Dumbbell, family::RingOfCliques, family::WhiskeredExpander,
                                 family::RandomRegular>;

// Deterministic in (family, seed). Generators emit unit weights. Throws
// InvalidInput on infeasible parameters (n*d odd, d >= n, ...) and
// NumericalFailure when the random constructions exhaust their retry budget.
Graph generate(const GraphFamily& family, std::uint64_t seed = 0);

// Short stable label, e.g. "dumbbell(k=3,b=1)".
std::string describe(const GraphFamily& family);

// Uniform integer in [0, bound) from a 64-bit Mersenne twister. Rejection
// sampling keeps the stream identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64& rng);

}  // namespace implicitreg
