#pragma once

#include <cstdint>

#include "neg/negotiation.hpp"

namespace neg {

// Random but always-valid, always-deterministic, always-sound negotiations,
// built by sound-preserving edits of the two-atom skeleton n0 -> nf:
//   - splits: detour one outcome through a fresh atom over a party subset,
//   - duplications: add an outcome with the targets of an existing one,
//   - self-loops: add a looping outcome (splits may later stretch the loop
//     over several atoms, keeping the seeding atom its synchronizer).
// The same seed always yields the same negotiation.
struct GenParams {
  uint64_t seed = 1;
  int atoms = 8;            // total atom count, including initial and final
  int agents = 2;           // 1..26
  int loops = 0;            // self-loop insertions
  int extra_outcomes = -1;  // duplications; -1 picks atoms/2
  int states = 0;           // per-agent state count; 0 keeps the symbolic backend
};

Negotiation generate(const GenParams& params);

}  // namespace neg
