// core/include/octl/lattice.hpp

// Copyright 2026  The octl authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTL_LATTICE_HPP_
#define OCTL_LATTICE_HPP_

#include <span>
#include <string>
#include <vector>

#include "octl/inventory.hpp"
#include "octl/mat.hpp"

// CTC trellis over the blank-extended label sequence, after Graves et al.
// (ICML 2006), computed in the log domain.
//
// Conventions used throughout, chosen so that alpha(t,u) * beta(t,u) counts
// every frame's emission exactly once:
//   alpha(t,u) sums path prefixes that sit on node u at frame t and covers
//              emissions for frames 0..t-1 (it EXCLUDES the emission at t);
//   beta(t,u)  sums path suffixes from node u at frame t and covers
//              emissions for frames t..T-1 (it INCLUDES the emission at t).
// Hence sum_u alpha(t,u) * beta(t,u) = P(target | x) at every frame t.
//
// Extended positions: even positions are blank, odd position 2j+1 is the
// j-th target token. A label may be entered from two positions back only
// when it differs from the label there; equal adjacent labels must be
// separated by the blank in between.

namespace octl {

// Blank-interleaved target of length 2U+1 with a per-position emphasis mark
// (set later for positions belonging to rare-word spans).
struct ExtendedLabels {
  std::vector<int> units;      // unit id per extended position, length 2U+1
  std::vector<int> source;     // the original target tokens, length U
  std::vector<bool> oov_mark;  // per extended position, length 2U+1

  int length() const { return static_cast<int>(units.size()); }
  int target_length() const { return static_cast<int>(source.size()); }

  // Smallest frame count that admits a valid alignment:
  // U plus one separating blank per adjacent equal token pair.
  int min_frames() const;
};

// A frame-level unit assignment, one unit per frame.
struct AlignmentPath {
  std::vector<int> units;
};

struct Lattice {
  Mat log_alpha;    // [(2U+1) x T]
  Mat log_beta;     // [(2U+1) x T]
  double log_total = 0.0;  // log P(target | x)

  static Lattice Compute(const ExtendedLabels& ext, const FramePosteriors& post);
};

// Interleaves blanks around and between the target tokens.
// Throws kEmptyTarget for an empty target and kInvalidLabel for ids outside
// the inventory or equal to blank.
ExtendedLabels ExtendLabels(std::span<const int> target,
                            const TokenInventory& inv);
ExtendedLabels ExtendLabels(const std::vector<std::string>& target,
                            const TokenInventory& inv);

// Forward / backward recursions. Unreachable nodes carry -infinity.
// Throws kUnreachableTarget when T < ext.min_frames().
Mat Forward(const ExtendedLabels& ext, const FramePosteriors& post);
Mat Backward(const ExtendedLabels& ext, const FramePosteriors& post);

// P(path passes node (t,u) | x) = exp(log_alpha + log_beta), per node.
// Columns sum to P(target | x).
Mat NodeOccupancy(const Lattice& lat);

// Negative log-likelihood -log P(target | x).
// Throws kUnreachableTarget when the probability is exactly zero.
double CtcLoss(const ExtendedLabels& ext, const FramePosteriors& post);

// Exhaustive oracle: enumerates all N^T frame paths, keeps those collapsing
// to the target, and returns -log of their total probability (+infinity when
// none survive). Throws kInstanceTooLarge when N^T > 1e7.
double BruteForceLoss(const ExtendedLabels& ext, const FramePosteriors& post);

// Merges adjacent duplicates, then removes blanks.
std::vector<int> Collapse(std::span<const int> path, const TokenInventory& inv);

// Per-frame argmax (ties to the lowest unit id) followed by Collapse.
std::vector<int> GreedyDecode(const FramePosteriors& post,
                              const TokenInventory& inv);
std::vector<int> GreedyDecodeLogits(const Mat& logits,
                                    const TokenInventory& inv);

// Node-reachability masks implied purely by the lattice topology (the same
// pattern the recursions produce when every emission has nonzero
// probability). Exposed for verification.
BasicMat<char> ForwardReachable(const ExtendedLabels& ext, int num_frames);
BasicMat<char> BackwardReachable(const ExtendedLabels& ext, int num_frames);

}  // namespace octl

#endif  // OCTL_LATTICE_HPP_
