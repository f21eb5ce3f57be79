#pragma once
// Eigenanalysis of a LinearModel: deduplicated mode list with frequency,
// damping ratio, participation factors and per-machine mode shapes.

#include <string>
#include <utility>
#include <vector>

#include "ssolab/linearize.hpp"

namespace ssolab {

struct Mode {
  Complex lambda;
  Real f_hz = 0.0;  // |omega| / 2pi
  Real zeta = 0.0;  // fraction, -sigma / |lambda|
  VecXc right;      // right eigenvector (unit norm)
  VecXc left;       // biorthonormal left row, left.dot-style product with right = 1
  VecX part;        // |p_ki|, normalized so max = 1; empty when vectors are unusable
};

struct ModeSet {
  std::vector<Mode> modes;       // omega >= 0 representatives, sorted by f then sigma
  std::vector<StateInfo> states;
  bool vectors_ok = true;        // eigenbasis inversion succeeded
};

/// Full eigendecomposition, conjugates deduplicated. A defective (or near
/// defective) eigenbasis degrades gracefully: modes keep (lambda, f, zeta),
/// vectors_ok flips false and eigenvector-derived fields stay empty.
ModeSet eig_modes(const LinearModel& lm);

/// n x n matrix of |p_ki| = |phi_ki psi_ik| with each column (mode)
/// normalized to max 1. Columns follow the solver's eigenvalue order.
/// Throws on a defective matrix.
MatX participation(const LinearModel& lm);

/// States whose normalized participation in the mode meets `threshold`,
/// strongest first.
std::vector<std::string> dominant_states(const ModeSet& ms, const Mode& mode,
                                         Real threshold = 0.5);

struct ShapeEntry {
  std::string machine;
  int area = 0;
  Complex value;  // normalized: largest entry is exactly 1 + 0j
};

/// (machine, observable state name) pairs: converter transformer current
/// d-component, synchronous machine rotor speed.
std::vector<std::pair<std::string, std::string>> default_observables(const AssembledModel& m);

/// Right-eigenvector entries of one observable state per machine, rotated
/// and scaled so the largest-magnitude entry is 1 at angle 0.
std::vector<ShapeEntry> mode_shape(
    const LinearModel& lm, const Mode& mode,
    const std::vector<std::pair<std::string, std::string>>& observables);

}  // namespace ssolab
