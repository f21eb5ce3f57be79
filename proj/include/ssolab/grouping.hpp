#pragma once
// Oscillation-pattern classifier: splits the machines participating in a
// mode into two phase groups and labels the split by how it aligns with
// the network areas.

#include <string>
#include <vector>

#include "ssolab/modes.hpp"

namespace ssolab {

enum class GroupKind { IntraArea, InterArea, CrossArea, LocalOther };

std::string to_string(GroupKind k);

struct Grouping {
  GroupKind kind = GroupKind::LocalOther;
  std::vector<std::string> group_a;  // in phase with the largest component
  std::vector<std::string> group_b;  // antiphase side

  struct Entry {
    std::string machine;
    int area = 0;
    Real rel_mag = 0.0;    // relative to the largest component
    Real angle_deg = 0.0;  // relative to the largest component, (-180, 180]
    bool participating = false;
  };
  std::vector<Entry> entries;  // every machine, in input order
};

/// Machines with relative magnitude >= mag_threshold split by shape angle
/// against the largest component (group A within +-90 deg). Labels:
/// intra-area when all participants share one area; inter-area when each
/// group lies wholly in its own distinct area; cross-area when a group
/// mixes areas and both groups are populated; local/other otherwise.
/// Invariant under global rotation and positive scaling of the shape.
Grouping classify_grouping(const std::vector<ShapeEntry>& shapes, Real mag_threshold = 0.2);

}  // namespace ssolab
