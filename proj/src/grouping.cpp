#include "ssolab/grouping.hpp"

#include <algorithm>
#include <set>

namespace ssolab {

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::IntraArea: return "intra-area";
    case GroupKind::InterArea: return "inter-area";
    case GroupKind::CrossArea: return "cross-area";
    case GroupKind::LocalOther: return "local/other";
  }
  return "local/other";
}

Grouping classify_grouping(const std::vector<ShapeEntry>& shapes, Real mag_threshold) {
  Grouping g;
  if (shapes.empty()) return g;

  int ref = 0;
  Real max_mag = -1.0;
  for (size_t i = 0; i < shapes.size(); ++i) {
    Real m = std::abs(shapes[i].value);
    if (m > max_mag) {
      max_mag = m;
      ref = static_cast<int>(i);
    }
  }
  if (max_mag <= 0.0) {
    for (const ShapeEntry& s : shapes) g.entries.push_back({s.machine, s.area, 0.0, 0.0, false});
    return g;
  }

  Real ref_ang = std::arg(shapes[ref].value);
  std::set<int> areas_all, areas_a, areas_b;
  for (const ShapeEntry& s : shapes) {
    Grouping::Entry e;
    e.machine = s.machine;
    e.area = s.area;
    e.rel_mag = std::abs(s.value) / max_mag;
    Real d = std::arg(s.value) - ref_ang;  // wrap to (-pi, pi]
    while (d <= -kPi) d += 2.0 * kPi;
    while (d > kPi) d -= 2.0 * kPi;
    e.angle_deg = d * 180.0 / kPi;
    e.participating = e.rel_mag >= mag_threshold;
    if (e.participating) {
      areas_all.insert(e.area);
      if (std::abs(e.angle_deg) <= 90.0) {
        g.group_a.push_back(e.machine);
        areas_a.insert(e.area);
      } else {
        g.group_b.push_back(e.machine);
        areas_b.insert(e.area);
      }
    }
    g.entries.push_back(e);
  }

  size_t participants = g.group_a.size() + g.group_b.size();
  if (participants < 2) {
    g.kind = GroupKind::LocalOther;
  } else if (areas_all.size() == 1) {
    g.kind = GroupKind::IntraArea;
  } else if (!g.group_a.empty() && !g.group_b.empty() && areas_a.size() == 1 &&
             areas_b.size() == 1 && *areas_a.begin() != *areas_b.begin()) {
    g.kind = GroupKind::InterArea;
  } else if (!g.group_a.empty() && !g.group_b.empty()) {
    g.kind = GroupKind::CrossArea;
  } else {
    g.kind = GroupKind::LocalOther;
  }
  return g;
}

}  // namespace ssolab
