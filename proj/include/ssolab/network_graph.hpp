#pragma once
// Expanded network graph: parallel circuits collapsed, long lines split
// into series pi-sections (adding internal nodes), transformers as ratio
// edges. Shared by the power flow, the SPC dynamic network and the QPC
// Y-bus so all three see exactly the same circuit.

#include <map>
#include <string>
#include <vector>

#include "ssolab/system_spec.hpp"

namespace ssolab {

struct NetNode {
  std::string name;
  int bus_id = -1;  // spec bus id, or -1 for an internal section node
  int area = 1;
  Real b_shunt = 0.0;  // pu on system base, line charging included
};

struct NetEdge {
  std::string name;
  int from = 0;  // node indices
  int to = 0;
  Real r = 0.0;
  Real x = 0.0;
  Real ratio = 1.0;  // ideal transformer on the from side
};

struct NetLoadSite {
  int node = 0;
  Complex s = {0.0, 0.0};  // pu demand on system base
  LoadModel model = LoadModel::Dynamic;
};

struct ExpandedGraph {
  std::vector<NetNode> nodes;
  std::vector<NetEdge> edges;
  std::vector<NetLoadSite> loads;
  std::map<int, int> bus_node;  // spec bus id -> node index

  int node_of_bus(int bus_id) const { return bus_node.at(bus_id); }
};

ExpandedGraph expand_graph(const SystemSpec& spec);

}  // namespace ssolab
