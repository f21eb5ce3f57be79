#include "ssolab/network_graph.hpp"

namespace ssolab {

ExpandedGraph expand_graph(const SystemSpec& spec) {
  ExpandedGraph g;
  for (const auto& b : spec.buses) {
    NetNode n;
    n.name = "bus" + std::to_string(b.id);
    n.bus_id = b.id;
    n.area = b.area;
    n.b_shunt = b.shunt_b;
    g.bus_node[b.id] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(n);
  }

  for (const auto& br : spec.branches) {
    // collapse parallel circuits into one equivalent
    const Real re = br.r / br.circuits;
    const Real xe = br.x / br.circuits;
    const Real be = br.b * br.circuits;
    const int n = br.n_sections;
    const std::string tag = std::to_string(br.from) + "-" + std::to_string(br.to);

    int prev = g.node_of_bus(br.from);
    g.nodes[prev].b_shunt += be / (2.0 * n);
    for (int k = 1; k <= n; ++k) {
      int next;
      if (k == n) {
        next = g.node_of_bus(br.to);
        g.nodes[next].b_shunt += be / (2.0 * n);
      } else {
        NetNode mid;
        mid.name = tag + ":" + std::to_string(k);
        mid.bus_id = -1;
        mid.area = g.nodes[prev].area;
        mid.b_shunt = be / n;  // half from each adjacent section
        next = static_cast<int>(g.nodes.size());
        g.nodes.push_back(mid);
      }
      NetEdge e;
      e.name = n == 1 ? "line" + tag : "line" + tag + "." + std::to_string(k);
      e.from = prev;
      e.to = next;
      e.r = re / n;
      e.x = xe / n;
      g.edges.push_back(e);
      prev = next;
    }
  }

  for (const auto& tr : spec.transformers) {
    NetEdge e;
    e.name = "xfmr" + std::to_string(tr.from) + "-" + std::to_string(tr.to);
    e.from = g.node_of_bus(tr.from);
    e.to = g.node_of_bus(tr.to);
    e.r = tr.r;
    e.x = tr.x;
    e.ratio = tr.ratio;
    g.edges.push_back(e);
  }

  for (const auto& ld : spec.loads) {
    NetLoadSite site;
    site.node = g.node_of_bus(ld.bus);
    site.s = Complex(ld.p_mw, ld.q_mvar) / spec.s_base_mva;
    site.model = ld.model;
    g.loads.push_back(site);
  }
  return g;
}

}  // namespace ssolab
