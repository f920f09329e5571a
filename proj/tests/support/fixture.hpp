#pragma once

#include <memory>
#include <string>

#include "tgm/channel_registry.hpp"
#include "tgm/csv_loader.hpp"

namespace tgm::testing {

// The five-edge reference graph: persons 1, 2, 3 and item 4.
inline const std::string kFixtureEdges =
    "source,etype,target,time,weight,source_location,target_location\n"
    "1,email,2,100,1,,\n"
    "1,email,2,200,1,,\n"
    "2,phone,3,150,1,,\n"
    "1,sell,4,300,2,A,B\n"
    "3,buy,4,400,5,B,A\n";

inline const std::string kFixtureNodes =
    "node,kind,label\n"
    "1,Person,\n"
    "2,Person,\n"
    "3,Person,\n"
    "4,Item,\n";

inline std::shared_ptr<const TemporalMultigraph> fixture_graph() {
  return load_graph(kFixtureEdges, kFixtureNodes, ChannelRegistry::defaults()).graph;
}

// The fixture with the (1,2) email bundle thinned to its first edge.
inline std::shared_ptr<const TemporalMultigraph> thinned_fixture_graph() {
  const std::string edges =
      "source,etype,target,time,weight,source_location,target_location\n"
      "1,email,2,100,1,,\n"
      "2,phone,3,150,1,,\n"
      "1,sell,4,300,2,A,B\n"
      "3,buy,4,400,5,B,A\n";
  return load_graph(edges, kFixtureNodes, ChannelRegistry::defaults()).graph;
}

}  // namespace tgm::testing
