#pragma once

#include "graphspde/graph.hpp"

#include <string>

namespace graphspde {

/// Dataset directory layout:
///   nodes.txt     node count (single integer)
///   edges.txt     one "u v" pair per line
///   labels.txt    optional, one integer per node
///   features.csv  optional, one comma-separated row per node
Graph load_dataset(const std::string& dir);
void save_dataset(const Graph& g, const std::string& dir);

} // namespace graphspde
