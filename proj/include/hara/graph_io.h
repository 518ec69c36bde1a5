#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hara/view_graph.h"

namespace hara {

// Line-oriented text format:
//   # comment
//   N <count>                               (first record)
//   E <i> <j> <qw> <qx> <qy> <qz> [inliers] (R_ij, scalar-first)
//   G <i> <qw> <qx> <qy> <qz>               (absolute rotation)
// Quaternions are written with 17 significant digits, so Save followed by
// Load reproduces the graph bit for bit.
ViewGraph ReadGraph(std::istream& in);
void WriteGraph(const ViewGraph& g, std::ostream& out);

ViewGraph LoadGraph(const std::string& path);
void SaveGraph(const ViewGraph& g, const std::string& path);

// Writes an "N" record followed by one "G" record per present rotation.
void WriteRotations(std::span<const std::optional<Rotation>> rotations,
                    std::ostream& out);
// Reads the "G" records of a graph-format file (edges are ignored).
std::vector<std::optional<Rotation>> LoadRotations(const std::string& path);

}  // namespace hara
