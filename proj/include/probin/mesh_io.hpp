#pragma once

#include <iosfwd>
#include <string>

#include "probin/domain.hpp"

namespace probin {

// Plain-text mesh format:
//
//   mesh <interval|radial|planar> <dim>
//   nodes <N>
//   <x> [<y>]                     one line per node
//   elements <M>
//   <i> <j> [<k>] [COATING]       0-based, COATING tags a layer element
//   boundary <K>
//   <i> [<j>] <DIRICHLET|ROBIN|OUTER>
//
// Lines starting with '#' and blank lines are ignored.

DiscreteDomain read_mesh(std::istream& in);
DiscreteDomain read_mesh_file(const std::string& path);

/// Writes with 17 significant digits so read_mesh(write_mesh(d)) reproduces d.
void write_mesh(std::ostream& out, const DiscreteDomain& domain);
void write_mesh_file(const std::string& path, const DiscreteDomain& domain);

}  // namespace probin
