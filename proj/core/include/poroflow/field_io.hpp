#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "poroflow/geometry.hpp"

namespace poroflow {

struct NamedScalar {
    std::string name;
    const ScalarField* field;
};

struct NamedVector {
    std::string name;
    const VectorField* field;
};

/// Legacy-VTK ASCII UNSTRUCTURED_GRID: scalars as POINT_DATA, vectors as
/// CELL_DATA. The title is truncated to one line of at most 255 characters.
void write_vtk(std::ostream& os, const Mesh& mesh, const std::string& title,
               const std::vector<NamedScalar>& scalars, const std::vector<NamedVector>& vectors = {});

/// `x,y,value` rows with a one-line header. Each entry of `comments` is
/// emitted first as a `# ...` line.
void write_csv(std::ostream& os, const ScalarField& field, const std::vector<std::string>& comments = {});

}  // namespace poroflow
