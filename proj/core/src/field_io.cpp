#include "poroflow/field_io.hpp"

#include <algorithm>
#include <ostream>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

class PrecisionGuard {
public:
    explicit PrecisionGuard(std::ostream& os) : os_(os), precision_(os.precision()) { os_.precision(17); }
    ~PrecisionGuard() { os_.precision(precision_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    std::ostream& os_;
    std::streamsize precision_;
};

std::string vtk_name(std::string name) {
    std::replace(name.begin(), name.end(), ' ', '_');
    return name.empty() ? std::string("field") : name;
}

}  // namespace

void write_vtk(std::ostream& os, const Mesh& mesh, const std::string& title, const std::vector<NamedScalar>& scalars,
               const std::vector<NamedVector>& vectors) {
    PrecisionGuard guard(os);
    std::string header = title.substr(0, title.find('\n'));
    if (header.size() > 255) header.resize(255);
    if (header.empty()) header = "poroflow";

    os << "# vtk DataFile Version 3.0\n" << header << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.nodes) os << p.x << ' ' << p.y << " 0\n";

    const auto nt = mesh.triangle_count();
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (std::size_t t = 0; t < nt; ++t) os << "5\n";

    if (!scalars.empty()) {
        os << "POINT_DATA " << mesh.node_count() << '\n';
        for (const auto& s : scalars) {
            if (s.field == nullptr || s.field->size() != mesh.node_count()) {
                throw Error(ErrorKind::InvalidArgument, "VTK scalar '" + s.name + "' does not match the mesh");
            }
            os << "SCALARS " << vtk_name(s.name) << " double 1\nLOOKUP_TABLE default\n";
            for (double v : s.field->values()) os << v << '\n';
        }
    }
    if (!vectors.empty()) {
        os << "CELL_DATA " << nt << '\n';
        for (const auto& v : vectors) {
            if (v.field == nullptr || v.field->size() != nt) {
                throw Error(ErrorKind::InvalidArgument, "VTK vector '" + v.name + "' does not match the mesh");
            }
            os << "VECTORS " << vtk_name(v.name) << " double\n";
            for (const auto& w : v.field->values()) os << w.x << ' ' << w.y << " 0\n";
        }
    }
}

void write_csv(std::ostream& os, const ScalarField& field, const std::vector<std::string>& comments) {
    PrecisionGuard guard(os);
    for (const auto& c : comments) os << "# " << c << '\n';
    os << "x,y,value\n";
    const Mesh& mesh = field.mesh();
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        os << mesh.nodes[i].x << ',' << mesh.nodes[i].y << ',' << field[i] << '\n';
    }
}

}  // namespace poroflow
