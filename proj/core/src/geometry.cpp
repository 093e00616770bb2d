#include "poroflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "poroflow/errors.hpp"

namespace poroflow {

std::array<double, 2> Tensor2::eigenvalues() const {
    const double mean = 0.5 * (xx + yy);
    const double half_diff = 0.5 * (xx - yy);
    const double radius = std::hypot(half_diff, xy);
    return {mean - radius, mean + radius};
}

bool Tensor2::positive_definite() const {
    return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yy) && xx > 0.0 &&
           xx * yy - xy * xy > 0.0;
}

double Mesh::signed_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Point& a = nodes[tri[0]];
    const Point& b = nodes[tri[1]];
    const Point& c = nodes[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::centroid(std::size_t t) const {
    const auto& tri = triangles[t];
    const Point& a = nodes[tri[0]];
    const Point& b = nodes[tri[1]];
    const Point& c = nodes[tri[2]];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double Mesh::edge_length(const BoundaryEdge& e) const {
    const Point& a = nodes[e.a];
    const Point& b = nodes[e.b];
    return std::hypot(b.x - a.x, b.y - a.y);
}

Vec2 Mesh::outward_normal(const BoundaryEdge& e) const {
    const Point& a = nodes[e.a];
    const Point& b = nodes[e.b];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    return {(b.y - a.y) / len, -(b.x - a.x) / len};
}

std::vector<std::string> Mesh::labels() const {
    std::vector<std::string> out;
    for (const auto& e : boundary_edges) {
        if (std::find(out.begin(), out.end(), e.label) == out.end()) out.push_back(e.label);
    }
    return out;
}

bool Mesh::has_label(const std::string& label) const {
    return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                       [&](const BoundaryEdge& e) { return e.label == label; });
}

std::vector<std::size_t> Mesh::label_nodes(const std::string& label) const {
    std::vector<std::size_t> out;
    for (const auto& e : boundary_edges) {
        if (e.label != label) continue;
        out.push_back(e.a);
        out.push_back(e.b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::array<Vec2, 3> Mesh::shape_gradients(std::size_t t) const {
    const auto& tri = triangles[t];
    const Point& p0 = nodes[tri[0]];
    const Point& p1 = nodes[tri[1]];
    const Point& p2 = nodes[tri[2]];
    const double twice_area = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    return {Vec2{(p1.y - p2.y) / twice_area, (p2.x - p1.x) / twice_area},
            Vec2{(p2.y - p0.y) / twice_area, (p0.x - p2.x) / twice_area},
            Vec2{(p0.y - p1.y) / twice_area, (p1.x - p0.x) / twice_area}};
}

void Mesh::validate() const {
    const std::size_t n = nodes.size();
    std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (triangles[t][k] >= n) {
                throw Error(ErrorKind::InvalidArgument, "mesh: triangle node index out of range");
            }
        }
        if (!(signed_area(t) > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "mesh: triangle with non-positive signed area");
        }
        for (std::size_t k = 0; k < 3; ++k) {
            auto a = triangles[t][k];
            auto b = triangles[t][(k + 1) % 3];
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> topological;
    for (const auto& [edge, count] : edge_use) {
        if (count == 1) topological.insert(edge);
    }
    std::set<std::pair<std::size_t, std::size_t>> tagged;
    for (const auto& e : boundary_edges) {
        if (e.a >= n || e.b >= n) {
            throw Error(ErrorKind::InvalidArgument, "mesh: boundary edge node index out of range");
        }
        if (!tagged.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second) {
            throw Error(ErrorKind::InvalidArgument, "mesh: boundary edge tagged twice");
        }
    }
    if (tagged != topological) {
        throw Error(ErrorKind::InvalidArgument, "mesh: tagged edges do not match the topological boundary");
    }
}

namespace {

using SideLabeler = std::function<std::string(int side, std::size_t index)>;
// side: 0 bottom, 1 right, 2 top, 3 left; index counts edges along the side
// from its low coordinate end.

std::shared_ptr<Mesh> build_rectangle(double L, double H, std::size_t nx, std::size_t ny,
                                      TriangulationPattern pattern, const SideLabeler& labeler) {
    auto mesh = std::make_shared<Mesh>();
    mesh->nx = nx;
    mesh->ny = ny;
    mesh->length = L;
    mesh->height = H;

    const double hx = L / static_cast<double>(nx);
    const double hy = H / static_cast<double>(ny);
    auto grid = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };

    mesh->nodes.reserve((nx + 1) * (ny + 1) + (pattern == TriangulationPattern::Crossed ? nx * ny : 0));
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            // Pin the far sides exactly so perimeter sums are exact.
            const double x = (i == nx) ? L : static_cast<double>(i) * hx;
            const double y = (j == ny) ? H : static_cast<double>(j) * hy;
            mesh->nodes.push_back({x, y});
        }
    }

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const auto n00 = grid(i, j);
            const auto n10 = grid(i + 1, j);
            const auto n01 = grid(i, j + 1);
            const auto n11 = grid(i + 1, j + 1);
            if (pattern == TriangulationPattern::Diagonal) {
                mesh->triangles.push_back({n00, n10, n11});
                mesh->triangles.push_back({n00, n11, n01});
            } else {
                const Point& a = mesh->nodes[n00];
                const Point& b = mesh->nodes[n11];
                const std::size_t c = mesh->nodes.size();
                mesh->nodes.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
                mesh->triangles.push_back({n00, n10, c});
                mesh->triangles.push_back({n10, n11, c});
                mesh->triangles.push_back({n11, n01, c});
                mesh->triangles.push_back({n01, n00, c});
            }
        }
    }

    // Counter-clockwise walk: bottom, right, top, left.
    for (std::size_t i = 0; i < nx; ++i) {
        mesh->boundary_edges.push_back({grid(i, 0), grid(i + 1, 0), labeler(0, i)});
    }
    for (std::size_t j = 0; j < ny; ++j) {
        mesh->boundary_edges.push_back({grid(nx, j), grid(nx, j + 1), labeler(1, j)});
    }
    for (std::size_t i = nx; i-- > 0;) {
        mesh->boundary_edges.push_back({grid(i + 1, ny), grid(i, ny), labeler(2, i)});
    }
    for (std::size_t j = ny; j-- > 0;) {
        mesh->boundary_edges.push_back({grid(0, j + 1), grid(0, j), labeler(3, j)});
    }
    return mesh;
}

}  // namespace

MeshPtr make_rectangle_mesh(double L, double H, std::size_t nx, std::size_t ny, TriangulationPattern pattern) {
    if (!(L > 0.0 && H > 0.0) || nx == 0 || ny == 0) {
        throw Error(ErrorKind::BadDimensions, "rectangle mesh needs L, H > 0 and nx, ny >= 1");
    }
    static const std::array<std::string, 4> names{"bottom", "right", "top", "left"};
    return build_rectangle(L, H, nx, ny, pattern,
                           [](int side, std::size_t) { return names[static_cast<std::size_t>(side)]; });
}

MeshPtr make_reservoir_mesh(const ReservoirGeometry& g) {
    if (!(g.L > 0.0 && g.H > 0.0 && g.W > 0.0)) {
        throw Error(ErrorKind::BadDimensions, "reservoir: L, H and W must be positive");
    }
    if (!(g.W < g.H)) {
        throw Error(ErrorKind::BadDimensions, "reservoir: well width W must be smaller than H");
    }
    if (g.nx == 0 || g.ny == 0) {
        throw Error(ErrorKind::BadDimensions, "reservoir: nx and ny must be at least 1");
    }
    const double hy = g.H / static_cast<double>(g.ny);
    // Snap outward to whole edges; the small slack keeps exact multiples exact.
    const auto well_edges = static_cast<std::size_t>(std::ceil(g.W / hy * (1.0 - 1e-12)));
    if (well_edges == 0 || well_edges > g.ny) {
        std::ostringstream os;
        os << "reservoir: well width " << g.W << " cannot be resolved with ny = " << g.ny;
        throw Error(ErrorKind::BadDimensions, os.str());
    }
    const double center = g.well_center.value_or(0.5 * g.H);
    if (!(center >= 0.0 && center <= g.H)) {
        throw Error(ErrorKind::BadDimensions, "reservoir: well centre must lie on the right side");
    }
    const double start_f = std::round(center / hy - 0.5 * static_cast<double>(well_edges));
    const auto max_start = static_cast<double>(g.ny - well_edges);
    const auto start = static_cast<std::size_t>(std::clamp(start_f, 0.0, max_start));

    auto mesh = build_rectangle(g.L, g.H, g.nx, g.ny, g.pattern, [&](int side, std::size_t index) -> std::string {
        if (side == 3) return "inlet";
        if (side == 1 && index >= start && index < start + well_edges) return "well";
        return "wall";
    });
    mesh->well_length = boundary_measure(*mesh, "well");
    return mesh;
}

double boundary_measure(const Mesh& mesh, const std::string& label) {
    double total = 0.0;
    bool found = false;
    for (const auto& e : mesh.boundary_edges) {
        if (e.label != label) continue;
        found = true;
        total += mesh.edge_length(e);
    }
    if (!found) throw Error(ErrorKind::UnknownLabel, "no boundary segment labelled '" + label + "'");
    return total;
}

ScalarField::ScalarField(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_ || values_.size() != mesh_->node_count()) {
        throw Error(ErrorKind::InvalidArgument, "scalar field size does not match the mesh node count");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "scalar field has non-finite values");
    }
}

ScalarField::ScalarField(MeshPtr mesh, const std::function<double(Point)>& f) : mesh_(std::move(mesh)) {
    if (!mesh_) throw Error(ErrorKind::InvalidArgument, "scalar field needs a mesh");
    values_.reserve(mesh_->node_count());
    for (const auto& p : mesh_->nodes) values_.push_back(f(p));
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "scalar field has non-finite values");
    }
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

VectorField::VectorField(MeshPtr mesh, std::vector<Vec2> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_ || values_.size() != mesh_->triangle_count()) {
        throw Error(ErrorKind::InvalidArgument, "vector field size does not match the mesh triangle count");
    }
    for (const auto& v : values_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw Error(ErrorKind::InvalidArgument, "vector field has non-finite values");
        }
    }
}

std::vector<double> VectorField::magnitudes() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(std::hypot(v.x, v.y));
    return out;
}

double interpolate(const ScalarField& field, Point point) {
    const Mesh& mesh = field.mesh();
    constexpr double tol = 1e-12;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double l1 = ((point.x - a.x) * (c.y - a.y) - (c.x - a.x) * (point.y - a.y)) / det;
        const double l2 = ((b.x - a.x) * (point.y - a.y) - (point.x - a.x) * (b.y - a.y)) / det;
        const double l0 = 1.0 - l1 - l2;
        if (l0 >= -tol && l1 >= -tol && l2 >= -tol) {
            return l0 * field[tri[0]] + l1 * field[tri[1]] + l2 * field[tri[2]];
        }
    }
    std::ostringstream os;
    os << "point (" << point.x << ", " << point.y << ") is outside the mesh";
    throw Error(ErrorKind::OutOfDomain, os.str());
}

PermeabilityField::PermeabilityField(std::vector<Tensor2> tensors, double k1, double k2)
    : tensors_(std::move(tensors)), k1_(k1), k2_(k2) {
    if (!(k1_ > 0.0 && k1_ <= k2_ && std::isfinite(k2_))) {
        throw Error(ErrorKind::InvalidArgument, "permeability bounds need 0 < k1 <= k2");
    }
    const double lo = k1_ * (1.0 - 1e-12);
    const double hi = k2_ * (1.0 + 1e-12);
    for (std::size_t t = 0; t < tensors_.size(); ++t) {
        const auto ev = tensors_[t].eigenvalues();
        if (!(ev[0] >= lo && ev[1] <= hi)) {
            std::ostringstream os;
            os << "permeability on triangle " << t << " has eigenvalues (" << ev[0] << ", " << ev[1]
               << ") outside [" << k1_ << ", " << k2_ << "]";
            throw Error(ErrorKind::InvalidArgument, os.str());
        }
    }
}

PermeabilityField PermeabilityField::uniform(const Mesh& mesh, double k) {
    return {std::vector<Tensor2>(mesh.triangle_count(), Tensor2::isotropic(k)), k, k};
}

PermeabilityField PermeabilityField::uniform(const Mesh& mesh, const Tensor2& k) {
    const auto ev = k.eigenvalues();
    return {std::vector<Tensor2>(mesh.triangle_count(), k), ev[0], ev[1]};
}

void BoundarySpec::validate(const Mesh& mesh) const {
    std::map<std::string, int> seen;
    for (const auto& s : pressure) {
        if (!s.pressure) throw Error(ErrorKind::InvalidArgument, "pressure segment '" + s.label + "' has no data");
        ++seen[s.label];
    }
    for (const auto& s : velocity) {
        if (!s.normal_velocity) {
            throw Error(ErrorKind::InvalidArgument, "velocity segment '" + s.label + "' has no data");
        }
        ++seen[s.label];
    }
    for (const auto& [label, count] : seen) {
        if (!mesh.has_label(label)) {
            throw Error(ErrorKind::UnknownLabel, "boundary condition on unknown segment '" + label + "'");
        }
        if (count != 1) {
            throw Error(ErrorKind::InvalidArgument, "segment '" + label + "' has more than one boundary condition");
        }
    }
    for (const auto& label : mesh.labels()) {
        if (!seen.contains(label)) {
            throw Error(ErrorKind::InvalidArgument, "segment '" + label + "' has no boundary condition");
        }
    }
}

const PressureSegment* BoundarySpec::find_pressure(const std::string& label) const {
    for (const auto& s : pressure) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

const VelocitySegment* BoundarySpec::find_velocity(const std::string& label) const {
    for (const auto& s : velocity) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

bool BoundarySpec::same_partition(const BoundarySpec& other) const {
    auto labels = [](const auto& segments) {
        std::set<std::string> out;
        for (const auto& s : segments) out.insert(s.label);
        return out;
    };
    return labels(pressure) == labels(other.pressure) && labels(velocity) == labels(other.velocity);
}

BoundarySpec reservoir_bcs(double p_inj, double p_atm) {
    BoundarySpec bcs;
    bcs.pressure.push_back({"inlet", constant(p_inj)});
    bcs.pressure.push_back({"well", constant(p_atm)});
    bcs.velocity.push_back({"wall", constant(0.0)});
    return bcs;
}

}  // namespace poroflow
