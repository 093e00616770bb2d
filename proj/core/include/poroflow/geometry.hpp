#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace poroflow {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct Tensor2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    static Tensor2 isotropic(double k) { return {k, 0.0, k}; }

    [[nodiscard]] Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    [[nodiscard]] Tensor2 scaled(double s) const { return {s * xx, s * xy, s * yy}; }
    /// Eigenvalues in ascending order.
    [[nodiscard]] std::array<double, 2> eigenvalues() const;
    [[nodiscard]] bool positive_definite() const;
};

using Triangle = std::array<std::size_t, 3>;

/// Boundary edge a -> b, oriented counter-clockwise around the domain so the
/// outward normal is (dy, -dx) / |edge|.
struct BoundaryEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string label;
};

enum class TriangulationPattern {
    Diagonal,  // two triangles per cell, split along the (0,0)-(1,1) diagonal
    Crossed,   // four triangles per cell around an added centre node
};

struct Mesh {
    std::vector<Point> nodes;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double length = 0.0;
    double height = 0.0;
    /// Effective (snapped) production-well length; 0 when the mesh has no well.
    double well_length = 0.0;

    [[nodiscard]] std::size_t node_count() const noexcept { return nodes.size(); }
    [[nodiscard]] std::size_t triangle_count() const noexcept { return triangles.size(); }
    [[nodiscard]] double signed_area(std::size_t t) const;
    [[nodiscard]] Point centroid(std::size_t t) const;
    [[nodiscard]] double edge_length(const BoundaryEdge& e) const;
    [[nodiscard]] Vec2 outward_normal(const BoundaryEdge& e) const;
    /// Distinct labels in order of first appearance.
    [[nodiscard]] std::vector<std::string> labels() const;
    [[nodiscard]] bool has_label(const std::string& label) const;
    /// Nodes touched by edges carrying `label`, sorted and unique.
    [[nodiscard]] std::vector<std::size_t> label_nodes(const std::string& label) const;
    /// Gradients of the three P1 shape functions on triangle t.
    [[nodiscard]] std::array<Vec2, 3> shape_gradients(std::size_t t) const;

    /// Throws InvalidArgument when a structural invariant fails: index range,
    /// positive areas, boundary edges covering the topological boundary once.
    void validate() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Rectangle [0,L] x [0,H]; sides tagged "left", "right", "bottom", "top".
MeshPtr make_rectangle_mesh(double L, double H, std::size_t nx, std::size_t ny,
                            TriangulationPattern pattern = TriangulationPattern::Diagonal);

struct ReservoirGeometry {
    double L = 100.0;
    double H = 30.0;
    double W = 0.2;
    std::size_t nx = 100;
    std::size_t ny = 30;
    /// y-coordinate of the well centre; H/2 when unset.
    std::optional<double> well_center;
    TriangulationPattern pattern = TriangulationPattern::Diagonal;
};

/// Reservoir mesh with "inlet" (left side), "well" (contiguous segment on the
/// right side, snapped outward to whole edges) and "wall" (everything else).
/// Throws BadDimensions for non-positive sizes, W >= H, or nx/ny == 0.
MeshPtr make_reservoir_mesh(const ReservoirGeometry& geometry);

/// Sum of edge lengths tagged `label`. Throws UnknownLabel.
double boundary_measure(const Mesh& mesh, const std::string& label);

class ScalarField {
public:
    ScalarField(MeshPtr mesh, std::vector<double> values);
    ScalarField(MeshPtr mesh, const std::function<double(Point)>& f);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

class VectorField {
public:
    VectorField(MeshPtr mesh, std::vector<Vec2> values);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] const std::vector<Vec2>& values() const noexcept { return values_; }
    [[nodiscard]] const Vec2& operator[](std::size_t t) const { return values_[t]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::vector<double> magnitudes() const;

private:
    MeshPtr mesh_;
    std::vector<Vec2> values_;
};

/// P1 interpolation at `point`. Throws OutOfDomain when no triangle contains it
/// (within a relative tolerance of 1e-12 on barycentric coordinates).
double interpolate(const ScalarField& field, Point point);

/// One symmetric tensor per triangle, each with eigenvalues in [k1, k2].
class PermeabilityField {
public:
    /// Throws InvalidArgument on asymmetric bounds, k1 <= 0, or any tensor
    /// whose eigenvalues leave [k1, k2].
    PermeabilityField(std::vector<Tensor2> tensors, double k1, double k2);

    static PermeabilityField uniform(const Mesh& mesh, double k);
    static PermeabilityField uniform(const Mesh& mesh, const Tensor2& k);

    [[nodiscard]] const std::vector<Tensor2>& tensors() const noexcept { return tensors_; }
    [[nodiscard]] const Tensor2& operator[](std::size_t t) const { return tensors_[t]; }
    [[nodiscard]] std::size_t size() const noexcept { return tensors_.size(); }
    [[nodiscard]] double k1() const noexcept { return k1_; }
    [[nodiscard]] double k2() const noexcept { return k2_; }

private:
    std::vector<Tensor2> tensors_;
    double k1_;
    double k2_;
};

using SpatialFunction = std::function<double(Point)>;

inline SpatialFunction constant(double value) {
    return [value](Point) { return value; };
}

struct PressureSegment {
    std::string label;
    SpatialFunction pressure;  // prescribed p [Pa]
};

struct VelocitySegment {
    std::string label;
    SpatialFunction normal_velocity;  // prescribed v.n [m/s]; negative = inflow
};

/// Partition of the boundary labels into pressure (Gamma_p) and normal
/// velocity (Gamma_v) segments.
struct BoundarySpec {
    std::vector<PressureSegment> pressure;
    std::vector<VelocitySegment> velocity;

    /// Throws InvalidArgument unless every mesh label appears in exactly one
    /// of the two lists and every listed label exists on the mesh.
    void validate(const Mesh& mesh) const;

    [[nodiscard]] const PressureSegment* find_pressure(const std::string& label) const;
    [[nodiscard]] const VelocitySegment* find_velocity(const std::string& label) const;
    [[nodiscard]] bool same_partition(const BoundarySpec& other) const;
};

/// Reservoir boundary conditions: p_inj on "inlet", p_atm on "well", no flow on "wall".
BoundarySpec reservoir_bcs(double p_inj, double p_atm);

}  // namespace poroflow
