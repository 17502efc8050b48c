#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace volmap
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// n x 3 table of vertex images. Column s is the coordinate vector f^s and
/// row t is the image of vertex t. Storage is column-major, so the raw data
/// is exactly vec(f) = [f^1; f^2; f^3].
using VertexMap = Eigen::Matrix<double, Eigen::Dynamic, 3>;

using SparseMatrix = Eigen::SparseMatrix<double>;

using Tet = std::array<int, 4>;
using Tri = std::array<int, 3>;

/// Input or topology validation failure (bad file, degenerate tet, ...).
class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver stage.
class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string& stage, const std::string& msg)
        : std::runtime_error(stage + ": " + msg), stage_(stage)
    {
    }

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Flattened view of a map as the column-stacked 3n vector vec(f).
inline Eigen::Map<Eigen::VectorXd> vec(VertexMap& f)
{
    return {f.data(), f.size()};
}

inline Eigen::Map<const Eigen::VectorXd> vec(const VertexMap& f)
{
    return {f.data(), f.size()};
}

}  // namespace volmap
