#include "volmap/mesh_gen.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Geometry>

namespace volmap::gen
{

io::RawMesh single_tet()
{
    io::RawMesh raw;
    raw.vertices.resize(4, 3);
    raw.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
    raw.tets = {{0, 1, 2, 3}};
    return raw;
}

io::RawMesh octahedron()
{
    io::RawMesh raw;
    raw.vertices.resize(7, 3);
    raw.vertices << 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    for (int x : {1, 2}) {
        for (int y : {3, 4}) {
            for (int z : {5, 6}) raw.tets.push_back({0, x, y, z});
        }
    }
    return raw;
}

io::RawMesh ball(int refine, std::uint64_t seed, double jitter)
{
    if (refine < 1) throw MeshError("ball refinement must be >= 1");
    const int cells = 2 * refine;
    const int side = cells + 1;
    const double h = 2.0 / cells;
    auto index = [side](int i, int j, int k) { return (i * side + j) * side + k; };

    io::RawMesh raw;
    raw.vertices.resize(side * side * side, 3);
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            for (int k = 0; k < side; ++k) {
                raw.vertices.row(index(i, j, k)) << -1 + i * h, -1 + j * h, -1 + k * h;
            }
        }
    }

    // Kuhn split along the diagonal from corner 0 to corner 7; the axis
    // permutations give the 6 tets.
    static constexpr std::array<std::array<int, 3>, 6> kPerms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    raw.tets.reserve(static_cast<std::size_t>(6) * cells * cells * cells);
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            for (int k = 0; k < cells; ++k) {
                const int fi = i < refine, fj = j < refine, fk = k < refine;
                auto corner = [&](int a, int b, int c) {
                    return index(i + (a ^ fi), j + (b ^ fj), k + (c ^ fk));
                };
                for (const auto& perm : kPerms) {
                    std::array<int, 3> p{0, 0, 0};
                    Tet tet;
                    tet[0] = corner(0, 0, 0);
                    for (int s = 0; s < 3; ++s) {
                        p[perm[s]] = 1;
                        tet[s + 1] = corner(p[0], p[1], p[2]);
                    }
                    raw.tets.push_back(tet);
                }
            }
        }
    }

    if (jitter > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int i = 1; i < cells; ++i) {
            for (int j = 1; j < cells; ++j) {
                for (int k = 1; k < cells; ++k) {
                    for (int s = 0; s < 3; ++s) raw.vertices(index(i, j, k), s) += jitter * h * unit(rng);
                }
            }
        }
    }

    for (Eigen::Index r = 0; r < raw.vertices.rows(); ++r) {
        const double n2 = raw.vertices.row(r).norm();
        if (n2 > 0) raw.vertices.row(r) *= raw.vertices.row(r).lpNorm<Eigen::Infinity>() / n2;
    }
    // Mirrored cells come out with negative orientation.
    for (auto& tet : raw.tets) {
        const double vol = signed_volume(raw.vertices.row(tet[0]), raw.vertices.row(tet[1]),
                                         raw.vertices.row(tet[2]), raw.vertices.row(tet[3]));
        if (vol < 0) std::swap(tet[0], tet[1]);
    }
    return raw;
}

io::RawMesh random_convex(int refine, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    io::RawMesh raw = ball(refine, rng(), 0.1);
    std::uniform_real_distribution<double> axis(0.6, 1.4);
    std::normal_distribution<double> normal;
    const Vec3 semi(axis(rng), axis(rng), axis(rng));
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    q.normalize();
    const Mat3 a = q.toRotationMatrix() * semi.asDiagonal();
    raw.vertices = (raw.vertices * a.transpose()).eval();
    return raw;
}

}  // namespace volmap::gen
