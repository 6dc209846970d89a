#include "crossview/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace crossview {

namespace {

constexpr double kSingularTol = 1e-12;
constexpr double kCollinearTol = 1e-9;

Eigen::Matrix3d to_eigen(const std::array<double, 9>& m) {
    Eigen::Matrix3d out;
    out << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
    return out;
}

std::array<double, 9> from_eigen(const Eigen::Matrix3d& m) {
    return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

}  // namespace

double manhattan_distance(const Point2& p, const Point2& q) {
    return std::abs(p.x - q.x) + std::abs(p.y - q.y);
}

double euclidean_distance(const Point2& p, const Point2& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

double distance(const Point2& p, const Point2& q, Metric metric) {
    return metric == Metric::manhattan ? manhattan_distance(p, q) : euclidean_distance(p, q);
}

Metric metric_from_string(const std::string& name) {
    if (name == "manhattan") return Metric::manhattan;
    if (name == "euclidean") return Metric::euclidean;
    throw Error("unknown metric '" + name + "' (expected manhattan or euclidean)");
}

Homography Homography::identity() { return canonical_homography({1, 0, 0, 0, 1, 0, 0, 0, 1}); }

Homography Homography::translation(double dx, double dy) {
    return canonical_homography({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

Homography canonical_homography(const std::array<double, 9>& coeffs) {
    double norm = 0.0;
    for (double c : coeffs) norm += c * c;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error("homography: cannot canonicalize zero or non-finite matrix");
    }
    Homography h;
    // Skip the rescale when already unit norm so canonicalization is a fixed
    // point and file round trips stay byte-identical.
    if (std::abs(norm - 1.0) < 1e-15) {
        h.m = coeffs;
    } else {
        for (int i = 0; i < 9; ++i) h.m[i] = coeffs[i] / norm;
    }
    for (int i = 0; i < 9; ++i) {
        if (h.m[i] != 0.0) {
            if (h.m[i] < 0.0) {
                for (int j = 0; j < 9; ++j) h.m[j] = -h.m[j];
            }
            break;
        }
    }
    if (std::abs(determinant(h)) <= kSingularTol) {
        throw Error("homography: singular matrix");
    }
    return h;
}

double determinant(const Homography& h) {
    const auto& m = h.m;
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Point2 apply_homography(const Homography& h, const Point2& p) {
    const auto& m = h.m;
    const double w = m[6] * p.x + m[7] * p.y + m[8];
    if (std::abs(w) <= kSingularTol) {
        throw Error("homography: point maps to the line at infinity");
    }
    return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography invert_homography(const Homography& h) {
    Eigen::Matrix3d m = to_eigen(h.m);
    if (std::abs(m.determinant()) <= kSingularTol) {
        throw Error("homography: singular matrix, cannot invert");
    }
    Eigen::Matrix3d inv = m.inverse();
    return canonical_homography(from_eigen(inv));
}

namespace {

// Hartley normalization: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Point2>& pts) {
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double mean_dist = 0;
    for (const auto& p : pts) mean_dist += std::hypot(p.x - mx, p.y - my);
    mean_dist /= static_cast<double>(pts.size());
    const double s = mean_dist > 0 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
    return t;
}

Point2 apply_affine(const Eigen::Matrix3d& t, const Point2& p) {
    return {t(0, 0) * p.x + t(0, 2), t(1, 1) * p.y + t(1, 2)};
}

double triangle_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

Homography estimate_homography(const std::vector<std::pair<Point2, Point2>>& pairs) {
    const size_t n = pairs.size();
    if (n < 4) {
        throw Error("estimate_homography: need at least 4 point pairs, got " + std::to_string(n));
    }
    std::vector<Point2> src(n), dst(n);
    for (size_t i = 0; i < n; ++i) {
        src[i] = pairs[i].first;
        dst[i] = pairs[i].second;
        if (!is_finite(src[i]) || !is_finite(dst[i])) {
            throw Error("estimate_homography: non-finite point in pair " + std::to_string(i));
        }
    }

    const Eigen::Matrix3d t_src = normalizing_transform(src);
    const Eigen::Matrix3d t_dst = normalizing_transform(dst);

    std::vector<Point2> src_n(n), dst_n(n);
    for (size_t i = 0; i < n; ++i) {
        src_n[i] = apply_affine(t_src, src[i]);
        dst_n[i] = apply_affine(t_dst, dst[i]);
    }

    // Collinearity check on normalized source coordinates.
    for (size_t i = 0; i + 2 < n; ++i) {
        for (size_t j = i + 1; j + 1 < n; ++j) {
            for (size_t k = j + 1; k < n; ++k) {
                if (triangle_area(src_n[i], src_n[j], src_n[k]) <= kCollinearTol) {
                    throw Error("estimate_homography: degenerate configuration "
                                "(collinear or coincident source points)");
                }
            }
        }
    }

    Eigen::MatrixXd a(2 * n, 9);
    for (size_t i = 0; i < n; ++i) {
        const double x = src_n[i].x, y = src_n[i].y;
        const double u = dst_n[i].x, v = dst_n[i].y;
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

    const Eigen::Matrix3d result = t_dst.inverse() * hn * t_src;
    return canonical_homography(from_eigen(result));
}

Homography read_homography(std::istream& in) {
    std::array<double, 9> coeffs{};
    for (int i = 0; i < 9; ++i) {
        if (!(in >> coeffs[i])) {
            throw Error("homography file: expected 9 numeric coefficients");
        }
    }
    return canonical_homography(coeffs);
}

void write_homography(std::ostream& out, const Homography& h) {
    out << std::setprecision(17);
    for (int r = 0; r < 3; ++r) {
        out << h.at(r, 0) << ' ' << h.at(r, 1) << ' ' << h.at(r, 2) << '\n';
    }
}

Homography load_homography(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open homography file: " + path);
    return read_homography(in);
}

void save_homography(const std::string& path, const Homography& h) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write homography file: " + path);
    write_homography(out, h);
}

void validate_camera(const CameraModel& cam) {
    if (!(cam.fx > 0) || !(cam.fy > 0)) {
        throw Error("camera: focal lengths must be positive");
    }
    Eigen::Matrix3d r = to_eigen(cam.rotation);
    const double err = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (err > 1e-9) {
        throw Error("camera: rotation is not orthonormal (max deviation " + std::to_string(err) + ")");
    }
}

Point3 world_to_camera(const CameraModel& cam, const Point3& x) {
    const auto& r = cam.rotation;
    const auto& t = cam.translation;
    return {r[0] * x.x + r[1] * x.y + r[2] * x.z + t[0],
            r[3] * x.x + r[4] * x.y + r[5] * x.z + t[1],
            r[6] * x.x + r[7] * x.y + r[8] * x.z + t[2]};
}

Point2 project_point(const CameraModel& cam, const Point3& x) {
    const Point3 c = world_to_camera(cam, x);
    if (c.z <= 1e-9) {
        throw Error("project_point: point is behind the camera");
    }
    return {cam.fx * c.x / c.z + cam.cx, cam.fy * c.y / c.z + cam.cy};
}

CameraModel make_look_at_camera(double fx, double fy, double cx, double cy,
                                const Point3& pos, const Point3& target, const Point3& up) {
    Eigen::Vector3d p(pos.x, pos.y, pos.z);
    Eigen::Vector3d fwd = Eigen::Vector3d(target.x, target.y, target.z) - p;
    if (fwd.norm() < 1e-12) throw Error("look_at: camera position equals target");
    fwd.normalize();
    Eigen::Vector3d u(up.x, up.y, up.z);
    Eigen::Vector3d right = fwd.cross(u);
    if (right.norm() < 1e-9) throw Error("look_at: view direction parallel to up vector");
    right.normalize();
    const Eigen::Vector3d down = fwd.cross(right).normalized();

    CameraModel cam;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = cx;
    cam.cy = cy;
    Eigen::Matrix3d r;
    r.row(0) = right;
    r.row(1) = down;
    r.row(2) = fwd;
    const Eigen::Vector3d t = -r * p;
    cam.rotation = from_eigen(r);
    cam.translation = {t(0), t(1), t(2)};
    validate_camera(cam);
    return cam;
}

}  // namespace crossview
